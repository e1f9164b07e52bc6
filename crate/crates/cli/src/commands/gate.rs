use super::{check_model_features, create_out, load_inputs, load_model, write_out};
use crate::args::GateArgs;
use crate::error::{CliError, CliResult, Outcome};
use ngfilter::audio::encode_wav;
use ngfilter::filters::{gate_rain, RainGateConfig};
use rayon::prelude::*;

pub fn gate(a: GateArgs) -> CliResult<Outcome> {
    let model = load_model(&a.model)?;
    check_model_features(&model)?;
    let cfg = RainGateConfig::new(model, a.threshold).map_err(|e| CliError::Usage(e.to_string()))?;
    let (segments, load_failures) = load_inputs(&a.input)?;
    let result = gate_rain(&segments, &cfg);
    for d in result.decisions.iter().filter(|d| d.error.is_some()) {
        eprintln!("{}: {}", d.segment, d.error.as_deref().unwrap_or_default());
    }

    create_out(&a.out)?;
    let encoded: Vec<(String, Vec<u8>)> = result
        .kept
        .par_iter()
        .map(|&i| (segments[i].id(), encode_wav(&segments[i].audio)))
        .collect();
    for (id, bytes) in encoded {
        write_out(&a.out, &format!("{id}.wav"), bytes)?;
    }
    write_out(&a.out, "gate_report.csv", result.to_csv())?;
    println!(
        "kept {}, dropped {}, failed {} of {} segments",
        result.kept.len(),
        result.dropped.len(),
        result.failed.len(),
        segments.len()
    );
    Ok(Outcome { failures: load_failures + result.failed.len() })
}
