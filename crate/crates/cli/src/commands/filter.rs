use super::{check_model_features, create_out, load_inputs, load_model, write_out};
use crate::args::FilterArgs;
use crate::error::{CliError, CliResult, Outcome};
use ngfilter::audio::{encode_wav, AudioBuffer, Segment};
use ngfilter::dsp::{apply_fir, design_highpass, mmse_stsa, DEFAULT_TAPS};
use ngfilter::features::HIGHPASS_CUTOFF;
use ngfilter::filters::{band_energy_db, filter_cicada, filter_cicada_band, CicadaAction};
use ngfilter::ml::TrainedModel;
use rayon::prelude::*;

struct Row {
    segment: String,
    probability: Option<f64>,
    action: &'static str,
    band: Option<(f64, f64)>,
    pre_db: Option<f64>,
    post_db: Option<f64>,
    audio: Option<AudioBuffer>,
    error: Option<String>,
}

enum Stop<'a> {
    Band(f64, f64),
    Detect(&'a TrainedModel, f64),
}

fn process(seg: &Segment, stop: &Stop, mmse: bool, highpass: bool) -> ngfilter::Result<Row> {
    let (audio, band, probability) = match *stop {
        Stop::Band(lo, hi) => (filter_cicada_band(&seg.audio, lo, hi)?, Some((lo, hi)), None),
        Stop::Detect(model, threshold) => {
            let outcome = filter_cicada(seg, model, threshold)?;
            if let Some(w) = &outcome.warning {
                eprintln!("{}: {w}", seg.id());
            }
            let band = match outcome.action {
                CicadaAction::Filtered { low, high } => Some((low, high)),
                CicadaAction::Untouched => None,
            };
            (outcome.audio, band, Some(outcome.probability))
        }
    };
    let mut audio = audio;
    if mmse {
        audio = mmse_stsa(&audio)?;
    }
    if highpass {
        audio = apply_fir(&audio, &design_highpass(HIGHPASS_CUTOFF, audio.sample_rate(), DEFAULT_TAPS)?);
    }
    let (pre_db, post_db) = match band {
        Some((lo, hi)) => (Some(band_energy_db(&seg.audio, lo, hi)?), Some(band_energy_db(&audio, lo, hi)?)),
        None => (None, None),
    };
    Ok(Row {
        segment: seg.id(),
        probability,
        action: if band.is_some() { "filtered" } else { "untouched" },
        band,
        pre_db,
        post_db,
        audio: Some(audio),
        error: None,
    })
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

pub fn filter(a: FilterArgs) -> CliResult<Outcome> {
    if !(a.threshold.is_finite() && a.threshold >= 0.0) {
        return Err(CliError::Usage(format!("threshold {} must be a non-negative number", a.threshold)));
    }
    let model = match (&a.band, &a.model) {
        (Some(_), _) => None,
        (None, Some(path)) => {
            let m = load_model(path)?;
            check_model_features(&m)?;
            Some(m)
        }
        (None, None) => return Err(CliError::Usage("filter needs --model or --band".into())),
    };
    let stop = match (a.band, &model) {
        (Some((lo, hi)), _) => Stop::Band(lo, hi),
        (None, Some(m)) => Stop::Detect(m, a.threshold),
        (None, None) => unreachable!(),
    };

    let (segments, load_failures) = load_inputs(&a.input)?;
    let rows: Vec<Row> = segments
        .par_iter()
        .map(|seg| {
            process(seg, &stop, a.mmse, a.highpass).unwrap_or_else(|e| Row {
                segment: seg.id(),
                probability: None,
                action: "failed",
                band: None,
                pre_db: None,
                post_db: None,
                audio: None,
                error: Some(e.to_string()),
            })
        })
        .collect();

    create_out(&a.out)?;
    let mut report = String::from("segment,probability,action,band_low,band_high,pre_band_db,post_band_db\n");
    let mut failures = load_failures;
    for r in &rows {
        if let Some(e) = &r.error {
            eprintln!("{}: {e}", r.segment);
            failures += 1;
        }
        if let Some(audio) = &r.audio {
            write_out(&a.out, &format!("{}.wav", r.segment), encode_wav(audio))?;
        }
        report.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.segment,
            cell(r.probability),
            r.action,
            cell(r.band.map(|b| b.0)),
            cell(r.band.map(|b| b.1)),
            cell(r.pre_db),
            cell(r.post_db)
        ));
    }
    write_out(&a.out, "filter_report.csv", report)?;
    let filtered = rows.iter().filter(|r| r.band.is_some()).count();
    println!("filtered {filtered} of {} segments", rows.len());
    Ok(Outcome { failures })
}
