use super::{create_out, load_inputs, write_out};
use crate::args::{SegmentArgs, SynthArgs};
use crate::error::{CliError, CliResult, Outcome};
use ngfilter::audio::encode_wav;
use ngfilter::synth::{gen_corpus, manifest_csv, CorpusMix};
use rayon::prelude::*;

pub fn synth(a: SynthArgs) -> CliResult<Outcome> {
    if a.n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let scenes = gen_corpus(a.n, a.seed, CorpusMix { rain: a.rain, cicada: a.cicada })?;
    create_out(&a.out)?;
    let names: Vec<String> = scenes.iter().map(|s| format!("{}.wav", s.id)).collect();
    let encoded: Vec<Vec<u8>> = scenes.par_iter().map(|s| encode_wav(&s.segment.audio)).collect();
    for (name, bytes) in names.iter().zip(encoded) {
        write_out(&a.out, name, bytes)?;
    }
    write_out(&a.out, "manifest.csv", manifest_csv(&scenes, &names))?;
    let rain = scenes.iter().filter(|s| s.labels.rain).count();
    let cicada = scenes.iter().filter(|s| s.labels.cicada).count();
    println!("wrote {} scenes ({rain} rain, {cicada} cicada) to {}", scenes.len(), a.out.display());
    Ok(Outcome::default())
}

pub fn segment(a: SegmentArgs) -> CliResult<Outcome> {
    let (segments, failures) = load_inputs(&a.input)?;
    create_out(&a.out)?;
    let encoded: Vec<Vec<u8>> = segments.par_iter().map(|s| encode_wav(&s.audio)).collect();
    let mut index = String::from("segment,source,start_seconds\n");
    for (s, bytes) in segments.iter().zip(encoded) {
        write_out(&a.out, &format!("{}.wav", s.id()), bytes)?;
        index.push_str(&format!("{},{},{}\n", s.id(), s.source_id, s.start_time));
    }
    write_out(&a.out, "segments.csv", index)?;
    println!("wrote {} segments to {}", segments.len(), a.out.display());
    Ok(Outcome { failures })
}
