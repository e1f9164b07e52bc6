mod featurize;
mod filter;
mod gate;
mod learn;
mod synth;

pub use featurize::featurize;
pub use filter::filter;
pub use gate::gate;
pub use learn::{cv, train};
pub use synth::{segment, synth};

use crate::error::{CliError, CliResult};
use ngfilter::audio::{read_wav, segment_audio, to_canonical, Segment, CANONICAL_RATE, SEGMENT_SECONDS};
use ngfilter::features::{feature_names, FeatureSetId, Preprocessing};
use ngfilter::ml::TrainedModel;
use rayon::prelude::*;
use std::path::{Path, PathBuf};

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

/// The file itself, or the `.wav` files of a directory sorted by name.
fn list_wavs(input: &Path) -> CliResult<Vec<PathBuf>> {
    if input.is_file() {
        return Ok(vec![input.to_path_buf()]);
    }
    if !input.is_dir() {
        return Err(CliError::Usage(format!("{} is neither a WAV file nor a directory", input.display())));
    }
    let mut files: Vec<PathBuf> = std::fs::read_dir(input)
        .map_err(io_err(input))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x.eq_ignore_ascii_case("wav")))
        .collect();
    files.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
    Ok(files)
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn load_segments(path: &Path) -> ngfilter::Result<Vec<Segment>> {
    let buf = read_wav(path)?;
    let buf = if buf.sample_rate() == CANONICAL_RATE { buf } else { to_canonical(&buf)? };
    segment_audio(&buf, &stem(path), SEGMENT_SECONDS)
}

/// Segments of every readable file in input order; unreadable files are
/// reported on stderr and counted.
fn load_inputs(input: &Path) -> CliResult<(Vec<Segment>, usize)> {
    let files = list_wavs(input)?;
    let loaded: Vec<_> = files.par_iter().map(|f| load_segments(f)).collect();
    let mut segments = Vec::new();
    let mut failures = 0;
    for (f, r) in files.iter().zip(loaded) {
        match r {
            Ok(s) => segments.extend(s),
            Err(e) => {
                eprintln!("{}: {e}", f.display());
                failures += 1;
            }
        }
    }
    Ok((segments, failures))
}

fn create_out(out: &Path) -> CliResult<()> {
    std::fs::create_dir_all(out).map_err(io_err(out))
}

fn write_out(out: &Path, name: &str, contents: impl AsRef<[u8]>) -> CliResult<()> {
    let path = out.join(name);
    std::fs::write(&path, contents).map_err(io_err(&path))
}

fn parse_set(s: &str) -> CliResult<FeatureSetId> {
    s.parse().map_err(|e: ngfilter::Error| CliError::Usage(e.to_string()))
}

fn load_model(path: &Path) -> CliResult<TrainedModel> {
    TrainedModel::load(path).map_err(|e| CliError::Usage(format!("cannot load model {}: {e}", path.display())))
}

/// Fails naming every model feature the pipeline recorded in the model
/// cannot produce.
fn check_model_features(model: &TrainedModel) -> CliResult<()> {
    let available = feature_names(FeatureSetId::All, model.preprocessing)?;
    let missing: Vec<&str> =
        model.feature_names.iter().filter(|n| !available.contains(n)).map(String::as_str).collect();
    if missing.is_empty() {
        Ok(())
    } else {
        Err(CliError::Usage(format!(
            "model needs features this pipeline cannot compute: {}",
            missing.join(", ")
        )))
    }
}

fn pipeline(highpass: bool, mmse: bool) -> Preprocessing {
    Preprocessing { highpass, mmse }
}
