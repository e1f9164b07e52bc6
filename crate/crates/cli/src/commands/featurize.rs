use super::{create_out, io_err, load_inputs, parse_set, pipeline, stem, write_out};
use crate::args::{FeaturizeArgs, Format, Task};
use crate::error::{CliError, CliResult, Outcome};
use ngfilter::features::{extract_features, extract_named, feature_names, write_arff, write_csv_to, FeatureSetId, FeatureTable};
use rayon::prelude::*;
use std::collections::HashMap;
use std::path::Path;

/// Feature names from a selection file, one per line.
pub(super) fn read_selection(path: &Path) -> CliResult<Vec<String>> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    let names: Vec<String> =
        text.lines().map(str::trim).filter(|l| !l.is_empty()).map(String::from).collect();
    if names.is_empty() {
        return Err(CliError::Usage(format!("selection file {} lists no features", path.display())));
    }
    Ok(names)
}

/// Manifest labels keyed by WAV file stem.
fn read_labels(path: &Path, task: Task) -> CliResult<HashMap<String, bool>> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Usage(format!("manifest {} has no '{name}' column", path.display())))
    };
    let wav = col("wav")?;
    let label = col(match task {
        Task::Rain => "rain",
        Task::Cicada => "cicada",
    })?;
    let mut labels = HashMap::new();
    for record in reader.records() {
        let record = record?;
        let value = match record.get(label).map(str::trim) {
            Some("1") => true,
            Some("0") => false,
            other => {
                return Err(CliError::Usage(format!("manifest label '{}' is not 0 or 1", other.unwrap_or(""))))
            }
        };
        labels.insert(stem(Path::new(record.get(wav).unwrap_or(""))), value);
    }
    Ok(labels)
}

pub fn featurize(a: FeaturizeArgs) -> CliResult<Outcome> {
    let set = parse_set(&a.set)?;
    let pre = pipeline(a.pipeline.highpass, a.pipeline.mmse);
    let selection = match (set, &a.selection) {
        (FeatureSetId::CfsSubset, None) => {
            return Err(CliError::Usage(
                "CFSSubset needs --selection; run `ngfilter train --set CFSSubset` first to produce selection.txt".into(),
            ))
        }
        (FeatureSetId::CfsSubset, Some(p)) => Some(read_selection(p)?),
        _ => None,
    };
    let names = match &selection {
        Some(s) => s.clone(),
        None => feature_names(set, pre)?,
    };
    let labels = a.labels.as_deref().map(|p| read_labels(p, a.task)).transpose()?;

    let (segments, mut failures) = load_inputs(&a.input)?;
    let computed: Vec<_> = segments
        .par_iter()
        .map(|seg| match &selection {
            Some(s) => extract_named(seg, s, pre),
            None => extract_features(seg, set, pre),
        })
        .collect();

    let mut table = FeatureTable::new(names);
    for (seg, v) in segments.iter().zip(computed) {
        let v = match v {
            Ok(v) => v,
            Err(e) => {
                eprintln!("{}: {e}", seg.id());
                failures += 1;
                continue;
            }
        };
        let label = match &labels {
            Some(map) => Some(*map.get(&seg.source_id).ok_or_else(|| {
                CliError::Usage(format!("no manifest label for '{}'", seg.source_id))
            })?),
            None => None,
        };
        table.push(seg.id(), v.values().to_vec(), label)?;
    }

    create_out(&a.out)?;
    match a.format {
        Format::Csv => {
            let mut bytes = Vec::new();
            write_csv_to(&table, &mut bytes)?;
            write_out(&a.out, "features.csv", bytes)?;
        }
        Format::Arff => write_out(&a.out, "features.arff", write_arff(&table, set.as_str()))?,
    }
    println!("{} segments x {} features", table.len(), table.names.len());
    Ok(Outcome { failures })
}
