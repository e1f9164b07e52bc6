use super::{create_out, parse_set, pipeline, write_out};
use crate::args::{ClassifierArgs, CvArgs, TrainArgs};
use crate::error::{CliError, CliResult, Outcome};
use ngfilter::features::{feature_names, read_csv, FeatureSetId, FeatureTable};
use ngfilter::metrics::roc_curve;
use ngfilter::ml::{cfs_select, cross_validate, train as fit, ClassifierConfig, CvConfig, CvReport, Dataset};
use std::path::Path;

const SWEEP_K: [usize; 13] = [1, 3, 5, 7, 9, 11, 13, 15, 17, 19, 21, 23, 25];

fn labelled(path: &Path) -> CliResult<(FeatureTable, Dataset)> {
    let table = read_csv(path)?;
    if !table.is_labeled() {
        return Err(CliError::Usage(format!("{} needs a label column on every row", path.display())));
    }
    let ds = Dataset::from_table(&table)?.with_provenance(path.display().to_string());
    if ds.positives() == 0 || ds.negatives() == 0 {
        return Err(CliError::Usage(format!(
            "{} holds a single class ({} positive, {} negative); training needs both",
            path.display(),
            ds.positives(),
            ds.negatives()
        )));
    }
    Ok((table, ds))
}

fn classifier(a: &ClassifierArgs) -> CliResult<ClassifierConfig> {
    ClassifierConfig::from_kind(&a.classifier, a.k, a.trees, a.seed).map_err(|e| CliError::Usage(e.to_string()))
}

fn csv_bytes(rows: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    rows(&mut w)?;
    w.into_inner().map_err(|e| CliError::Usage(e.to_string()))
}

pub fn train(a: TrainArgs) -> CliResult<Outcome> {
    let set = parse_set(&a.set)?;
    let pre = pipeline(a.pipeline.highpass, a.pipeline.mmse);
    let config = classifier(&a.classifier)?;
    let (table, mut ds) = labelled(&a.features)?;

    let expected = match set {
        FeatureSetId::CfsSubset => feature_names(FeatureSetId::All, pre)?,
        other => feature_names(other, pre)?,
    };
    let unknown: Vec<&str> = table.names.iter().filter(|n| !expected.contains(n)).map(String::as_str).collect();
    if !unknown.is_empty() {
        return Err(CliError::Usage(format!(
            "features not produced by set {set} with this pipeline: {}",
            unknown.join(", ")
        )));
    }
    if set != FeatureSetId::CfsSubset && table.names != expected {
        return Err(CliError::Usage(format!(
            "CSV has {} features, set {set} with this pipeline has {}",
            table.names.len(),
            expected.len()
        )));
    }

    create_out(&a.out)?;
    if set == FeatureSetId::CfsSubset {
        let selected = cfs_select(&ds)?;
        ds = ds.select_features(&selected)?;
        write_out(&a.out, "selection.txt", selected.join("\n") + "\n")?;
        println!("selected {} of {} features", selected.len(), table.names.len());
    }
    let model = fit(&ds, config)?.with_pipeline(set, pre);
    let path = a.out.join("model.ngm");
    model.save(&path)?;
    println!(
        "trained {config} on {} rows ({} positive), {} features -> {}",
        ds.len(),
        ds.positives(),
        ds.feature_names().len(),
        path.display()
    );
    Ok(Outcome::default())
}

fn write_reports(out: &Path, table: &FeatureTable, cfg: &CvConfig, report: &CvReport) -> CliResult<()> {
    let summary = csv_bytes(|w| {
        w.write_record(["classifier", "folds", "seed", "rows", "auc", "accuracy_at_0.5"])?;
        w.write_record([
            cfg.classifier.to_string(),
            cfg.folds.to_string(),
            report.seed.to_string(),
            report.predictions.len().to_string(),
            report.auc.to_string(),
            report.accuracy_at_half.to_string(),
        ])
    })?;
    write_out(out, "cv_report.csv", summary)?;

    let predictions = csv_bytes(|w| {
        w.write_record(["segment", "fold", "label", "probability"])?;
        for p in &report.predictions {
            w.write_record([
                table.ids[p.row].clone(),
                p.fold.to_string(),
                (p.label as u8).to_string(),
                p.probability.to_string(),
            ])?;
        }
        Ok(())
    })?;
    write_out(out, "cv_predictions.csv", predictions)?;
    write_out(out, "roc.csv", roc_curve(&report.scored())?.to_csv())?;

    if cfg.select_features {
        let selection = csv_bytes(|w| {
            w.write_record(["fold", "features"])?;
            for (f, names) in report.selected.iter().enumerate() {
                w.write_record([f.to_string(), names.join(";")])?;
            }
            Ok(())
        })?;
        write_out(out, "cv_selection.csv", selection)?;
    }
    Ok(())
}

pub fn cv(a: CvArgs) -> CliResult<Outcome> {
    let set = parse_set(&a.set)?;
    let config = classifier(&a.classifier)?;
    let (table, ds) = labelled(&a.features)?;
    let base = CvConfig { classifier: config, folds: a.folds, seed: a.classifier.seed, select_features: set == FeatureSetId::CfsSubset };
    create_out(&a.out)?;

    let (cfg, report) = if a.sweep_k {
        if !matches!(config, ClassifierConfig::Knn { .. }) {
            return Err(CliError::Usage("--sweep-k needs --classifier knn".into()));
        }
        let mut runs = Vec::with_capacity(SWEEP_K.len());
        for k in SWEEP_K {
            let cfg = CvConfig { classifier: ClassifierConfig::Knn { k }, ..base };
            match cross_validate(&ds, &cfg) {
                Ok(report) => runs.push((k, cfg, Some(report))),
                Err(e) => {
                    eprintln!("warning: skipping k = {k}: {e}");
                    runs.push((k, cfg, None));
                }
            }
        }
        // First maximum: ties go to the smallest k.
        let auc = |i: usize| runs[i].2.as_ref().map(|r| r.auc);
        let best = (0..runs.len())
            .filter(|&i| auc(i).is_some())
            .fold(None, |b: Option<usize>, i| match b {
                Some(b) if auc(b) >= auc(i) => Some(b),
                _ => Some(i),
            })
            .ok_or_else(|| CliError::Usage("no k in the sweep could be evaluated".into()))?;
        let sweep = csv_bytes(|w| {
            w.write_record(["k", "auc", "accuracy_at_0.5", "best"])?;
            for (i, (k, _, r)) in runs.iter().enumerate() {
                let (auc, acc) = r
                    .as_ref()
                    .map_or((String::new(), String::new()), |r| (r.auc.to_string(), r.accuracy_at_half.to_string()));
                w.write_record([k.to_string(), auc, acc, (i == best).to_string()])?;
            }
            Ok(())
        })?;
        write_out(&a.out, "sweep.csv", sweep)?;
        let (_, cfg, report) = runs.swap_remove(best);
        let report = report.expect("best run has a report");
        println!("best {}", cfg.classifier);
        (cfg, report)
    } else {
        let report = cross_validate(&ds, &base)?;
        (base, report)
    };

    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    write_reports(&a.out, &table, &cfg, &report)?;
    println!("{}: AUC {:.4}, accuracy at 0.5 {:.4}", cfg.classifier, report.auc, report.accuracy_at_half);
    Ok(Outcome::default())
}
