use super::{cfs_select, train, ClassifierConfig, Dataset};
use crate::error::{invalid, Result};
use crate::metrics::{accuracy_at, auc_of};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CvConfig {
    pub classifier: ClassifierConfig,
    pub folds: usize,
    pub seed: u64,
    /// Re-run correlation-based selection on each training fold.
    pub select_features: bool,
}

impl CvConfig {
    pub fn new(classifier: ClassifierConfig, seed: u64) -> Self {
        Self { classifier, folds: 10, seed, select_features: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CvPrediction {
    /// Index into the dataset as supplied.
    pub row: usize,
    pub fold: usize,
    pub label: bool,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    /// One entry per dataset row, in row order.
    pub predictions: Vec<CvPrediction>,
    pub auc: f64,
    pub accuracy_at_half: f64,
    pub seed: u64,
    pub warnings: Vec<String>,
    /// Features kept in each fold when selection is enabled.
    pub selected: Vec<Vec<String>>,
}

impl CvReport {
    pub fn scored(&self) -> Vec<(bool, f64)> {
        self.predictions.iter().map(|p| (p.label, p.probability)).collect()
    }
}

/// Fold index of every row: the rows, taken in canonical order, are
/// shuffled with `seed` and dealt round-robin.
pub fn fold_assignment(ds: &Dataset, folds: usize, seed: u64) -> Result<Vec<usize>> {
    if folds < 2 || folds > ds.len() {
        return Err(invalid(format!("{folds} folds for {} rows", ds.len())));
    }
    let mut order = ds.canonical_order();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut fold = vec![0; ds.len()];
    for (pos, &row) in order.iter().enumerate() {
        fold[row] = pos % folds;
    }
    Ok(fold)
}

pub fn cross_validate(ds: &Dataset, cfg: &CvConfig) -> Result<CvReport> {
    let assignment = fold_assignment(ds, cfg.folds, cfg.seed)?;
    let results = (0..cfg.folds)
        .into_par_iter()
        .map(|f| {
            let test: Vec<usize> = (0..ds.len()).filter(|&i| assignment[i] == f).collect();
            let train_idx: Vec<usize> = (0..ds.len()).filter(|&i| assignment[i] != f).collect();
            let mut train_ds = ds.subset(&train_idx);
            let mut selected = Vec::new();
            if cfg.select_features {
                selected = cfs_select(&train_ds)?;
                train_ds = train_ds.select_features(&selected)?;
            }
            let model = train(&train_ds, cfg.classifier.offset_seed(f as u64))?;
            let cols = super::dataset::column_indices(ds.feature_names(), model.feature_names.as_slice())?;
            let preds = test
                .iter()
                .map(|&i| {
                    let x: Vec<f64> = cols.iter().map(|&c| ds.rows()[i][c]).collect();
                    let probability = model.predict_row(&x)?;
                    Ok(CvPrediction { row: i, fold: f, label: ds.labels()[i], probability })
                })
                .collect::<Result<Vec<_>>>()?;
            let pos = test.iter().filter(|&&i| ds.labels()[i]).count();
            let warning = (pos == 0 || pos == test.len())
                .then(|| format!("fold {f} has only {} test rows", if pos == 0 { "negative" } else { "positive" }));
            Ok((preds, warning, selected))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut predictions = Vec::with_capacity(ds.len());
    let mut warnings = Vec::new();
    let mut selected = Vec::new();
    for (p, w, s) in results {
        predictions.extend(p);
        warnings.extend(w);
        if cfg.select_features {
            selected.push(s);
        }
    }
    predictions.sort_by_key(|p| p.row);
    let scored: Vec<(bool, f64)> = predictions.iter().map(|p| (p.label, p.probability)).collect();
    Ok(CvReport {
        auc: auc_of(&scored)?,
        accuracy_at_half: accuracy_at(&scored, 0.5)?,
        predictions,
        seed: cfg.seed,
        warnings,
        selected,
    })
}
