use super::Dataset;
use crate::error::Result;

/// Smallest class-conditional variance, so constant features stay usable.
pub const VARIANCE_FLOOR: f64 = 1e-9;

/// Per-class Gaussian parameters for every feature.
#[derive(Debug, Clone, PartialEq)]
pub struct NaiveBayes {
    pub(crate) prior_pos: f64,
    /// Per feature: `[mean_pos, var_pos, mean_neg, var_neg]`.
    pub(crate) params: Vec<[f64; 4]>,
}

fn moments(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count().max(1) as f64;
    let mean = values.clone().sum::<f64>() / n;
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.max(VARIANCE_FLOOR))
}

pub(crate) fn train(ds: &Dataset) -> Result<NaiveBayes> {
    ds.require_both_classes()?;
    let params = (0..ds.feature_names().len())
        .map(|j| {
            let class = |c: bool| ds.rows().iter().zip(ds.labels()).filter(move |(_, &l)| l == c).map(move |(r, _)| r[j]);
            let (mp, vp) = moments(class(true));
            let (mn, vn) = moments(class(false));
            [mp, vp, mn, vn]
        })
        .collect();
    Ok(NaiveBayes { prior_pos: ds.positives() as f64 / ds.len() as f64, params })
}

fn log_normal(x: f64, mean: f64, var: f64) -> f64 {
    -0.5 * ((x - mean) * (x - mean) / var + (2.0 * std::f64::consts::PI * var).ln())
}

impl NaiveBayes {
    pub(crate) fn predict(&self, x: &[f64]) -> f64 {
        let mut lp = self.prior_pos.ln();
        let mut ln = (1.0 - self.prior_pos).ln();
        for (v, p) in x.iter().zip(&self.params) {
            lp += log_normal(*v, p[0], p[1]);
            ln += log_normal(*v, p[2], p[3]);
        }
        1.0 / (1.0 + (ln - lp).exp())
    }
}
