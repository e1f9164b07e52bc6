use super::Dataset;
use crate::error::{invalid, Result};

/// Training rows stored after z-scoring with the training means and
/// standard deviations.
#[derive(Debug, Clone, PartialEq)]
pub struct Knn {
    pub(crate) k: usize,
    pub(crate) means: Vec<f64>,
    pub(crate) stds: Vec<f64>,
    pub(crate) rows: Vec<Vec<f64>>,
    pub(crate) labels: Vec<bool>,
}

pub(crate) fn train(ds: &Dataset, k: usize) -> Result<Knn> {
    ds.require_rows()?;
    if k == 0 || k.is_multiple_of(2) {
        return Err(invalid(format!("k must be odd and positive, got {k}")));
    }
    if k > ds.len() {
        return Err(invalid(format!("k = {k} exceeds the {} training rows", ds.len())));
    }
    let n = ds.len() as f64;
    let f = ds.feature_names().len();
    let mut means = vec![0.0; f];
    let mut stds = vec![0.0; f];
    for j in 0..f {
        let col = ds.column(j);
        let m = col.iter().sum::<f64>() / n;
        let s = (col.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n).sqrt();
        means[j] = m;
        stds[j] = if s > 0.0 { s } else { 1.0 };
    }
    let mut model = Knn { k, means, stds, rows: Vec::new(), labels: ds.labels().to_vec() };
    model.rows = ds.rows().iter().map(|r| model.standardize(r)).collect();
    Ok(model)
}

impl Knn {
    fn standardize(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.means).zip(&self.stds).map(|((v, m), s)| (v - m) / s).collect()
    }

    /// `(positive neighbours + 1) / (k + 2)`; equal distances go to the
    /// earlier training row.
    pub(crate) fn predict(&self, x: &[f64]) -> f64 {
        let z = self.standardize(x);
        let mut d: Vec<(f64, usize)> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| (r.iter().zip(&z).map(|(a, b)| (a - b) * (a - b)).sum(), i))
            .collect();
        d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let pos = d[..self.k].iter().filter(|(_, i)| self.labels[*i]).count();
        (pos + 1) as f64 / (self.k + 2) as f64
    }
}
