//! ROC analysis, accuracy at a threshold, and the Mann-Whitney U test.

use std::cmp::Ordering;
use std::fmt::Write;

use statrs::function::erf::erfc;

use crate::error::{invalid, Result};

/// One operating point: classify positive when `score >= threshold`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocPoint {
    pub threshold: f64,
    pub fpr: f64,
    pub tpr: f64,
}

/// Points ordered by descending threshold, starting at (0, 0) with an
/// infinite threshold and ending at (1, 1).
#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
}

impl RocCurve {
    /// `threshold,fpr,tpr` rows with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("threshold,fpr,tpr\n");
        for p in &self.points {
            let _ = writeln!(out, "{},{},{}", p.threshold, p.fpr, p.tpr);
        }
        out
    }
}

/// `(is_positive, score)` pairs.
pub type Scored = [(bool, f64)];

pub fn roc_curve(scored: &Scored) -> Result<RocCurve> {
    let positives = scored.iter().filter(|(l, _)| *l).count();
    let negatives = scored.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(invalid("ROC analysis needs both positive and negative examples"));
    }
    if scored.iter().any(|(_, s)| s.is_nan()) {
        return Err(invalid("scores must not be NaN"));
    }
    let mut sorted: Vec<(bool, f64)> = scored.to_vec();
    sorted.sort_by(|a, b| b.1.total_cmp(&a.1));

    let mut points = vec![RocPoint { threshold: f64::INFINITY, fpr: 0.0, tpr: 0.0 }];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < sorted.len() {
        let threshold = sorted[i].1;
        // every example sharing this score flips at once
        while i < sorted.len() && sorted[i].1 == threshold {
            if sorted[i].0 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push(RocPoint {
            threshold,
            fpr: fp as f64 / negatives as f64,
            tpr: tp as f64 / positives as f64,
        });
    }
    Ok(RocCurve { points })
}

/// Trapezoidal area under the curve.
pub fn auc(curve: &RocCurve) -> f64 {
    curve
        .points
        .windows(2)
        .map(|w| (w[1].fpr - w[0].fpr) * (w[1].tpr + w[0].tpr) / 2.0)
        .sum()
}

/// Convenience: `auc(roc_curve(scored))`.
pub fn auc_of(scored: &Scored) -> Result<f64> {
    Ok(auc(&roc_curve(scored)?))
}

/// Fraction of examples whose thresholded prediction matches the label.
pub fn accuracy_at(scored: &Scored, threshold: f64) -> Result<f64> {
    if scored.is_empty() {
        return Err(invalid("accuracy of an empty set"));
    }
    let correct = scored.iter().filter(|(label, s)| (*s >= threshold) == *label).count();
    Ok(correct as f64 / scored.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MannWhitneyResult {
    /// The smaller of the two U statistics.
    pub u: f64,
    /// Two-tailed p-value.
    pub p_value: f64,
    pub n1: usize,
    pub n2: usize,
}

/// Midranks (1-based) of the pooled sample.
fn midranks(values: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(Ordering::Equal));
    let mut ranks = vec![0.0; values.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j + 1) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = rank;
        }
        if j - i > 1 {
            ties.push(j - i);
        }
        i = j;
    }
    (ranks, ties)
}

/// Two-sided Mann-Whitney U test with midranks, tie-corrected variance and
/// a continuity-corrected normal approximation.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<MannWhitneyResult> {
    let (n1, n2) = (a.len(), b.len());
    if n1 == 0 || n2 == 0 {
        return Err(invalid("Mann-Whitney U needs two non-empty samples"));
    }
    if a.iter().chain(b).any(|v| v.is_nan()) {
        return Err(invalid("samples must not contain NaN"));
    }
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let (ranks, ties) = midranks(&pooled);
    let rank_sum_a: f64 = ranks[..n1].iter().sum();
    let u_a = rank_sum_a - (n1 * (n1 + 1)) as f64 / 2.0;
    let nn = (n1 * n2) as f64;
    let u = u_a.min(nn - u_a);

    let n = (n1 + n2) as f64;
    let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / (n * (n - 1.0));
    let variance = nn / 12.0 * ((n + 1.0) - if n > 1.0 { tie_term } else { 0.0 });
    let mean = nn / 2.0;
    let p_value = if variance <= 0.0 {
        1.0
    } else {
        let z = ((mean - u).abs() - 0.5).max(0.0) / variance.sqrt();
        erfc(z / std::f64::consts::SQRT_2).min(1.0)
    };
    Ok(MannWhitneyResult { u, p_value, n1, n2 })
}

/// Median of a non-empty sample.
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len().is_multiple_of(2) {
        (v[m - 1] + v[m]) / 2.0
    } else {
        v[m]
    }
}
