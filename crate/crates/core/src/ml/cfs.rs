//! Correlation-based feature subset selection.

use super::Dataset;
use crate::error::{invalid, Result};

/// Pearson correlation; 0 when either side has no variance.
pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    if a.is_empty() {
        return 0.0;
    }
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa <= 0.0 || sbb <= 0.0 {
        0.0
    } else {
        (sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0)
    }
}

/// Absolute feature-class and feature-feature correlations of a dataset.
pub struct Correlations {
    class: Vec<f64>,
    pairs: Vec<Vec<f64>>,
}

impl Correlations {
    pub fn of(ds: &Dataset) -> Self {
        let cols: Vec<Vec<f64>> = (0..ds.feature_names().len()).map(|j| ds.column(j)).collect();
        let y: Vec<f64> = ds.labels().iter().map(|&l| l as u8 as f64).collect();
        let class = cols.iter().map(|c| pearson(c, &y).abs()).collect();
        let f = cols.len();
        let mut pairs = vec![vec![1.0; f]; f];
        for i in 0..f {
            for j in i + 1..f {
                let r = pearson(&cols[i], &cols[j]).abs();
                pairs[i][j] = r;
                pairs[j][i] = r;
            }
        }
        Self { class, pairs }
    }

    /// `sum r_cf / sqrt(k + 2 sum_{i<j} r_ij)` over the subset.
    pub fn merit(&self, subset: &[usize]) -> f64 {
        let num: f64 = subset.iter().map(|&i| self.class[i]).sum();
        let mut pair_sum = 0.0;
        for (a, &i) in subset.iter().enumerate() {
            for &j in &subset[a + 1..] {
                pair_sum += self.pairs[i][j];
            }
        }
        merit_from(num, pair_sum, subset.len())
    }
}

fn merit_from(num: f64, pair_sum: f64, k: usize) -> f64 {
    if k == 0 {
        return 0.0;
    }
    num / (k as f64 + 2.0 * pair_sum).sqrt()
}

/// Relative slack under which a removal that leaves the merit unchanged
/// still counts, so exact duplicates collapse to a single column.
const MERIT_TOLERANCE: f64 = 1e-12;

/// Columns whose absolute correlation with another is 1 within this slack
/// count as copies. Constant columns correlate with nothing.
const DUPLICATE_TOLERANCE: f64 = 1e-12;

/// Copies of another column are dropped first, keeping the one whose name
/// sorts first. Then greedy backward elimination: starting from every remaining feature, repeatedly
/// drop the feature whose removal gives the highest merit, as long as that
/// merit is no worse than the current one. Ties go to the feature whose name
/// sorts first. The result keeps the dataset's column order.
pub fn cfs_select(ds: &Dataset) -> Result<Vec<String>> {
    let f = ds.feature_names().len();
    if f == 0 {
        return Err(invalid("feature selection needs at least one feature"));
    }
    let corr = Correlations::of(ds);
    let mut by_name: Vec<usize> = (0..f).collect();
    by_name.sort_by(|&a, &b| ds.feature_names()[a].cmp(&ds.feature_names()[b]).then(a.cmp(&b)));

    let mut alive = vec![true; f];
    for (pos, &i) in by_name.iter().enumerate() {
        if alive[i] {
            for &j in &by_name[pos + 1..] {
                if corr.pairs[i][j] >= 1.0 - DUPLICATE_TOLERANCE {
                    alive[j] = false;
                }
            }
        }
    }
    let mut k = alive.iter().filter(|&&a| a).count();
    let live = |i: usize| alive[i];
    let mut num: f64 = (0..f).filter(|&i| live(i)).map(|i| corr.class[i]).sum();
    // for each feature, sum of its correlations with other live features
    let mut row_sums: Vec<f64> = (0..f)
        .map(|i| (0..f).filter(|&j| j != i && live(j)).map(|j| corr.pairs[i][j]).sum())
        .collect();
    let mut pair_sum = (0..f).filter(|&i| live(i)).map(|i| row_sums[i]).sum::<f64>() / 2.0;
    let mut current = merit_from(num, pair_sum, k);

    while k > 1 {
        let mut best: Option<(usize, f64)> = None;
        for &i in by_name.iter().filter(|&&i| alive[i]) {
            let m = merit_from(num - corr.class[i], pair_sum - row_sums[i], k - 1);
            if best.is_none_or(|(_, bm)| m > bm) {
                best = Some((i, m));
            }
        }
        let Some((drop, m)) = best else { break };
        if m < current - MERIT_TOLERANCE * current.abs().max(1.0) {
            break;
        }
        alive[drop] = false;
        k -= 1;
        num -= corr.class[drop];
        pair_sum -= row_sums[drop];
        for (j, s) in row_sums.iter_mut().enumerate() {
            if alive[j] {
                *s -= corr.pairs[j][drop];
            }
        }
        current = m;
    }
    Ok((0..f).filter(|&i| alive[i]).map(|i| ds.feature_names()[i].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn make(cols: Vec<(&str, Vec<f64>)>, labels: Vec<bool>) -> Dataset {
        let n = labels.len();
        let names = cols.iter().map(|c| c.0.to_string()).collect();
        let rows = (0..n).map(|i| cols.iter().map(|c| c.1[i]).collect()).collect();
        Dataset::new(names, rows, labels).unwrap()
    }

    fn informative(seed: u64, n: usize) -> (Vec<bool>, Vec<Vec<f64>>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let labels: Vec<bool> = (0..n).map(|i| i % 2 == 0).collect();
        let cols = (0..3)
            .map(|c| labels.iter().map(|&l| (l as u8 as f64) * (1.0 + c as f64) + rng.random_range(-1.0..1.0)).collect())
            .collect();
        (labels, cols)
    }

    #[test]
    fn pearson_cases() {
        assert!((pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]) - 1.0).abs() < 1e-12);
        assert!((pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]) + 1.0).abs() < 1e-12);
        assert_eq!(pearson(&[1.0, 1.0], &[0.0, 5.0]), 0.0);
    }

    #[test]
    fn duplicates_collapse() {
        let (labels, cols) = informative(1, 80);
        let ds = make(vec![("a", cols[0].clone()), ("a_copy", cols[0].clone())], labels.clone());
        assert_eq!(cfs_select(&ds).unwrap().len(), 1);
        let ds = make(
            vec![("a", cols[0].clone()), ("b", cols[1].clone()), ("b_copy", cols[1].clone()), ("c", cols[2].clone())],
            labels,
        );
        let sel = cfs_select(&ds).unwrap();
        assert!(!(sel.contains(&"b".to_string()) && sel.contains(&"b_copy".to_string())));
    }

    #[test]
    fn noise_feature_dropped() {
        let (labels, cols) = informative(2, 200);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let noise: Vec<f64> = (0..200).map(|_| rng.random_range(-1.0..1.0)).collect();
        let ds = make(
            vec![("a", cols[0].clone()), ("b", cols[1].clone()), ("c", cols[2].clone()), ("z", noise)],
            labels,
        );
        let sel = cfs_select(&ds).unwrap();
        assert!(!sel.contains(&"z".to_string()));
        let corr = Correlations::of(&ds);
        let best_mask = (1u32..16)
            .max_by(|&a, &b| {
                let subset = |mask: u32| (0..4).filter(|i| mask & (1 << i) != 0).collect::<Vec<usize>>();
                corr.merit(&subset(a)).total_cmp(&corr.merit(&subset(b)))
            })
            .unwrap();
        assert_eq!(best_mask & 0b1000, 0, "the optimal subset excludes the noise column");
    }

    #[test]
    fn never_empty_and_not_worse_than_full() {
        let labels = vec![true, false, true, false];
        let ds = make(vec![("x", vec![1.0; 4]), ("y", vec![2.0; 4])], labels);
        assert_eq!(cfs_select(&ds).unwrap().len(), 1);
        let (labels, cols) = informative(3, 60);
        let ds = make(cols.iter().enumerate().map(|(i, c)| (["p", "q", "r"][i], c.clone())).collect(), labels);
        let corr = Correlations::of(&ds);
        let sel = cfs_select(&ds).unwrap();
        let idx: Vec<usize> = sel.iter().map(|n| ds.feature_names().iter().position(|m| m == n).unwrap()).collect();
        assert!(corr.merit(&idx) >= corr.merit(&[0, 1, 2]) - 1e-9);
    }
}
