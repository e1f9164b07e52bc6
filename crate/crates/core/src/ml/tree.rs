use super::Dataset;
use crate::error::Result;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Nodes smaller than this become leaves in the single-tree learner.
pub const MIN_SPLIT_ROWS: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Leaf {
        pos: usize,
        neg: usize,
    },
    /// Rows with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: Box<Node>,
        right: Box<Node>,
    },
}

impl Node {
    fn leaf(&self, x: &[f64]) -> (usize, usize) {
        match self {
            Node::Leaf { pos, neg } => (*pos, *neg),
            Node::Split { feature, threshold, left, right } => {
                if x[*feature] <= *threshold {
                    left.leaf(x)
                } else {
                    right.leaf(x)
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Node::Leaf { .. } => 0,
            Node::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    pub(crate) root: Node,
}

impl DecisionTree {
    pub fn root(&self) -> &Node {
        &self.root
    }

    /// Laplace-smoothed positive fraction of the leaf reached by `x`.
    pub(crate) fn predict(&self, x: &[f64]) -> f64 {
        let (pos, neg) = self.root.leaf(x);
        (pos + 1) as f64 / (pos + neg + 2) as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomForest {
    pub(crate) trees: Vec<DecisionTree>,
}

impl RandomForest {
    pub fn trees(&self) -> &[DecisionTree] {
        &self.trees
    }

    /// Fraction of trees whose leaf favours the positive class.
    pub(crate) fn predict(&self, x: &[f64]) -> f64 {
        let votes = self.trees.iter().filter(|t| t.predict(x) > 0.5).count();
        votes as f64 / self.trees.len() as f64
    }
}

fn entropy(pos: usize, neg: usize) -> f64 {
    let n = (pos + neg) as f64;
    [pos, neg]
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

struct Candidate {
    feature: usize,
    threshold: f64,
    gain: f64,
    split_info: f64,
}

/// Highest-gain threshold on one feature among midpoints of consecutive
/// distinct values.
fn best_threshold(rows: &[Vec<f64>], labels: &[bool], idx: &[usize], feature: usize) -> Option<Candidate> {
    let mut sorted: Vec<(f64, bool)> = idx.iter().map(|&i| (rows[i][feature], labels[i])).collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let n = sorted.len();
    let pos = sorted.iter().filter(|s| s.1).count();
    let parent = entropy(pos, n - pos);
    let mut best: Option<Candidate> = None;
    let mut left_pos = 0;
    for i in 0..n - 1 {
        left_pos += sorted[i].1 as usize;
        let (a, b) = (sorted[i].0, sorted[i + 1].0);
        if a == b {
            continue;
        }
        let nl = i + 1;
        let nr = n - nl;
        let gain = parent
            - (nl as f64 / n as f64) * entropy(left_pos, nl - left_pos)
            - (nr as f64 / n as f64) * entropy(pos - left_pos, nr - (pos - left_pos));
        if best.as_ref().is_none_or(|c| gain > c.gain) {
            let mid = a + (b - a) / 2.0;
            let threshold = if mid < b { mid } else { a };
            best = Some(Candidate { feature, threshold, gain, split_info: entropy(nl, nr) });
        }
    }
    best
}

enum Learner<'r> {
    /// Gain ratio among features with at least average gain.
    GainRatio,
    /// Plain gain over a random feature subset of size `mtry`.
    RandomSubset { rng: &'r mut ChaCha8Rng, mtry: usize },
}

const GAIN_EPS: f64 = 1e-12;

fn grow(rows: &[Vec<f64>], labels: &[bool], idx: Vec<usize>, learner: &mut Learner) -> Node {
    let pos = idx.iter().filter(|&&i| labels[i]).count();
    let neg = idx.len() - pos;
    let min_rows = match learner {
        Learner::GainRatio => MIN_SPLIT_ROWS,
        Learner::RandomSubset { .. } => 2,
    };
    if pos == 0 || neg == 0 || idx.len() < min_rows {
        return Node::Leaf { pos, neg };
    }
    let features = rows[0].len();
    let chosen = match learner {
        Learner::GainRatio => {
            let cands: Vec<Candidate> = (0..features)
                .filter_map(|f| best_threshold(rows, labels, &idx, f))
                .filter(|c| c.gain > GAIN_EPS)
                .collect();
            let avg = cands.iter().map(|c| c.gain).sum::<f64>() / cands.len().max(1) as f64;
            cands
                .into_iter()
                .filter(|c| c.gain >= avg - GAIN_EPS)
                .fold(None::<Candidate>, |best, c| match best {
                    Some(b) if b.gain / b.split_info >= c.gain / c.split_info => Some(b),
                    _ => Some(c),
                })
        }
        Learner::RandomSubset { rng, mtry } => {
            let mut subset = sample(*rng, features, (*mtry).min(features)).into_vec();
            subset.sort_unstable();
            subset
                .into_iter()
                .filter_map(|f| best_threshold(rows, labels, &idx, f))
                .filter(|c| c.gain > GAIN_EPS)
                .fold(None::<Candidate>, |best, c| match best {
                    Some(b) if b.gain >= c.gain => Some(b),
                    _ => Some(c),
                })
        }
    };
    let Some(c) = chosen else {
        return Node::Leaf { pos, neg };
    };
    let (l, r): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| rows[i][c.feature] <= c.threshold);
    Node::Split {
        feature: c.feature,
        threshold: c.threshold,
        left: Box::new(grow(rows, labels, l, learner)),
        right: Box::new(grow(rows, labels, r, learner)),
    }
}

pub(crate) fn train_tree(ds: &Dataset) -> Result<DecisionTree> {
    ds.require_rows()?;
    let root = grow(ds.rows(), ds.labels(), (0..ds.len()).collect(), &mut Learner::GainRatio);
    Ok(DecisionTree { root })
}

/// `ceil(sqrt(features))`, at least 1.
pub fn features_per_split(features: usize) -> usize {
    ((features as f64).sqrt().ceil() as usize).max(1)
}

pub(crate) fn train_forest(ds: &Dataset, trees: usize, seed: u64) -> Result<RandomForest> {
    ds.require_rows()?;
    if trees == 0 {
        return Err(crate::error::invalid("a forest needs at least one tree"));
    }
    let mtry = features_per_split(ds.feature_names().len());
    let n = ds.len();
    let trees = (0..trees as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(t));
            let boot: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
            let mut learner = Learner::RandomSubset { rng: &mut rng, mtry };
            DecisionTree { root: grow(ds.rows(), ds.labels(), boot, &mut learner) }
        })
        .collect();
    Ok(RandomForest { trees })
}
