//! Classifiers emitting the probability that noise is present, plus
//! feature selection and cross-validation.
//!
//! Every trainer first puts the rows into a canonical order derived from
//! their contents, so a model depends only on the multiset of rows and the
//! seed.

mod bayes;
mod cfs;
mod cv;
mod dataset;
mod knn;
mod model_io;
mod tree;

pub use bayes::{NaiveBayes, VARIANCE_FLOOR};
pub use cfs::{cfs_select, pearson, Correlations};
pub use cv::{cross_validate, fold_assignment, CvConfig, CvPrediction, CvReport};
pub use dataset::Dataset;
pub use knn::Knn;
pub use tree::{features_per_split, DecisionTree, Node, RandomForest, MIN_SPLIT_ROWS};

use crate::error::{invalid, Error, Result};
use crate::features::{FeatureSetId, FeatureVector, Preprocessing};
use std::fmt;
use std::str::FromStr;

/// Default forest size.
pub const DEFAULT_TREES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClassifierConfig {
    NaiveBayes,
    Knn { k: usize },
    Tree,
    RandomForest { trees: usize, seed: u64 },
}

impl ClassifierConfig {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::NaiveBayes => "naive-bayes",
            Self::Knn { .. } => "knn",
            Self::Tree => "tree",
            Self::RandomForest { .. } => "random-forest",
        }
    }

    /// Builds a config from a kind name and the hyperparameters it uses.
    pub fn from_kind(kind: &str, k: usize, trees: usize, seed: u64) -> Result<Self> {
        match kind.to_ascii_lowercase().as_str() {
            "naive-bayes" | "nb" | "bayes" => Ok(Self::NaiveBayes),
            "knn" | "ibk" => Ok(Self::Knn { k }),
            "tree" | "j48" | "c45" => Ok(Self::Tree),
            "random-forest" | "rf" | "forest" => Ok(Self::RandomForest { trees, seed }),
            other => Err(invalid(format!("unknown classifier '{other}'"))),
        }
    }

    /// The same classifier with its seed shifted, used per fold.
    pub(crate) fn offset_seed(self, by: u64) -> Self {
        match self {
            Self::RandomForest { trees, seed } => Self::RandomForest { trees, seed: seed.wrapping_add(by) },
            other => other,
        }
    }
}

impl fmt::Display for ClassifierConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Knn { k } => write!(f, "knn(k={k})"),
            Self::RandomForest { trees, seed } => write!(f, "random-forest(trees={trees}, seed={seed})"),
            other => f.write_str(other.kind()),
        }
    }
}

impl FromStr for ClassifierConfig {
    type Err = Error;

    /// Parses a bare kind name with default hyperparameters.
    fn from_str(s: &str) -> Result<Self> {
        Self::from_kind(s, 1, DEFAULT_TREES, 0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelParams {
    NaiveBayes(NaiveBayes),
    Knn(Knn),
    Tree(DecisionTree),
    RandomForest(RandomForest),
}

/// A trained classifier bound to an ordered list of feature names, plus the
/// feature pipeline it expects its inputs to come from.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub config: ClassifierConfig,
    pub feature_names: Vec<String>,
    pub params: ModelParams,
    pub feature_set: Option<FeatureSetId>,
    pub preprocessing: Preprocessing,
}

impl TrainedModel {
    pub fn with_pipeline(mut self, set: FeatureSetId, pre: Preprocessing) -> Self {
        self.feature_set = Some(set);
        self.preprocessing = pre;
        self
    }

    /// Probability of the positive class for values in `feature_names`
    /// order.
    pub fn predict_row(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.feature_names.len() {
            return Err(invalid(format!(
                "model expects {} features, got {}",
                self.feature_names.len(),
                x.len()
            )));
        }
        let p = match &self.params {
            ModelParams::NaiveBayes(m) => m.predict(x),
            ModelParams::Knn(m) => m.predict(x),
            ModelParams::Tree(m) => m.predict(x),
            ModelParams::RandomForest(m) => m.predict(x),
        };
        Ok(p.clamp(0.0, 1.0))
    }

    /// Looks the model's features up by name; extra features are ignored.
    pub fn predict_proba(&self, v: &FeatureVector) -> Result<f64> {
        let selected = v.select(&self.feature_names)?;
        self.predict_row(selected.values())
    }

    /// `predict_proba(v) >= threshold`.
    pub fn classify(&self, v: &FeatureVector, threshold: f64) -> Result<bool> {
        Ok(self.predict_proba(v)? >= threshold)
    }
}

pub fn train(ds: &Dataset, config: ClassifierConfig) -> Result<TrainedModel> {
    let ds = ds.canonicalized();
    let params = match config {
        ClassifierConfig::NaiveBayes => ModelParams::NaiveBayes(bayes::train(&ds)?),
        ClassifierConfig::Knn { k } => ModelParams::Knn(knn::train(&ds, k)?),
        ClassifierConfig::Tree => ModelParams::Tree(tree::train_tree(&ds)?),
        ClassifierConfig::RandomForest { trees, seed } => {
            ModelParams::RandomForest(tree::train_forest(&ds, trees, seed)?)
        }
    };
    Ok(TrainedModel {
        config,
        feature_names: ds.feature_names().to_vec(),
        params,
        feature_set: None,
        preprocessing: Preprocessing::default(),
    })
}

pub fn train_naive_bayes(ds: &Dataset) -> Result<TrainedModel> {
    train(ds, ClassifierConfig::NaiveBayes)
}

pub fn train_knn(ds: &Dataset, k: usize) -> Result<TrainedModel> {
    train(ds, ClassifierConfig::Knn { k })
}

pub fn train_tree(ds: &Dataset) -> Result<TrainedModel> {
    train(ds, ClassifierConfig::Tree)
}

pub fn train_random_forest(ds: &Dataset, trees: usize, seed: u64) -> Result<TrainedModel> {
    train(ds, ClassifierConfig::RandomForest { trees, seed })
}
