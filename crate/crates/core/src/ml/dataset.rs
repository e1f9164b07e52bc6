use crate::error::{Error, Result};
use crate::features::{FeatureTable, FeatureVector};
use std::collections::HashMap;

/// Labelled feature rows sharing one ordered list of feature names.
/// `true` is the positive class (noise present).
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    feature_names: Vec<String>,
    rows: Vec<Vec<f64>>,
    labels: Vec<bool>,
    provenance: String,
}

impl Dataset {
    pub fn new(feature_names: Vec<String>, rows: Vec<Vec<f64>>, labels: Vec<bool>) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::Dataset(format!("{} rows but {} labels", rows.len(), labels.len())));
        }
        for (i, r) in rows.iter().enumerate() {
            if r.len() != feature_names.len() {
                return Err(Error::Dataset(format!(
                    "row {i} has {} values, expected {}",
                    r.len(),
                    feature_names.len()
                )));
            }
            if let Some(j) = r.iter().position(|v| !v.is_finite()) {
                return Err(Error::Dataset(format!("row {i}: {} is not finite", feature_names[j])));
            }
        }
        Ok(Self { feature_names, rows, labels, provenance: String::new() })
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>) -> Self {
        self.provenance = provenance.into();
        self
    }

    /// Every row of the table must carry a label.
    pub fn from_table(table: &FeatureTable) -> Result<Self> {
        let labels = table
            .labels
            .iter()
            .enumerate()
            .map(|(i, l)| l.ok_or_else(|| Error::Dataset(format!("row {} ({}) has no label", i, table.ids[i]))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(table.names.clone(), table.rows.clone(), labels)
    }

    pub fn from_vectors(vectors: &[FeatureVector], labels: Vec<bool>) -> Result<Self> {
        let names = vectors.first().map(|v| v.names().to_vec()).unwrap_or_default();
        if let Some(v) = vectors.iter().find(|v| v.names() != names.as_slice()) {
            return Err(Error::Dataset(format!("vector has features {:?}...", v.names().first())));
        }
        Self::new(names, vectors.iter().map(|v| v.values().to_vec()).collect(), labels)
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn labels(&self) -> &[bool] {
        &self.labels
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn positives(&self) -> usize {
        self.labels.iter().filter(|&&l| l).count()
    }

    pub fn negatives(&self) -> usize {
        self.len() - self.positives()
    }

    /// Column `j` as a vector.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[j]).collect()
    }

    /// Rows at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            feature_names: self.feature_names.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            provenance: self.provenance.clone(),
        }
    }

    /// The named columns, in the order given.
    pub fn select_features(&self, names: &[String]) -> Result<Dataset> {
        let cols = column_indices(&self.feature_names, names)?;
        Ok(Dataset {
            feature_names: names.to_vec(),
            rows: self.rows.iter().map(|r| cols.iter().map(|&c| r[c]).collect()).collect(),
            labels: self.labels.clone(),
            provenance: self.provenance.clone(),
        })
    }

    pub(crate) fn require_rows(&self) -> Result<()> {
        if self.is_empty() || self.feature_names.is_empty() {
            return Err(Error::Dataset("training needs at least one row and one feature".into()));
        }
        Ok(())
    }

    pub(crate) fn require_both_classes(&self) -> Result<()> {
        if self.positives() == 0 || self.negatives() == 0 {
            return Err(Error::Dataset(format!(
                "training needs both classes, got {} positive and {} negative rows",
                self.positives(),
                self.negatives()
            )));
        }
        Ok(())
    }

    /// Row indices sorted by a content hash, so that training depends on the
    /// multiset of rows and not on the order they were supplied in.
    pub fn canonical_order(&self) -> Vec<usize> {
        let keys: Vec<(u64, Vec<u64>, bool)> = self
            .rows
            .iter()
            .zip(&self.labels)
            .map(|(r, &l)| {
                let bits: Vec<u64> = r.iter().map(|v| v.to_bits()).collect();
                (fnv1a(&bits, l), bits, l)
            })
            .collect();
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
        idx
    }

    pub(crate) fn canonicalized(&self) -> Dataset {
        self.subset(&self.canonical_order())
    }
}

fn fnv1a(bits: &[u64], label: bool) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let bytes = bits.iter().flat_map(|b| b.to_le_bytes()).chain([label as u8]);
    for byte in bytes {
        h ^= byte as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Positions of `wanted` within `available`.
pub(crate) fn column_indices(available: &[String], wanted: &[String]) -> Result<Vec<usize>> {
    let index: HashMap<&str, usize> = available.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    wanted
        .iter()
        .map(|n| index.get(n.as_str()).copied().ok_or_else(|| Error::MissingFeature(n.clone())))
        .collect()
}
