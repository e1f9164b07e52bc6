//! Plain-text model files.
//!
//! ```text
//! NGMODEL v1
//! kind random-forest
//! config trees=100 seed=7
//! feature_set All
//! highpass false
//! mmse false
//! features 2
//! <one name per line>
//! params
//! <kind-specific lines>
//! end
//! ```
//!
//! Numbers are written in Rust's shortest round-trip form, so a saved model
//! predicts exactly like the one in memory.

use super::{ClassifierConfig, DecisionTree, Knn, ModelParams, NaiveBayes, Node, RandomForest, TrainedModel};
use crate::error::{Error, Result};
use crate::features::{FeatureSetId, Preprocessing};
use std::fmt::Write as _;
use std::path::Path;

const MAGIC: &str = "NGMODEL v1";

fn join(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn write_node(out: &mut String, node: &Node) {
    match node {
        Node::Leaf { pos, neg } => {
            let _ = writeln!(out, "leaf {pos} {neg}");
        }
        Node::Split { feature, threshold, left, right } => {
            let _ = writeln!(out, "split {feature} {threshold}");
            write_node(out, left);
            write_node(out, right);
        }
    }
}

impl TrainedModel {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{MAGIC}");
        let _ = writeln!(s, "kind {}", self.config.kind());
        match self.config {
            ClassifierConfig::Knn { k } => {
                let _ = writeln!(s, "config k={k}");
            }
            ClassifierConfig::RandomForest { trees, seed } => {
                let _ = writeln!(s, "config trees={trees} seed={seed}");
            }
            _ => s.push_str("config\n"),
        }
        let _ = writeln!(s, "feature_set {}", self.feature_set.map_or("-", |f| f.as_str()));
        let _ = writeln!(s, "highpass {}", self.preprocessing.highpass);
        let _ = writeln!(s, "mmse {}", self.preprocessing.mmse);
        let _ = writeln!(s, "features {}", self.feature_names.len());
        for n in &self.feature_names {
            let _ = writeln!(s, "{n}");
        }
        s.push_str("params\n");
        match &self.params {
            ModelParams::NaiveBayes(m) => {
                let _ = writeln!(s, "prior {}", m.prior_pos);
                for p in &m.params {
                    let _ = writeln!(s, "{}", join(p));
                }
            }
            ModelParams::Knn(m) => {
                let _ = writeln!(s, "means {}", join(&m.means));
                let _ = writeln!(s, "stds {}", join(&m.stds));
                let _ = writeln!(s, "rows {}", m.rows.len());
                for (r, l) in m.rows.iter().zip(&m.labels) {
                    let _ = writeln!(s, "{} {}", *l as u8, join(r));
                }
            }
            ModelParams::Tree(t) => write_node(&mut s, &t.root),
            ModelParams::RandomForest(f) => {
                let _ = writeln!(s, "trees {}", f.trees.len());
                for t in &f.trees {
                    s.push_str("tree\n");
                    write_node(&mut s, &t.root);
                }
            }
        }
        s.push_str("end\n");
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        Parser { lines: text.lines().collect(), pos: 0 }.model()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }
}

struct Parser<'a> {
    lines: Vec<&'a str>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, reason: impl Into<String>) -> Error {
        Error::ModelFormat { line: self.pos, reason: reason.into() }
    }

    fn next(&mut self) -> Result<&'a str> {
        let line = self.lines.get(self.pos).copied().ok_or_else(|| self.err("unexpected end of file"))?;
        self.pos += 1;
        Ok(line.trim_end())
    }

    /// Next line, which must start with `key`; returns the rest.
    fn keyed(&mut self, key: &str) -> Result<&'a str> {
        let line = self.next()?;
        match line.split_once(' ') {
            Some((k, rest)) if k == key => Ok(rest),
            _ if line == key => Ok(""),
            _ => Err(self.err(format!("expected '{key}', found '{line}'"))),
        }
    }

    fn num<T: std::str::FromStr>(&self, s: &str) -> Result<T> {
        s.parse().map_err(|_| self.err(format!("'{s}' is not a valid number")))
    }

    fn floats(&self, s: &str, expected: usize) -> Result<Vec<f64>> {
        let v = s.split_whitespace().map(|t| self.num::<f64>(t)).collect::<Result<Vec<_>>>()?;
        if v.len() != expected {
            return Err(self.err(format!("expected {expected} numbers, found {}", v.len())));
        }
        Ok(v)
    }

    fn flag(&mut self, key: &str) -> Result<bool> {
        match self.keyed(key)? {
            "true" => Ok(true),
            "false" => Ok(false),
            other => Err(self.err(format!("'{other}' is not true or false"))),
        }
    }

    fn config(&mut self, kind: &str) -> Result<ClassifierConfig> {
        let rest = self.keyed("config")?;
        let mut k = None;
        let mut trees = None;
        let mut seed = None;
        for kv in rest.split_whitespace() {
            let (key, val) = kv.split_once('=').ok_or_else(|| self.err(format!("bad config entry '{kv}'")))?;
            match key {
                "k" => k = Some(self.num(val)?),
                "trees" => trees = Some(self.num(val)?),
                "seed" => seed = Some(self.num(val)?),
                _ => return Err(self.err(format!("unknown config key '{key}'"))),
            }
        }
        let missing = |what: &str| self.err(format!("config lacks {what}"));
        match kind {
            "naive-bayes" => Ok(ClassifierConfig::NaiveBayes),
            "tree" => Ok(ClassifierConfig::Tree),
            "knn" => Ok(ClassifierConfig::Knn { k: k.ok_or_else(|| missing("k"))? }),
            "random-forest" => Ok(ClassifierConfig::RandomForest {
                trees: trees.ok_or_else(|| missing("trees"))?,
                seed: seed.ok_or_else(|| missing("seed"))?,
            }),
            other => Err(self.err(format!("unknown model kind '{other}'"))),
        }
    }

    fn node(&mut self, features: usize, depth: usize) -> Result<Node> {
        if depth > 10_000 {
            return Err(self.err("tree too deep"));
        }
        let line = self.next()?;
        let parts: Vec<&str> = line.split_whitespace().collect();
        match parts.as_slice() {
            ["leaf", p, n] => Ok(Node::Leaf { pos: self.num(p)?, neg: self.num(n)? }),
            ["split", f, t] => {
                let feature: usize = self.num(f)?;
                if feature >= features {
                    return Err(self.err(format!("split on feature {feature} of {features}")));
                }
                let threshold = self.num(t)?;
                let left = Box::new(self.node(features, depth + 1)?);
                let right = Box::new(self.node(features, depth + 1)?);
                Ok(Node::Split { feature, threshold, left, right })
            }
            _ => Err(self.err(format!("expected a tree node, found '{line}'"))),
        }
    }

    fn model(mut self) -> Result<TrainedModel> {
        if self.next()? != MAGIC {
            return Err(self.err(format!("missing '{MAGIC}' header")));
        }
        let kind = self.keyed("kind")?;
        let config = self.config(kind)?;
        let set = match self.keyed("feature_set")? {
            "-" => None,
            s => Some(s.parse::<FeatureSetId>().map_err(|e| self.err(e.to_string()))?),
        };
        let preprocessing = Preprocessing { highpass: self.flag("highpass")?, mmse: self.flag("mmse")? };
        let f: usize = {
            let s = self.keyed("features")?;
            self.num(s)?
        };
        let feature_names = (0..f).map(|_| self.next().map(String::from)).collect::<Result<Vec<_>>>()?;
        self.keyed("params")?;
        let params = match config {
            ClassifierConfig::NaiveBayes => {
                let s = self.keyed("prior")?;
                let prior_pos = self.num(s)?;
                let params = (0..f)
                    .map(|_| {
                        let line = self.next()?;
                        let v = self.floats(line, 4)?;
                        Ok([v[0], v[1], v[2], v[3]])
                    })
                    .collect::<Result<Vec<_>>>()?;
                ModelParams::NaiveBayes(NaiveBayes { prior_pos, params })
            }
            ClassifierConfig::Knn { k } => {
                let s = self.keyed("means")?;
                let means = self.floats(s, f)?;
                let s = self.keyed("stds")?;
                let stds = self.floats(s, f)?;
                let s = self.keyed("rows")?;
                let n: usize = self.num(s)?;
                let mut rows = Vec::with_capacity(n);
                let mut labels = Vec::with_capacity(n);
                for _ in 0..n {
                    let line = self.next()?;
                    let (l, rest) = line.split_once(' ').unwrap_or((line, ""));
                    labels.push(match l {
                        "1" => true,
                        "0" => false,
                        _ => return Err(self.err(format!("bad label '{l}'"))),
                    });
                    rows.push(self.floats(rest, f)?);
                }
                if k == 0 || k > n {
                    return Err(self.err(format!("k = {k} with {n} stored rows")));
                }
                ModelParams::Knn(Knn { k, means, stds, rows, labels })
            }
            ClassifierConfig::Tree => ModelParams::Tree(DecisionTree { root: self.node(f, 0)? }),
            ClassifierConfig::RandomForest { .. } => {
                let s = self.keyed("trees")?;
                let n: usize = self.num(s)?;
                let mut trees = Vec::with_capacity(n);
                for _ in 0..n {
                    self.keyed("tree")?;
                    trees.push(DecisionTree { root: self.node(f, 0)? });
                }
                if trees.is_empty() {
                    return Err(self.err("forest has no trees"));
                }
                ModelParams::RandomForest(RandomForest { trees })
            }
        };
        self.keyed("end")?;
        Ok(TrainedModel { config, feature_names, params, feature_set: set, preprocessing })
    }
}
