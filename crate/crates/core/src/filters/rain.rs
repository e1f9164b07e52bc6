use crate::audio::Segment;
use crate::error::{invalid, Result};
use crate::features::{extract_named, Preprocessing};
use crate::ml::TrainedModel;
use rayon::prelude::*;

#[derive(Debug, Clone)]
pub struct RainGateConfig {
    pub model: TrainedModel,
    /// Segments with rain probability at or above this are dropped; any
    /// value above 1 keeps everything.
    pub threshold: f64,
    pub preprocessing: Preprocessing,
}

impl RainGateConfig {
    /// Uses the pre-processing recorded in the model.
    pub fn new(model: TrainedModel, threshold: f64) -> Result<Self> {
        if !(threshold.is_finite() && threshold >= 0.0) {
            return Err(invalid(format!("threshold {threshold} must be a non-negative number")));
        }
        let preprocessing = model.preprocessing;
        Ok(Self { model, threshold, preprocessing })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateAction {
    Kept,
    Dropped,
    /// Features could not be computed; the segment is neither kept nor
    /// dropped.
    Failed,
}

impl GateAction {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Kept => "kept",
            Self::Dropped => "dropped",
            Self::Failed => "failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateDecision {
    pub segment: String,
    pub probability: Option<f64>,
    pub action: GateAction,
    pub error: Option<String>,
}

/// Indices refer to the input slice.
#[derive(Debug, Clone, PartialEq)]
pub struct GateResult {
    pub kept: Vec<usize>,
    pub dropped: Vec<usize>,
    pub failed: Vec<usize>,
    /// One per input segment, in input order.
    pub decisions: Vec<GateDecision>,
}

impl GateResult {
    /// Report rows `segment,probability,action`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("segment,probability,action\n");
        for d in &self.decisions {
            let p = d.probability.map_or_else(String::new, |p| p.to_string());
            s.push_str(&format!("{},{},{}\n", d.segment, p, d.action.as_str()));
        }
        s
    }
}

/// Drops every segment whose rain probability reaches the threshold.
pub fn gate_rain(segments: &[Segment], cfg: &RainGateConfig) -> GateResult {
    let decisions: Vec<GateDecision> = segments
        .par_iter()
        .map(|seg| {
            let p = extract_named(seg, &cfg.model.feature_names, cfg.preprocessing)
                .and_then(|v| cfg.model.predict_row(v.values()));
            match p {
                Ok(p) => GateDecision {
                    segment: seg.id(),
                    probability: Some(p),
                    action: if p >= cfg.threshold { GateAction::Dropped } else { GateAction::Kept },
                    error: None,
                },
                Err(e) => GateDecision {
                    segment: seg.id(),
                    probability: None,
                    action: GateAction::Failed,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    let pick = |a: GateAction| decisions.iter().enumerate().filter(|(_, d)| d.action == a).map(|(i, _)| i).collect();
    GateResult {
        kept: pick(GateAction::Kept),
        dropped: pick(GateAction::Dropped),
        failed: pick(GateAction::Failed),
        decisions,
    }
}
