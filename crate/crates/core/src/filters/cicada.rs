use crate::audio::{AudioBuffer, Segment};
use crate::dsp::{apply_fir, design_bandstop, stft, Spectrogram, DEFAULT_HOP, DEFAULT_TAPS, DEFAULT_WINDOW};
use crate::error::{invalid, Error, Result};
use crate::features::extract_named;
use crate::ml::TrainedModel;

/// A bin qualifies when its mean PMF exceeds this...
pub const MIN_MEAN_PMF: f64 = 0.0125;
/// ...and its relative standard deviation, in percent, is below this.
pub const MAX_RSD_PERCENT: f64 = 70.0;
/// Narrowest band the filter will stop, in bins.
pub const MIN_BAND_BINS: usize = 2;
pub const MIN_PROFILE_FRAMES: usize = 10;

/// Per-bin statistics of the per-frame spectral PMF.
#[derive(Debug, Clone, PartialEq)]
pub struct CicadaBandProfile {
    pub mean_pmf: Vec<f64>,
    /// Percent; infinite where the mean is zero.
    pub rsd: Vec<f64>,
    /// Inclusive bin range of the chosen band, if any.
    pub selected_band: Option<(usize, usize)>,
    bin_hz: f64,
    nyquist: f64,
}

impl CicadaBandProfile {
    pub fn qualifies(&self, bin: usize) -> bool {
        self.mean_pmf[bin] > MIN_MEAN_PMF && self.rsd[bin] < MAX_RSD_PERCENT
    }

    pub fn bin_hz(&self) -> f64 {
        self.bin_hz
    }
}

/// Silent frames are skipped; at least [`MIN_PROFILE_FRAMES`] frames are
/// required and one of them must carry signal.
pub fn cicada_band_profile(spec: &Spectrogram) -> Result<CicadaBandProfile> {
    if spec.frames() < MIN_PROFILE_FRAMES {
        return Err(Error::TooShort(format!(
            "band profile needs {MIN_PROFILE_FRAMES} frames, got {}",
            spec.frames()
        )));
    }
    let bins = spec.bins();
    let mut sum = vec![0.0; bins];
    let mut sum_sq = vec![0.0; bins];
    let mut used = 0usize;
    for frame in spec.iter_frames() {
        let total: f64 = frame.iter().sum();
        if total <= 0.0 {
            continue;
        }
        used += 1;
        for (b, &m) in frame.iter().enumerate() {
            let p = m / total;
            sum[b] += p;
            sum_sq[b] += p * p;
        }
    }
    if used == 0 {
        return Err(invalid("spectrogram is silent"));
    }
    let n = used as f64;
    let mean_pmf: Vec<f64> = sum.iter().map(|s| s / n).collect();
    let rsd = mean_pmf
        .iter()
        .zip(&sum_sq)
        .map(|(&m, &s2)| {
            if m <= 0.0 {
                f64::INFINITY
            } else {
                100.0 * (s2 / n - m * m).max(0.0).sqrt() / m
            }
        })
        .collect();
    let mut profile = CicadaBandProfile {
        mean_pmf,
        rsd,
        selected_band: None,
        bin_hz: spec.bin_hz(),
        nyquist: spec.sample_rate() as f64 / 2.0,
    };
    profile.selected_band = best_run(&profile);
    Ok(profile)
}

/// Maximal run of qualifying bins with the largest summed mean PMF; the
/// earliest run wins ties.
fn best_run(p: &CicadaBandProfile) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, f64)> = None;
    let mut b = 0;
    while b < p.mean_pmf.len() {
        if !p.qualifies(b) {
            b += 1;
            continue;
        }
        let start = b;
        while b < p.mean_pmf.len() && p.qualifies(b) {
            b += 1;
        }
        let end = b - 1;
        if end + 1 - start >= MIN_BAND_BINS {
            let mass: f64 = p.mean_pmf[start..=end].iter().sum();
            if best.is_none_or(|(_, _, m)| mass > m) {
                best = Some((start, end, mass));
            }
        }
    }
    best.map(|(s, e, _)| (s, e))
}

/// The selected band in Hz: the outer edges of its first and last bins,
/// widened by another half bin on each side and kept inside (0, Nyquist).
pub fn select_cicada_band(profile: &CicadaBandProfile) -> Option<(f64, f64)> {
    let (lo, hi) = profile.selected_band?;
    let w = profile.bin_hz;
    let low = ((lo as f64 - 1.0) * w).max(w / 2.0);
    let high = ((hi as f64 + 1.0) * w).min(profile.nyquist - w / 2.0);
    (low < high).then_some((low, high))
}

#[derive(Debug, Clone, PartialEq)]
pub enum CicadaAction {
    Filtered { low: f64, high: f64 },
    Untouched,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CicadaOutcome {
    pub audio: AudioBuffer,
    pub action: CicadaAction,
    pub probability: f64,
    /// Set when the detector fired but no band qualified.
    pub warning: Option<String>,
}

/// Band-stops `[low, high]` Hz with the default kernel length.
pub fn filter_cicada_band(buf: &AudioBuffer, low: f64, high: f64) -> Result<AudioBuffer> {
    let kernel = design_bandstop(low, high, buf.sample_rate(), DEFAULT_TAPS)?;
    Ok(apply_fir(buf, &kernel))
}

/// Detect, locate and stop a chorus band. Below the detector threshold the
/// audio is returned unchanged.
pub fn filter_cicada(seg: &Segment, detector: &TrainedModel, threshold: f64) -> Result<CicadaOutcome> {
    let features = extract_named(seg, &detector.feature_names, detector.preprocessing)?;
    let probability = detector.predict_row(features.values())?;
    let untouched = |warning: Option<String>| CicadaOutcome {
        audio: seg.audio.clone(),
        action: CicadaAction::Untouched,
        probability,
        warning,
    };
    if probability < threshold {
        return Ok(untouched(None));
    }
    let spec = stft(&seg.audio, DEFAULT_WINDOW, DEFAULT_HOP)?;
    let profile = match cicada_band_profile(&spec) {
        Ok(p) => p,
        Err(e) => return Ok(untouched(Some(format!("no band profile: {e}")))),
    };
    match select_cicada_band(&profile) {
        Some((low, high)) => Ok(CicadaOutcome {
            audio: filter_cicada_band(&seg.audio, low, high)?,
            action: CicadaAction::Filtered { low, high },
            probability,
            warning: None,
        }),
        None => Ok(untouched(Some("detector fired but no stationary band qualified".into()))),
    }
}
