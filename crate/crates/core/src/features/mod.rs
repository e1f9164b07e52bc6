//! Acoustic indices, MFCCs and the named feature sets built from them.

mod indices;
mod io;
mod mfcc;

pub use indices::{
    aci, background_noise, isnr, isnr_band, normalized_entropy, psd, snr_spectral,
    spectral_cover, spectral_entropy, ssnr, ssnr_band, temporal_entropy,
    BackgroundNoiseEstimate, BGN_HISTOGRAM_BINS, COVER_LOW, COVER_MEDIUM, SNR_SENTINEL,
    SSNR_SEGMENT_SECONDS,
};
pub use io::{read_csv, read_csv_from, write_arff, write_csv, write_csv_to, FeatureTable};
pub use mfcc::{
    deltas, hz_from_mel, mel_from_hz, mel_from_hz_ln, mfcc, mfcc_from_spectrogram, MfccMatrix,
    LOG_FLOOR, MFCC_COEFFS,
};

use crate::audio::{AudioBuffer, Segment, CANONICAL_RATE};
use crate::dsp::{
    analytic_envelope, apply_fir, design_highpass, mmse_stsa, stft, DEFAULT_HOP, DEFAULT_TAPS,
    DEFAULT_WINDOW,
};
use crate::error::{invalid, Error, Result};
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

/// Cutoff of the optional high-pass pre-filter, and the lower MFCC edge when
/// it is active.
pub const HIGHPASS_CUTOFF: f64 = 1000.0;

/// A frequency band `[low, high)` in Hz.
#[derive(Debug, Clone, PartialEq)]
pub struct BandSpec {
    pub low: f64,
    pub high: f64,
    pub name: String,
}

impl BandSpec {
    pub fn new(low: f64, high: f64, name: impl Into<String>) -> Result<Self> {
        if !(low >= 0.0 && low < high && high.is_finite()) {
            return Err(invalid(format!("band {low}..{high} Hz is empty or negative")));
        }
        Ok(Self { low, high, name: name.into() })
    }

    /// The whole spectrum up to and including Nyquist.
    pub fn full(sample_rate: u32) -> Self {
        Self { low: 0.0, high: sample_rate as f64 / 2.0, name: "full".into() }
    }
}

/// The seven analysis bands at the canonical rate. The last one runs to
/// Nyquist so the bands tile every STFT bin.
pub fn canonical_bands() -> Vec<BandSpec> {
    const EDGES: [(f64, f64, &str); 7] = [
        (0.0, 500.0, "0_500"),
        (500.0, 1000.0, "500_1k"),
        (1000.0, 3000.0, "1k_3k"),
        (3000.0, 5000.0, "3k_5k"),
        (5000.0, 7000.0, "5k_7k"),
        (7000.0, 9000.0, "7k_9k"),
        (9000.0, CANONICAL_RATE as f64 / 2.0, "9k_11k"),
    ];
    EDGES.iter().map(|&(l, h, n)| BandSpec { low: l, high: h, name: n.into() }).collect()
}

/// Optional pre-filters applied before feature extraction, in the order
/// high-pass then MMSE.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Preprocessing {
    pub highpass: bool,
    pub mmse: bool,
}

impl Preprocessing {
    pub fn apply(&self, buf: &AudioBuffer) -> Result<AudioBuffer> {
        let mut out = buf.clone();
        if self.highpass {
            let k = design_highpass(HIGHPASS_CUTOFF, buf.sample_rate(), DEFAULT_TAPS)?;
            out = apply_fir(&out, &k);
        }
        if self.mmse {
            out = mmse_stsa(&out)?;
        }
        Ok(out)
    }

    fn bands(&self) -> Vec<BandSpec> {
        canonical_bands().into_iter().filter(|b| !self.highpass || b.low >= HIGHPASS_CUTOFF).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FeatureSetId {
    Indices,
    FreqIndices,
    Mfccs,
    MfccsNoDelta,
    All,
    AllNoDelta,
    /// Whatever correlation-based selection keeps; has no fixed name list.
    CfsSubset,
}

impl FeatureSetId {
    pub const ALL: [FeatureSetId; 7] = [
        Self::Indices,
        Self::FreqIndices,
        Self::Mfccs,
        Self::MfccsNoDelta,
        Self::All,
        Self::AllNoDelta,
        Self::CfsSubset,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Indices => "Indices",
            Self::FreqIndices => "FreqIndices",
            Self::Mfccs => "MFCCs",
            Self::MfccsNoDelta => "MFCCsNoDelta",
            Self::All => "All",
            Self::AllNoDelta => "AllNoDelta",
            Self::CfsSubset => "CFSSubset",
        }
    }

    fn groups(&self) -> Option<Groups> {
        let g = |whole, bands, mfcc, delta| Some(Groups { whole, bands, mfcc, delta });
        match self {
            Self::Indices => g(true, false, false, false),
            Self::FreqIndices => g(true, true, false, false),
            Self::Mfccs => g(false, false, true, true),
            Self::MfccsNoDelta => g(false, false, true, false),
            Self::All => g(true, true, true, true),
            Self::AllNoDelta => g(true, true, true, false),
            Self::CfsSubset => None,
        }
    }
}

impl fmt::Display for FeatureSetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FeatureSetId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|id| id.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| invalid(format!("unknown feature set '{s}'")))
    }
}

#[derive(Debug, Clone, Copy)]
struct Groups {
    whole: bool,
    bands: bool,
    mfcc: bool,
    delta: bool,
}

const BAND_INDICES: [&str; 8] =
    ["aci", "spectral_entropy", "snr", "isnr", "ssnr", "psd", "cvr_low", "cvr_med"];

fn whole_names(pre: Preprocessing) -> Vec<String> {
    let mut v = vec!["temporal_entropy", "bgn", "bgn_std", "isnr"];
    if !pre.highpass {
        v.extend(["spectral_entropy", "psd", "snr", "aci"]);
    }
    v.into_iter().map(String::from).collect()
}

fn band_names(pre: Preprocessing) -> Vec<String> {
    pre.bands()
        .iter()
        .flat_map(|b| BAND_INDICES.iter().map(move |i| format!("{i}_{}", b.name)))
        .collect()
}

fn mfcc_names(prefix: &str) -> Vec<String> {
    (0..MFCC_COEFFS).map(|i| format!("{prefix}_{i:02}")).collect()
}

fn names_for(g: Groups, pre: Preprocessing) -> Vec<String> {
    let mut names = Vec::new();
    if g.whole {
        names.extend(whole_names(pre));
    }
    if g.bands {
        names.extend(band_names(pre));
    }
    if g.mfcc {
        names.extend(mfcc_names("mfcc"));
        if g.delta {
            names.extend(mfcc_names("dmfcc"));
            names.extend(mfcc_names("ddmfcc"));
        }
    }
    names
}

/// Ordered feature names of a set under the given pre-processing.
pub fn feature_names(set: FeatureSetId, pre: Preprocessing) -> Result<Vec<String>> {
    match set.groups() {
        Some(g) => Ok(names_for(g, pre)),
        None => Err(invalid("CFSSubset has no fixed feature list until selection has run")),
    }
}

/// Named feature values in a fixed order.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    names: Vec<String>,
    values: Vec<f64>,
}

impl FeatureVector {
    pub fn new(names: Vec<String>, values: Vec<f64>) -> Result<Self> {
        if names.len() != values.len() {
            return Err(invalid("feature names and values differ in length"));
        }
        if let Some((n, v)) = names.iter().zip(&values).find(|(_, v)| !v.is_finite()) {
            return Err(invalid(format!("feature {n} is not finite ({v})")));
        }
        Ok(Self { names, values })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|i| self.values[i])
    }

    /// The named features, in the order given.
    pub fn select(&self, names: &[String]) -> Result<FeatureVector> {
        let index: HashMap<&str, usize> =
            self.names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let values = names
            .iter()
            .map(|n| index.get(n.as_str()).map(|&i| self.values[i]).ok_or_else(|| Error::MissingFeature(n.clone())))
            .collect::<Result<Vec<_>>>()?;
        Ok(FeatureVector { names: names.to_vec(), values })
    }
}

fn compute(audio: &AudioBuffer, g: Groups, pre: Preprocessing) -> Result<FeatureVector> {
    if audio.sample_rate() != CANONICAL_RATE {
        return Err(invalid(format!(
            "features need {CANONICAL_RATE} Hz audio, got {} Hz",
            audio.sample_rate()
        )));
    }
    let x = pre.apply(audio)?;
    let spec = stft(&x, DEFAULT_WINDOW, DEFAULT_HOP)?;
    let mut values = Vec::new();
    if g.whole {
        let env = analytic_envelope(&x)?;
        let bgn = background_noise(&env);
        values.extend([temporal_entropy(&env), bgn.bgn, bgn.std_dev, isnr(&spec)]);
        if !pre.highpass {
            let full = BandSpec::full(x.sample_rate());
            values.extend([
                spectral_entropy(&spec, &full),
                psd(&spec, &full),
                snr_spectral(&spec, &full),
                aci(&spec, &full),
            ]);
        }
    }
    if g.bands {
        for b in pre.bands() {
            values.extend([
                aci(&spec, &b),
                spectral_entropy(&spec, &b),
                snr_spectral(&spec, &b),
                isnr_band(&spec, &b),
                ssnr_band(&spec, &b),
                psd(&spec, &b),
                spectral_cover(&spec, &b, COVER_LOW),
                spectral_cover(&spec, &b, COVER_MEDIUM),
            ]);
        }
    }
    if g.mfcc {
        let fmin = if pre.highpass { HIGHPASS_CUTOFF } else { 0.0 };
        let m = mfcc_from_spectrogram(&spec, fmin, x.nyquist())?;
        values.extend(m.coeff_means());
        if g.delta {
            values.extend(m.delta1_means());
            values.extend(m.delta2_means());
        }
    }
    FeatureVector::new(names_for(g, pre), values)
}

/// Pre-filters the segment and computes every feature of `set`.
pub fn extract_features(seg: &Segment, set: FeatureSetId, pre: Preprocessing) -> Result<FeatureVector> {
    let g = set
        .groups()
        .ok_or_else(|| invalid("CFSSubset needs a selected name list; use extract_named"))?;
    compute(&seg.audio, g, pre)
}

/// Computes only the groups needed for `names` and returns them in order.
pub fn extract_named(seg: &Segment, names: &[String], pre: Preprocessing) -> Result<FeatureVector> {
    let is_mfcc = |n: &String| n.starts_with("mfcc_");
    let is_delta = |n: &String| n.starts_with("dmfcc_") || n.starts_with("ddmfcc_");
    let whole = whole_names(pre);
    let g = Groups {
        whole: names.iter().any(|n| whole.contains(n)),
        bands: names.iter().any(|n| !whole.contains(n) && !is_mfcc(n) && !is_delta(n)),
        mfcc: names.iter().any(|n| is_mfcc(n) || is_delta(n)),
        delta: names.iter().any(is_delta),
    };
    compute(&seg.audio, g, pre)?.select(names)
}
