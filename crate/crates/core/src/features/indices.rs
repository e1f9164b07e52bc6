//! Acoustic indices computed from the envelope or the magnitude spectrogram.

use super::BandSpec;
use crate::dsp::{Envelope, Spectrogram};

/// Returned by [`snr_spectral`] when the in-band spectrum is exactly flat
/// (or silent) and the coefficient of variation is zero.
pub const SNR_SENTINEL: f64 = 1e9;

/// Histogram resolution for the background-noise mode.
pub const BGN_HISTOGRAM_BINS: usize = 100;

/// Low and medium spectral-cover thresholds, in normalised magnitude.
pub const COVER_LOW: f64 = 0.0001;
pub const COVER_MEDIUM: f64 = 0.0003;

/// Duration of the sub-segments averaged by [`ssnr`].
pub const SSNR_SEGMENT_SECONDS: f64 = 0.1;

/// Shannon entropy of the distribution proportional to `weights`, divided by
/// `ln(n)` so the result lies in `[0, 1]`. Degenerate inputs (all zero, or a
/// single element) are treated as maximally dispersed and return 1.
pub fn normalized_entropy(weights: &[f64]) -> f64 {
    let n = weights.len();
    let total: f64 = weights.iter().sum();
    if n < 2 || total <= 0.0 {
        return 1.0;
    }
    let h: f64 = weights
        .iter()
        .filter(|&&w| w > 0.0)
        .map(|&w| {
            let p = w / total;
            -p * p.ln()
        })
        .sum();
    (h / (n as f64).ln()).clamp(0.0, 1.0)
}

/// Dispersion of the amplitude envelope over time.
pub fn temporal_entropy(env: &Envelope) -> f64 {
    normalized_entropy(env.values())
}

/// Mean over frames of the per-frame in-band spectral entropy.
pub fn spectral_entropy(spec: &Spectrogram, band: &BandSpec) -> f64 {
    let bins = spec.bin_range(band.low, band.high);
    if spec.frames() == 0 {
        return 1.0;
    }
    spec.iter_frames().map(|f| normalized_entropy(&f[bins.clone()])).sum::<f64>()
        / spec.frames() as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackgroundNoiseEstimate {
    /// `mode + std_dev`
    pub bgn: f64,
    pub mode: f64,
    pub std_dev: f64,
}

/// Modal envelope amplitude from a 100-bin histogram over `[0, max]`, plus
/// the standard deviation of all envelope values.
pub fn background_noise(env: &Envelope) -> BackgroundNoiseEstimate {
    let v = env.values();
    if v.is_empty() {
        return BackgroundNoiseEstimate { bgn: 0.0, mode: 0.0, std_dev: 0.0 };
    }
    let mode = crate::dsp::histogram_mode(v, BGN_HISTOGRAM_BINS);
    let (_, std_dev) = mean_std(v);
    BackgroundNoiseEstimate { bgn: mode + std_dev, mode, std_dev }
}

/// Population mean and standard deviation.
/// Population mean and standard deviation. Deviations are taken from the
/// first element so a constant input has a standard deviation of exactly 0.
pub(crate) fn mean_std(v: &[f64]) -> (f64, f64) {
    let Some(&k) = v.first() else {
        return (0.0, 0.0);
    };
    let n = v.len() as f64;
    let (s, s2) = v.iter().fold((0.0, 0.0), |(s, s2), x| (s + (x - k), s2 + (x - k) * (x - k)));
    let var = ((s2 - s * s / n) / n).max(0.0);
    (k + s / n, var.sqrt())
}

/// Time-averaged magnitude of each in-band bin.
fn bin_means(spec: &Spectrogram, band: &BandSpec) -> Vec<f64> {
    let bins = spec.bin_range(band.low, band.high);
    let frames = spec.frames().max(1) as f64;
    let mut sums = vec![0.0; bins.len()];
    for f in spec.iter_frames() {
        for (s, &m) in sums.iter_mut().zip(&f[bins.clone()]) {
            *s += m;
        }
    }
    sums.iter().map(|s| s / frames).collect()
}

/// Mean STFT magnitude over all frames and in-band bins.
pub fn psd(spec: &Spectrogram, band: &BandSpec) -> f64 {
    let means = bin_means(spec, band);
    if means.is_empty() {
        return 0.0;
    }
    means.iter().sum::<f64>() / means.len() as f64
}

/// Inverse coefficient of variation of the per-bin time-averaged spectrum.
/// High for flat (noise-like) spectra, low for peaked ones.
pub fn snr_spectral(spec: &Spectrogram, band: &BandSpec) -> f64 {
    let means = bin_means(spec, band);
    if means.len() < 2 {
        return SNR_SENTINEL;
    }
    let (mean, std) = mean_std(&means);
    if std <= 0.0 || mean <= 0.0 {
        return SNR_SENTINEL;
    }
    (mean / std).min(SNR_SENTINEL)
}

fn frame_intensities(spec: &Spectrogram, band: &BandSpec) -> Vec<f64> {
    let bins = spec.bin_range(band.low, band.high);
    spec.iter_frames().map(|f| f[bins.clone()].iter().sum()).collect()
}

fn coefficient_of_variation(v: &[f64]) -> f64 {
    let (mean, std) = mean_std(v);
    if mean <= 0.0 {
        0.0
    } else {
        std / mean
    }
}

/// Coefficient of variation of per-frame intensity over the whole spectrum.
pub fn isnr(spec: &Spectrogram) -> f64 {
    isnr_band(spec, &BandSpec::full(spec.sample_rate()))
}

/// [`isnr`] with intensities summed over the band's bins only.
pub fn isnr_band(spec: &Spectrogram, band: &BandSpec) -> f64 {
    coefficient_of_variation(&frame_intensities(spec, band))
}

pub fn ssnr(spec: &Spectrogram) -> f64 {
    ssnr_band(spec, &BandSpec::full(spec.sample_rate()))
}

/// Mean of the intensity coefficient of variation over consecutive 0.1 s
/// groups of frames. A trailing partial group is ignored.
pub fn ssnr_band(spec: &Spectrogram, band: &BandSpec) -> f64 {
    let intensities = frame_intensities(spec, band);
    let group = ((SSNR_SEGMENT_SECONDS / spec.frame_seconds()).round() as usize).max(1);
    let groups: Vec<&[f64]> = intensities.chunks_exact(group).collect();
    if groups.is_empty() {
        return coefficient_of_variation(&intensities);
    }
    groups.iter().map(|g| coefficient_of_variation(g)).sum::<f64>() / groups.len() as f64
}

/// Acoustic complexity: per bin, the summed absolute frame-to-frame change
/// over the summed intensity, averaged over in-band bins.
pub fn aci(spec: &Spectrogram, band: &BandSpec) -> f64 {
    let bins = spec.bin_range(band.low, band.high);
    if bins.is_empty() || spec.frames() < 2 {
        return 0.0;
    }
    let mut diff = vec![0.0; bins.len()];
    let mut total = vec![0.0; bins.len()];
    let mut prev: Option<&[f64]> = None;
    for f in spec.iter_frames() {
        let cur = &f[bins.clone()];
        if let Some(p) = prev {
            for (d, (a, b)) in diff.iter_mut().zip(cur.iter().zip(p)) {
                *d += (a - b).abs();
            }
        }
        for (t, &m) in total.iter_mut().zip(cur) {
            *t += m;
        }
        prev = Some(cur);
    }
    let per_bin: f64 =
        diff.iter().zip(&total).map(|(d, t)| if *t > 0.0 { d / t } else { 0.0 }).sum();
    per_bin / bins.len() as f64
}

/// Fraction of in-band spectrogram cells above `threshold`.
pub fn spectral_cover(spec: &Spectrogram, band: &BandSpec, threshold: f64) -> f64 {
    let bins = spec.bin_range(band.low, band.high);
    let cells = bins.len() * spec.frames();
    if cells == 0 {
        return 0.0;
    }
    let above = spec.iter_frames().flat_map(|f| &f[bins.clone()]).filter(|&&m| m > threshold).count();
    above as f64 / cells as f64
}
