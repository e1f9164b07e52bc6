use crate::audio::Segment;
use crate::dsp::{stft, DEFAULT_HOP, DEFAULT_WINDOW};
use crate::error::Result;
use crate::features::{psd, snr_spectral, BandSpec};

/// Largest threshold step used when sweeping the detector.
pub const BEDOYA_MAX_STEP: u32 = 50;

/// Rain is declared when both the mean spectral magnitude and the spectral
/// SNR in 600-1200 Hz exceed step-dependent thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct BedoyaConfig {
    pub band: BandSpec,
}

impl Default for BedoyaConfig {
    fn default() -> Self {
        Self { band: BandSpec { low: 600.0, high: 1200.0, name: "600_1200".into() } }
    }
}

/// `y(x) = 3e-5 x^2 - 3e-5 x`
pub fn psd_threshold(x: u32) -> f64 {
    let x = x as f64;
    3e-5 * x * x - 3e-5 * x
}

/// `z(x) = 0.64 + 0.01 x`
pub fn snr_threshold(x: u32) -> f64 {
    0.64 + 0.01 * x as f64
}

fn band_stats(seg: &Segment, cfg: &BedoyaConfig) -> Result<(f64, f64)> {
    let spec = stft(&seg.audio, DEFAULT_WINDOW, DEFAULT_HOP)?;
    Ok((psd(&spec, &cfg.band), snr_spectral(&spec, &cfg.band)))
}

pub fn bedoya_classify(seg: &Segment, x: u32) -> Result<bool> {
    let (p, s) = band_stats(seg, &BedoyaConfig::default())?;
    Ok(p > psd_threshold(x) && s > snr_threshold(x))
}

/// Number of steps `x` in `0..=BEDOYA_MAX_STEP` at which the segment is
/// classified as rain. Both thresholds grow with `x`, so the positive steps
/// form a prefix and thresholding this score at `m` reproduces step `m - 1`
/// of the sweep; it is the score used to trace the baseline's ROC curve.
pub fn bedoya_score(seg: &Segment, cfg: &BedoyaConfig) -> Result<f64> {
    let (p, s) = band_stats(seg, cfg)?;
    Ok((0..=BEDOYA_MAX_STEP).filter(|&x| p > psd_threshold(x) && s > snr_threshold(x)).count() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audio::{AudioBuffer, CANONICAL_RATE};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn seg(samples: Vec<f64>) -> Segment {
        Segment::standalone("b", AudioBuffer::new(samples, CANONICAL_RATE).unwrap())
    }

    #[test]
    fn thresholds() {
        assert_eq!(psd_threshold(0), 0.0);
        assert_eq!(psd_threshold(1), 0.0);
        assert!((psd_threshold(10) - 0.0027).abs() < 1e-12);
        assert_eq!(snr_threshold(0), 0.64);
        for x in 1..BEDOYA_MAX_STEP {
            assert!(psd_threshold(x + 1) >= psd_threshold(x));
            assert!(snr_threshold(x + 1) > snr_threshold(x));
        }
    }

    #[test]
    fn silence_and_loud_noise() {
        let silent = seg(vec![0.0; 22_050]);
        for x in 1..=BEDOYA_MAX_STEP {
            assert!(!bedoya_classify(&silent, x).unwrap());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let loud = seg((0..22_050).map(|_| rng.random_range(-0.8..0.8)).collect());
        assert!(bedoya_classify(&loud, 0).unwrap());
        let score = bedoya_score(&loud, &BedoyaConfig::default()).unwrap();
        for x in 0..=BEDOYA_MAX_STEP {
            assert_eq!(bedoya_classify(&loud, x).unwrap(), (x as f64) < score);
        }
    }
}
