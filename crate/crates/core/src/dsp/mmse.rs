//! Ephraim-Malah MMSE short-time spectral amplitude estimator.

use std::f64::consts::PI;

use rustfft::num_complex::Complex;

use super::fft;
use super::stft::complex_frames;
use super::window::hann;
use crate::audio::AudioBuffer;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MmseConfig {
    pub window_len: usize,
    pub hop: usize,
    /// Decision-directed smoothing of the a-priori SNR.
    pub alpha: f64,
    /// Floor on the a-priori SNR, in dB.
    pub xi_floor_db: f64,
    /// Bins in the per-frequency magnitude histogram used for the noise mode.
    pub histogram_bins: usize,
    pub min_seconds: f64,
}

impl Default for MmseConfig {
    fn default() -> Self {
        Self {
            window_len: 512,
            hop: 256,
            alpha: 0.98,
            xi_floor_db: -25.0,
            histogram_bins: 100,
            min_seconds: 1.0,
        }
    }
}

/// `exp(-x) * I0(x)` for `x >= 0` (Abramowitz & Stegun 9.8.1, 9.8.2).
fn i0e(x: f64) -> f64 {
    if x <= 3.75 {
        let t = (x / 3.75).powi(2);
        let i0 = 1.0
            + t * (3.515_622_9
                + t * (3.089_942_4
                    + t * (1.206_749_2 + t * (0.265_973_2 + t * (0.036_076_8 + t * 0.004_581_3)))));
        i0 * (-x).exp()
    } else {
        let t = 3.75 / x;
        let p = 0.398_942_28
            + t * (0.013_285_92
                + t * (0.002_253_19
                    + t * (-0.001_575_65
                        + t * (0.009_162_81
                            + t * (-0.020_577_06
                                + t * (0.026_355_37 + t * (-0.016_476_33 + t * 0.003_923_77)))))));
        p / x.sqrt()
    }
}

/// `exp(-x) * I1(x)` for `x >= 0` (Abramowitz & Stegun 9.8.3, 9.8.4).
fn i1e(x: f64) -> f64 {
    if x <= 3.75 {
        let t = (x / 3.75).powi(2);
        let i1 = x
            * (0.5
                + t * (0.878_905_94
                    + t * (0.514_988_69
                        + t * (0.150_849_34
                            + t * (0.026_587_33 + t * (0.003_015_32 + t * 0.000_324_11))))));
        i1 * (-x).exp()
    } else {
        let t = 3.75 / x;
        let p = 0.398_942_28
            + t * (-0.039_880_24
                + t * (-0.003_620_18
                    + t * (0.001_638_01
                        + t * (-0.010_315_55
                            + t * (0.022_829_67
                                + t * (-0.028_953_12 + t * (0.017_876_54 - t * 0.004_200_59)))))));
        p / x.sqrt()
    }
}

/// Spectral gain for a-priori SNR `xi` and a-posteriori SNR `gamma`.
fn gain(xi: f64, gamma: f64) -> f64 {
    let v = xi / (1.0 + xi) * gamma;
    let g = (PI.sqrt() / 2.0) * (v.sqrt() / gamma)
        * ((1.0 + v) * i0e(v / 2.0) + v * i1e(v / 2.0));
    // the estimator exceeds unity at very low gamma; never amplify
    g.min(1.0)
}

/// Centre of the fullest bin of a `bins`-bin histogram over `[0, max]`.
pub(crate) fn histogram_mode(values: &[f64], bins: usize) -> f64 {
    let max = values.iter().cloned().fold(0.0, f64::max);
    if max <= 0.0 {
        return 0.0;
    }
    let width = max / bins as f64;
    let mut counts = vec![0usize; bins];
    for &v in values {
        let b = ((v / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    let (best, _) = counts
        .iter()
        .enumerate()
        .fold((0, 0), |acc, (i, &c)| if c > acc.1 { (i, c) } else { acc });
    (best as f64 + 0.5) * width
}

pub fn mmse_stsa(buf: &AudioBuffer) -> Result<AudioBuffer> {
    mmse_stsa_with(buf, &MmseConfig::default())
}

/// Stationary noise reduction. The noise power of each frequency bin is
/// taken from the modal STFT magnitude of that bin (Rayleigh mode `s`
/// implies mean power `2 s^2`), the a-priori SNR follows the
/// decision-directed rule, and the enhanced frames are overlap-added with a
/// square-root Hann window pair. Output length equals input length.
pub fn mmse_stsa_with(buf: &AudioBuffer, cfg: &MmseConfig) -> Result<AudioBuffer> {
    if buf.duration() < cfg.min_seconds {
        return Err(Error::TooShort(format!(
            "MMSE STSA needs at least {} s, got {:.3} s",
            cfg.min_seconds,
            buf.duration()
        )));
    }
    let n = cfg.window_len;
    let bins = n / 2 + 1;
    let mut frames = analyze(buf.samples(), cfg);
    let noise: Vec<f64> = (0..bins)
        .map(|k| {
            let mags: Vec<f64> = frames.iter().map(|f| f[k].norm()).collect();
            let mode = histogram_mode(&mags, cfg.histogram_bins);
            2.0 * mode * mode
        })
        .collect();

    let xi_floor = 10f64.powf(cfg.xi_floor_db / 10.0);
    let mut prev_amp2 = vec![0.0; bins];
    for (l, frame) in frames.iter_mut().enumerate() {
        for k in 0..bins {
            let y = frame[k];
            let power = y.norm_sqr();
            if power == 0.0 {
                prev_amp2[k] = 0.0;
                continue;
            }
            let lambda = noise[k];
            if lambda <= f64::MIN_POSITIVE {
                prev_amp2[k] = power;
                continue;
            }
            let gamma = power / lambda;
            let ml = (gamma - 1.0).max(0.0);
            let xi = if l == 0 {
                ml.max(xi_floor)
            } else {
                (cfg.alpha * prev_amp2[k] / lambda + (1.0 - cfg.alpha) * ml).max(xi_floor)
            };
            let g = gain(xi, gamma);
            frame[k] = y * g;
            prev_amp2[k] = g * g * power;
        }
    }

    Ok(buf.with_samples(synthesize(&frames, buf.len(), cfg)))
}

fn analysis_window(cfg: &MmseConfig) -> Vec<f64> {
    hann(cfg.window_len).into_iter().map(f64::sqrt).collect()
}

fn padded_len(len: usize, cfg: &MmseConfig) -> usize {
    let n = cfg.window_len;
    n + (len + n).div_ceil(cfg.hop) * cfg.hop + n
}

/// Square-root-Hann frames of the signal padded by a window on each side,
/// so every input sample is covered by a full set of overlapping frames.
fn analyze(x: &[f64], cfg: &MmseConfig) -> Vec<Vec<Complex<f64>>> {
    let n = cfg.window_len;
    let mut padded = vec![0.0; padded_len(x.len(), cfg)];
    padded[n..n + x.len()].copy_from_slice(x);
    complex_frames(&padded, &analysis_window(cfg), cfg.hop)
}

fn synthesize(frames: &[Vec<Complex<f64>>], len: usize, cfg: &MmseConfig) -> Vec<f64> {
    let n = cfg.window_len;
    let bins = n / 2 + 1;
    let window = analysis_window(cfg);
    let mut out = vec![0.0; padded_len(len, cfg)];
    let inv = fft::inverse(n);
    let scale = 1.0 / n as f64;
    for (l, half) in frames.iter().enumerate() {
        let mut full = vec![Complex::new(0.0, 0.0); n];
        full[..bins].copy_from_slice(half);
        for k in 1..n / 2 {
            full[n - k] = half[k].conj();
        }
        inv.process(&mut full);
        let start = l * cfg.hop;
        for i in 0..n {
            out[start + i] += full[i].re * scale * window[i];
        }
    }
    out[n..n + len].to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audio::CANONICAL_RATE;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    const RATE: u32 = CANONICAL_RATE;

    fn noise(level_db: f64, n: usize, seed: u64) -> Vec<f64> {
        let sigma = 10f64.powf(level_db / 20.0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| sigma * Distribution::<f64>::sample(&StandardNormal, &mut rng)).collect::<Vec<f64>>()
    }

    #[test]
    fn bessel_approximations_match_series() {
        use crate::dsp::window::bessel_i0;
        for x in [0.0, 0.5, 2.0, 3.75, 5.0, 20.0] {
            assert!((i0e(x) - bessel_i0(x) * (-x).exp()).abs() < 1e-6 * i0e(x).max(1e-3));
        }
        // I1(1) = 0.5651591039924851
        assert!((i1e(1.0) - 0.565_159_103_992_485_1 * (-1.0f64).exp()).abs() < 1e-7);
    }

    #[test]
    fn gain_limits() {
        // high SNR passes through, low SNR is suppressed
        assert!(gain(1000.0, 1000.0) > 0.99);
        assert!(gain(0.003, 1.0) < 0.2);
    }

    #[test]
    fn analysis_synthesis_is_transparent() {
        let cfg = MmseConfig::default();
        let x = noise(-10.0, 10_007, 11);
        let y = synthesize(&analyze(&x, &cfg), x.len(), &cfg);
        assert_eq!(y.len(), x.len());
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn stationary_tone_counts_as_noise() {
        let x: Vec<f64> = (0..RATE as usize * 2)
            .map(|i| 0.5 * (2.0 * PI * 1500.0 * i as f64 / RATE as f64).sin())
            .collect();
        let buf = AudioBuffer::new(x, RATE).unwrap();
        let out = mmse_stsa(&buf).unwrap();
        assert_eq!(out.len(), buf.len());
        assert!(out.rms() < 0.5 * buf.rms());
    }

    #[test]
    fn stationary_noise_is_reduced() {
        let buf = AudioBuffer::new(noise(-30.0, RATE as usize * 5, 3), RATE).unwrap();
        let out = mmse_stsa(&buf).unwrap();
        let drop = 20.0 * (out.rms() / buf.rms()).log10();
        assert!(drop <= -10.0, "{drop} dB");
    }

    #[test]
    fn silence_stays_silent() {
        let buf = AudioBuffer::silence(RATE as usize * 2, RATE);
        assert!(mmse_stsa(&buf).unwrap().samples().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn short_input_is_rejected() {
        let buf = AudioBuffer::silence(RATE as usize / 2, RATE);
        assert!(matches!(mmse_stsa(&buf), Err(Error::TooShort(_))));
    }

    #[test]
    fn histogram_mode_of_constant() {
        let m = histogram_mode(&[2.0; 50], 100);
        assert!((m - 2.0).abs() <= 0.02);
        assert_eq!(histogram_mode(&[0.0; 10], 100), 0.0);
    }
}
