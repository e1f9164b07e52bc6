//! Mel-frequency cepstral coefficients and their frame deltas.

use crate::audio::AudioBuffer;
use crate::dsp::{stft, Spectrogram, DEFAULT_HOP, DEFAULT_WINDOW};
use crate::error::{invalid, Result};
use std::f64::consts::PI;

/// Number of cepstral coefficients, and of mel filters.
pub const MFCC_COEFFS: usize = 33;

/// Floor applied to filter energies before the logarithm.
pub const LOG_FLOOR: f64 = 1e-10;

pub fn mel_from_hz(f: f64) -> f64 {
    2595.0 * (1.0 + f / 700.0).log10()
}

/// Natural-log form of the mel scale.
pub fn mel_from_hz_ln(f: f64) -> f64 {
    1127.0 * (1.0 + f / 700.0).ln()
}

pub fn hz_from_mel(m: f64) -> f64 {
    700.0 * (10f64.powf(m / 2595.0) - 1.0)
}

/// Per-frame cepstra with first and second order deltas. Each matrix has one
/// row per STFT frame and [`MFCC_COEFFS`] columns.
#[derive(Debug, Clone, PartialEq)]
pub struct MfccMatrix {
    coeffs: Vec<Vec<f64>>,
    delta1: Vec<Vec<f64>>,
    delta2: Vec<Vec<f64>>,
}

impl MfccMatrix {
    pub fn from_coeffs(coeffs: Vec<Vec<f64>>) -> Result<Self> {
        if coeffs.iter().any(|r| r.len() != MFCC_COEFFS) {
            return Err(invalid(format!("MFCC rows must have {MFCC_COEFFS} columns")));
        }
        let delta1 = deltas(&coeffs);
        let delta2 = deltas(&delta1);
        Ok(Self { coeffs, delta1, delta2 })
    }

    pub fn frames(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Vec<f64>] {
        &self.coeffs
    }

    pub fn delta1(&self) -> &[Vec<f64>] {
        &self.delta1
    }

    pub fn delta2(&self) -> &[Vec<f64>] {
        &self.delta2
    }

    pub fn coeff_means(&self) -> Vec<f64> {
        column_means(&self.coeffs)
    }

    pub fn delta1_means(&self) -> Vec<f64> {
        column_means(&self.delta1)
    }

    pub fn delta2_means(&self) -> Vec<f64> {
        column_means(&self.delta2)
    }
}

fn column_means(rows: &[Vec<f64>]) -> Vec<f64> {
    let mut out = vec![0.0; MFCC_COEFFS];
    if rows.is_empty() {
        return out;
    }
    for r in rows {
        for (o, v) in out.iter_mut().zip(r) {
            *o += v;
        }
    }
    let n = rows.len() as f64;
    out.iter_mut().for_each(|o| *o /= n);
    out
}

/// `d[t] = x[t+1] - x[t-1]`, with the first and last frames replicated
/// beyond the ends.
pub fn deltas(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = rows.len();
    (0..n)
        .map(|t| {
            let next = &rows[(t + 1).min(n - 1)];
            let prev = &rows[t.saturating_sub(1)];
            next.iter().zip(prev).map(|(a, b)| a - b).collect()
        })
        .collect()
}

/// Triangular filters with unit peak, centres equally spaced in mel between
/// `fmin` and `fmax`. Returns one weight row per filter over `bins` bins.
fn mel_filterbank(fmin: f64, fmax: f64, bins: usize, bin_hz: f64) -> Vec<Vec<f64>> {
    let (lo, hi) = (mel_from_hz(fmin), mel_from_hz(fmax));
    let edges: Vec<f64> = (0..MFCC_COEFFS + 2)
        .map(|i| hz_from_mel(lo + (hi - lo) * i as f64 / (MFCC_COEFFS + 1) as f64))
        .collect();
    (0..MFCC_COEFFS)
        .map(|j| {
            let (l, c, r) = (edges[j], edges[j + 1], edges[j + 2]);
            (0..bins)
                .map(|b| {
                    let f = b as f64 * bin_hz;
                    if f <= l || f >= r {
                        0.0
                    } else if f <= c {
                        (f - l) / (c - l)
                    } else {
                        (r - f) / (r - c)
                    }
                })
                .collect()
        })
        .collect()
}

/// Orthonormal DCT-II.
fn dct2(x: &[f64]) -> Vec<f64> {
    let n = x.len() as f64;
    (0..x.len())
        .map(|k| {
            let s: f64 = x
                .iter()
                .enumerate()
                .map(|(i, v)| v * (PI * k as f64 * (i as f64 + 0.5) / n).cos())
                .sum();
            let scale = if k == 0 { (1.0 / n).sqrt() } else { (2.0 / n).sqrt() };
            s * scale
        })
        .collect()
}

pub fn mfcc(buf: &AudioBuffer, fmin: f64, fmax: f64) -> Result<MfccMatrix> {
    let spec = stft(buf, DEFAULT_WINDOW, DEFAULT_HOP)?;
    mfcc_from_spectrogram(&spec, fmin, fmax)
}

/// [`mfcc`] on an existing magnitude spectrogram.
pub fn mfcc_from_spectrogram(spec: &Spectrogram, fmin: f64, fmax: f64) -> Result<MfccMatrix> {
    let nyquist = spec.sample_rate() as f64 / 2.0;
    if !(fmin >= 0.0 && fmin < fmax && fmax <= nyquist) {
        return Err(invalid(format!("MFCC band {fmin}..{fmax} Hz outside 0..{nyquist}")));
    }
    let bank = mel_filterbank(fmin, fmax, spec.bins(), spec.bin_hz());
    let coeffs = spec
        .iter_frames()
        .map(|frame| {
            let log_energy: Vec<f64> = bank
                .iter()
                .map(|w| {
                    let e: f64 = w.iter().zip(frame).map(|(w, m)| w * m * m).sum();
                    e.max(LOG_FLOOR).ln()
                })
                .collect();
            dct2(&log_energy)
        })
        .collect();
    MfccMatrix::from_coeffs(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audio::CANONICAL_RATE;

    #[test]
    fn mel_scale() {
        assert_eq!(mel_from_hz(0.0), 0.0);
        assert!((mel_from_hz(700.0) - 781.17).abs() < 0.01);
        for i in 0..=1000 {
            let f = 11025.0 * i as f64 / 1000.0;
            assert!((mel_from_hz(f) - mel_from_hz_ln(f)).abs() < 0.1);
            assert!((hz_from_mel(mel_from_hz(f)) - f).abs() < 1e-6);
        }
    }

    #[test]
    fn silence_gives_constant_log_floor() {
        let m = mfcc(&AudioBuffer::silence(22_050, CANONICAL_RATE), 0.0, 11025.0).unwrap();
        let expected_c0 = LOG_FLOOR.ln() * (MFCC_COEFFS as f64).sqrt();
        for row in m.coeffs() {
            assert_eq!(row.len(), MFCC_COEFFS);
            assert!((row[0] - expected_c0).abs() < 1e-9);
            assert!(row[1..].iter().all(|c| c.abs() < 1e-9));
        }
        assert!(m.delta1().iter().flatten().all(|&d| d == 0.0));
    }

    #[test]
    fn delta_of_ramp() {
        let rows: Vec<Vec<f64>> = [1.0, 2.0, 4.0].iter().map(|&v| vec![v; MFCC_COEFFS]).collect();
        let m = MfccMatrix::from_coeffs(rows).unwrap();
        assert_eq!(m.delta1()[1][0], 3.0);
        assert_eq!(m.delta1()[0][0], 1.0);
        assert_eq!(m.delta1()[2][0], 2.0);
        assert_eq!(m.delta2().len(), 3);
    }

    #[test]
    fn always_33_columns() {
        let buf = AudioBuffer::new((0..8000).map(|i| (i as f64 * 0.37).sin() * 0.3).collect(), CANONICAL_RATE)
            .unwrap();
        for (lo, hi) in [(0.0, 11025.0), (1000.0, 11025.0), (300.0, 900.0)] {
            let m = mfcc(&buf, lo, hi).unwrap();
            assert!(m.coeffs().iter().chain(m.delta2()).all(|r| r.len() == MFCC_COEFFS));
            assert_eq!(m.coeff_means().len(), MFCC_COEFFS);
        }
        assert!(mfcc(&buf, 2000.0, 1000.0).is_err());
        assert!(mfcc(&buf, 0.0, 12000.0).is_err());
    }

    #[test]
    fn dct_is_orthonormal() {
        let x: Vec<f64> = (0..MFCC_COEFFS).map(|i| (i as f64).sin()).collect();
        let y = dct2(&x);
        let ex: f64 = x.iter().map(|v| v * v).sum();
        let ey: f64 = y.iter().map(|v| v * v).sum();
        assert!((ex - ey).abs() < 1e-9);
    }
}
