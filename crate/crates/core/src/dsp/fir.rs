use std::f64::consts::PI;
use std::fmt::Write;

use rustfft::num_complex::Complex;

use super::fft;
use super::window::blackman;
use crate::audio::AudioBuffer;
use crate::error::{invalid, Result};

pub const DEFAULT_TAPS: usize = 1001;

/// Kernels at or below this length are applied by direct convolution.
const DIRECT_LIMIT: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FirKind {
    LowPass,
    HighPass,
    BandStop,
    Custom,
}

/// Linear-phase FIR kernel with an odd number of taps.
#[derive(Debug, Clone, PartialEq)]
pub struct FirKernel {
    taps: Vec<f64>,
    kind: FirKind,
    cutoffs: Vec<f64>,
}

impl FirKernel {
    /// Wraps arbitrary taps; the count must be odd so the group delay is an
    /// integer number of samples.
    pub fn from_taps(taps: Vec<f64>) -> Result<Self> {
        if taps.len().is_multiple_of(2) {
            return Err(invalid(format!("FIR kernels need an odd tap count, got {}", taps.len())));
        }
        if taps.iter().any(|t| !t.is_finite()) {
            return Err(invalid("FIR taps must be finite"));
        }
        Ok(Self { taps, kind: FirKind::Custom, cutoffs: Vec::new() })
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    pub fn kind(&self) -> FirKind {
        self.kind
    }

    pub fn cutoffs(&self) -> &[f64] {
        &self.cutoffs
    }

    pub fn group_delay(&self) -> usize {
        (self.taps.len() - 1) / 2
    }

    /// Magnitude of the frequency response at `freq`.
    pub fn gain_at(&self, freq: f64, sample_rate: u32) -> f64 {
        let w = 2.0 * PI * freq / sample_rate as f64;
        self.taps
            .iter()
            .enumerate()
            .map(|(n, &h)| Complex::from_polar(h, -w * n as f64))
            .sum::<Complex<f64>>()
            .norm()
    }

    /// One coefficient per line, for inspection in external tools.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# {:?} {:?}", self.kind, self.cutoffs);
        for t in &self.taps {
            let _ = writeln!(out, "{t}");
        }
        out
    }
}

fn check_taps(taps: usize) -> Result<()> {
    if taps.is_multiple_of(2) || taps < 3 {
        return Err(invalid(format!("tap count must be odd and at least 3, got {taps}")));
    }
    Ok(())
}

fn check_cutoff(cutoff: f64, sample_rate: u32) -> Result<()> {
    if !(cutoff > 0.0 && cutoff < sample_rate as f64 / 2.0) {
        return Err(invalid(format!("cutoff {cutoff} Hz outside (0, {}) Hz", sample_rate as f64 / 2.0)));
    }
    Ok(())
}

/// Blackman-windowed sinc low-pass with unit DC gain. Taps are computed
/// for one half and mirrored, so the kernel is exactly symmetric.
fn lowpass_taps(cutoff: f64, sample_rate: u32, taps: usize) -> Vec<f64> {
    let fc = cutoff / sample_rate as f64;
    let mid = (taps - 1) / 2;
    let window = blackman(taps);
    let mut h = vec![0.0; taps];
    for i in 0..=mid {
        let m = (mid - i) as f64;
        let sinc = if m == 0.0 { 2.0 * fc } else { (2.0 * PI * fc * m).sin() / (PI * m) };
        h[i] = sinc * window[i];
        h[taps - 1 - i] = h[i];
    }
    let sum: f64 = h.iter().sum();
    h.iter_mut().for_each(|v| *v /= sum);
    h
}

pub fn design_lowpass(cutoff: f64, sample_rate: u32, taps: usize) -> Result<FirKernel> {
    check_taps(taps)?;
    check_cutoff(cutoff, sample_rate)?;
    Ok(FirKernel {
        taps: lowpass_taps(cutoff, sample_rate, taps),
        kind: FirKind::LowPass,
        cutoffs: vec![cutoff],
    })
}

/// Spectral inversion of the windowed-sinc low-pass.
pub fn design_highpass(cutoff: f64, sample_rate: u32, taps: usize) -> Result<FirKernel> {
    check_taps(taps)?;
    check_cutoff(cutoff, sample_rate)?;
    let mut h: Vec<f64> = lowpass_taps(cutoff, sample_rate, taps).iter().map(|v| -v).collect();
    h[(taps - 1) / 2] += 1.0;
    Ok(FirKernel { taps: h, kind: FirKind::HighPass, cutoffs: vec![cutoff] })
}

/// Low-pass at `low` plus high-pass at `high`.
pub fn design_bandstop(low: f64, high: f64, sample_rate: u32, taps: usize) -> Result<FirKernel> {
    check_taps(taps)?;
    check_cutoff(low, sample_rate)?;
    check_cutoff(high, sample_rate)?;
    if low >= high {
        return Err(invalid(format!("band-stop needs low < high, got {low} >= {high}")));
    }
    let below = lowpass_taps(low, sample_rate, taps);
    let above = lowpass_taps(high, sample_rate, taps);
    let mut h: Vec<f64> = below.iter().zip(&above).map(|(a, b)| a - b).collect();
    h[(taps - 1) / 2] += 1.0;
    Ok(FirKernel { taps: h, kind: FirKind::BandStop, cutoffs: vec![low, high] })
}

/// Convolves and removes the group delay, so the output lines up with the
/// input and has the same length. The signal is zero-padded at both ends.
pub fn apply_fir(buf: &AudioBuffer, kernel: &FirKernel) -> AudioBuffer {
    let x = buf.samples();
    let h = kernel.taps();
    if x.is_empty() {
        return buf.clone();
    }
    let delay = kernel.group_delay();
    let out = if h.len() <= DIRECT_LIMIT {
        direct(x, h, delay)
    } else {
        via_fft(x, h, delay)
    };
    buf.with_samples(out)
}

fn direct(x: &[f64], h: &[f64], delay: usize) -> Vec<f64> {
    let n = x.len() as isize;
    (0..n)
        .map(|i| {
            h.iter()
                .enumerate()
                .filter_map(|(k, &hk)| {
                    let j = i + delay as isize - k as isize;
                    (0..n).contains(&j).then(|| hk * x[j as usize])
                })
                .sum()
        })
        .collect()
}

fn via_fft(x: &[f64], h: &[f64], delay: usize) -> Vec<f64> {
    let len = (x.len() + h.len() - 1).next_power_of_two();
    let mut xs = fft::to_complex(x, len);
    let mut hs = fft::to_complex(h, len);
    let fwd = fft::forward(len);
    fwd.process(&mut xs);
    fwd.process(&mut hs);
    for (a, b) in xs.iter_mut().zip(&hs) {
        *a *= b;
    }
    fft::inverse(len).process(&mut xs);
    let scale = 1.0 / len as f64;
    xs[delay..delay + x.len()].iter().map(|c| c.re * scale).collect()
}
