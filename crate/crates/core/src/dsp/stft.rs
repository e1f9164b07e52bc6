use rustfft::num_complex::Complex;

use super::fft;
use super::window::hann;
use crate::audio::AudioBuffer;
use crate::error::{invalid, Error, Result};

/// Magnitude STFT, frames by one-sided frequency bins.
///
/// Magnitudes are scaled by `2 / sum(window)` so a full-scale sinusoid
/// centred on a bin reads 1.0 at its peak.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    mags: Vec<f64>,
    frames: usize,
    bins: usize,
    sample_rate: u32,
    window_len: usize,
    hop: usize,
}

impl Spectrogram {
    /// Builds a spectrogram from a row-major `frames x bins` matrix.
    pub fn from_magnitudes(
        mags: Vec<f64>,
        frames: usize,
        window_len: usize,
        hop: usize,
        sample_rate: u32,
    ) -> Result<Self> {
        let bins = window_len / 2 + 1;
        if window_len == 0 || hop == 0 || sample_rate == 0 {
            return Err(invalid("window, hop and rate must be positive"));
        }
        if mags.len() != frames * bins {
            return Err(invalid(format!(
                "expected {frames}x{bins} magnitudes, got {}",
                mags.len()
            )));
        }
        if mags.iter().any(|m| !m.is_finite() || *m < 0.0) {
            return Err(invalid("magnitudes must be finite and non-negative"));
        }
        Ok(Self { mags, frames, bins, sample_rate, window_len, hop })
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn frame(&self, i: usize) -> &[f64] {
        &self.mags[i * self.bins..(i + 1) * self.bins]
    }

    pub fn iter_frames(&self) -> impl Iterator<Item = &[f64]> {
        self.mags.chunks_exact(self.bins)
    }

    pub fn get(&self, frame: usize, bin: usize) -> f64 {
        self.mags[frame * self.bins + bin]
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn window_len(&self) -> usize {
        self.window_len
    }

    pub fn hop(&self) -> usize {
        self.hop
    }

    pub fn bin_hz(&self) -> f64 {
        self.sample_rate as f64 / self.window_len as f64
    }

    /// Hop duration in seconds.
    pub fn frame_seconds(&self) -> f64 {
        self.hop as f64 / self.sample_rate as f64
    }

    pub fn bin_frequency(&self, bin: usize) -> f64 {
        bin as f64 * self.bin_hz()
    }

    /// Bins whose centre lies in `[low, high)`; the Nyquist bin is included
    /// when `high` reaches Nyquist.
    pub fn bin_range(&self, low: f64, high: f64) -> std::ops::Range<usize> {
        let nyquist = self.sample_rate as f64 / 2.0;
        let hz = self.bin_hz();
        let first = (low / hz).ceil().max(0.0) as usize;
        let last = if high >= nyquist {
            self.bins
        } else {
            ((high / hz).ceil() as usize).min(self.bins)
        };
        first.min(last)..last
    }
}

/// Hann-windowed complex frames of `x`, one-sided.
pub(crate) fn complex_frames(x: &[f64], window: &[f64], hop: usize) -> Vec<Vec<Complex<f64>>> {
    let n = window.len();
    if x.len() < n {
        return Vec::new();
    }
    let frames = (x.len() - n) / hop + 1;
    let plan = fft::forward(n);
    let mut scratch = vec![Complex::new(0.0, 0.0); plan.get_inplace_scratch_len()];
    (0..frames)
        .map(|f| {
            let start = f * hop;
            let mut buf: Vec<Complex<f64>> = x[start..start + n]
                .iter()
                .zip(window)
                .map(|(s, w)| Complex::new(s * w, 0.0))
                .collect();
            plan.process_with_scratch(&mut buf, &mut scratch);
            buf.truncate(n / 2 + 1);
            buf
        })
        .collect()
}

/// Short-time Fourier transform magnitudes with a periodic Hann window.
pub fn stft(buf: &AudioBuffer, window_len: usize, hop: usize) -> Result<Spectrogram> {
    if !window_len.is_power_of_two() || window_len < 2 {
        return Err(invalid(format!("window length {window_len} is not a power of two")));
    }
    if hop == 0 || hop > window_len {
        return Err(invalid(format!("hop {hop} outside 1..={window_len}")));
    }
    if buf.len() < window_len {
        return Err(Error::TooShort(format!(
            "{} samples, window needs {window_len}",
            buf.len()
        )));
    }
    let window = hann(window_len);
    let scale = 2.0 / window.iter().sum::<f64>();
    let frames = complex_frames(buf.samples(), &window, hop);
    let n_frames = frames.len();
    let mags = frames.into_iter().flatten().map(|c| c.norm() * scale).collect();
    Spectrogram::from_magnitudes(mags, n_frames, window_len, hop, buf.sample_rate())
}
