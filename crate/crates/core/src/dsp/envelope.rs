use rustfft::num_complex::Complex;

use super::fft;
use crate::audio::AudioBuffer;
use crate::error::{invalid, Result};

/// Magnitude of the analytic signal, one value per input sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    values: Vec<f64>,
}

impl Envelope {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(invalid("envelope values must be finite and non-negative"));
        }
        Ok(Self { values })
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
}

/// Hilbert envelope via the FFT: negative frequencies are zeroed, positive
/// ones doubled, and the magnitude of the inverse transform is returned.
pub fn analytic_envelope(buf: &AudioBuffer) -> Result<Envelope> {
    let n = buf.len();
    if n == 0 {
        return Err(invalid("cannot take the envelope of an empty buffer"));
    }
    let mut spectrum = fft::to_complex(buf.samples(), n);
    fft::forward(n).process(&mut spectrum);
    let half = n / 2;
    for (k, c) in spectrum.iter_mut().enumerate() {
        let nyquist = n.is_multiple_of(2) && k == half;
        if k == 0 || nyquist {
            continue;
        }
        *c = if k <= half { *c * 2.0 } else { Complex::new(0.0, 0.0) };
    }
    fft::inverse(n).process(&mut spectrum);
    let scale = 1.0 / n as f64;
    Ok(Envelope { values: spectrum.iter().map(|c| c.norm() * scale).collect() })
}
