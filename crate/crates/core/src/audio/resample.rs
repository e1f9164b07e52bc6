use super::AudioBuffer;
use crate::dsp::window::kaiser;
use crate::error::{invalid, Result};

const KAISER_BETA: f64 = 8.0;
/// Zero crossings of the sinc kernel kept on each side of the centre.
const ZERO_CROSSINGS: f64 = 64.0;
/// Cutoff as a fraction of the lower of the two rates.
const CUTOFF_FRACTION: f64 = 0.475;
const MAX_TABLE_PHASES: u64 = 4096;

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

struct Kernel {
    /// cutoff in cycles per input sample
    fc: f64,
    half_width: f64,
    reach: i64,
}

impl Kernel {
    fn eval(&self, x: f64) -> f64 {
        if x.abs() >= self.half_width {
            return 0.0;
        }
        let arg = 2.0 * self.fc * x;
        let sinc = if arg == 0.0 {
            1.0
        } else {
            (std::f64::consts::PI * arg).sin() / (std::f64::consts::PI * arg)
        };
        2.0 * self.fc * sinc * kaiser(x / self.half_width, KAISER_BETA)
    }

    /// Weights for input offsets `-reach..=reach` at fractional position `frac`.
    fn phase(&self, frac: f64) -> Vec<f64> {
        let mut w: Vec<f64> =
            (-self.reach..=self.reach).map(|j| self.eval(frac - j as f64)).collect();
        let sum: f64 = w.iter().sum();
        if sum != 0.0 {
            w.iter_mut().for_each(|v| *v /= sum);
        }
        w
    }
}

/// Band-limited rational resampling with a Kaiser-windowed sinc kernel.
///
/// Output length is `round(len * target / source)`; equal rates return the
/// input unchanged.
pub fn resample(buf: &AudioBuffer, target_rate: u32) -> Result<AudioBuffer> {
    if target_rate == 0 {
        return Err(invalid("target rate must be positive"));
    }
    let source_rate = buf.sample_rate();
    if source_rate == target_rate {
        return Ok(buf.clone());
    }
    let g = gcd(source_rate as u64, target_rate as u64);
    let up = target_rate as u64 / g;
    let down = source_rate as u64 / g;
    let out_len = (buf.len() as f64 * target_rate as f64 / source_rate as f64).round() as usize;

    let fc = CUTOFF_FRACTION * source_rate.min(target_rate) as f64 / source_rate as f64;
    let half_width = ZERO_CROSSINGS / (2.0 * fc);
    let kernel = Kernel { fc, half_width, reach: half_width.ceil() as i64 + 1 };
    let table: Option<Vec<Vec<f64>>> = (up <= MAX_TABLE_PHASES)
        .then(|| (0..up).map(|r| kernel.phase(r as f64 / up as f64)).collect());

    let x = buf.samples();
    let n_in = x.len() as i64;
    let mut out = Vec::with_capacity(out_len);
    for n in 0..out_len as u64 {
        let pos = n * down;
        let q = (pos / up) as i64;
        let r = pos % up;
        let computed;
        let weights = match &table {
            Some(t) => &t[r as usize],
            None => {
                computed = kernel.phase(r as f64 / up as f64);
                &computed
            }
        };
        let mut acc = 0.0;
        for (w, j) in weights.iter().zip(-kernel.reach..=kernel.reach) {
            let k = q + j;
            if (0..n_in).contains(&k) {
                acc += w * x[k as usize];
            }
        }
        out.push(acc);
    }
    AudioBuffer::new(out, target_rate)
}
