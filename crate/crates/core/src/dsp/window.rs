//! Window functions.

use std::f64::consts::PI;

/// Periodic Hann window (sums to a constant under 50 % overlap).
pub fn hann(len: usize) -> Vec<f64> {
    (0..len).map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / len as f64).cos()).collect()
}

/// Symmetric Blackman window.
pub fn blackman(len: usize) -> Vec<f64> {
    if len == 1 {
        return vec![1.0];
    }
    let m = (len - 1) as f64;
    (0..len)
        .map(|i| {
            let x = i as f64 / m;
            0.42 - 0.5 * (2.0 * PI * x).cos() + 0.08 * (4.0 * PI * x).cos()
        })
        .collect()
}

/// Modified Bessel function of the first kind, order zero (power series).
pub fn bessel_i0(x: f64) -> f64 {
    let half = x / 2.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..500 {
        term *= (half / k as f64) * (half / k as f64);
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum
}

/// Kaiser window evaluated at `x` in `[-1, 1]`; zero outside.
pub fn kaiser(x: f64, beta: f64) -> f64 {
    if x.abs() > 1.0 {
        return 0.0;
    }
    bessel_i0(beta * (1.0 - x * x).sqrt()) / bessel_i0(beta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_reference_values() {
        assert!((bessel_i0(0.0) - 1.0).abs() < 1e-15);
        assert!((bessel_i0(1.0) - 1.266_065_877_752_008_4).abs() < 1e-13);
        assert!((bessel_i0(8.0) - 427.564_115_721_804_7).abs() < 1e-9);
    }

    #[test]
    fn hann_overlap_adds_to_one() {
        let w = hann(512);
        for i in 0..256 {
            assert!((w[i] + w[i + 256] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn blackman_is_symmetric() {
        let w = blackman(11);
        for i in 0..11 {
            assert!((w[i] - w[10 - i]).abs() < 1e-15);
        }
        assert!(w[0].abs() < 1e-15);
        assert!((w[5] - 1.0).abs() < 1e-12);
    }
}
