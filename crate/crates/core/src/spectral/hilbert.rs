use num_complex::Complex64;

use crate::fft;

/// Discrete Hilbert transform of a periodic real sequence, with the
/// convention `H[cos] = sin`.
///
/// Implemented by masking the transform with `-i·sgn(n)`; the DC and Nyquist
/// terms are dropped.
pub fn hilbert_transform(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft::forward(&mut buf);
    for (k, b) in buf.iter_mut().enumerate() {
        let twice = 2 * k;
        *b *= if k == 0 || twice == n {
            Complex64::new(0.0, 0.0)
        } else if twice < n {
            Complex64::new(0.0, -1.0)
        } else {
            Complex64::new(0.0, 1.0)
        };
    }
    fft::inverse(&mut buf);
    buf.iter().map(|b| b.re / n as f64).collect()
}

/// Relative L2 distance `‖a - b‖ / ‖b‖`.
pub fn relative_l2_error(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn cosine_maps_to_sine() {
        let n = 128;
        let x: Vec<f64> = (0..n).map(|k| (2.0 * PI * 5.0 * k as f64 / n as f64).cos()).collect();
        let h = hilbert_transform(&x);
        for (k, v) in h.iter().enumerate() {
            assert!((v - (2.0 * PI * 5.0 * k as f64 / n as f64).sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn constants_vanish() {
        assert!(hilbert_transform(&[3.0; 16]).iter().all(|v| v.abs() < 1e-14));
    }
}
