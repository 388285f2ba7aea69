//! Thin wrappers over `rustfft` with the sign conventions used throughout:
//! forward transforms carry `exp(-2πi·mn/N)`, inverse transforms are
//! unnormalized.

use num_complex::Complex64;
use rustfft::FftPlanner;

pub(crate) fn forward(buf: &mut [Complex64]) {
    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_forward(buf.len()).process(buf);
}

pub(crate) fn inverse(buf: &mut [Complex64]) {
    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_inverse(buf.len()).process(buf);
}

/// Circular shift so that grid-ordered data (zero detuning at index `n/2`)
/// lands in transform order (zero at index 0), and back.
pub(crate) fn grid_to_fft<T: Copy>(data: &[T]) -> Vec<T> {
    let n = data.len();
    let half = n / 2;
    (0..n).map(|i| data[(i + half) % n]).collect()
}

#[cfg(test)]
pub(crate) fn fft_to_grid<T: Copy>(data: &[T]) -> Vec<T> {
    let n = data.len();
    let half = n / 2;
    (0..n).map(|k| data[(k + n - half) % n]).collect()
}
