//! Local extrema with topographic prominence.

/// A local maximum of a sampled curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    /// Sample index; the middle sample for flat-topped peaks.
    pub index: usize,
    /// First and last index of the flat top (equal for a sharp peak).
    pub plateau: (usize, usize),
    pub prominence: f64,
}

/// Interior local maxima whose prominence is at least `min_prominence`.
///
/// Plateaus count as one peak. Prominence is the height above the higher of
/// the two lowest points reached before climbing to a higher sample (or the
/// end of the data) on either side.
pub fn find_peaks(values: &[f64], min_prominence: f64) -> Vec<Peak> {
    let n = values.len();
    let mut peaks = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if values[i] > values[i - 1] {
            let start = i;
            let mut end = i;
            while end + 1 < n && values[end + 1] == values[i] {
                end += 1;
            }
            if end + 1 < n && values[end + 1] < values[i] {
                let height = values[i];
                let left_min = values[..start].iter().rev().take_while(|&&v| v <= height).cloned().fold(height, f64::min);
                let right_min = values[end + 1..].iter().take_while(|&&v| v <= height).cloned().fold(height, f64::min);
                let prominence = height - left_min.max(right_min);
                if prominence >= min_prominence && prominence > 0.0 {
                    peaks.push(Peak { index: (start + end) / 2, plateau: (start, end), prominence });
                }
            }
            i = end + 1;
        } else {
            i += 1;
        }
    }
    peaks
}

/// Indices of interior local minima with depth-prominence at least
/// `min_prominence`.
pub fn find_minima(values: &[f64], min_prominence: f64) -> Vec<usize> {
    let negated: Vec<f64> = values.iter().map(|v| -v).collect();
    find_peaks(&negated, min_prominence).into_iter().map(|p| p.index).collect()
}

/// Median of a slice (reorders it). NaN-free input expected.
pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let n = values.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}
