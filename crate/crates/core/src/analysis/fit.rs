use crate::error::{Error, Result};

/// Result of fitting `y = A·exp(-x/τ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub amplitude: f64,
    pub decay_constant: f64,
    /// One-sigma uncertainty of the decay constant.
    pub std_error: f64,
    pub residual_rms: f64,
}

impl FitResult {
    pub fn predict(&self, x: f64) -> f64 {
        self.amplitude * (-x / self.decay_constant).exp()
    }
}

fn residual_rms(x: &[f64], y: &[f64], amplitude: f64, rate: f64) -> f64 {
    let ss: f64 = x.iter().zip(y).map(|(xi, yi)| (yi - amplitude * (-rate * xi).exp()).powi(2)).sum();
    (ss / x.len() as f64).sqrt()
}

/// Ordinary least squares on `(x, ln y)`. Returns `(ln A, slope, var(slope))`.
fn log_linear(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let z: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = x.iter().sum::<f64>() / n;
    let mz = z.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|xi| (xi - mx).powi(2)).sum();
    let sxz: f64 = x.iter().zip(&z).map(|(xi, zi)| (xi - mx) * (zi - mz)).sum();
    let slope = sxz / sxx;
    let intercept = mz - slope * mx;
    let ss: f64 = x.iter().zip(&z).map(|(xi, zi)| (zi - intercept - slope * xi).powi(2)).sum();
    let dof = (x.len() as f64 - 2.0).max(1.0);
    (intercept, slope, ss / dof / sxx)
}

/// Levenberg-Marquardt on `(A, k)` for `y = A·exp(-k·x)`. Returns
/// `(A, k, var(k))`.
fn nonlinear(x: &[f64], y: &[f64], mut a: f64, mut k: f64) -> (f64, f64, f64) {
    let sse = |a: f64, k: f64| -> f64 { x.iter().zip(y).map(|(xi, yi)| (yi - a * (-k * xi).exp()).powi(2)).sum() };
    let normal = |a: f64, k: f64| {
        let (mut jaa, mut jak, mut jkk, mut ga, mut gk) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (xi, yi) in x.iter().zip(y) {
            let e = (-k * xi).exp();
            let r = yi - a * e;
            let da = e;
            let dk = -a * xi * e;
            jaa += da * da;
            jak += da * dk;
            jkk += dk * dk;
            ga += da * r;
            gk += dk * r;
        }
        (jaa, jak, jkk, ga, gk)
    };
    let mut lambda = 1e-3;
    let mut current = sse(a, k);
    for _ in 0..500 {
        let (jaa, jak, jkk, ga, gk) = normal(a, k);
        let (maa, mkk) = (jaa * (1.0 + lambda), jkk * (1.0 + lambda));
        let det = maa * mkk - jak * jak;
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let step_a = (mkk * ga - jak * gk) / det;
        let step_k = (maa * gk - jak * ga) / det;
        let trial = sse(a + step_a, k + step_k);
        if trial < current {
            let converged = (current - trial) <= 1e-15 * current.max(1e-300);
            a += step_a;
            k += step_k;
            current = trial;
            lambda = (lambda / 10.0).max(1e-12);
            if converged {
                break;
            }
        } else {
            lambda *= 10.0;
            if lambda > 1e12 {
                break;
            }
        }
    }
    let (jaa, jak, jkk, _, _) = normal(a, k);
    let det = jaa * jkk - jak * jak;
    let dof = (x.len() as f64 - 2.0).max(1.0);
    let var_k = if det > 0.0 { current / dof * jaa / det } else { f64::INFINITY };
    (a, k, var_k)
}

/// Least-squares fit of `y = A·exp(-x/τ)`.
///
/// Positive data are fitted log-linearly, which is exact for multiplicative
/// noise and makes the fit equivariant under shifts of `x`. Data with any
/// non-positive value are fitted directly with Levenberg-Marquardt. The
/// uncertainty is the linearized standard error of `τ`.
pub fn fit_exponential(x: &[f64], y: &[f64]) -> Result<FitResult> {
    if x.len() != y.len() {
        return Err(Error::Fit(format!("{} x values but {} y values", x.len(), y.len())));
    }
    if x.len() < 4 {
        return Err(Error::Fit(format!("need at least 4 points, got {}", x.len())));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::Fit("data must be finite".into()));
    }
    let (amplitude, rate, var_rate) = if y.iter().all(|&v| v > 0.0) {
        let (ln_a, slope, var) = log_linear(x, y);
        (ln_a.exp(), -slope, var)
    } else {
        let positive: Vec<(f64, f64)> = x.iter().cloned().zip(y.iter().cloned()).filter(|(_, v)| *v > 0.0).collect();
        let (a0, k0) = if positive.len() >= 2 {
            let (px, py): (Vec<f64>, Vec<f64>) = positive.into_iter().unzip();
            let (ln_a, slope, _) = log_linear(&px, &py);
            (ln_a.exp(), -slope)
        } else {
            let span = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - x.iter().cloned().fold(f64::INFINITY, f64::min);
            (y.iter().cloned().fold(f64::NEG_INFINITY, f64::max), 1.0 / span)
        };
        nonlinear(x, y, a0, k0)
    };
    if !(rate > 0.0) || !rate.is_finite() {
        return Err(Error::Fit(format!("data do not decay (fitted rate {rate:e})")));
    }
    let decay_constant = 1.0 / rate;
    Ok(FitResult {
        amplitude,
        decay_constant,
        std_error: var_rate.sqrt() * decay_constant * decay_constant,
        residual_rms: residual_rms(x, y, amplitude, rate),
    })
}
