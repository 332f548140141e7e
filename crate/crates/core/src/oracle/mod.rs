//! Dense O(M³) GP regression and Gaussian utilities.
//!
//! This is the ground truth the state-space path is validated against: an
//! ordinary Cholesky-based GP regressor, closed-form univariate KLD, central
//! finite differences for kernel derivatives, and dense Gaussian
//! conditioning.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Hard cap on dense problem size; beyond this the cubic cost is hours, not
/// seconds, and the caller almost certainly wanted the state-space path.
pub const MAX_DENSE_POINTS: usize = 5000;

/// Exact posterior summary at the query times.
#[derive(Debug, Clone)]
pub struct DensePosterior {
    pub times: Vec<f64>,
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
    pub log_marginal_likelihood: f64,
}

/// Standard GP regression with Gram matrix `K + σ²I` behind a stabilized
/// Cholesky. Jitter escalates through `{1e-10, 1e-8, 1e-6}` of the mean
/// diagonal, each escalation logged; persistent failure reports a condition
/// estimate of the Gram matrix.
pub fn exact_posterior(
    kernel: &(dyn Fn(f64) -> f64 + Sync),
    times: &[f64],
    values: &[f64],
    obs_noise: f64,
    query: &[f64],
) -> Result<DensePosterior> {
    let m = times.len();
    if m == 0 {
        return Err(Error::EmptyDataset);
    }
    if m > MAX_DENSE_POINTS {
        return Err(Error::OracleTooLarge(m));
    }
    if values.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "{} times vs {} values",
            m,
            values.len()
        )));
    }
    if !obs_noise.is_finite() || obs_noise < 0.0 {
        return Err(Error::InvalidArgument("obs_noise must be finite and >= 0".into()));
    }

    let gram = DMatrix::from_fn(m, m, |i, j| kernel((times[i] - times[j]).abs()));
    let mean_diag = gram.diagonal().iter().map(|v| v.abs()).sum::<f64>() / m as f64;

    let mut chol = None;
    for (attempt, jitter_frac) in [0.0, 1e-10, 1e-8, 1e-6].iter().enumerate() {
        let mut ky = gram.clone();
        let jitter = mean_diag * jitter_frac;
        if attempt > 0 {
            log::warn!("dense oracle: cholesky retry with jitter {jitter:.3e}");
        }
        for i in 0..m {
            ky[(i, i)] += obs_noise + jitter;
        }
        if let Some(c) = nalgebra::Cholesky::new(ky) {
            chol = Some(c);
            break;
        }
    }
    let chol = chol.ok_or_else(|| {
        Error::NumericalBreakdown(format!(
            "dense gram factorization failed; condition estimate >= {:.3e}",
            gershgorin_condition_estimate(&gram, obs_noise)
        ))
    })?;

    let y = DVector::from_column_slice(values);
    let alpha = chol.solve(&y);

    let log_det_half: f64 = chol.l().diagonal().iter().map(|d| d.ln()).sum();
    let log_marginal_likelihood = -0.5 * y.dot(&alpha)
        - log_det_half
        - 0.5 * m as f64 * (2.0 * std::f64::consts::PI).ln();

    // batch: columns of K* solved through the factor once
    let nq = query.len();
    let kstar = DMatrix::from_fn(m, nq, |i, j| kernel((times[i] - query[j]).abs()));
    let mut v = kstar.clone();
    chol.l().solve_lower_triangular_mut(&mut v);

    let k0 = kernel(0.0);
    let mut mean = Vec::with_capacity(nq);
    let mut variance = Vec::with_capacity(nq);
    for j in 0..nq {
        mean.push(kstar.column(j).dot(&alpha));
        variance.push((k0 - v.column(j).norm_squared()).max(0.0));
    }

    Ok(DensePosterior {
        times: query.to_vec(),
        mean,
        variance,
        log_marginal_likelihood,
    })
}

fn gershgorin_condition_estimate(gram: &DMatrix<f64>, obs_noise: f64) -> f64 {
    let m = gram.nrows();
    let mut hi = f64::MIN;
    let mut lo = f64::MAX;
    for i in 0..m {
        let radius: f64 = (0..m).filter(|&j| j != i).map(|j| gram[(i, j)].abs()).sum();
        let d = gram[(i, i)] + obs_noise;
        hi = hi.max(d + radius);
        lo = lo.min(d - radius);
    }
    hi / lo.max(f64::MIN_POSITIVE)
}

/// Closed-form `KL(N(m1, v1) || N(m2, v2))`.
pub fn gaussian_kld(m1: f64, v1: f64, m2: f64, v2: f64) -> Result<f64> {
    if v1 <= 0.0 || v2 <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "KLD needs positive variances, got {v1} and {v2}"
        )));
    }
    Ok(0.5 * (v1 / v2 + (m2 - m1).powi(2) / v2 - 1.0 + (v2 / v1).ln()))
}

/// Mean univariate KLD between two marginal sequences of `(mean, variance)`.
pub fn avg_marginal_kld(approx: &[(f64, f64)], exact: &[(f64, f64)]) -> Result<f64> {
    if approx.len() != exact.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} approx vs {} exact marginals",
            approx.len(),
            exact.len()
        )));
    }
    if approx.is_empty() {
        return Err(Error::InvalidArgument("no marginals to compare".into()));
    }
    let mut acc = 0.0;
    for (&(m1, v1), &(m2, v2)) in approx.iter().zip(exact) {
        acc += gaussian_kld(m1, v1, m2, v2)?;
    }
    Ok(acc / approx.len() as f64)
}

/// `n`-th order central finite difference of a one-sided kernel evaluator.
/// The stencil stays strictly right of the origin kink, so the caller must
/// keep `τ - n·step/2 > 0` for meaningful output.
pub fn fd_derivative(kernel: &dyn Fn(f64) -> f64, n: u32, tau: f64, step: f64) -> f64 {
    let mut acc = 0.0;
    let mut binom = 1.0;
    for k in 0..=n {
        if k > 0 {
            binom *= (n - k + 1) as f64 / k as f64;
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let shift = (n as f64 / 2.0 - k as f64) * step;
        acc += sign * binom * kernel(tau + shift);
    }
    acc / step.powi(n as i32)
}

/// Regression coefficient `Σ12 Σ22⁻¹` of a joint Gaussian.
pub fn gaussian_condition_coefficient(
    cross: &DMatrix<f64>,
    prior: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    let inv = prior
        .clone()
        .try_inverse()
        .ok_or(Error::Singular("gaussian conditioning"))?;
    Ok(cross * inv)
}

/// Conditional covariance `Σ11 - Σ12 Σ22⁻¹ Σ12ᵀ`.
pub fn gaussian_conditional_covariance(
    marginal: &DMatrix<f64>,
    cross: &DMatrix<f64>,
    prior: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    let coef = gaussian_condition_coefficient(cross, prior)?;
    Ok(marginal - coef * cross.transpose())
}
