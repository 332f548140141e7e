//! Kalman filtering with low-rank sparse-observation updates.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::inference::Dataset;
use crate::linalg::{hermitianize, CMatrix, CVector};
use crate::ssm::{StateSpaceModel, TransitionPair};

/// Gaussian state: mean vector and Hermitian PSD covariance over the
/// (possibly conjugate-paired) filter state.
#[derive(Debug, Clone)]
pub struct GaussianState {
    pub mean: CVector,
    pub cov: CMatrix,
}

impl GaussianState {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

/// One filter step: predicted and updated moments plus the innovation
/// decomposition entry for observed steps.
#[derive(Debug, Clone)]
pub struct FilterStep {
    pub time: f64,
    pub observation: Option<f64>,
    pub predicted: GaussianState,
    pub updated: GaussianState,
    /// `(ν, S)` when this step carried an observation.
    pub innovation: Option<(f64, f64)>,
    /// index into the transition cache of the `(A, Q)` used to reach this
    /// step; `None` for the first step
    pub(crate) trans_idx: Option<usize>,
}

/// Forward-pass output: per-step moments, innovations, and the accumulated
/// log marginal likelihood.
#[derive(Debug)]
pub struct FilterResult {
    pub steps: Vec<FilterStep>,
    pub log_likelihood: f64,
    pub(crate) transitions: Vec<(f64, TransitionPair)>,
}

impl FilterResult {
    /// Number of distinct `(A, Q)` pairs computed; on a uniform grid this is
    /// exactly one.
    pub fn transitions_computed(&self) -> usize {
        self.transitions.len()
    }
}

/// Sparse-support Kalman update for an observation `y = Σ_{i∈Z} c_i x_i + ν`
/// whose coefficients pair up so the value is real. With
/// `u = Σ_{i∈Z} c̄_i P⁻[:, i]` and `s = Σ_{i∈Z} c_i u_i + σ²`, the posterior
/// is `m = m⁻ + u ν/s`, `P = P⁻ - u u^H / s` — a rank-one correction
/// assembled from selected columns, never a dense gain matrix. Returns the
/// updated state together with the innovation pair `(ν, s)`.
pub fn low_rank_update(
    predicted: &GaussianState,
    y: f64,
    obs_noise: f64,
    support: &[(usize, Complex64)],
) -> Result<(GaussianState, f64, f64)> {
    if support.is_empty() {
        return Err(Error::InvalidArgument("empty observation support".into()));
    }
    let n = predicted.dim();
    let mut u = CVector::zeros(n);
    for &(idx, c) in support {
        if idx >= n {
            return Err(Error::DimensionMismatch(format!(
                "support index {idx} out of range for state dim {n}"
            )));
        }
        u.axpy(c.conj(), &predicted.cov.column(idx).into_owned(), Complex64::new(1.0, 0.0));
    }
    let mut s = Complex64::new(obs_noise, 0.0);
    let mut proj_mean = Complex64::new(0.0, 0.0);
    for &(idx, c) in support {
        s += c * u[idx];
        proj_mean += c * predicted.mean[idx];
    }
    let s_re = s.re;
    if s_re <= 0.0 {
        return Err(Error::NonPositiveInnovation { step: 0, s: s_re });
    }
    let nu = y - proj_mean.re;
    let residue = proj_mean.im.abs();
    if residue > 1e-10 * (1.0 + y.abs() + s_re.sqrt()) {
        return Err(Error::NumericalBreakdown(format!(
            "innovation has imaginary residue {residue:.3e}"
        )));
    }
    if !nu.is_finite() {
        return Err(Error::NumericalBreakdown("non-finite innovation".into()));
    }

    let gain = Complex64::new(nu / s_re, 0.0);
    let mean = &predicted.mean + &u * gain;
    let mut cov = predicted.cov.clone();
    let scale = Complex64::new(1.0 / s_re, 0.0);
    // P -= (u u^H)/s
    for i in 0..n {
        for j in 0..n {
            cov[(i, j)] -= u[i] * u[j].conj() * scale;
        }
    }
    let cov = hermitianize(&cov);
    Ok((GaussianState { mean, cov }, nu, s_re))
}

/// Joseph-form update with an explicit dense gain, kept as the independent
/// reference the low-rank route is validated against.
pub fn joseph_update(
    predicted: &GaussianState,
    y: f64,
    obs_noise: f64,
    support: &[(usize, Complex64)],
) -> Result<(GaussianState, f64, f64)> {
    let n = predicted.dim();
    let mut c = CVector::zeros(n);
    for &(idx, w) in support {
        c[idx] += w;
    }
    // y = c^T x + noise: var = c^T P c̄, gain = P c̄ / s
    let pc = &predicted.cov * c.map(|z| z.conj());
    let s = (c.transpose() * &pc)[(0, 0)].re + obs_noise;
    if s <= 0.0 {
        return Err(Error::NonPositiveInnovation { step: 0, s });
    }
    let nu = y - (c.transpose() * &predicted.mean)[(0, 0)].re;
    let k = &pc / Complex64::new(s, 0.0);
    let mean = &predicted.mean + &k * Complex64::new(nu, 0.0);
    let ikc = CMatrix::identity(n, n) - &k * c.transpose();
    let cov = hermitianize(
        &(&ikc * &predicted.cov * ikc.adjoint() + &k * k.adjoint() * Complex64::new(obs_noise, 0.0)),
    );
    Ok((GaussianState { mean, cov }, nu, s))
}

pub(crate) struct TransitionCache {
    keys: HashMap<u64, usize>,
    pub entries: Vec<(f64, TransitionPair)>,
}

impl TransitionCache {
    pub fn new() -> Self {
        Self { keys: HashMap::new(), entries: Vec::new() }
    }

    pub fn get(&mut self, model: &StateSpaceModel, delta: f64) -> Result<usize> {
        let key = delta.to_bits();
        if let Some(&idx) = self.keys.get(&key) {
            return Ok(idx);
        }
        let tp = model.aug_transition(delta)?;
        self.entries.push((delta, tp));
        let idx = self.entries.len() - 1;
        self.keys.insert(key, idx);
        Ok(idx)
    }
}

/// Forward Kalman pass over a timeline of `(time, optional observation)`
/// entries, already sorted in time. The state starts from the stationary
/// distribution `N(0, P∞)`; the log marginal likelihood accumulates the
/// innovation decomposition `Σ log N(ν_k | 0, S_k)` over observed steps.
pub(crate) fn filter_timeline(
    model: &StateSpaceModel,
    timeline: &[(f64, Option<f64>)],
) -> Result<FilterResult> {
    if timeline.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if model.output_dim() != 1 {
        return Err(Error::InvalidArgument(
            "filtering requires a scalar observation row".into(),
        ));
    }
    let obs_noise = model.obs_noise();
    let dim = model.aug_dim();

    let mut cache = TransitionCache::new();
    let mut steps: Vec<FilterStep> = Vec::with_capacity(timeline.len());
    let mut log_likelihood = 0.0;
    let half_log_2pi = 0.5 * (2.0 * std::f64::consts::PI).ln();

    let mut mean = CVector::zeros(dim);
    let mut cov = model.aug_p_inf();

    for (k, &(time, observation)) in timeline.iter().enumerate() {
        let trans_idx = if k == 0 {
            None
        } else {
            let delta = time - timeline[k - 1].0;
            if delta < 0.0 {
                return Err(Error::InvalidArgument("timeline must be sorted".into()));
            }
            Some(cache.get(model, delta)?)
        };
        let (pred_mean, pred_cov) = match trans_idx {
            None => (mean.clone(), cov.clone()),
            Some(idx) => {
                let (_, tp) = &cache.entries[idx];
                let m = &tp.a * &mean;
                let p = hermitianize(&(&tp.a * &cov * tp.a.adjoint() + &tp.q));
                (m, p)
            }
        };
        let predicted = GaussianState { mean: pred_mean, cov: pred_cov };

        let (updated, innovation) = match observation {
            Some(y) => {
                let coefficients = model.obs_coefficients(time);
                let (upd, nu, s) = low_rank_update(&predicted, y, obs_noise, &coefficients)
                    .map_err(|e| match e {
                        Error::NonPositiveInnovation { s, .. } => {
                            Error::NonPositiveInnovation { step: k, s }
                        }
                        other => other,
                    })?;
                log_likelihood -= half_log_2pi + 0.5 * (s.ln() + nu * nu / s);
                (upd, Some((nu, s)))
            }
            None => (predicted.clone(), None),
        };

        mean = updated.mean.clone();
        cov = updated.cov.clone();
        steps.push(FilterStep { time, observation, predicted, updated, innovation, trans_idx });
    }

    if !log_likelihood.is_finite() {
        return Err(Error::NumericalBreakdown("non-finite log-likelihood".into()));
    }
    Ok(FilterResult { steps, log_likelihood, transitions: cache.entries })
}

/// Kalman filter over a dataset (masked points run as prediction-only
/// steps). Runtime is linear in the number of points; on a uniform grid a
/// single transition pair is computed and reused.
pub fn kalman_filter(model: &StateSpaceModel, data: &Dataset) -> Result<FilterResult> {
    let timeline: Vec<(f64, Option<f64>)> = data
        .times()
        .iter()
        .zip(data.values())
        .zip(data.observed())
        .map(|((&t, &y), &o)| (t, if o { Some(y) } else { None }))
        .collect();
    filter_timeline(model, &timeline)
}
