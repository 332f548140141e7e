//! Backward Rauch-Tung-Striebel pass.

use crate::error::Result;
use crate::inference::kalman::{FilterResult, GaussianState};
use crate::linalg::{cholesky_with_jitter, hermitianize};
use crate::ssm::StateSpaceModel;

/// Smoothed marginals at every filter step. The gain
/// `G_k = P_k A_{k+1}^H (P⁻_{k+1})^{-1}` is applied through a Cholesky
/// back-solve of the predicted covariance rather than an explicit inverse.
/// The final smoothed marginals are the exact posterior marginals at the
/// timeline points.
pub fn rts_smooth(model: &StateSpaceModel, filter: &FilterResult) -> Result<Vec<GaussianState>> {
    let steps = &filter.steps;
    if steps.is_empty() {
        return Err(crate::error::Error::EmptyDataset);
    }
    let n = steps.len();
    if steps[0].updated.dim() != model.aug_dim() {
        return Err(crate::error::Error::DimensionMismatch(format!(
            "filter state dim {} vs model dim {}",
            steps[0].updated.dim(),
            model.aug_dim()
        )));
    }
    let mut out: Vec<GaussianState> = Vec::with_capacity(n);
    out.push(steps[n - 1].updated.clone());

    for k in (0..n.saturating_sub(1)).rev() {
        let next = &steps[k + 1];
        let a = match next.trans_idx {
            Some(idx) => &filter.transitions[idx].1.a,
            None => {
                return Err(crate::error::Error::NumericalBreakdown(
                    "filter step after the first is missing its transition".into(),
                ))
            }
        };
        let current = &steps[k].updated;
        let smoothed_next = out.last().unwrap();

        // G = P A^H (P⁻)^{-1}: solve (P⁻) X = (A P)  then G = X^H
        let chol = cholesky_with_jitter(&next.predicted.cov, "smoother predicted covariance")?;
        let ap = a * &current.cov;
        let x = chol.solve(&ap);
        let g = x.adjoint();

        let mean = &current.mean + &g * (&smoothed_next.mean - &next.predicted.mean);
        let cov = hermitianize(
            &(&current.cov + &g * (&smoothed_next.cov - &next.predicted.cov) * g.adjoint()),
        );
        out.push(GaussianState { mean, cov });
    }
    out.reverse();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inference::{kalman_filter, Dataset};
    use crate::kernel::{HidaMaternSpec, MixtureSpec};
    use crate::ssm::StateSpaceModel;

    fn model(p: u32, b: f64) -> StateSpaceModel {
        let spec = HidaMaternSpec::new(1.0, 1.0, b, p).unwrap();
        StateSpaceModel::assemble_mixture(&MixtureSpec::single(spec), 0.1).unwrap()
    }

    #[test]
    fn single_observation_smoothed_equals_filtered() {
        let m = model(1, 0.0);
        let data = Dataset::new(vec![0.3], vec![0.9]).unwrap();
        let f = kalman_filter(&m, &data).unwrap();
        let s = rts_smooth(&m, &f).unwrap();
        assert!((&s[0].mean - &f.steps[0].updated.mean).norm() < 1e-14);
        assert!(crate::linalg::max_abs(&(&s[0].cov - &f.steps[0].updated.cov)) < 1e-14);
    }

    #[test]
    fn last_step_smoothed_equals_filtered() {
        let m = model(2, 1.5);
        let times: Vec<f64> = (0..30).map(|i| i as f64 * 0.2).collect();
        let values: Vec<f64> = times.iter().map(|t| (t * 0.9).sin()).collect();
        let f = kalman_filter(&m, &Dataset::new(times, values).unwrap()).unwrap();
        let s = rts_smooth(&m, &f).unwrap();
        let last = s.len() - 1;
        assert!((&s[last].mean - &f.steps[last].updated.mean).norm() < 1e-13);
    }

    #[test]
    fn smoothing_never_inflates_variance_at_observations() {
        let m = model(1, 0.0);
        let times: Vec<f64> = (0..50).map(|i| i as f64 * 0.3).collect();
        let values: Vec<f64> = times.iter().map(|t| (0.5 * t).cos()).collect();
        let f = kalman_filter(&m, &Dataset::new(times.clone(), values).unwrap()).unwrap();
        let s = rts_smooth(&m, &f).unwrap();
        let filtered: Vec<_> = f.steps.iter().map(|st| st.updated.clone()).collect();
        let smoothed_vars = crate::inference::project_marginals(&m, &s, &times).unwrap();
        let filtered_vars = crate::inference::project_marginals(&m, &filtered, &times).unwrap();
        for (sm, fl) in smoothed_vars.iter().zip(&filtered_vars) {
            assert!(sm.1 <= fl.1 + 1e-12);
        }
    }
}
