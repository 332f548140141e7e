//! Naive one-step marginalization of higher-order derivative states.
//!
//! Keeping only the first `M` coordinates of the derivative state and
//! marginalizing the rest out of a single transition yields the same
//! transition `Λ(Δ) = K^S₀₀(Δ) K^S₀₀(0)^{-1}` and noise
//! `Σ(Δ) = K^S₀₀(0) - Λ(Δ) K^S₀₀(Δ)^T` one would have written down from the
//! truncated covariance block alone: the discarded derivatives do not help
//! propagate uncertainty. Both routes are computed explicitly so they can be
//! checked against each other.

use nalgebra::DMatrix;

use super::model::StateSpaceModel;
use crate::error::{Error, Result};
use crate::linalg::{max_im_abs, re_part, symmetrize};

fn raw_real(model: &StateSpaceModel, tau: f64) -> Result<DMatrix<f64>> {
    let k = model.k_s_raw(tau)?;
    if max_im_abs(&k) > 1e-12 {
        return Err(Error::InvalidArgument(
            "naive marginalization applies to real-state models (all components b = 0)".into(),
        ));
    }
    Ok(re_part(&k))
}

fn check_keep(model: &StateSpaceModel, keep: usize) -> Result<()> {
    if model.block_layout().iter().any(|&(_, complex)| complex) {
        return Err(Error::InvalidArgument(
            "naive marginalization applies to real-state models (all components b = 0)".into(),
        ));
    }
    if keep == 0 || keep > model.dim() {
        return Err(Error::InvalidArgument(format!(
            "keep dimension must be in 1..={}, got {keep}",
            model.dim()
        )));
    }
    Ok(())
}

/// Truncated-block route: transition and noise written directly from the
/// upper-left `M × M` block of the raw derivative covariance.
pub fn marginalize_block_route(
    model: &StateSpaceModel,
    delta: f64,
    keep: usize,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    check_keep(model, keep)?;
    if delta == 0.0 {
        return Ok((DMatrix::identity(keep, keep), DMatrix::zeros(keep, keep)));
    }
    let k0 = raw_real(model, 0.0)?;
    let kd = raw_real(model, delta)?;
    let k0_00 = k0.view((0, 0), (keep, keep)).into_owned();
    let kd_00 = kd.view((0, 0), (keep, keep)).into_owned();
    let k0_00_inv = k0_00.clone().try_inverse().ok_or(Error::Singular("K^S_00(0)"))?;
    let lambda = &kd_00 * &k0_00_inv;
    let sigma = symmetrize(&(&k0_00 - &lambda * kd_00.transpose()));
    Ok((lambda, sigma))
}

/// One-step marginalization route: start from the full-state transition,
/// marginalize the trailing derivatives through the stationary conditional
/// `g | z`.
pub fn marginalize_one_step_route(
    model: &StateSpaceModel,
    delta: f64,
    keep: usize,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    check_keep(model, keep)?;
    let n = model.dim();
    if delta == 0.0 {
        return Ok((DMatrix::identity(keep, keep), DMatrix::zeros(keep, keep)));
    }
    if keep == n {
        let tp = model.transition_raw(delta)?;
        return Ok((re_part(&tp.a), symmetrize(&re_part(&tp.q))));
    }
    let rest = n - keep;
    let tp = model.transition_raw(delta)?;
    let a = re_part(&tp.a);
    let q = symmetrize(&re_part(&tp.q));
    let k0 = raw_real(model, 0.0)?;

    let a00 = a.view((0, 0), (keep, keep)).into_owned();
    let a01 = a.view((0, keep), (keep, rest)).into_owned();
    let q00 = q.view((0, 0), (keep, keep)).into_owned();
    let k0_00 = k0.view((0, 0), (keep, keep)).into_owned();
    let k0_01 = k0.view((0, keep), (keep, rest)).into_owned();
    let k0_11 = k0.view((keep, keep), (rest, rest)).into_owned();

    let k0_00_inv = k0_00.clone().try_inverse().ok_or(Error::Singular("K^S_00(0)"))?;
    // E[g | z] = C^T z with C = K00^{-1} K01; cov(g | z) is the Schur complement
    let c = &k0_00_inv * &k0_01;
    let schur = &k0_11 - k0_01.transpose() * &c;

    let lambda = &a00 + &a01 * c.transpose();
    let sigma = symmetrize(&(&q00 + &a01 * schur * a01.transpose()));
    Ok((lambda, sigma))
}

/// One-step marginalized transition and noise for the leading `keep`
/// coordinates, computed both ways and cross-checked before returning.
pub fn marginalize_naive(
    model: &StateSpaceModel,
    delta: f64,
    keep: usize,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let (lb, sb) = marginalize_block_route(model, delta, keep)?;
    let (lm, sm) = marginalize_one_step_route(model, delta, keep)?;
    let scale = lb.amax().max(sb.amax()).max(1.0);
    let gap = (&lb - &lm).amax().max((&sb - &sm).amax());
    if gap > 1e-9 * scale {
        return Err(Error::NumericalBreakdown(format!(
            "marginalization routes disagree by {gap:.3e} (scale {scale:.3e})"
        )));
    }
    Ok((lb, sb))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{HidaMaternSpec, MixtureSpec};

    fn matern72() -> StateSpaceModel {
        let spec = HidaMaternSpec::new(1.0, 1.2, 0.0, 3).unwrap();
        StateSpaceModel::assemble_mixture(&MixtureSpec::single(spec), 0.1).unwrap()
    }

    #[test]
    fn full_keep_reproduces_transition() {
        let model = matern72();
        let (l, _) = marginalize_naive(&model, 0.1, 4).unwrap();
        let tp = model.transition_raw(0.1).unwrap();
        assert!((l - crate::linalg::re_part(&tp.a)).amax() < 1e-12);
    }

    #[test]
    fn routes_agree_for_matern72() {
        let model = matern72();
        for &delta in &[0.01, 0.1, 1.0] {
            let (lb, sb) = marginalize_block_route(&model, delta, 2).unwrap();
            let (lm, sm) = marginalize_one_step_route(&model, delta, 2).unwrap();
            assert!((&lb - &lm).amax() < 1e-10, "lambda gap at delta={delta}");
            assert!((&sb - &sm).amax() < 1e-10, "sigma gap at delta={delta}");
        }
    }

    #[test]
    fn zero_gap_is_identity() {
        let model = matern72();
        let (l, s) = marginalize_naive(&model, 0.0, 2).unwrap();
        assert_eq!(l, DMatrix::identity(2, 2));
        assert_eq!(s, DMatrix::zeros(2, 2));
    }

    #[test]
    fn dimension_guards() {
        let model = matern72();
        assert!(marginalize_naive(&model, 0.1, 0).is_err());
        assert!(marginalize_naive(&model, 0.1, 5).is_err());
        let osc = StateSpaceModel::assemble_mixture(
            &MixtureSpec::single(HidaMaternSpec::new(1.0, 1.0, 2.0, 1).unwrap()),
            0.1,
        )
        .unwrap();
        assert!(marginalize_naive(&osc, 0.1, 1).is_err());
    }
}
