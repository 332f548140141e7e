//! Canonical filters and the filter-to-covariance quadrature.
//!
//! A stationary process built by integrating a stable filter `F` against
//! white noise has covariance `k(τ) = ∫_τ^∞ F(u) F*(u-τ) du` once transients
//! die out. The quadrature here is the independent route used to check that
//! kernels produced by the closed forms agree with their filter origin.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// One basis term `c (t-u)^p e^{-μ(t-u)}` of a canonical filter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterTerm {
    pub weight: Complex64,
    pub power: u32,
    pub rate: Complex64,
}

/// Linear combination of stable basis terms.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalFilter {
    terms: Vec<FilterTerm>,
}

impl CanonicalFilter {
    /// Requires `Re(μ) > 0` for every term (stability).
    pub fn new(terms: Vec<FilterTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidSpec("canonical filter needs at least one term".into()));
        }
        for t in &terms {
            if !(t.rate.re.is_finite() && t.rate.im.is_finite() && t.weight.re.is_finite() && t.weight.im.is_finite()) {
                return Err(Error::NonFinite("filter term"));
            }
            if t.rate.re <= 0.0 {
                return Err(Error::InvalidSpec(format!(
                    "filter rate must have positive real part, got {}",
                    t.rate
                )));
            }
        }
        Ok(Self { terms })
    }

    /// Single real term `c u^p e^{-a u}`.
    pub fn monomial(weight: f64, power: u32, rate: f64) -> Result<Self> {
        Self::new(vec![FilterTerm {
            weight: Complex64::new(weight, 0.0),
            power,
            rate: Complex64::new(rate, 0.0),
        }])
    }

    pub fn terms(&self) -> &[FilterTerm] {
        &self.terms
    }

    pub fn eval(&self, u: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|t| t.weight * u.powi(t.power as i32) * (-t.rate * u).exp())
            .sum()
    }

    fn min_decay(&self) -> f64 {
        self.terms.iter().map(|t| t.rate.re).fold(f64::INFINITY, f64::min)
    }
}

/// Panel-based Gauss-Legendre quadrature settings.
#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    /// Stop once two consecutive panels contribute less than this fraction
    /// of the accumulated value.
    pub rel_tol: f64,
    /// Hard cap on panels; exceeding it signals a filter decaying too slowly
    /// for the grid.
    pub max_panels: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-12, max_panels: 400 }
    }
}

// 16-point Gauss-Legendre abscissae/weights on [-1, 1].
const GL_X: [f64; 8] = [
    0.095_012_509_837_637_44,
    0.281_603_550_779_258_9,
    0.458_016_777_657_227_4,
    0.617_876_244_402_643_7,
    0.755_404_408_355_003,
    0.865_631_202_387_831_7,
    0.944_575_023_073_232_6,
    0.989_400_934_991_649_9,
];
const GL_W: [f64; 8] = [
    0.189_450_610_455_068_5,
    0.182_603_415_044_923_6,
    0.169_156_519_395_002_5,
    0.149_595_988_816_576_7,
    0.124_628_971_255_533_9,
    0.095_158_511_682_492_8,
    0.062_253_523_938_647_9,
    0.027_152_459_411_754_1,
];

fn gl16<F: Fn(f64) -> Complex64>(f: &F, lo: f64, hi: f64) -> Complex64 {
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..8 {
        acc += GL_W[i] * (f(c + h * GL_X[i]) + f(c - h * GL_X[i]));
    }
    acc * h
}

/// Stationary covariance `k(τ) = ∫_τ^∞ F(u) F*(u-τ) du` by panelled
/// quadrature; returns the real part. Fails when the integral has not
/// settled within `cfg.max_panels` panels.
pub fn covariance_from_filter(filter: &CanonicalFilter, tau: f64, cfg: &QuadConfig) -> Result<f64> {
    super::spec::check_lag(tau)?;
    let rho = filter.min_decay();
    if !rho.is_finite() || rho <= 0.0 {
        return Err(Error::QuadratureDiverged("filter does not decay".into()));
    }
    let integrand = |u: f64| filter.eval(u) * filter.eval(u - tau).conj();
    let width = 1.0 / rho;

    let mut acc = Complex64::new(0.0, 0.0);
    let mut lo = tau;
    let mut quiet_panels = 0;
    for _ in 0..cfg.max_panels {
        let piece = gl16(&integrand, lo, lo + width);
        acc += piece;
        lo += width;
        if piece.norm() <= cfg.rel_tol * acc.norm().max(f64::MIN_POSITIVE) {
            quiet_panels += 1;
            if quiet_panels >= 2 {
                return Ok(acc.re);
            }
        } else {
            quiet_panels = 0;
        }
    }
    Err(Error::QuadratureDiverged(format!(
        "no convergence after {} panels (decay rate {} too small relative to the grid)",
        cfg.max_panels, rho
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::HidaMaternSpec;

    #[test]
    fn exponential_filter_gives_ou_half() {
        // F(u) = e^{-u}: k(τ) = ∫_τ^∞ e^{-u} e^{-(u-τ)} du = e^{-τ}/2
        let f = CanonicalFilter::monomial(1.0, 0, 1.0).unwrap();
        let cfg = QuadConfig::default();
        for &tau in &[0.0, 0.4, 1.0, 2.5] {
            let k = covariance_from_filter(&f, tau, &cfg).unwrap();
            assert!((k - 0.5 * (-tau).exp()).abs() < 1e-10, "tau={tau}");
        }
    }

    #[test]
    fn matern32_filter_with_unit_variance_calibration() {
        // F(u) = c u e^{-√3 u}; c² = 12√3 yields unit variance, and the
        // resulting covariance is the Matérn 3/2 at rate √3.
        let a = 3f64.sqrt();
        let c = (12.0 * a).sqrt();
        let f = CanonicalFilter::monomial(c, 1, a).unwrap();
        let spec = HidaMaternSpec::new(1.0, a, 0.0, 1).unwrap();
        let cfg = QuadConfig::default();
        for &tau in &[0.0, 0.5, 1.0] {
            let k = covariance_from_filter(&f, tau, &cfg).unwrap();
            assert!((k - spec.eval_kernel(tau).unwrap()).abs() < 1e-6, "tau={tau}");
        }
    }

    #[test]
    fn variance_is_positive() {
        let f = CanonicalFilter::monomial(2.0, 2, 0.7).unwrap();
        let v = covariance_from_filter(&f, 0.0, &QuadConfig::default()).unwrap();
        assert!(v > 0.0);
    }

    #[test]
    fn too_slow_decay_is_reported() {
        let f = CanonicalFilter::monomial(1.0, 0, 1.0).unwrap();
        let cfg = QuadConfig { rel_tol: 1e-12, max_panels: 3 };
        assert!(matches!(
            covariance_from_filter(&f, 0.0, &cfg),
            Err(Error::QuadratureDiverged(_))
        ));
    }

    #[test]
    fn rejects_unstable_filter() {
        assert!(CanonicalFilter::monomial(1.0, 0, 0.0).is_err());
        assert!(CanonicalFilter::monomial(1.0, 0, -1.0).is_err());
    }
}
