//! Elementary cosine-modulated Matérn kernels and their spectra.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::exp_poly::{ExpPolyForm, ExpPolyMode};
use crate::error::{Error, Result};

/// Largest admitted smoothness order. The half-integer Matérn polynomial
/// coefficients are formed from exact integer factorial ratios, which stay
/// within `u128` up to this order.
pub const MAX_SMOOTHNESS: u32 = 12;

/// Hyperparameters of one elementary kernel
/// `k(τ) = σ² cos(bτ) m_p(τ; a)`, where `m_p` is the unit-variance
/// half-integer Matérn of order `ν = p + 1/2` written in terms of its decay
/// rate `a` (i.e. `√(2ν)/ℓ = a`). With this parameterization the spectral
/// density is a symmetric rational function with poles exactly at `±b ± ja`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HidaMaternSpec {
    /// Variance `k(0) = σ²`.
    pub sigma2: f64,
    /// Decay rate, `a > 0` (inverse length-scale).
    pub a: f64,
    /// Angular frequency of the cosine modulation, `b ≥ 0`.
    pub b: f64,
    /// Smoothness order; the kernel is `p` times mean-square differentiable.
    pub p: u32,
}

impl HidaMaternSpec {
    pub fn new(sigma2: f64, a: f64, b: f64, p: u32) -> Result<Self> {
        let spec = Self { sigma2, a, b, p };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma2.is_finite() && self.a.is_finite() && self.b.is_finite()) {
            return Err(Error::NonFinite("kernel hyperparameters"));
        }
        if self.sigma2 <= 0.0 {
            return Err(Error::InvalidSpec(format!("sigma2 must be > 0, got {}", self.sigma2)));
        }
        if self.a <= 0.0 {
            return Err(Error::InvalidSpec(format!("a must be > 0, got {}", self.a)));
        }
        if self.b < 0.0 {
            return Err(Error::InvalidSpec(format!("b must be >= 0, got {}", self.b)));
        }
        if self.p > MAX_SMOOTHNESS {
            return Err(Error::InvalidSpec(format!(
                "p = {} exceeds supported maximum {}",
                self.p, MAX_SMOOTHNESS
            )));
        }
        Ok(())
    }

    /// True when the kernel oscillates and therefore needs the reduced
    /// complex state-space path.
    pub fn is_oscillatory(&self) -> bool {
        self.b > 0.0
    }

    /// State dimension of the derivative representation, `p + 1`.
    pub fn order(&self) -> usize {
        self.p as usize + 1
    }

    /// Polynomial coefficients of the unit-variance Matérn factor:
    /// `m_p(τ) = e^{-aτ} Σ_d coeffs[d] τ^d` with `coeffs[0] = 1`.
    pub fn matern_poly_coeffs(&self) -> Vec<f64> {
        matern_poly_coeffs(self.p, self.a)
    }

    /// Kernel value at lag `τ ≥ 0`; rejects negative or non-finite lags.
    pub fn eval_kernel(&self, tau: f64) -> Result<f64> {
        check_lag(tau)?;
        Ok(self.kernel_value(tau))
    }

    /// Unchecked kernel value (callers guarantee `τ ≥ 0`).
    pub(crate) fn kernel_value(&self, tau: f64) -> f64 {
        let coeffs = self.matern_poly_coeffs();
        self.sigma2 * (self.b * tau).cos() * horner(&coeffs, tau) * (-self.a * tau).exp()
    }

    /// Closure form of the kernel with precomputed coefficients, for hot
    /// loops such as dense Gram assembly.
    pub fn evaluator(&self) -> impl Fn(f64) -> f64 + Send + Sync {
        let (sigma2, a, b) = (self.sigma2, self.a, self.b);
        let coeffs = self.matern_poly_coeffs();
        move |tau: f64| sigma2 * (b * tau).cos() * horner(&coeffs, tau) * (-a * tau).exp()
    }

    /// Two-lobe rational spectral density, normalized so that
    /// `(1/2π) ∫ S(ω) dω = σ²`. Symmetric and strictly positive.
    pub fn eval_psd(&self, omega: f64) -> Result<f64> {
        if !omega.is_finite() {
            return Err(Error::NonFinite("omega"));
        }
        let n = self.p as i32 + 1;
        let a2 = self.a * self.a;
        let lobe = |center: f64| ((omega - center).powi(2) + a2).powi(-n);
        Ok(self.psd_scale() * (lobe(self.b) + lobe(-self.b)))
    }

    /// Normalization constant `σ² a^{2p+1} 4^p / C(2p, p)` of the spectral
    /// density.
    pub fn psd_scale(&self) -> f64 {
        let p = self.p;
        let four_p = 2f64.powi(2 * p as i32);
        self.sigma2 * self.a.powi(2 * p as i32 + 1) * four_p / binomial(2 * p, p)
    }

    /// Reduced complex kernel `k_z(τ) = σ² e^{jbτ} m_p(τ; a)` whose real part
    /// is the kernel itself.
    pub fn complex_kernel(&self, tau: f64) -> Result<Complex64> {
        check_lag(tau)?;
        let coeffs = self.matern_poly_coeffs();
        let magnitude = self.sigma2 * horner(&coeffs, tau) * (-self.a * tau).exp();
        Ok(Complex64::from_polar(magnitude, self.b * tau))
    }

    /// Exponential-polynomial closed form: a single mode with rate `a - jb`
    /// and real coefficients, so `eval` recovers the kernel and
    /// `eval_complex` recovers the reduced complex kernel.
    pub fn to_exp_poly(&self) -> ExpPolyForm {
        let coeffs = self
            .matern_poly_coeffs()
            .into_iter()
            .map(|c| Complex64::new(self.sigma2 * c, 0.0))
            .collect();
        ExpPolyForm {
            modes: vec![ExpPolyMode {
                rate: Complex64::new(self.a, -self.b),
                coeffs,
            }],
        }
    }
}

pub(crate) fn check_lag(tau: f64) -> Result<()> {
    if !tau.is_finite() {
        return Err(Error::NonFinite("tau"));
    }
    if tau < 0.0 {
        return Err(Error::NegativeLag);
    }
    Ok(())
}

pub(crate) fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// `m_p(τ) = e^{-aτ} Σ_{d=0}^{p} r_d (2a)^d τ^d` with exact rational
/// `r_d = Π_{k<d}(p-k) / (Π_{k<d}(2p-k) · d!)`. The integer products are
/// evaluated exactly in `u128` before the single conversion to `f64`, which
/// avoids the catastrophic cancellation a naive factorial quotient produces
/// at higher orders.
pub fn matern_poly_coeffs(p: u32, a: f64) -> Vec<f64> {
    let p_ = p as u128;
    let mut out = Vec::with_capacity(p as usize + 1);
    for d in 0..=p_ {
        let mut num: u128 = 1;
        let mut den: u128 = 1;
        for k in 0..d {
            num *= p_ - k;
            den *= 2 * p_ - k;
        }
        for k in 1..=d {
            den *= k;
        }
        let ratio = num as f64 / den as f64;
        out.push(ratio * (2.0 * a).powi(d as i32));
    }
    out
}

fn binomial(n: u32, k: u32) -> f64 {
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k as u128 {
        num *= n as u128 - i;
        den *= i + 1;
    }
    num as f64 / den as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matern32_closed_form() {
        // k(τ) = (1 + √3 τ) e^{-√3 τ} at unit variance and length-scale
        let spec = HidaMaternSpec::new(1.0, 3f64.sqrt(), 0.0, 1).unwrap();
        let k1 = spec.eval_kernel(1.0).unwrap();
        let expected = (1.0 + 3f64.sqrt()) * (-(3f64.sqrt())).exp();
        assert!((k1 - expected).abs() < 1e-14, "got {k1}, want {expected}");
        assert!((expected - 0.483_357_724_596_507_7).abs() < 1e-12);
    }

    #[test]
    fn origin_value_is_sigma2() {
        for &(s2, a, b, p) in &[(1.0, 1.0, 0.0, 0), (2.5, 0.3, 4.0, 3), (0.04, 10.0, 7.1, 7)] {
            let spec = HidaMaternSpec::new(s2, a, b, p).unwrap();
            assert_eq!(spec.eval_kernel(0.0).unwrap(), s2);
        }
    }

    #[test]
    fn oscillatory_product_form() {
        // p = 0, b = π at τ = 1: cos(π) e^{-1}
        let spec = HidaMaternSpec::new(1.0, 1.0, std::f64::consts::PI, 0).unwrap();
        let k = spec.eval_kernel(1.0).unwrap();
        assert!((k + (-1f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(HidaMaternSpec::new(0.0, 1.0, 0.0, 0).is_err());
        assert!(HidaMaternSpec::new(1.0, -1.0, 0.0, 0).is_err());
        assert!(HidaMaternSpec::new(1.0, 1.0, -2.0, 0).is_err());
        assert!(HidaMaternSpec::new(1.0, 1.0, 0.0, MAX_SMOOTHNESS + 1).is_err());
        let spec = HidaMaternSpec::new(1.0, 1.0, 0.0, 0).unwrap();
        assert!(spec.eval_kernel(-0.5).is_err());
        assert!(spec.eval_kernel(f64::NAN).is_err());
        assert!(spec.eval_psd(f64::INFINITY).is_err());
    }

    #[test]
    fn psd_is_symmetric_and_positive() {
        let spec = HidaMaternSpec::new(1.3, 0.8, 5.0, 2).unwrap();
        for &w in &[0.0, 0.3, 1.7, 5.0, 40.0] {
            let s = spec.eval_psd(w).unwrap();
            assert!(s > 0.0);
            assert!((s - spec.eval_psd(-w).unwrap()).abs() <= 1e-15 * s);
        }
    }

    #[test]
    fn psd_lobe_centers_near_b() {
        let spec = HidaMaternSpec::new(1.0, 1.0, 5.0, 1).unwrap();
        let mut best = (0.0, f64::MIN);
        let mut w = 0.0;
        while w <= 12.0 {
            let s = spec.eval_psd(w).unwrap();
            if s > best.1 {
                best = (w, s);
            }
            w += 0.01;
        }
        assert!((best.0 - 5.0).abs() < 0.5, "argmax at {}", best.0);
    }

    #[test]
    fn lorentzian_psd_inverts_to_ou_kernel() {
        // p = 0, b = 0: S(ω) = 2σ²a/(ω²+a²); Simpson quadrature of the
        // inverse Fourier integral at τ = 1 must recover the kernel.
        let spec = HidaMaternSpec::new(1.0, 1.0, 0.0, 0).unwrap();
        let tau = 1.0;
        let (n, w_max) = (2_500_000usize, 5000.0);
        let h = 2.0 * w_max / n as f64;
        let f = |w: f64| spec.eval_psd(w).unwrap() * (w * tau).cos();
        let mut acc = f(-w_max) + f(w_max);
        for i in 1..n {
            let w = -w_max + i as f64 * h;
            acc += f(w) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        let k_from_psd = acc * h / 3.0 / (2.0 * std::f64::consts::PI);
        assert!((k_from_psd - spec.eval_kernel(tau).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn exp_poly_matches_kernel_everywhere() {
        let spec = HidaMaternSpec::new(0.7, 1.9, 2.4, 4).unwrap();
        let form = spec.to_exp_poly();
        let coeffs = spec.matern_poly_coeffs();
        for i in 0..1000 {
            let tau = i as f64 * 0.013;
            let k = spec.eval_kernel(tau).unwrap();
            // relative to the non-oscillatory envelope: the cosine zeros make
            // a plain relative comparison meaningless
            let envelope = spec.sigma2 * horner(&coeffs, tau) * (-spec.a * tau).exp();
            assert!((form.eval(tau) - k).abs() <= 1e-12 * envelope.max(1e-300));
        }
    }

    #[test]
    fn complex_kernel_real_part_is_kernel() {
        let spec = HidaMaternSpec::new(1.0, 1.0, 2.0, 1).unwrap();
        let kz = spec.complex_kernel(0.7).unwrap();
        assert!((kz.re - spec.eval_kernel(0.7).unwrap()).abs() < 1e-12);
        let spec0 = HidaMaternSpec::new(2.0, 1.0, 0.0, 2).unwrap();
        let kz0 = spec0.complex_kernel(0.9).unwrap();
        assert_eq!(kz0.im, 0.0);
        assert!((kz0.re - spec0.eval_kernel(0.9).unwrap()).abs() < 1e-14);
        assert_eq!(spec.complex_kernel(0.0).unwrap(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn exact_coefficients_at_high_order() {
        // Spot-check p = 2 against the standard Matérn 5/2 polynomial
        // 1 + aτ + a²τ²/3.
        let c = matern_poly_coeffs(2, 1.7);
        assert!((c[0] - 1.0).abs() < 1e-15);
        assert!((c[1] - 1.7).abs() < 1e-15);
        assert!((c[2] - 1.7 * 1.7 / 3.0).abs() < 1e-15);
        // High order still exact: coefficients must all be finite & positive.
        let c10 = matern_poly_coeffs(10, 2.0);
        assert_eq!(c10.len(), 11);
        assert!(c10.iter().all(|v| v.is_finite() && *v > 0.0));
        assert_eq!(c10[0], 1.0);
    }
}
