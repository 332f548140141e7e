//! Exponential-polynomial closed forms.
//!
//! Every kernel in this crate, together with all of its lag derivatives, is a
//! finite sum of terms `P(τ) e^{-μτ}` with complex rates `μ` (Re μ > 0) and
//! complex polynomial coefficients. The represented value is
//! `Re{ Σ_m P_m(τ) exp(-μ_m τ) }` for `τ ≥ 0`, and the family is closed under
//! differentiation, which is what makes the derivative state-space
//! construction exact rather than approximate.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// One `P(τ) e^{-μτ}` term. `coeffs[k]` multiplies `τ^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpPolyMode {
    pub rate: Complex64,
    pub coeffs: Vec<Complex64>,
}

impl ExpPolyMode {
    fn poly_at(&self, tau: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * tau + c;
        }
        acc
    }

    /// Term value `P(τ) e^{-μτ}`.
    pub fn eval(&self, tau: f64) -> Complex64 {
        self.poly_at(tau) * (-self.rate * tau).exp()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// d/dτ [Q(τ) e^{-μτ}] = (Q'(τ) - μ Q(τ)) e^{-μτ}, same rate, degree
    /// never grows.
    fn differentiated(&self) -> ExpPolyMode {
        let q = &self.coeffs;
        let n = q.len();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for k in 0..n {
            let dq = if k + 1 < n {
                (k as f64 + 1.0) * q[k + 1]
            } else {
                Complex64::new(0.0, 0.0)
            };
            out[k] = dq - self.rate * q[k];
        }
        let mut mode = ExpPolyMode { rate: self.rate, coeffs: out };
        mode.trim();
        mode
    }

    fn trim(&mut self) {
        while self.coeffs.len() > 1 && *self.coeffs.last().unwrap() == Complex64::new(0.0, 0.0) {
            self.coeffs.pop();
        }
    }
}

/// A sum of exponential-polynomial modes; the value is the real part of the
/// complex sum. Keeping the complex sum around as well gives the reduced
/// (complex-state) kernel `k_z` for oscillatory specs.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExpPolyForm {
    pub modes: Vec<ExpPolyMode>,
}

impl ExpPolyForm {
    pub fn new(modes: Vec<ExpPolyMode>) -> Result<Self> {
        for mode in &modes {
            if mode.rate.re <= 0.0 {
                return Err(Error::InvalidSpec(format!(
                    "mode rate must have positive real part, got {}",
                    mode.rate
                )));
            }
            if !mode.rate.re.is_finite()
                || !mode.rate.im.is_finite()
                || mode.coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite())
            {
                return Err(Error::NonFinite("exp-poly mode"));
            }
        }
        Ok(Self { modes })
    }

    /// Complex sum `Σ P_m(τ) e^{-μ_m τ}` without taking the real part.
    pub fn eval_complex(&self, tau: f64) -> Complex64 {
        self.modes.iter().map(|m| m.eval(tau)).sum()
    }

    /// Represented (real) value at `τ ≥ 0`.
    pub fn eval(&self, tau: f64) -> f64 {
        self.eval_complex(tau).re
    }

    /// First lag derivative, mode by mode.
    pub fn derivative(&self) -> ExpPolyForm {
        ExpPolyForm {
            modes: self.modes.iter().map(|m| m.differentiated()).collect(),
        }
    }

    /// `n`-th lag derivative. `n = 0` returns a clone.
    pub fn differentiate(&self, n: usize) -> ExpPolyForm {
        let mut form = self.clone();
        for _ in 0..n {
            form = form.derivative();
        }
        form
    }

    /// Chain of derivative forms `[f, f', ..., f^{(n)}]`.
    pub fn derivative_chain(&self, n: usize) -> Vec<ExpPolyForm> {
        let mut chain = Vec::with_capacity(n + 1);
        chain.push(self.clone());
        for k in 0..n {
            let next = chain[k].derivative();
            chain.push(next);
        }
        chain
    }

    pub fn scaled(&self, factor: Complex64) -> ExpPolyForm {
        ExpPolyForm {
            modes: self
                .modes
                .iter()
                .map(|m| ExpPolyMode {
                    rate: m.rate,
                    coeffs: m.coeffs.iter().map(|&c| c * factor).collect(),
                })
                .collect(),
        }
    }

    /// Slowest decay rate among the modes; governs quadrature and grid spans.
    pub fn min_decay_rate(&self) -> f64 {
        self.modes
            .iter()
            .map(|m| m.rate.re)
            .fold(f64::INFINITY, f64::min)
    }

    /// True when any mode oscillates (nonzero imaginary rate part).
    pub fn is_oscillatory(&self) -> bool {
        self.modes.iter().any(|m| m.rate.im != 0.0)
    }

    pub fn max_degree(&self) -> usize {
        self.modes.iter().map(|m| m.degree()).max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ou_form(sigma2: f64, a: f64) -> ExpPolyForm {
        ExpPolyForm::new(vec![ExpPolyMode {
            rate: Complex64::new(a, 0.0),
            coeffs: vec![Complex64::new(sigma2, 0.0)],
        }])
        .unwrap()
    }

    #[test]
    fn eval_matches_closed_form() {
        let f = ou_form(2.0, 1.5);
        for &tau in &[0.0, 0.3, 1.0, 4.0] {
            let expected = 2.0 * (-1.5f64 * tau).exp();
            assert!((f.eval(tau) - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn derivative_of_ou_scales_by_rate() {
        let f = ou_form(1.0, 2.0);
        let d = f.derivative();
        for &tau in &[0.1, 0.7, 2.0] {
            assert!((d.eval(tau) + 2.0 * f.eval(tau)).abs() < 1e-14);
        }
    }

    #[test]
    fn differentiate_zero_is_identity() {
        let f = ou_form(1.0, 2.0);
        assert_eq!(f.differentiate(0), f);
    }

    #[test]
    fn degree_never_grows_under_differentiation() {
        let f = ExpPolyForm::new(vec![ExpPolyMode {
            rate: Complex64::new(1.0, -2.0),
            coeffs: vec![
                Complex64::new(1.0, 0.0),
                Complex64::new(0.5, 0.0),
                Complex64::new(0.25, 0.0),
            ],
        }])
        .unwrap();
        let mut g = f.clone();
        for _ in 0..6 {
            g = g.derivative();
            assert!(g.max_degree() <= f.max_degree());
            assert_eq!(g.modes.len(), f.modes.len());
        }
    }

    #[test]
    fn rejects_unstable_rate() {
        let r = ExpPolyForm::new(vec![ExpPolyMode {
            rate: Complex64::new(-0.1, 0.0),
            coeffs: vec![Complex64::new(1.0, 0.0)],
        }]);
        assert!(r.is_err());
    }

    #[test]
    fn value_at_origin_is_real_and_finite() {
        let f = ExpPolyForm::new(vec![ExpPolyMode {
            rate: Complex64::new(1.0, -3.0),
            coeffs: vec![Complex64::new(2.0, 0.0), Complex64::new(1.0, 0.0)],
        }])
        .unwrap();
        let v = f.eval_complex(0.0);
        assert!(v.re.is_finite());
        assert!((v.im).abs() < 1e-15);
    }
}
