//! Multioutput derivative covariance `K^S(τ)`.
//!
//! For a kernel `k` the matrix `[K^S(τ)]_{ij} = (-1)^j k^{(i+j)}(τ)` collects
//! the cross-covariances between the process and its mean-square derivatives.
//! All `N²` entries come from the `2N-1` scalar derivative functions, one per
//! anti-diagonal, so entries along an anti-diagonal are generated from a
//! single shared value and agree exactly.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernel::{ExpPolyForm, MixtureSpec};
use crate::linalg::{set_block, CMatrix};

/// Entry generator for `K^S(τ)` and its entry-wise lag derivative.
#[derive(Debug, Clone)]
pub struct MultiOutputCov {
    n: usize,
    complex_field: bool,
    /// derivative forms of orders `0..=2n-1`
    derivs: Vec<ExpPolyForm>,
}

impl MultiOutputCov {
    /// Builds the generator of order `n` (matrix is `n × n`). The real path
    /// refuses oscillatory kernels: their restricted-sense derivative state
    /// is not Markov, so callers must take the reduced complex path instead.
    pub fn new(form: &ExpPolyForm, n: usize, complex_field: bool) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("state order must be >= 1".into()));
        }
        if form.modes.is_empty() {
            return Err(Error::InvalidSpec("empty exponential-polynomial form".into()));
        }
        if !complex_field && form.is_oscillatory() {
            return Err(Error::RealPathNeedsZeroOscillation);
        }
        Ok(Self {
            n,
            complex_field,
            derivs: form.derivative_chain(2 * n - 1),
        })
    }

    pub fn order_dim(&self) -> usize {
        self.n
    }

    pub fn is_complex(&self) -> bool {
        self.complex_field
    }

    /// Scalar kernel value (order-0 derivative) at `τ`.
    pub fn scalar(&self, tau: f64) -> Complex64 {
        self.scalars(tau, 1)[0]
    }

    /// The shared anti-diagonal values `k^{(m)}(τ)`, `m = 0..count`, with the
    /// structure at the origin enforced exactly: for a non-oscillatory kernel
    /// the odd-order values vanish, and for a complex kernel even orders are
    /// purely real and odd orders purely imaginary. That structure holds for
    /// orders up to `2p` only — the one-sided `k^{(2p+1)}(0⁺)` needed by the
    /// generator is a genuine kink value and is left untouched.
    fn scalars(&self, tau: f64, count: usize) -> Vec<Complex64> {
        let mut d: Vec<Complex64> = self.derivs[..count]
            .iter()
            .map(|f| f.eval_complex(tau))
            .collect();
        let smoothness = self.derivs[0].max_degree();
        let enforceable = count.min(2 * smoothness + 1);
        if !self.complex_field {
            for v in d.iter_mut() {
                v.im = 0.0;
            }
            if tau == 0.0 {
                for m in (1..enforceable).step_by(2) {
                    d[m] = Complex64::new(0.0, 0.0);
                }
            }
        } else if tau == 0.0 {
            for (m, v) in d.iter_mut().enumerate().take(enforceable) {
                if m % 2 == 0 {
                    v.im = 0.0;
                } else {
                    v.re = 0.0;
                }
            }
        }
        d
    }

    /// `K^S(τ)`; Hermitian at `τ = 0`.
    pub fn eval(&self, tau: f64) -> CMatrix {
        let d = self.scalars(tau, 2 * self.n - 1);
        CMatrix::from_fn(self.n, self.n, |i, j| {
            if j % 2 == 0 {
                d[i + j]
            } else {
                -d[i + j]
            }
        })
    }

    /// Entry-wise lag derivative `[K^S]'(τ)`, used for the SDE generator.
    pub fn eval_deriv(&self, tau: f64) -> CMatrix {
        let d = self.scalars(tau, 2 * self.n);
        CMatrix::from_fn(self.n, self.n, |i, j| {
            if j % 2 == 0 {
                d[i + j + 1]
            } else {
                -d[i + j + 1]
            }
        })
    }
}

/// `K^S(τ)` for a single kernel form. The real path (`complex_path = false`)
/// needs `b = 0`; oscillatory kernels must use the complex path.
pub fn build_k_s(form: &ExpPolyForm, order: usize, tau: f64, complex_path: bool) -> Result<CMatrix> {
    crate::kernel::check_lag(tau)?;
    Ok(MultiOutputCov::new(form, order, complex_path)?.eval(tau))
}

/// Block-diagonal `K^S(τ) = diag(c_1 K^S_1(τ), …, c_L K^S_L(τ))` of a
/// mixture; components with `b > 0` contribute complex blocks built from the
/// reduced kernel `k_z`. Zero-weight components are skipped.
pub fn build_k_s_mixture(mix: &MixtureSpec, tau: f64) -> Result<CMatrix> {
    crate::kernel::check_lag(tau)?;
    let active: Vec<_> = mix.components().iter().filter(|c| c.weight > 0.0).collect();
    let total: usize = active.iter().map(|c| c.spec.order()).sum();
    let mut out = CMatrix::zeros(total, total);
    let mut off = 0;
    for c in active {
        let n = c.spec.order();
        let form = c.spec.to_exp_poly().scaled(Complex64::new(c.weight, 0.0));
        let cov = MultiOutputCov::new(&form, n, c.spec.is_oscillatory())?;
        set_block(&mut out, off, off, &cov.eval(tau));
        off += n;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{HidaMaternSpec, MixtureComponent};
    use crate::linalg::max_abs;

    #[test]
    fn matern32_k0_is_diag_1_3() {
        // k(0) = 1, k'(0) = 0, -k''(0) = 3 at a = √3
        let spec = HidaMaternSpec::new(1.0, 3f64.sqrt(), 0.0, 1).unwrap();
        let k0 = build_k_s(&spec.to_exp_poly(), 2, 0.0, false).unwrap();
        let expect = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(3.0, 0.0),
            ],
        );
        assert!(max_abs(&(k0 - expect)) < 1e-12);
    }

    #[test]
    fn odd_entries_vanish_at_origin_for_b_zero() {
        for p in [2u32, 5, 8] {
            let spec = HidaMaternSpec::new(1.3, 1.0, 0.0, p).unwrap();
            let n = spec.order();
            let k0 = build_k_s(&spec.to_exp_poly(), n, 0.0, false).unwrap();
            for i in 0..n {
                for j in 0..n {
                    if (i + j) % 2 == 1 {
                        assert_eq!(k0[(i, j)], Complex64::new(0.0, 0.0));
                    }
                }
            }
        }
    }

    #[test]
    fn scalar_case_is_kernel_value() {
        let spec = HidaMaternSpec::new(2.0, 1.5, 0.0, 0).unwrap();
        let k = build_k_s(&spec.to_exp_poly(), 1, 0.8, false).unwrap();
        assert_eq!(k.nrows(), 1);
        assert!((k[(0, 0)].re - spec.eval_kernel(0.8).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn real_path_rejects_oscillatory_kernel() {
        let spec = HidaMaternSpec::new(1.0, 1.0, 2.0, 1).unwrap();
        let r = build_k_s(&spec.to_exp_poly(), 2, 0.0, false);
        assert!(matches!(r, Err(Error::RealPathNeedsZeroOscillation)));
        assert!(build_k_s(&spec.to_exp_poly(), 2, 0.0, true).is_ok());
    }

    #[test]
    fn complex_origin_checkerboard_structure() {
        let spec = HidaMaternSpec::new(1.0, 1.0, 2.0, 2).unwrap();
        let k0 = build_k_s(&spec.to_exp_poly(), 3, 0.0, true).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                if (i + j) % 2 == 0 {
                    assert_eq!(k0[(i, j)].im, 0.0);
                } else {
                    assert_eq!(k0[(i, j)].re, 0.0);
                }
            }
        }
        // Hermitian at the origin
        assert!(max_abs(&(k0.adjoint() - &k0)) == 0.0);
    }

    #[test]
    fn anti_diagonals_share_one_scalar_exactly() {
        let spec = HidaMaternSpec::new(0.8, 1.1, 3.0, 3).unwrap();
        let cov = MultiOutputCov::new(&spec.to_exp_poly(), 4, true).unwrap();
        let tau = 0.37;
        let k = cov.eval(tau);
        for i in 0..4 {
            for j in 0..4 {
                // anti-diagonal representative: the column-0 (or last-row)
                // entry generated from the same scalar
                let (ri, rj) = if i + j < 4 { (i + j, 0) } else { (3, i + j - 3) };
                let rep_sign = if rj % 2 == 0 { 1.0 } else { -1.0 };
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                assert_eq!(k[(i, j)] * rep_sign, k[(ri, rj)] * sign);
            }
        }
    }

    #[test]
    fn mixture_block_diagonal_layout() {
        let mix = crate::kernel::MixtureSpec::new(vec![
            MixtureComponent {
                weight: 2.0,
                spec: HidaMaternSpec::new(1.0, 1.0, 0.0, 1).unwrap(),
            },
            MixtureComponent {
                weight: 0.5,
                spec: HidaMaternSpec::new(1.0, 2.0, 3.0, 0).unwrap(),
            },
        ])
        .unwrap();
        let k = build_k_s_mixture(&mix, 0.0).unwrap();
        assert_eq!(k.nrows(), 3);
        assert_eq!(k[(0, 2)], Complex64::new(0.0, 0.0));
        assert_eq!(k[(2, 0)], Complex64::new(0.0, 0.0));
        assert!((k[(0, 0)].re - 2.0).abs() < 1e-14);
        assert!((k[(2, 2)].re - 0.5).abs() < 1e-14);
    }
}
