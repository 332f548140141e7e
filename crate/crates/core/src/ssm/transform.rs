//! Correlation transform and structure-exploiting inverses of `K^S(0)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{hermitianize, CMatrix};

/// Diagonal rescaling `C_ii = 1/√([K^S(0)]_ii)` together with the transformed
/// matrix `C K^S(0) C`, whose diagonal is set to exactly one. The raw matrix
/// must be Hermitian with a strictly positive diagonal.
pub fn correlation_transform(raw_k0: &CMatrix) -> Result<(DVector<f64>, CMatrix)> {
    let n = raw_k0.nrows();
    if n != raw_k0.ncols() {
        return Err(Error::DimensionMismatch("correlation transform needs a square matrix".into()));
    }
    let mut c = DVector::zeros(n);
    for i in 0..n {
        let d = raw_k0[(i, i)];
        if !(d.re.is_finite()) || d.re <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "non-positive diagonal entry {:.3e} at index {i}",
                d.re
            )));
        }
        c[i] = 1.0 / d.re.sqrt();
    }
    let mut t = CMatrix::from_fn(n, n, |i, j| raw_k0[(i, j)] * (c[i] * c[j]));
    for i in 0..n {
        t[(i, i)] = Complex64::new(1.0, 0.0);
    }
    Ok((c, hermitianize(&t)))
}

fn i_pow(k: i64) -> Complex64 {
    match k.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Inverse of `K^S(0)` exploiting its parity structure.
///
/// For `b = 0` the matrix vanishes at all `(i, j)` with `i + j` odd, so a
/// parity permutation turns it into two dense diagonal blocks that invert
/// independently. For `b ≠ 0` entries at odd `i + j` are purely imaginary;
/// conjugating by `D = diag(i^k)` produces a real symmetric matrix whose
/// inverse maps back through the same unitary, which pins the inverse to the
/// same real/imaginary checkerboard exactly (numerical noise in the off-
/// parity parts is masked by construction).
pub fn structured_inverse_k0(k0: &CMatrix, b_is_zero: bool) -> Result<CMatrix> {
    let n = k0.nrows();
    if n != k0.ncols() {
        return Err(Error::DimensionMismatch("structured inverse needs a square matrix".into()));
    }
    if b_is_zero {
        let evens: Vec<usize> = (0..n).step_by(2).collect();
        let odds: Vec<usize> = (1..n).step_by(2).collect();
        let sub = |idx: &[usize]| {
            DMatrix::from_fn(idx.len(), idx.len(), |r, c| k0[(idx[r], idx[c])].re)
        };
        let inv_e = invert_spd(&sub(&evens), "even-parity block of K^S(0)")?;
        let inv_o = if odds.is_empty() {
            DMatrix::zeros(0, 0)
        } else {
            invert_spd(&sub(&odds), "odd-parity block of K^S(0)")?
        };
        let mut out = CMatrix::zeros(n, n);
        for (r, &i) in evens.iter().enumerate() {
            for (c, &j) in evens.iter().enumerate() {
                out[(i, j)] = Complex64::new(inv_e[(r, c)], 0.0);
            }
        }
        for (r, &i) in odds.iter().enumerate() {
            for (c, &j) in odds.iter().enumerate() {
                out[(i, j)] = Complex64::new(inv_o[(r, c)], 0.0);
            }
        }
        Ok(out)
    } else {
        // real similarity: (D K D^H)_{ij} = i^{i-j} K_{ij} is real symmetric
        let real = DMatrix::from_fn(n, n, |i, j| (i_pow(i as i64 - j as i64) * k0[(i, j)]).re);
        let inv = invert_spd(&real, "unitary-reduced K^S(0)")?;
        // K^{-1} = D^H (D K D^H)^{-1} D, entries i^{j-i} * inv_{ij}
        Ok(CMatrix::from_fn(n, n, |i, j| {
            i_pow(j as i64 - i as i64) * inv[(i, j)]
        }))
    }
}

fn invert_spd(m: &DMatrix<f64>, context: &'static str) -> Result<DMatrix<f64>> {
    if m.is_empty() {
        return Ok(m.clone());
    }
    nalgebra::Cholesky::new(m.clone())
        .map(|c| c.inverse())
        .or_else(|| m.clone().try_inverse())
        .ok_or(Error::Singular(context))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::HidaMaternSpec;
    use crate::linalg::{condition_number, max_abs};
    use crate::ssm::multioutput::build_k_s;

    #[test]
    fn identity_passes_through() {
        let id = CMatrix::identity(3, 3);
        let (c, t) = correlation_transform(&id).unwrap();
        assert!(c.iter().all(|&v| v == 1.0));
        assert!(max_abs(&(t - CMatrix::identity(3, 3))) == 0.0);
    }

    #[test]
    fn transformed_diagonal_is_exactly_one() {
        let spec = HidaMaternSpec::new(2.0, 1.3, 0.0, 4).unwrap();
        let k0 = build_k_s(&spec.to_exp_poly(), 5, 0.0, false).unwrap();
        let (_, t) = correlation_transform(&k0).unwrap();
        for i in 0..5 {
            assert_eq!(t[(i, i)], Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn high_order_conditioning_collapses_after_transform() {
        // order-8 kernel at unit length-scale (decay rate √17): the raw
        // K^S(0) spans ten orders of magnitude, the correlation-transformed
        // one is a modest correlation matrix
        let spec = HidaMaternSpec::new(1.0, 17f64.sqrt(), 0.0, 8).unwrap();
        let k0 = build_k_s(&spec.to_exp_poly(), 9, 0.0, false).unwrap();
        let (_, t) = correlation_transform(&k0).unwrap();
        let raw_cond = condition_number(&k0);
        let t_cond = condition_number(&t);
        assert!(
            t_cond < raw_cond / 1e3,
            "raw {raw_cond:.3e} vs transformed {t_cond:.3e}"
        );
        // the transform is scale-free: whatever the rate, it never hurts
        for rate in [0.5, 1.0, 4.0] {
            let s = HidaMaternSpec::new(1.0, rate, 0.0, 8).unwrap();
            let k = build_k_s(&s.to_exp_poly(), 9, 0.0, false).unwrap();
            let (_, tk) = correlation_transform(&k).unwrap();
            assert!(condition_number(&tk) < condition_number(&k));
        }
    }

    #[test]
    fn rejects_nonpositive_diagonal() {
        let mut m = CMatrix::identity(2, 2);
        m[(1, 1)] = Complex64::new(0.0, 0.0);
        assert!(correlation_transform(&m).is_err());
    }

    #[test]
    fn diag_inverse() {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(3.0, 0.0),
            ],
        );
        let inv = structured_inverse_k0(&m, true).unwrap();
        assert!((inv[(0, 0)].re - 1.0).abs() < 1e-15);
        assert!((inv[(1, 1)].re - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(inv[(0, 1)], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn permuted_block_inverse_matches_dense() {
        // Matérn 7/2 (p = 3): 4x4 with parity sparsity
        let spec = HidaMaternSpec::new(1.0, 1.4, 0.0, 3).unwrap();
        let k0 = build_k_s(&spec.to_exp_poly(), 4, 0.0, false).unwrap();
        let (_, t) = correlation_transform(&k0).unwrap();
        let structured = structured_inverse_k0(&t, true).unwrap();
        let dense = t.clone().try_inverse().unwrap();
        assert!(max_abs(&(&structured - &dense)) < 1e-10);
        assert!(max_abs(&(&t * &structured - CMatrix::identity(4, 4))) < 1e-10);
    }

    #[test]
    fn complex_inverse_keeps_checkerboard() {
        let spec = HidaMaternSpec::new(1.0, 1.0, 2.0, 1).unwrap();
        let k0 = build_k_s(&spec.to_exp_poly(), 2, 0.0, true).unwrap();
        let (_, t) = correlation_transform(&k0).unwrap();
        let inv = structured_inverse_k0(&t, false).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                if (i + j) % 2 == 1 {
                    assert!(inv[(i, j)].re.abs() < 1e-12);
                } else {
                    assert!(inv[(i, j)].im.abs() < 1e-12);
                }
            }
        }
        assert!(max_abs(&(&t * &inv - CMatrix::identity(2, 2))) < 1e-12);
    }
}
