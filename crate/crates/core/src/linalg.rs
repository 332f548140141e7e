//! Small dense linear-algebra helpers shared across modules and by the
//! diagnostic tooling (condition numbers, Hermitian hygiene, PSD square
//! roots).

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Hermitian symmetrization `(M + M^H)/2`, applied to every computed
/// covariance before use.
pub fn hermitianize(m: &CMatrix) -> CMatrix {
    let mut out = m.clone();
    let n = m.nrows();
    for i in 0..n {
        for j in 0..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)].conj());
            out[(i, j)] = v;
        }
        out[(i, i)] = Complex64::new(out[(i, i)].re, 0.0);
    }
    out
}

pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    0.5 * (m + m.transpose())
}

pub fn mean_diag(m: &CMatrix) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    m.diagonal().iter().map(|z| z.re.abs()).sum::<f64>() / m.nrows() as f64
}

/// Cholesky with escalating diagonal jitter. Each escalation is logged; the
/// base summand is `1e-12` of the mean diagonal per the numerical-recovery
/// policy, growing two decades per retry.
pub fn cholesky_with_jitter(m: &CMatrix, context: &'static str) -> Result<Cholesky<Complex64, Dyn>> {
    let scale = mean_diag(m).max(f64::MIN_POSITIVE);
    let mut jitter = 0.0;
    for attempt in 0..4 {
        let mut trial = m.clone();
        if jitter > 0.0 {
            log::warn!("{context}: cholesky failed, retrying with jitter {jitter:.3e}");
            for i in 0..trial.nrows() {
                trial[(i, i)] += Complex64::new(jitter, 0.0);
            }
        }
        if let Some(chol) = Cholesky::new(trial) {
            return Ok(chol);
        }
        jitter = scale * 1e-12 * 100f64.powi(attempt);
    }
    Err(Error::FactorizationFailed(context))
}

/// Matrix square root of a Hermitian PSD matrix via the symmetric
/// eigendecomposition, with tiny negative eigenvalues clamped to zero.
pub fn psd_sqrt(m: &CMatrix) -> Result<CMatrix> {
    let herm = hermitianize(m);
    let eig = herm.symmetric_eigen();
    let scale = eig.eigenvalues.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    let mut vals = eig.eigenvalues.clone();
    for v in vals.iter_mut() {
        if *v < -1e-8 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::NumericalBreakdown(format!(
                "matrix is not PSD: eigenvalue {v:.3e} with scale {scale:.3e}"
            )));
        }
        *v = v.max(0.0).sqrt();
    }
    let mut cols = eig.eigenvectors.clone();
    for (j, s) in vals.iter().enumerate() {
        cols.column_mut(j).scale_mut(*s);
    }
    Ok(&cols * eig.eigenvectors.adjoint())
}

/// 2-norm condition number via singular values.
pub fn condition_number(m: &CMatrix) -> f64 {
    let svd = m.clone().svd(false, false);
    let max = svd.singular_values.max();
    let min = svd.singular_values.min();
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0f64, |a, z| a.max(z.norm()))
}

/// Spectral radius of a general complex matrix via its Schur form.
pub fn spectral_radius(m: &CMatrix) -> f64 {
    let (_, t) = m.clone().schur().unpack();
    (0..t.nrows()).fold(0.0f64, |acc, i| acc.max(t[(i, i)].norm()))
}

/// Real matrix promoted to a complex one.
pub fn to_complex(m: &DMatrix<f64>) -> CMatrix {
    CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| Complex64::new(m[(i, j)], 0.0))
}

/// Real part; callers assert the imaginary residue separately when it must
/// vanish structurally.
pub fn re_part(m: &CMatrix) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)].re)
}

pub fn im_part(m: &CMatrix) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)].im)
}

pub fn max_im_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0f64, |a, z| a.max(z.im.abs()))
}

/// Writes `block` into `out` with its upper-left corner at `(row, col)`.
pub fn set_block(out: &mut CMatrix, row: usize, col: usize, block: &CMatrix) {
    out.view_mut((row, col), (block.nrows(), block.ncols()))
        .copy_from(block);
}
