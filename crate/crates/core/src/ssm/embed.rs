//! Real-state embedding of a model, kept as a validation oracle.
//!
//! An oscillatory block with complex state `w` of dimension `n` is equivalent
//! to the real state `(Re w, Im w)` of dimension `2n`: for a complex matrix
//! `M` the real representation is `[[Re M, -Im M], [Im M, Re M]]`, and proper
//! complex noise of covariance `Q` has real covariance `½` of that
//! representation. In the demodulated basis the block matrices are real, so
//! the two halves evolve as independent copies of the envelope model and the
//! oscillation sits entirely in the time-varying observation row
//! `w(cos bt, -sin bt)`. The production filter works on the conjugate-paired
//! complex state; this embedding exists so sampling has a plain real form
//! and so tests can check the two paths against each other.

use nalgebra::DMatrix;

use super::model::StateSpaceModel;
use crate::error::{Error, Result};
use crate::linalg::{im_part, re_part, symmetrize, CMatrix};

fn real_rep(m: &CMatrix, scale: f64) -> DMatrix<f64> {
    let n = m.nrows();
    let (re, im) = (re_part(m), im_part(m));
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    out.view_mut((0, 0), (n, n)).copy_from(&re);
    out.view_mut((0, n), (n, n)).copy_from(&(-&im));
    out.view_mut((n, 0), (n, n)).copy_from(&im);
    out.view_mut((n, n), (n, n)).copy_from(&re);
    out * scale
}

/// Plain real linear-Gaussian view of a model.
#[derive(Debug, Clone)]
pub struct RealEmbedding {
    model: StateSpaceModel,
    dim: usize,
}

impl RealEmbedding {
    pub fn new(model: &StateSpaceModel) -> Result<Self> {
        if model.is_transformed() {
            return Err(Error::InvalidArgument(
                "real embedding applies to block models only".into(),
            ));
        }
        let dim = model
            .block_layout()
            .iter()
            .map(|&(n, complex)| if complex { 2 * n } else { n })
            .sum();
        Ok(Self { model: model.clone(), dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn obs_noise(&self) -> f64 {
        self.model.obs_noise()
    }

    pub fn p_inf(&self) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.dim, self.dim);
        let mut off = 0;
        for (block, &(n, complex)) in self.model.blocks().iter().zip(&self.model.block_layout()) {
            if complex {
                let p = real_rep(&block.k0_t, 0.5);
                out.view_mut((off, off), (2 * n, 2 * n)).copy_from(&p);
                off += 2 * n;
            } else {
                out.view_mut((off, off), (n, n)).copy_from(&re_part(&block.k0_t));
                off += n;
            }
        }
        out
    }

    pub fn transition(&self, delta: f64) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        let mut a = DMatrix::zeros(self.dim, self.dim);
        let mut q = DMatrix::zeros(self.dim, self.dim);
        let mut off = 0;
        for (i, &(n, complex)) in self.model.block_layout().iter().enumerate() {
            let tp = self.model.block_transition(i, delta)?;
            if complex {
                a.view_mut((off, off), (2 * n, 2 * n)).copy_from(&real_rep(&tp.a, 1.0));
                q.view_mut((off, off), (2 * n, 2 * n))
                    .copy_from(&symmetrize(&real_rep(&tp.q, 0.5)));
                off += 2 * n;
            } else {
                a.view_mut((off, off), (n, n)).copy_from(&re_part(&tp.a));
                q.view_mut((off, off), (n, n)).copy_from(&symmetrize(&re_part(&tp.q)));
                off += n;
            }
        }
        Ok((a, q))
    }

    /// Observation row at absolute time `t`: each real block contributes its
    /// first coordinate, each oscillatory block the phase-rotated pair
    /// `w cos(bt)` on the real half and `-w sin(bt)` on the imaginary half.
    pub fn obs_row_at(&self, t: f64) -> Vec<(usize, f64)> {
        let mut row = Vec::new();
        let mut off = 0;
        for (block, &(n, complex)) in self.model.blocks().iter().zip(&self.model.block_layout()) {
            let w = block.k0_raw[(0, 0)].re.sqrt();
            if complex {
                let angle = block.spec.b * t;
                row.push((off, w * angle.cos()));
                row.push((off + n, -w * angle.sin()));
                off += 2 * n;
            } else {
                row.push((off, w));
                off += n;
            }
        }
        row
    }
}
