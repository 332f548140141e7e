//! Closed-form kernels: elementary cosine-modulated Matérns, their spectra
//! and derivatives, mixtures, canonical filters, and the reference zoo.

mod canonical;
mod exp_poly;
mod mixture;
mod reference;
mod spec;

pub use canonical::{covariance_from_filter, CanonicalFilter, FilterTerm, QuadConfig};
pub use exp_poly::{ExpPolyForm, ExpPolyMode};
pub use mixture::{periodic_to_mixture, MixtureComponent, MixtureSpec};
pub use reference::{ReferenceKernel, SmComponent};
pub use spec::{matern_poly_coeffs, HidaMaternSpec, MAX_SMOOTHNESS};

pub(crate) use spec::check_lag;
