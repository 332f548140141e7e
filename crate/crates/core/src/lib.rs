//! Linear-time Gaussian process regression built on cosine-modulated Matérn
//! (Hida-Matérn) kernels.
//!
//! An elementary kernel `k(τ) = σ² cos(bτ) m_p(τ; a)` — a half-integer
//! Matérn of order `ν = p + 1/2` modulated by a cosine — governs a Gauss-
//! Markov process whose vector of mean-square derivatives evolves by a
//! first-order recursion. The crate builds that state-space model directly
//! from the kernel's lag derivatives, so exact GP posteriors and marginal
//! likelihoods come out of a Kalman filter / RTS smoother pass in O(M) time
//! instead of the O(M³) dense route. Mixtures of elementary kernels assemble
//! block-wise, oscillatory components run through a reduced complex-state
//! construction, and arbitrary stationary kernels can be approximated in L²
//! by mixture fitting.
//!
//! - [`kernel`]: closed forms, spectra, symbolic lag derivatives, mixtures,
//!   canonical filters, reference kernels.
//! - [`ssm`]: derivative covariance `K^S(τ)`, transitions `(A, Q)`, the
//!   correlation transform and structured inverses, linear (multi-output)
//!   transforms, naive marginalization.
//! - [`inference`]: Kalman filtering with low-rank sparse updates, RTS
//!   smoothing, prediction, prior sampling, hyperparameter search.
//! - [`oracle`]: dense O(M³) GP regression and Gaussian utilities used to
//!   validate the state-space path.
//! - [`approx`]: L² fitting of mixtures to arbitrary stationary kernels.

pub mod approx;
pub mod error;
pub mod exec;
pub mod inference;
pub mod kernel;
pub mod linalg;
pub mod optim;
pub mod oracle;
pub mod ssm;
pub mod synth;

pub use error::{Error, Result};
pub use kernel::{
    covariance_from_filter, periodic_to_mixture, CanonicalFilter, ExpPolyForm, ExpPolyMode,
    FilterTerm, HidaMaternSpec, MixtureComponent, MixtureSpec, QuadConfig, ReferenceKernel,
};
pub use ssm::{StateSpaceModel, TransitionPair};
