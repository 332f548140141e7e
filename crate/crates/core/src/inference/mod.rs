//! Kalman filtering, RTS smoothing, prediction, prior sampling, and
//! hyperparameter search.
//!
//! A single filter or smoother pass is sequential (it walks a Markov
//! chain); independent passes — restarts, sample draws, bootstrap
//! replicates — run concurrently through [`crate::exec`].

mod dataset;
mod fit;
mod kalman;
mod predict;
mod sample;
mod smoother;

pub use dataset::Dataset;
pub use fit::{fit_hyperparameters, FitOutcome, SearchConfig};
pub use kalman::{
    joseph_update, kalman_filter, low_rank_update, FilterResult, FilterStep, GaussianState,
};
pub use predict::{predict, project_marginals, Prediction};
pub use sample::sample_prior;
pub use smoother::rts_smooth;

