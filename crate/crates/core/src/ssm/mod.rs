//! Construction of state-space models from kernel derivatives: the
//! multioutput derivative covariance, transitions, correlation transform,
//! structured inverses, linear transforms, and naive marginalization.

mod embed;
mod marginalize;
pub mod model;
pub mod multioutput;
pub mod transform;

pub use embed::RealEmbedding;
pub use marginalize::{marginalize_block_route, marginalize_naive, marginalize_one_step_route};
pub use model::{complex_block_calibration, StateSpaceModel, TransitionPair};
pub use multioutput::{build_k_s, build_k_s_mixture, MultiOutputCov};
pub use transform::{correlation_transform, structured_inverse_k0};
