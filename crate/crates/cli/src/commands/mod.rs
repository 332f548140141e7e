pub mod approx;
pub mod bench;
pub mod condition;
pub mod fit;
pub mod predict;
pub mod sample;
