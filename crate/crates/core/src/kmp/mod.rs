//! Kernelized regression of a probabilistic reference trajectory, with
//! derivative-augmented kernels over time, via-point adaptation, and
//! smoothness-penalized fits.

mod kernel;
mod model;
mod solve;

pub use kernel::{
    block_kernel, direct_stencil, scalar_kernel, BlockKernel, BlockLayout, KernelKind, KernelSpec,
    DEFAULT_DELTA, TIME_OUT_DIM,
};
pub use model::{
    adapt_reference, augment_reference, fit, fit_accel_constrained, fit_smoothness_constrained,
    DesiredEuclid, KmpModel, Predictor, SmoothnessPenalty,
};
pub use solve::MAX_CONDITION;
