//! Probabilistic learning and adaptation of unit-quaternion trajectories.
//!
//! Demonstrated orientations are projected to Euclidean coordinates with the
//! quaternion log map around an auxiliary quaternion, summarized by a Gaussian
//! mixture, and learned by a covariance-weighted kernel machine that can be
//! pulled through desired quaternions and angular velocities.
//!
//! The `parallel` feature (on by default) runs Gram assembly, batch
//! prediction, regression over grids and the EM E-step on rayon's pool.

pub mod error;
pub mod gmm;
pub mod highdim;
pub mod kmp;
pub mod orient;
mod par;
pub mod quat;

pub use error::{Error, Result};
pub use gmm::{EmConfig, GaussianComponent, GaussianMixture, RefPoint};
pub use kmp::{BlockLayout, KernelSpec, KmpModel};
pub use par::is_parallel;
pub use quat::{QuatDemo, UnitQuaternion};
