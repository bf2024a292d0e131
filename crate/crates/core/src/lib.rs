//! Near-field XL-MIMO analysis and distance-aware hybrid precoding.

pub mod baselines;
pub mod capacity;
pub mod dap;
pub mod energy;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod linalg;
pub mod pswf;
pub mod quadrature;
pub mod waterfill;

pub use error::{Error, Result};
