//! Finite-element workbench for prescribing Gaussian/geodesic curvature
//! (surfaces) and scalar/mean curvature (n ≥ 3) under conformal changes of
//! a background metric on compact manifolds with boundary.

pub mod background;
pub mod error;
pub mod fem;
pub mod mesh;
pub mod obstructions;
pub mod prescribe;
pub mod sparse;
pub mod spectral;

pub use error::{Error, Result};
