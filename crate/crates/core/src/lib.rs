//! Rotationally symmetric conformal flows `g(t) = u(·, t) g_H` on hyperbolic
//! space `H^m`, `m >= 3`, where `∂g/∂t = -R_g g`.
//!
//! - [`geometry`]: radial Laplacian, gradient and volume quadrature.
//! - [`conformal`]: conformal factors, scalar curvature, pressure.
//! - [`solver`]: semi-implicit solver for Dirichlet problems on geodesic
//!   balls and the exhaustion driver.
//! - [`bounds`]: closed-form barriers, constants and a posteriori checks.
//! - [`harness`]: scenario configuration, verification suites and output.

pub mod bounds;
pub mod conformal;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod solver;
pub mod tridiag;

pub use conformal::{ConformalFactor, Pressure};
pub use error::{FlowError, Result};
pub use geometry::{Dimension, RadialField, RadialGrid};
pub use solver::{DirichletProblem, FlowState, Trajectory};
