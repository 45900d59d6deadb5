//! Pseudo-spectral tools for 2D perturbations of Couette flow in the channel
//! `ℝ × [-1, 1]` with Navier-slip walls, in vorticity–streamfunction form.

pub mod elliptic;
pub mod error;
pub mod field;
pub mod grid;
pub mod jk;
pub mod linear;
pub mod multipliers;
pub mod nonlinear;
pub mod psi;
pub mod scheme;
pub mod spacetime;
pub mod transport;

pub use error::{Error, Result};
pub use field::{Axis2, Direction, Field, Frame};
pub use grid::{ChebyshevY, Grid};
