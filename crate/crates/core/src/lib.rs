//! Crank-Nicolson finite-difference solver for the Benjamin-Ono equation
//! `u_t = u u_x + H u_xx` on periodic grids, with discrete Hilbert transforms
//! for the line and the circle, closed-form soliton references and grid
//! refinement studies.

// `!(a < b)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod exact;
pub mod experiments;
pub mod grid;
pub mod hilbert;
pub mod io;
pub mod spectral;
pub mod stepper;

pub use error::{BoError, Result};
pub use exact::{ExactSolution, OneSolitonParams, TwoSolitonParams};
pub use grid::{Average, Difference, GridFunction, GridSpec, Norms, Topology};
pub use hilbert::{hilbert_line, hilbert_periodic, HilbertPath, PeriodicHilbertKernel};
pub use stepper::{evolve, CflMode, CflParams, FixedPointConfig, LambdaPolicy, Stepper, Trajectory};
