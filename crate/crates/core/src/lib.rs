//! Formal solutions of interval linear systems `A x = b` in Kaucher complete
//! interval arithmetic.
//!
//! - [`interval`]: scalar arithmetic on possibly improper intervals.
//! - [`linalg`]: interval vectors and matrices.
//! - [`real`]: dense real LU, inverse and spectral radius.
//! - [`immersion`]: the embedding into `R^2n` and point-matrix solvers.
//! - [`split`]: the ARMSplit and TrnSplit stationary iterations.
//! - [`newton`]: the subdifferential Newton method.

pub mod error;
pub mod immersion;
pub mod interval;
pub mod linalg;
pub mod newton;
pub mod real;
pub mod split;

pub use error::{Error, Result};
pub use interval::{KInterval, Sign, SignClass};
pub use linalg::{IntervalMatrix, IntervalVector};
pub use newton::{newton_solve, NewtonOptions};
pub use real::RealMatrix;
pub use split::{arm_solve, trn_solve, IterOptions, SolveReport, SolveStatus, SplitVariant};
