//! Small dense linear algebra: matrices, Lyapunov and Riccati solvers, and a
//! Lyapunov-certificate Hurwitz test. Everything here is eigensolver-free.

mod care;
pub mod linsolve;
mod lyapunov;
mod matrix;

pub use care::{bass_stabilizing_gain, care_residual, solve_care, stabilizing_gain, CareResult};
pub use linsolve::{cholesky, is_positive_definite};
pub use lyapunov::{is_hurwitz, solve_lyapunov};
pub use matrix::Matrix;
