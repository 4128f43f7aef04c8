//! Continuous-time LQR solving and analysis of when the unconstrained
//! optimal gain is completely decentralized.

pub mod cli;
pub mod decentral;
pub mod error;
pub mod io;
pub mod lqr;
pub mod matcore;
pub mod models;
pub mod secondorder;
pub mod spectral;
pub mod sweep;

pub use error::{Error, Result};
pub use matcore::Matrix;
