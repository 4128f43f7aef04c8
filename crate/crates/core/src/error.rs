use std::fmt;

use thiserror::Error;

/// Which solve inside a second-order reduction failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    P1,
    P2,
    Full,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stage::P1 => f.write_str("stage-P1"),
            Stage::P2 => f.write_str("stage-P2"),
            Stage::Full => f.write_str("stage-full"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("resonant spectrum: Lyapunov operator is singular (condition estimate {condition:.3e})")]
    ResonantSpectrum { condition: f64 },

    #[error("unstabilizable or ill-conditioned pair: {0}")]
    Unstabilizable(String),

    #[error("nonconvergent: Newton-Kleinman stopped after {iterations} iterations with ARE residual {residual:.3e}")]
    Nonconvergent { iterations: usize, residual: f64 },

    #[error("degenerate coupling: {0} is zero")]
    DegenerateCoupling(&'static str),

    #[error("preconditions fail, positivity of cost impossible: {0}")]
    Preconditions(String),

    #[error("frequency-singular: {symbol} vanishes at frequency {kappa}")]
    FrequencySingular { symbol: &'static str, kappa: usize },

    #[error("degenerate: denominator {0} is zero")]
    Degenerate(String),

    #[error("wrap-around collision: diffusion operator needs n >= 3, got {0}")]
    WrapAround(usize),

    #[error("{stage}: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// True for numerical failures of a well-posed request, false for bad input.
    pub fn is_solver_failure(&self) -> bool {
        match self {
            Error::ResonantSpectrum { .. }
            | Error::Unstabilizable(_)
            | Error::Nonconvergent { .. }
            | Error::FrequencySingular { .. } => true,
            Error::Stage { source, .. } => source.is_solver_failure(),
            _ => false,
        }
    }

    pub(crate) fn at_stage(self, stage: Stage) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
