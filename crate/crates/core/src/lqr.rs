//! LQR problem container and solve wrapper.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{cholesky, solve_care, CareResult, Matrix};

/// Minimize `∫ xᵀQx + uᵀRu dt` subject to `ẋ = Ax + Bu`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProblem", into = "RawProblem")]
pub struct LqrProblem {
    a: Matrix,
    b: Matrix,
    q: Matrix,
    r: Matrix,
}

#[allow(non_snake_case)]
#[derive(Serialize, Deserialize)]
struct RawProblem {
    A: Matrix,
    B: Matrix,
    Q: Matrix,
    R: Matrix,
}

impl TryFrom<RawProblem> for LqrProblem {
    type Error = Error;
    fn try_from(raw: RawProblem) -> Result<Self> {
        LqrProblem::new(raw.A, raw.B, raw.Q, raw.R)
    }
}

impl From<LqrProblem> for RawProblem {
    fn from(p: LqrProblem) -> Self {
        RawProblem {
            A: p.a,
            B: p.b,
            Q: p.q,
            R: p.r,
        }
    }
}

impl LqrProblem {
    /// Checks shapes and that `Q` and `R` are symmetric positive definite.
    pub fn new(a: Matrix, b: Matrix, q: Matrix, r: Matrix) -> Result<Self> {
        let n = a.rows();
        let m = b.cols();
        if !a.is_square() || b.rows() != n || q.shape() != (n, n) || r.shape() != (m, m) {
            return Err(Error::Dimension(format!(
                "LQR needs A n×n, B n×m, Q n×n, R m×m; got A{:?} B{:?} Q{:?} R{:?}",
                a.shape(),
                b.shape(),
                q.shape(),
                r.shape()
            )));
        }
        for (name, w) in [("Q", &q), ("R", &r)] {
            if !w.is_symmetric(1e-10) || cholesky(w).is_none() {
                return Err(Error::Input(format!(
                    "{name} must be symmetric positive definite"
                )));
            }
        }
        Ok(LqrProblem { a, b, q, r })
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    pub fn q(&self) -> &Matrix {
        &self.q
    }

    pub fn r(&self) -> &Matrix {
        &self.r
    }

    pub fn n_states(&self) -> usize {
        self.a.rows()
    }

    pub fn n_inputs(&self) -> usize {
        self.b.cols()
    }

    /// All four matrices diagonal (square `B`).
    pub fn is_fully_diagonal(&self) -> bool {
        self.b.is_square() && [&self.a, &self.b, &self.q, &self.r].iter().all(|m| m.is_diagonal(0.0))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LqrSolution {
    pub care: CareResult,
    /// Squared closed-loop H₂ norm, `trace(P)`, for unit-intensity
    /// disturbances entering every state and output `[Q^{1/2}x; R^{1/2}u]`.
    pub h2_squared: f64,
}

impl LqrSolution {
    pub fn gain(&self) -> &Matrix {
        &self.care.k
    }

    pub fn h2(&self) -> f64 {
        self.h2_squared.sqrt()
    }
}

pub fn solve_lqr(prob: &LqrProblem) -> Result<LqrSolution> {
    let care = solve_care(&prob.a, &prob.b, &prob.q, &prob.r)?;
    let h2_squared = care.p.trace();
    Ok(LqrSolution { care, h2_squared })
}

/// `A − BK`.
pub fn closed_loop(prob: &LqrProblem, sol: &LqrSolution) -> Matrix {
    &prob.a - &(&prob.b * &sol.care.k)
}
