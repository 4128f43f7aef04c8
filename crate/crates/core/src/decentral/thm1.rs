//! 2×2 systems with `B = I` and decoupled (diagonal) cost.
//!
//! For `A = [[a₀, a₁], [a₋₁, a₂]]`, `Q = diag(q₀, q₂)`,
//! `R = diag(1/γ₀, 1/γ₂)`, a diagonal `P = diag(p₀, p₂)` solves the ARE iff
//! `2a₀p₀ − γ₀p₀² + q₀ = 0`, `2a₂p₂ − γ₂p₂² + q₂ = 0` and
//! `a₋₁p₂ + a₁p₀ = 0`. Eliminating `p₀` leaves two quadratics in `p₂`; they
//! coincide exactly when the cost ratios below hold.

use serde::{Deserialize, Serialize};

use super::{rel_eq, RATIO_TOL};
use crate::error::{Error, Result};
use crate::lqr::LqrProblem;
use crate::matcore::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thm1System {
    pub a0: f64,
    pub a1: f64,
    pub a_minus1: f64,
    pub a2: f64,
    pub q0: f64,
    pub q2: f64,
    pub gamma0: f64,
    pub gamma2: f64,
}

impl Thm1System {
    pub fn new(a: [f64; 4], q: [f64; 2], gamma: [f64; 2]) -> Result<Self> {
        let sys = Thm1System {
            a0: a[0],
            a1: a[1],
            a_minus1: a[2],
            a2: a[3],
            q0: q[0],
            q2: q[1],
            gamma0: gamma[0],
            gamma2: gamma[1],
        };
        sys.validate()?;
        Ok(sys)
    }

    fn validate(&self) -> Result<()> {
        let all = [
            self.a0, self.a1, self.a_minus1, self.a2, self.q0, self.q2, self.gamma0, self.gamma2,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("non-finite 2×2 system parameter".into()));
        }
        if [self.q0, self.q2, self.gamma0, self.gamma2].iter().any(|&v| v <= 0.0) {
            return Err(Error::Input("q₀, q₂, γ₀, γ₂ must be strictly positive".into()));
        }
        Ok(())
    }

    pub fn state_matrix(&self) -> Matrix {
        Matrix::from_rows(&[[self.a0, self.a1], [self.a_minus1, self.a2]])
            .expect("finite by construction")
    }

    /// `B = I`, `Q = diag(q₀, q₂)`, `R = diag(1/γ₀, 1/γ₂)`.
    pub fn to_problem(&self) -> Result<LqrProblem> {
        LqrProblem::new(
            self.state_matrix(),
            Matrix::identity(2),
            Matrix::from_diag(&[self.q0, self.q2]),
            Matrix::from_diag(&[1.0 / self.gamma0, 1.0 / self.gamma2]),
        )
    }

    /// Reads back a problem of the form produced by [`Self::to_problem`].
    pub fn from_problem(prob: &LqrProblem) -> Result<Self> {
        if prob.n_states() != 2 || prob.n_inputs() != 2 {
            return Err(Error::Input("2×2 analysis needs two states and two inputs".into()));
        }
        if prob.b() != &Matrix::identity(2) {
            return Err(Error::Input("2×2 analysis needs B = I".into()));
        }
        if !prob.q().is_diagonal(0.0) || !prob.r().is_diagonal(0.0) {
            return Err(Error::Input("2×2 analysis needs diagonal Q and R".into()));
        }
        let a = prob.a();
        let q = prob.q();
        let r = prob.r();
        Thm1System::new(
            [a[(0, 0)], a[(0, 1)], a[(1, 0)], a[(1, 1)]],
            [q[(0, 0)], q[(1, 1)]],
            [1.0 / r[(0, 0)], 1.0 / r[(1, 1)]],
        )
    }

    fn check_coupling(&self) -> Result<()> {
        if self.a1 == 0.0 {
            return Err(Error::DegenerateCoupling("a1"));
        }
        if self.a_minus1 == 0.0 {
            return Err(Error::DegenerateCoupling("a_minus1"));
        }
        if self.a2 == 0.0 {
            return Err(Error::DegenerateCoupling("a2"));
        }
        Ok(())
    }

    /// `−a₀a₋₁ / (a₁a₂)`, the state-weight ratio `q₀/q₂` that decentralizes.
    pub fn required_q_ratio(&self) -> f64 {
        -self.a0 * self.a_minus1 / (self.a1 * self.a2)
    }

    /// `(a₁²/a₋₁²)·(q₀/q₂)`, the input-weight ratio `γ₀/γ₂` that decentralizes.
    pub fn required_gamma_ratio(&self) -> f64 {
        self.a1 * self.a1 / (self.a_minus1 * self.a_minus1) * (self.q0 / self.q2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thm1Verdict {
    pub holds: bool,
    /// (i) `a₁` and `a₋₁` have opposite signs.
    pub opposite_coupling: bool,
    /// (ii) `a₀` and `a₂` have the same sign.
    pub same_sign_diagonal: bool,
    /// (iii) `q₀/q₂ = −a₀a₋₁/(a₁a₂)`.
    pub q_ratio_matches: bool,
    /// (iv) `γ₀/γ₂ = (a₁²/a₋₁²)(q₀/q₂)`.
    pub gamma_ratio_matches: bool,
    pub q_ratio: f64,
    pub required_q_ratio: f64,
    pub gamma_ratio: f64,
    pub required_gamma_ratio: f64,
}

pub fn thm1_check(sys: &Thm1System) -> Result<Thm1Verdict> {
    sys.validate()?;
    sys.check_coupling()?;
    let opposite_coupling = sys.a1.signum() * sys.a_minus1.signum() < 0.0;
    let same_sign_diagonal = sys.a0 != 0.0 && sys.a0.signum() * sys.a2.signum() > 0.0;
    let q_ratio = sys.q0 / sys.q2;
    let gamma_ratio = sys.gamma0 / sys.gamma2;
    let required_q_ratio = sys.required_q_ratio();
    let required_gamma_ratio = sys.required_gamma_ratio();
    let q_ratio_matches = rel_eq(q_ratio, required_q_ratio, RATIO_TOL);
    let gamma_ratio_matches = rel_eq(gamma_ratio, required_gamma_ratio, RATIO_TOL);
    Ok(Thm1Verdict {
        holds: opposite_coupling && same_sign_diagonal && q_ratio_matches && gamma_ratio_matches,
        opposite_coupling,
        same_sign_diagonal,
        q_ratio_matches,
        gamma_ratio_matches,
        q_ratio,
        required_q_ratio,
        gamma_ratio,
        required_gamma_ratio,
    })
}

/// Picks `q₀` and `γ₀` from `q₂`, `γ₂` so that the 2×2 LQR gain is
/// diagonal. Positivity of the weights needs opposite-sign coupling and
/// same-sign self-dynamics.
pub fn thm1_synthesize(
    a0: f64,
    a1: f64,
    a_minus1: f64,
    a2: f64,
    q2: f64,
    gamma2: f64,
) -> Result<Thm1System> {
    if !(q2 > 0.0) || !(gamma2 > 0.0) {
        return Err(Error::Input("q₂ and γ₂ must be strictly positive".into()));
    }
    let mut sys = Thm1System {
        a0,
        a1,
        a_minus1,
        a2,
        q0: q2,
        q2,
        gamma0: gamma2,
        gamma2,
    };
    sys.validate()?;
    sys.check_coupling()?;
    if !(a1.signum() * a_minus1.signum() < 0.0) {
        return Err(Error::Preconditions(format!(
            "a1 = {a1} and a_minus1 = {a_minus1} must have opposite signs"
        )));
    }
    if !(a0 != 0.0 && a0.signum() * a2.signum() > 0.0) {
        return Err(Error::Preconditions(format!(
            "a0 = {a0} and a2 = {a2} must have the same sign"
        )));
    }
    sys.q0 = q2 * sys.required_q_ratio();
    sys.gamma0 = gamma2 * sys.required_gamma_ratio();
    sys.validate()?;
    Ok(sys)
}

/// The diagonal ARE solution `(p₀, p₂)` of a system satisfying the
/// conditions: `p₂ = a₂/γ₂ + √(a₂²/γ₂² + q₂/γ₂)`, `p₀ = −a₋₁p₂/a₁`.
pub fn thm1_p_roots(sys: &Thm1System) -> Result<(f64, f64)> {
    let verdict = thm1_check(sys)?;
    if !verdict.holds {
        return Err(Error::Preconditions(
            "decentralization conditions do not hold for this system".into(),
        ));
    }
    let ratio = sys.a2 / sys.gamma2;
    let p2 = ratio + (ratio * ratio + sys.q2 / sys.gamma2).sqrt();
    let p0 = -sys.a_minus1 * p2 / sys.a1;
    Ok((p0, p2))
}
