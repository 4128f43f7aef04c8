//! Constructors for the example systems: a linearized predator-prey
//! model, diffusion on a ring, two chambers heated across a wall, and the
//! 2×2 performance example.
//!
//! Parameters carry physical units in their docs only; every constructor
//! emits dimensionless matrices.

use serde::{Deserialize, Serialize};

use crate::decentral::{cor3_check, thm2_find_c, Cor3Verdict, THM2_DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::lqr::LqrProblem;
use crate::matcore::Matrix;
use crate::spectral::CirculantSpec;

/// Logistic predator-prey model linearized at the coexistence equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredatorPreyParams {
    /// Intrinsic growth rate of the prey (1/time).
    pub r1: f64,
    /// Intrinsic growth rate of the predator (1/time).
    pub r2: f64,
    /// Carrying capacity for the prey (population).
    pub k1: f64,
    /// Carrying capacity for the predator (population).
    pub k2: f64,
    /// Predation rate (1/(population·time)).
    pub b: f64,
    /// Conversion rate (dimensionless).
    pub e: f64,
}

impl PredatorPreyParams {
    pub fn new(r1: f64, r2: f64, k1: f64, k2: f64, b: f64, e: f64) -> Result<Self> {
        let p = PredatorPreyParams { r1, r2, k1, k2, b, e };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.r1, self.r2, self.k1, self.k2, self.b, self.e];
        if all.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Input("predator-prey parameters must be positive".into()));
        }
        Ok(())
    }

    /// `σ = e·k₁·k₂·b² + r₁·r₂`.
    pub fn sigma(&self) -> f64 {
        self.e * self.k1 * self.k2 * self.b * self.b + self.r1 * self.r2
    }

    /// `e·k₂·r₁ / (k₁·r₂)`.
    pub fn decentralizing_q_ratio(&self) -> f64 {
        self.e * self.k2 * self.r1 / (self.k1 * self.r2)
    }
}

/// Jacobian `J*` of the predator-prey dynamics at coexistence; the input
/// matrix is the identity.
pub fn predator_prey_jacobian(p: &PredatorPreyParams) -> Result<Matrix> {
    p.validate()?;
    let PredatorPreyParams { r1, r2, k1, k2, b, e } = *p;
    let sigma = p.sigma();
    let prey_margin = r1 - b * k2;
    let pred_margin = r2 + b * e * k1;
    Matrix::from_rows(&[
        [
            -r1 * r2 * prey_margin / sigma,
            -b * k1 * r2 * prey_margin / sigma,
        ],
        [
            b * e * k2 * r1 * pred_margin / sigma,
            -r1 * r2 * pred_margin / sigma,
        ],
    ])
}

/// Second-difference operator on a ring of `n` sites spaced `delta` apart:
/// first row `(1/Δ²)[−2, 1, 0, …, 0, 1]`.
pub fn diffusion_operator(n: usize, delta: f64) -> Result<CirculantSpec> {
    if n < 3 {
        return Err(Error::WrapAround(n));
    }
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::Input("site spacing must be positive".into()));
    }
    let inv = 1.0 / (delta * delta);
    let mut row = vec![0.0; n];
    row[0] = -2.0 * inv;
    row[1] = inv;
    row[n - 1] = inv;
    CirculantSpec::new(row)
}

/// Forward difference on the ring, first row `(1/Δ)[−1, 1, 0, …, 0]`.
/// Satisfies `DᵀD = −D²` with `D²` from [`diffusion_operator`].
pub fn forward_difference(n: usize, delta: f64) -> Result<CirculantSpec> {
    if n < 3 {
        return Err(Error::WrapAround(n));
    }
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::Input("site spacing must be positive".into()));
    }
    let mut row = vec![0.0; n];
    row[0] = -1.0 / delta;
    row[1] = 1.0 / delta;
    CirculantSpec::new(row)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffusionCost {
    /// `I − 2D²`, penalizing spatial differences.
    pub q: CirculantSpec,
    pub r: CirculantSpec,
    pub c: f64,
}

/// Coupled cost `Q = I − 2D²`, `R = I` that makes the diffusion LQR gain
/// exactly the identity (`c = 1`).
pub fn diffusion_decentralizing_cost(n: usize, delta: f64) -> Result<DiffusionCost> {
    let lap = diffusion_operator(n, delta)?;
    let q = CirculantSpec::identity(n).add(&lap.scale(-2.0))?;
    let r = CirculantSpec::identity(n);
    let c = thm2_find_c(&lap, &CirculantSpec::identity(n), &q, &r, THM2_DEFAULT_TOL)?
        .ok_or_else(|| Error::Input("derivative-penalty cost failed to decentralize".into()))?;
    Ok(DiffusionCost { q, r, c })
}

/// Two chambers separated by a wall, each with its own heater.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChamberParams {
    /// Heat lost to the environment (1/time).
    pub alpha0: f64,
    /// Heat transfer through the wall (1/time).
    pub alpha1: f64,
    /// Heater gain into its own chamber.
    pub beta0: f64,
    /// Heater gain into the opposite chamber.
    pub beta1: f64,
}

impl ChamberParams {
    pub fn new(alpha0: f64, alpha1: f64, beta0: f64, beta1: f64) -> Result<Self> {
        let p = ChamberParams {
            alpha0,
            alpha1,
            beta0,
            beta1,
        };
        if [alpha0, alpha1, beta0, beta1]
            .iter()
            .any(|v| !(v.is_finite() && *v > 0.0))
        {
            return Err(Error::Input("chamber parameters must be positive".into()));
        }
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChamberSystem {
    /// `[−α₀, α₁]`.
    pub a: CirculantSpec,
    /// `[β₀, β₁]`.
    pub b: CirculantSpec,
    /// `(α₀−α₁)/(α₀+α₁) = (β₀−β₁)/(β₀+β₁)`, the condition stated in terms of
    /// the physical parameters.
    pub claimed_condition: bool,
    /// The 2×2 circulant ratio test applied to `(a₀, a₁) = (−α₀, α₁)`:
    /// `(−α₀−α₁)/(−α₀+α₁) = (β₀−β₁)/(β₀+β₁)`.
    pub cor3_condition: bool,
}

fn ratios_match(x: f64, y: f64) -> bool {
    (x - y).abs() <= crate::decentral::RATIO_TOL * x.abs().max(y.abs()).max(1.0)
}

/// Builds the chamber system and evaluates both ratio predicates. The two
/// disagree in general; neither is treated as authoritative here.
pub fn chamber_system(p: &ChamberParams) -> Result<ChamberSystem> {
    let p = ChamberParams::new(p.alpha0, p.alpha1, p.beta0, p.beta1)?;
    let a = CirculantSpec::new(vec![-p.alpha0, p.alpha1])?;
    let b = CirculantSpec::new(vec![p.beta0, p.beta1])?;
    let claimed_lhs = (p.alpha0 - p.alpha1) / (p.alpha0 + p.alpha1);
    let b_ratio = (p.beta0 - p.beta1) / (p.beta0 + p.beta1);
    // The cost ratios are irrelevant to the dynamics predicate; Q = R = I.
    let id = CirculantSpec::identity(2);
    let cor3: Cor3Verdict = cor3_check(&a, &b, &id, &id)?;
    Ok(ChamberSystem {
        a,
        b,
        claimed_condition: ratios_match(claimed_lhs, b_ratio),
        cor3_condition: cor3.dynamics_ratios_match,
    })
}

/// The 2×2 example `A = [[1, 1], [−1, a₂]]`, `B = I`, `Q = diag(q₀, 1)`,
/// `R = diag(1, 1/γ₂)`.
pub fn perf_example_with_a2(a2: f64, q0: f64, gamma2: f64) -> Result<LqrProblem> {
    if !(q0 > 0.0 && gamma2 > 0.0) || !q0.is_finite() || !gamma2.is_finite() {
        return Err(Error::Input("q0 and gamma2 must be positive".into()));
    }
    LqrProblem::new(
        Matrix::from_rows(&[[1.0, 1.0], [-1.0, a2]])?,
        Matrix::identity(2),
        Matrix::from_diag(&[q0, 1.0]),
        Matrix::from_diag(&[1.0, 1.0 / gamma2]),
    )
}

/// The 2×2 example with `a₂ = 1`.
pub fn perf_example_system(q0: f64, gamma2: f64) -> Result<LqrProblem> {
    perf_example_with_a2(1.0, q0, gamma2)
}
