use serde::{Deserialize, Serialize};

use super::linsolve::{cholesky, cholesky_solve};
use super::lyapunov::{is_hurwitz, solve_lyapunov};
use super::Matrix;
use crate::error::{Error, Result};

pub const MAX_ITERATIONS: usize = 200;
/// Newton step size at which the iteration stops, relative to `max(1, ‖P‖_F)`.
pub const STEP_TOL: f64 = 1e-12;
/// Accepted ARE residual, relative to `max(1, ‖Q‖_F)`.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// Stabilizing solution of the continuous algebraic Riccati equation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CareResult {
    /// Symmetric positive definite solution.
    pub p: Matrix,
    /// Optimal gain `R⁻¹BᵀP`; the closed loop is `A − BK`.
    pub k: Matrix,
    /// `‖AᵀP + PA − PBR⁻¹BᵀP + Q‖_F`.
    pub residual: f64,
    pub iterations: usize,
}

/// Bass construction of a stabilizing gain.
///
/// With `β = ‖A‖_F + 1`, solves `(A + βI)Z + Z(A + βI)ᵀ = 2BBᵀ` and returns
/// `K₀ = BᵀZ⁻¹`, which places the spectrum of `A − BK₀` left of `−β`.
/// Returns the zero gain when `A` is already Hurwitz.
pub fn bass_stabilizing_gain(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if !a.is_square() || b.rows() != a.rows() {
        return Err(Error::Dimension(format!(
            "Bass gain needs A n×n and B n×m, got {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    let n = a.rows();
    if is_hurwitz(a)? {
        return Ok(Matrix::zeros(b.cols(), n));
    }
    let beta = a.frobenius_norm() + 1.0;
    let shifted = &a.transpose() + &Matrix::identity(n).scale(beta);
    let bbt = (b * &b.transpose()).scale(-2.0);
    // solve_lyapunov(M, Q) solves MᵀZ + ZM + Q = 0.
    let z = solve_lyapunov(&shifted, &bbt).map_err(|e| match e {
        Error::ResonantSpectrum { .. } => {
            Error::Unstabilizable("shifted Lyapunov equation is singular".into())
        }
        other => other,
    })?;
    let chol = cholesky(&z).ok_or_else(|| {
        Error::Unstabilizable("Bass Gramian is singular; some unstable mode is uncontrollable".into())
    })?;
    let k0 = cholesky_solve(&chol, b).transpose();
    if !k0.is_finite() || !is_hurwitz(&(a - &(b * &k0)))? {
        return Err(Error::Unstabilizable(
            "Bass gain does not stabilize the pair".into(),
        ));
    }
    Ok(k0)
}

fn validate(a: &Matrix, b: &Matrix, q: &Matrix, r: &Matrix) -> Result<Matrix> {
    let n = a.rows();
    if !a.is_square() || b.rows() != n || q.shape() != (n, n) || r.shape() != (b.cols(), b.cols())
    {
        return Err(Error::Dimension(format!(
            "CARE needs A n×n, B n×m, Q n×n, R m×m; got A{:?} B{:?} Q{:?} R{:?}",
            a.shape(),
            b.shape(),
            q.shape(),
            r.shape()
        )));
    }
    if [a, b, q, r].iter().any(|m| !m.is_finite()) {
        return Err(Error::Input("non-finite entries in Riccati data".into()));
    }
    if !q.is_symmetric(1e-10) || cholesky(q).is_none() {
        return Err(Error::Input("Q must be symmetric positive definite".into()));
    }
    if !r.is_symmetric(1e-10) {
        return Err(Error::Input("R must be symmetric positive definite".into()));
    }
    cholesky(r).ok_or_else(|| Error::Input("R must be symmetric positive definite".into()))
}

/// `‖AᵀP + PA − PBR⁻¹BᵀP + Q‖_F`, using `K = R⁻¹BᵀP`.
pub fn care_residual(a: &Matrix, b: &Matrix, q: &Matrix, p: &Matrix, k: &Matrix) -> f64 {
    let lhs = &(&(&a.transpose() * p) + &(p * a)) - &(&(p * b) * k);
    (&lhs + q).frobenius_norm()
}

/// Solves `AᵀP + PA − PBR⁻¹BᵀP + Q = 0` by Newton-Kleinman iteration from
/// a Bass initial gain.
///
/// Each step solves `(A − BKₖ)ᵀPₖ + Pₖ(A − BKₖ) + Q + KₖᵀRKₖ = 0` and sets
/// `Kₖ₊₁ = R⁻¹BᵀPₖ`. Iteration stops once the step falls below
/// `1e-12·max(1, ‖P‖_F)`, or once three steps in a row fail to halve the
/// smallest step so far while the residual is already inside tolerance
/// (rounding floor on poorly scaled data).
pub fn solve_care(a: &Matrix, b: &Matrix, q: &Matrix, r: &Matrix) -> Result<CareResult> {
    let r_chol = validate(a, b, q, r)?;
    let k0 = stabilizing_gain(a, b)?;
    newton_kleinman(a, b, q, r, &r_chol, k0)
}

/// The Bass gain, or when its Gramian is too ill-conditioned to invert
/// (typically one input driving many states) a gain obtained by
/// continuation in the shift: `K = 0` stabilizes `A − σI` for
/// `σ = ‖A‖_F + 1`, and each optimal gain for `A − σI` (with `Q = I`,
/// `R = I`) seeds the Riccati solve at a smaller shift until `σ = 0`.
pub fn stabilizing_gain(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    match bass_stabilizing_gain(a, b) {
        Err(Error::Unstabilizable(reason)) => {
            shift_continuation_gain(a, b).map_err(|e| Error::Unstabilizable(format!("{reason}; {e}")))
        }
        other => other,
    }
}

const MAX_CONTINUATION_STEPS: usize = 100;

fn shift_continuation_gain(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    let (n, m) = (a.rows(), b.cols());
    let q = Matrix::identity(n);
    let shifted = |s: f64| a - &Matrix::identity(n).scale(s);
    let mut sigma = a.frobenius_norm() + 1.0;
    let floor = 1e-10 * sigma;
    let mut k = Matrix::zeros(m, n);
    for _ in 0..MAX_CONTINUATION_STEPS {
        let mut target = 0.0;
        while !is_hurwitz(&(&shifted(target) - &(b * &k)))? {
            target = 0.5 * (target + sigma);
            if sigma - target <= floor {
                return Err(Error::Unstabilizable("shift continuation stalled".into()));
            }
        }
        if target == 0.0 {
            return Ok(k);
        }
        k = newton_gain(&shifted(target), b, &q, k)?;
        sigma = target;
    }
    Err(Error::Unstabilizable("shift continuation did not reach zero".into()))
}

/// Newton-Kleinman steps with `Q = q`, `R = I`, keeping only the gain.
/// Every iterate from a stabilizing start is stabilizing, so no residual
/// acceptance is applied.
fn newton_gain(a: &Matrix, b: &Matrix, q: &Matrix, mut k: Matrix) -> Result<Matrix> {
    let bt = b.transpose();
    let mut prev: Option<Matrix> = None;
    for _ in 0..MAX_ITERATIONS {
        let closed = a - &(b * &k);
        let rhs = q + &(&k.transpose() * &k);
        let p = solve_lyapunov(&closed, &rhs.symmetrize())?;
        k = &bt * &p;
        if let Some(prev) = &prev {
            if (&p - prev).frobenius_norm() <= 1e-10 * p.frobenius_norm().max(1.0) {
                break;
            }
        }
        prev = Some(p);
    }
    Ok(k)
}

fn newton_kleinman(
    a: &Matrix,
    b: &Matrix,
    q: &Matrix,
    r: &Matrix,
    r_chol: &Matrix,
    k0: Matrix,
) -> Result<CareResult> {
    let bt = b.transpose();
    let gain = |p: &Matrix| cholesky_solve(r_chol, &(&bt * p));
    let accept = RESIDUAL_TOL * q.frobenius_norm().max(1.0);

    let mut k = k0;
    let mut p: Option<Matrix> = None;
    let mut best_step = f64::INFINITY;
    let mut stalled = 0;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let closed = a - &(b * &k);
        let rhs = q + &(&(&k.transpose() * r) * &k);
        let p_next = solve_lyapunov(&closed, &rhs.symmetrize()).map_err(|e| match e {
            Error::ResonantSpectrum { .. } => Error::Nonconvergent {
                iterations,
                residual: f64::INFINITY,
            },
            other => other,
        })?;
        k = gain(&p_next);
        if let Some(prev) = &p {
            let step = (&p_next - prev).frobenius_norm();
            if step <= STEP_TOL * prev.frobenius_norm().max(1.0) {
                p = Some(p_next);
                converged = true;
                break;
            }
            stalled = if step > 0.5 * best_step { stalled + 1 } else { 0 };
            best_step = best_step.min(step);
            if stalled >= 3 && care_residual(a, b, q, &p_next, &k) <= accept {
                p = Some(p_next);
                converged = true;
                break;
            }
        }
        p = Some(p_next);
    }

    let p = p.expect("at least one Newton step runs");
    let residual = care_residual(a, b, q, &p, &k);
    if !converged || !(residual <= accept) {
        return Err(Error::Nonconvergent {
            iterations,
            residual,
        });
    }
    if cholesky(&p).is_none() || !is_hurwitz(&(a - &(b * &k)))? {
        return Err(Error::Unstabilizable(
            "Riccati iterate is not a stabilizing positive definite solution".into(),
        ));
    }
    Ok(CareResult {
        p,
        k,
        residual,
        iterations,
    })
}
