//! Circulant systems, decoupled over spatial frequency.
//!
//! With `A, B, Q, R` real circulant (`Q`, `R` symmetric), every matrix in
//! the ARE is diagonal in the DFT basis and the gain `K = R⁻¹BᵀP` is the
//! circulant with symbols
//!
//! `k̂(κ) = (Re â + √((Re â)² + |b̂|²·q̂/r̂)) / b̂`,
//!
//! taking the root with nonnegative real part so that `â − b̂k̂` is stable.
//! For symmetric `A` and `B` this is `(â + √(â² + b̂²q̂/r̂))/b̂`, the
//! stabilizing root of `c² − 2c·â/b̂ − q̂/r̂ = 0`. A circulant is diagonal
//! only when it is a multiple of the identity, so `K` is decentralized iff
//! every `k̂(κ)` equals one real constant `c`, and then `K = cI`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::CirculantSpec;

pub const THM2_DEFAULT_TOL: f64 = 1e-9;
const SINGULAR_TOL: f64 = 1e-12;

fn check_sizes(specs: [&CirculantSpec; 4]) -> Result<usize> {
    let n = specs[0].n();
    if specs.iter().any(|s| s.n() != n) {
        return Err(Error::Dimension(format!(
            "circulant sizes differ: {:?}",
            specs.iter().map(|s| s.n()).collect::<Vec<_>>()
        )));
    }
    Ok(n)
}

fn nonvanishing(
    spec: &CirculantSpec,
    symbol: &'static str,
) -> Result<Vec<Complex64>> {
    let values = spec.eigenvalues().values;
    let scale = spec.first_row().iter().map(|v| v.abs()).sum::<f64>().max(1.0);
    match values.iter().position(|v| v.norm() <= SINGULAR_TOL * scale) {
        Some(kappa) => Err(Error::FrequencySingular { symbol, kappa }),
        None => Ok(values),
    }
}

/// The per-frequency optimal gain symbols `k̂(κ)`, `κ = 0, …, n − 1`.
pub fn thm2_candidates(
    a: &CirculantSpec,
    b: &CirculantSpec,
    q: &CirculantSpec,
    r: &CirculantSpec,
) -> Result<Vec<Complex64>> {
    check_sizes([a, b, q, r])?;
    let b_hat = nonvanishing(b, "b")?;
    let r_hat = nonvanishing(r, "r")?;
    let a_hat = a.eigenvalues().values;
    let q_hat = q.eigenvalues().values;
    Ok(a_hat
        .iter()
        .zip(&b_hat)
        .zip(q_hat.iter().zip(&r_hat))
        .map(|((&ah, &bh), (&qh, &rh))| {
            let re_a = ah.re;
            let disc = Complex64::new(re_a * re_a, 0.0) + bh.norm_sqr() * (qh / rh);
            (re_a + disc.sqrt()) / bh
        })
        .collect())
}

/// Returns the common real gain `c` when all frequency gains agree, so the
/// optimal gain is `cI`; `None` otherwise.
pub fn thm2_find_c(
    a: &CirculantSpec,
    b: &CirculantSpec,
    q: &CirculantSpec,
    r: &CirculantSpec,
    tol: f64,
) -> Result<Option<f64>> {
    let cands = thm2_candidates(a, b, q, r)?;
    let c0 = cands[0];
    let scale = c0.norm().max(1.0);
    let all_real = cands.iter().all(|c| c.im.abs() <= tol * c.norm().max(1.0));
    let all_equal = cands.iter().all(|c| (c - c0).norm() <= tol * scale);
    Ok((all_real && all_equal).then_some(c0.re))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cor3Verdict {
    /// Both ratio equalities hold.
    pub holds: bool,
    pub dynamics_ratios_match: bool,
    pub weight_ratios_match: bool,
    pub a_ratio: f64,
    pub b_ratio: f64,
    pub q_ratio: f64,
    pub r_ratio: f64,
    /// Common gain from the frequency-domain check. The ratio equalities make
    /// both frequency quadratics identical; the stabilizing roots coincide
    /// only when `b₀ + b₁` and `b₀ − b₁` share a sign, so this can be `None`
    /// even when `holds` is true.
    pub c: Option<f64>,
}

fn relative_difference(spec: &CirculantSpec, name: &'static str) -> Result<f64> {
    let (x0, x1) = (spec.first_row()[0], spec.first_row()[1]);
    let sum = x0 + x1;
    if sum.abs() <= f64::EPSILON * (x0.abs() + x1.abs()) {
        return Err(Error::Degenerate(format!("{name}0+{name}1")));
    }
    Ok((x0 - x1) / sum)
}

/// Ratio test for 2×2 circulant systems:
/// `(a₀−a₁)/(a₀+a₁) = (b₀−b₁)/(b₀+b₁)` and `(q₀−q₁)/(q₀+q₁) = (r₀−r₁)/(r₀+r₁)`.
pub fn cor3_check(
    a: &CirculantSpec,
    b: &CirculantSpec,
    q: &CirculantSpec,
    r: &CirculantSpec,
) -> Result<Cor3Verdict> {
    if [a, b, q, r].iter().any(|s| s.n() != 2) {
        return Err(Error::Dimension("2×2 circulant check needs 2-entry first rows".into()));
    }
    let a_ratio = relative_difference(a, "a")?;
    let b_ratio = relative_difference(b, "b")?;
    let q_ratio = relative_difference(q, "q")?;
    let r_ratio = relative_difference(r, "r")?;
    let matches = |x: f64, y: f64| (x - y).abs() <= super::RATIO_TOL * x.abs().max(y.abs()).max(1.0);
    let dynamics_ratios_match = matches(a_ratio, b_ratio);
    let weight_ratios_match = matches(q_ratio, r_ratio);
    let c = thm2_find_c(a, b, q, r, THM2_DEFAULT_TOL)?;
    Ok(Cor3Verdict {
        holds: dynamics_ratios_match && weight_ratios_match,
        dynamics_ratios_match,
        weight_ratios_match,
        a_ratio,
        b_ratio,
        q_ratio,
        r_ratio,
        c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(row: &[f64]) -> CirculantSpec {
        CirculantSpec::new(row.to_vec()).unwrap()
    }

    #[test]
    fn diffusion_with_derivative_penalty() {
        let a = spec(&[-2.0, 1.0, 0.0, 1.0]);
        let q = spec(&[5.0, -2.0, 0.0, -2.0]);
        let id = CirculantSpec::identity(4);
        let c = thm2_find_c(&a, &id, &q, &id, THM2_DEFAULT_TOL).unwrap();
        assert!((c.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identical_frequencies() {
        let id = CirculantSpec::identity(5);
        let c = thm2_find_c(&id.scale(-1.0), &id, &id, &id, THM2_DEFAULT_TOL).unwrap();
        assert!((c.unwrap() - (2f64.sqrt() - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn diffusion_with_identity_cost_is_absent() {
        let a = spec(&[-2.0, 1.0, 0.0, 1.0]);
        let id = CirculantSpec::identity(4);
        assert_eq!(thm2_find_c(&a, &id, &id, &id, THM2_DEFAULT_TOL).unwrap(), None);
    }

    #[test]
    fn skew_dynamics_keep_unit_gain() {
        // A = S − Sᵀ has imaginary symbols; P = I solves the ARE.
        let a = spec(&[0.0, 1.0, 0.0, 0.0, -1.0]);
        let id = CirculantSpec::identity(5);
        let c = thm2_find_c(&a, &id, &id, &id, THM2_DEFAULT_TOL).unwrap();
        assert!((c.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn frequency_singular_inputs() {
        let id = CirculantSpec::identity(2);
        let b = spec(&[1.0, -1.0]);
        assert_eq!(
            thm2_find_c(&id, &b, &id, &id, THM2_DEFAULT_TOL),
            Err(Error::FrequencySingular { symbol: "b", kappa: 0 })
        );
        assert!(thm2_find_c(&id, &id, &id, &CirculantSpec::identity(3), 1e-9).is_err());
    }

    #[test]
    fn cor3_examples() {
        let v = cor3_check(&spec(&[-2.0, -1.0]), &spec(&[2.0, 1.0]), &spec(&[1.0, 0.0]), &spec(&[1.0, 0.0]))
            .unwrap();
        assert!(v.holds);
        assert!((v.c.unwrap() - (2f64.sqrt() - 1.0)).abs() < 1e-12);

        let diag = cor3_check(&spec(&[-1.0, 0.0]), &spec(&[2.0, 0.0]), &spec(&[3.0, 0.0]), &spec(&[0.5, 0.0]))
            .unwrap();
        assert!(diag.holds);
        assert!(diag.c.is_some());

        let v = cor3_check(&spec(&[-3.0, 1.0]), &spec(&[3.0, 1.0]), &spec(&[1.0, 0.0]), &spec(&[1.0, 0.0]))
            .unwrap();
        assert!(!v.holds);
        assert!((v.a_ratio - 2.0).abs() < 1e-15);
        assert!((v.b_ratio - 0.5).abs() < 1e-15);
        assert_eq!(v.c, None);
    }

    #[test]
    fn cor3_degenerate_denominator() {
        let err = cor3_check(&spec(&[-1.0, 1.0]), &spec(&[2.0, 1.0]), &spec(&[1.0, 0.0]), &spec(&[1.0, 0.0]))
            .unwrap_err();
        assert_eq!(err, Error::Degenerate("a0+a1".into()));
    }

    #[test]
    fn cor3_sign_changing_input_symbol() {
        // b̂ = (3, −1): identical quadratics but opposite stabilizing roots.
        let v = cor3_check(&spec(&[1.0, 2.0]), &spec(&[1.0, 2.0]), &spec(&[1.0, 0.0]), &spec(&[1.0, 0.0]))
            .unwrap();
        assert!(v.holds);
        assert_eq!(v.c, None);
    }
}
