//! Complete decentralization: a brute-force oracle that solves the ARE and
//! inspects the gain's sparsity, plus analytic conditions for 2×2 systems
//! with decoupled cost, circulant systems, and 2×2 circulant systems.

mod lemma;
mod thm1;
mod thm2;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lqr::{solve_lqr, LqrProblem};
use crate::matcore::Matrix;

pub use lemma::{lemma_common_roots, CommonRoots, MonicQuadratic};
pub use thm1::{thm1_check, thm1_p_roots, thm1_synthesize, Thm1System, Thm1Verdict};
pub use thm2::{cor3_check, thm2_candidates, thm2_find_c, Cor3Verdict, THM2_DEFAULT_TOL};

/// Sparsity tolerance applied to solver output. The gain comes from an
/// iterative Riccati solve, so exact zeros are not expected.
pub const ORACLE_TOL: f64 = 1e-6;
/// Default tolerance for [`pattern_decentralized`] on exact data.
pub const PATTERN_DEFAULT_TOL: f64 = 1e-8;
/// Relative tolerance for the analytic ratio identities.
pub const RATIO_TOL: f64 = 1e-10;

/// For each input `i`, the set of (0-based) state indices its subcontroller
/// reads directly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<BTreeSet<usize>>", into = "Vec<BTreeSet<usize>>")]
pub struct NeighborhoodMap {
    sets: Vec<BTreeSet<usize>>,
}

impl NeighborhoodMap {
    pub fn new(sets: Vec<BTreeSet<usize>>) -> Result<Self> {
        if let Some(i) = sets.iter().position(|s| s.is_empty()) {
            return Err(Error::Input(format!("neighborhood of input {i} is empty")));
        }
        Ok(NeighborhoodMap { sets })
    }

    /// `Nᵢ = {i}`: with one input per state, decentralized means diagonal.
    pub fn diagonal(n: usize) -> Self {
        NeighborhoodMap {
            sets: (0..n).map(|i| BTreeSet::from([i])).collect(),
        }
    }

    /// `Nᵢ = {xᵢ, ẋᵢ}` for a state stacked as `[x; ẋ]` with `n` positions.
    pub fn second_order(n: usize) -> Self {
        NeighborhoodMap {
            sets: (0..n).map(|i| BTreeSet::from([i, n + i])).collect(),
        }
    }

    pub fn n_inputs(&self) -> usize {
        self.sets.len()
    }

    pub fn allows(&self, input: usize, state: usize) -> bool {
        self.sets[input].contains(&state)
    }

    pub fn sets(&self) -> &[BTreeSet<usize>] {
        &self.sets
    }
}

impl TryFrom<Vec<BTreeSet<usize>>> for NeighborhoodMap {
    type Error = Error;
    fn try_from(sets: Vec<BTreeSet<usize>>) -> Result<Self> {
        NeighborhoodMap::new(sets)
    }
}

impl From<NeighborhoodMap> for Vec<BTreeSet<usize>> {
    fn from(n: NeighborhoodMap) -> Self {
        n.sets
    }
}

/// Checks that `K` only reads states inside each input's neighborhood.
///
/// Returns the verdict (every off-pattern `|K[i,j]| ≤ tol·max(1, ‖K‖_F)`) and
/// the off-pattern mass `‖K restricted off-pattern‖_F / ‖K‖_F` (zero for a
/// zero gain).
pub fn pattern_decentralized(k: &Matrix, nbhd: &NeighborhoodMap, tol: f64) -> Result<(bool, f64)> {
    if k.rows() != nbhd.n_inputs() {
        return Err(Error::Input(format!(
            "gain has {} rows but the neighborhood map covers {} inputs",
            k.rows(),
            nbhd.n_inputs()
        )));
    }
    if let Some(bad) = nbhd.sets.iter().flatten().find(|&&j| j >= k.cols()) {
        return Err(Error::Input(format!(
            "neighborhood state index {bad} out of range for {} states",
            k.cols()
        )));
    }
    let norm = k.frobenius_norm();
    let bound = tol * norm.max(1.0);
    let mut off_sq = 0.0;
    let mut ok = true;
    for i in 0..k.rows() {
        for j in 0..k.cols() {
            if !nbhd.allows(i, j) {
                let v = k[(i, j)];
                off_sq += v * v;
                ok &= v.abs() <= bound;
            }
        }
    }
    let mass = if norm > 0.0 { off_sq.sqrt() / norm } else { 0.0 };
    Ok((ok, mass))
}

/// One analytic condition's outcome, with the numbers that decided it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionVerdict {
    pub name: String,
    pub holds: bool,
    pub witness: BTreeMap<String, f64>,
}

impl ConditionVerdict {
    pub fn new(name: impl Into<String>, holds: bool) -> Self {
        ConditionVerdict {
            name: name.into(),
            holds,
            witness: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.witness.insert(key.to_string(), value);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecentralReport {
    pub oracle_decentralized: bool,
    pub offdiag_mass: f64,
    pub analytic_verdicts: Vec<ConditionVerdict>,
    /// The common gain `c` with `K = cI`, when a circulant condition found one.
    pub scalar_gain_c: Option<f64>,
    #[serde(rename = "K")]
    pub k: Matrix,
}

impl DecentralReport {
    pub fn verdict(&self, name: &str) -> Option<&ConditionVerdict> {
        self.analytic_verdicts.iter().find(|v| v.name == name)
    }
}

/// Builds a report from an already computed gain.
pub fn report_for_gain(k: Matrix, nbhd: &NeighborhoodMap, tol: f64) -> Result<DecentralReport> {
    let (oracle_decentralized, offdiag_mass) = pattern_decentralized(&k, nbhd, tol)?;
    Ok(DecentralReport {
        oracle_decentralized,
        offdiag_mass,
        analytic_verdicts: Vec::new(),
        scalar_gain_c: None,
        k,
    })
}

/// Solves the LQR problem and checks the optimal gain against `nbhd`.
///
/// When `A, B, Q, R` are all diagonal the trivial case is recorded as an
/// analytic verdict: the ARE solution is then diagonal as well.
pub fn oracle_check(prob: &LqrProblem, nbhd: &NeighborhoodMap) -> Result<DecentralReport> {
    let sol = solve_lqr(prob)?;
    let mut report = report_for_gain(sol.care.k, nbhd, ORACLE_TOL)?;
    if prob.is_fully_diagonal() {
        report
            .analytic_verdicts
            .push(ConditionVerdict::new("trivial_diagonal", true));
    }
    Ok(report)
}

pub(crate) fn rel_eq(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol * x.abs().max(y.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pattern_examples() {
        let (ok, mass) =
            pattern_decentralized(&Matrix::from_diag(&[3.0, 12.0]), &NeighborhoodMap::diagonal(2), 1e-8)
                .unwrap();
        assert!(ok);
        assert_eq!(mass, 0.0);

        let k = Matrix::from_rows(&[[1.0, 0.5], [0.0, 1.0]]).unwrap();
        let (ok, mass) = pattern_decentralized(&k, &NeighborhoodMap::diagonal(2), 1e-8).unwrap();
        assert!(!ok);
        assert!((mass - 0.5 / k.frobenius_norm()).abs() < 1e-15);

        // [I | 2I]
        let blocks = Matrix::from_fn(3, 6, |i, j| match j {
            j if j == i => 1.0,
            j if j == i + 3 => 2.0,
            _ => 0.0,
        });
        let (ok, _) = pattern_decentralized(&blocks, &NeighborhoodMap::second_order(3), 1e-8).unwrap();
        assert!(ok);
        let (ok, _) = pattern_decentralized(&blocks, &NeighborhoodMap::diagonal(3), 1e-8).unwrap();
        assert!(!ok);
    }

    #[test]
    fn pattern_input_errors() {
        let k = Matrix::identity(2);
        let far = NeighborhoodMap::new(vec![BTreeSet::from([0]), BTreeSet::from([5])]).unwrap();
        assert!(matches!(pattern_decentralized(&k, &far, 1e-8), Err(Error::Input(_))));
        assert!(matches!(
            pattern_decentralized(&k, &NeighborhoodMap::diagonal(3), 1e-8),
            Err(Error::Input(_))
        ));
        assert!(NeighborhoodMap::new(vec![BTreeSet::new()]).is_err());
    }

    #[test]
    fn figure_one_neighborhoods() {
        // N₁ = {x₁, x₂}, N₂ = {x₃}, N₃ = {x₄, x₅}
        let nbhd = NeighborhoodMap::new(vec![
            BTreeSet::from([0, 1]),
            BTreeSet::from([2]),
            BTreeSet::from([3, 4]),
        ])
        .unwrap();
        let k = Matrix::from_rows(&[
            [1.0, 2.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 3.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 4.0, 5.0],
        ])
        .unwrap();
        assert!(pattern_decentralized(&k, &nbhd, 1e-8).unwrap().0);
    }

    #[test]
    fn oracle_on_diagonal_system() {
        let prob = LqrProblem::new(
            Matrix::from_diag(&[1.0, -2.0, 0.5]),
            Matrix::from_diag(&[1.0, 2.0, 0.3]),
            Matrix::from_diag(&[1.0, 4.0, 2.0]),
            Matrix::from_diag(&[0.5, 1.0, 3.0]),
        )
        .unwrap();
        let report = oracle_check(&prob, &NeighborhoodMap::diagonal(3)).unwrap();
        assert!(report.oracle_decentralized);
        assert!(report.verdict("trivial_diagonal").unwrap().holds);
    }

    #[test]
    fn oracle_rejects_cooperative_coupling() {
        let a = Matrix::from_rows(&[[1.0, 1.0], [1.0, 1.0]]).unwrap();
        let i = Matrix::identity(2);
        let prob = LqrProblem::new(a, i.clone(), i.clone(), i).unwrap();
        let report = oracle_check(&prob, &NeighborhoodMap::diagonal(2)).unwrap();
        assert!(!report.oracle_decentralized);
        assert!(report.offdiag_mass > 1e-2);
    }
}
