//! Parameter sweeps over the 2×2 performance example.
//!
//! Two coupling rules are supported:
//!
//! * `qr_ratios`: axis 1 is `q₀/q₂`, axis 2 is `γ₀/γ₂`, with `q₂ = γ₀ = 1`.
//! * `q_vs_a2`: axis 1 is `q₀`, axis 2 is `a₂/a₀` (here `a₀ = 1`), with
//!   `q₂ = γ₀ = 1` and `γ₂ = 1/q₀`, the input-weight ratio that keeps the
//!   gain diagonal on the curve `q₀ = 1/a₂`.
//!
//! Grid points are solved in parallel and emitted in axis-index order, so
//! identical configs give byte-identical CSV.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decentral::{oracle_check, NeighborhoodMap};
use crate::error::{Error, Result};
use crate::io::fmt_f64;
use crate::lqr::{solve_lqr, LqrProblem};
use crate::models::perf_example_with_a2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Log,
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl Axis {
    pub fn log(name: &str, min: f64, max: f64, steps: usize) -> Self {
        Axis {
            name: name.to_string(),
            min,
            max,
            steps,
            spacing: Spacing::Log,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps < 2 {
            return Err(Error::Input(format!("axis '{}': steps must be at least 2", self.name)));
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max) {
            return Err(Error::Input(format!("axis '{}': need finite min < max", self.name)));
        }
        if self.spacing == Spacing::Log && self.min <= 0.0 {
            return Err(Error::Input(format!("axis '{}': log spacing needs min > 0", self.name)));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let last = (self.steps - 1) as f64;
        match self.spacing {
            Spacing::Linear => (0..self.steps)
                .map(|i| self.min + (self.max - self.min) * i as f64 / last)
                .collect(),
            Spacing::Log => {
                let (lo, hi) = (self.min.ln(), self.max.ln());
                (0..self.steps)
                    .map(|i| match i {
                        0 => self.min,
                        i if i == self.steps - 1 => self.max,
                        _ => (lo + (hi - lo) * i as f64 / last).exp(),
                    })
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coupling {
    QrRatios,
    QVsA2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaseSystem {
    pub model: String,
    #[serde(default)]
    pub params: std::collections::BTreeMap<String, f64>,
}

impl Default for BaseSystem {
    fn default() -> Self {
        BaseSystem {
            model: "perf_example".into(),
            params: Default::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub axis1: Axis,
    pub axis2: Axis,
    #[serde(default)]
    pub base: BaseSystem,
    pub coupling: Coupling,
    /// CSV path; the sidecar goes next to it with a `.json` extension.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    /// Number of decentralization-curve samples for `q_vs_a2`.
    #[serde(default = "default_curve_samples")]
    pub curve_samples: usize,
}

fn default_curve_samples() -> usize {
    20
}

impl SweepConfig {
    /// 21×21 log grid on `[0.2, 5]²` over `(q₀/q₂, γ₀/γ₂)`.
    pub fn default_qr() -> Self {
        SweepConfig {
            axis1: Axis::log("q0_over_q2", 0.2, 5.0, 21),
            axis2: Axis::log("gamma0_over_gamma2", 0.2, 5.0, 21),
            base: BaseSystem::default(),
            coupling: Coupling::QrRatios,
            output: None,
            curve_samples: default_curve_samples(),
        }
    }

    /// 21×21 log grid with `q₀ ∈ [0.1, 10]`, `a₂/a₀ ∈ [0.1, 10]`.
    pub fn default_qa() -> Self {
        SweepConfig {
            axis1: Axis::log("q0", 0.1, 10.0, 21),
            axis2: Axis::log("a2_over_a0", 0.1, 10.0, 21),
            base: BaseSystem::default(),
            coupling: Coupling::QVsA2,
            output: None,
            curve_samples: default_curve_samples(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.axis1.validate()?;
        self.axis2.validate()?;
        if self.base.model != "perf_example" {
            return Err(Error::Input(format!(
                "unknown sweep base model '{}'; expected 'perf_example'",
                self.base.model
            )));
        }
        if let Some(key) = self.base.params.keys().find(|k| k.as_str() != "a2") {
            return Err(Error::Input(format!("unknown base parameter '{key}'")));
        }
        if self.coupling == Coupling::QVsA2 && self.curve_samples < 2 {
            return Err(Error::Input("curve_samples must be at least 2".into()));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SweepConfig =
            serde_json::from_str(text).map_err(|e| Error::Input(format!("sweep config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub i1: usize,
    pub i2: usize,
    pub axis1: f64,
    pub axis2: f64,
    /// `√trace P`; absent when the solve failed.
    pub h2: Option<f64>,
    pub decentralized: bool,
    pub offdiag_mass: Option<f64>,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub axis1_name: String,
    pub axis2_name: String,
    pub steps: (usize, usize),
    pub records: Vec<SweepRecord>,
}

impl SweepResult {
    pub fn get(&self, i1: usize, i2: usize) -> &SweepRecord {
        &self.records[i1 * self.steps.1 + i2]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    pub a2: f64,
    pub q0: f64,
    pub gamma2: f64,
    pub h2: Option<f64>,
    pub decentralized: bool,
    pub offdiag_mass: Option<f64>,
    pub status: String,
}

impl CurveSample {
    pub fn included(&self) -> bool {
        self.status == "ok"
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub h2: f64,
    pub axis1: f64,
    pub axis2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub points: usize,
    pub solved: usize,
    pub failed: usize,
    pub decentralized: usize,
    pub min: Option<Extremum>,
    pub max: Option<Extremum>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOutput {
    pub config: SweepConfig,
    pub result: SweepResult,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<Vec<CurveSample>>,
    pub summary: SweepSummary,
}

struct Point {
    h2: Option<f64>,
    decentralized: bool,
    offdiag_mass: Option<f64>,
    status: String,
}

fn evaluate(problem: Result<LqrProblem>) -> Point {
    let outcome = problem.and_then(|prob| {
        let sol = solve_lqr(&prob)?;
        let report = oracle_check(&prob, &NeighborhoodMap::diagonal(2))?;
        Ok((sol.h2(), report))
    });
    match outcome {
        Ok((h2, report)) => Point {
            h2: Some(h2),
            decentralized: report.oracle_decentralized,
            offdiag_mass: Some(report.offdiag_mass),
            status: "ok".into(),
        },
        Err(e) => Point {
            h2: None,
            decentralized: false,
            offdiag_mass: None,
            status: e.to_string(),
        },
    }
}

fn run_grid(cfg: &SweepConfig, build: impl Fn(f64, f64) -> Result<LqrProblem> + Sync) -> Result<SweepResult> {
    cfg.validate()?;
    let v1 = cfg.axis1.values();
    let v2 = cfg.axis2.values();
    let n2 = v2.len();
    let records = (0..v1.len() * n2)
        .into_par_iter()
        .map(|idx| {
            let (i1, i2) = (idx / n2, idx % n2);
            let p = evaluate(build(v1[i1], v2[i2]));
            SweepRecord {
                i1,
                i2,
                axis1: v1[i1],
                axis2: v2[i2],
                h2: p.h2,
                decentralized: p.decentralized,
                offdiag_mass: p.offdiag_mass,
                status: p.status,
            }
        })
        .collect();
    Ok(SweepResult {
        axis1_name: cfg.axis1.name.clone(),
        axis2_name: cfg.axis2.name.clone(),
        steps: (v1.len(), n2),
        records,
    })
}

fn base_a2(cfg: &SweepConfig) -> f64 {
    cfg.base.params.get("a2").copied().unwrap_or(1.0)
}

/// Grid over `(q₀/q₂, γ₀/γ₂)` with `q₂ = γ₀ = 1`.
pub fn sweep_qr(cfg: &SweepConfig) -> Result<SweepResult> {
    let a2 = base_a2(cfg);
    run_grid(cfg, |q_ratio, gamma_ratio| {
        perf_example_with_a2(a2, q_ratio, 1.0 / gamma_ratio)
    })
}

/// Grid over `(q₀, a₂/a₀)` plus samples of the curve `q₀ = 1/a₂`, log-spaced
/// over the `a₂` axis range.
pub fn sweep_qa_with_curve(cfg: &SweepConfig) -> Result<(SweepResult, Vec<CurveSample>)> {
    let grid = run_grid(cfg, |q0, a2| perf_example_with_a2(a2, q0, 1.0 / q0))?;
    let curve_axis = Axis {
        name: "curve_a2".into(),
        steps: cfg.curve_samples,
        ..cfg.axis2.clone()
    };
    let curve = curve_axis
        .values()
        .into_par_iter()
        .map(|a2| {
            if a2 <= 0.0 {
                return CurveSample {
                    a2,
                    q0: f64::NAN,
                    gamma2: f64::NAN,
                    h2: None,
                    decentralized: false,
                    offdiag_mass: None,
                    status: "excluded: a2 <= 0 gives a2 and a0 opposite signs".into(),
                };
            }
            let q0 = 1.0 / a2;
            let gamma2 = 1.0 / q0;
            let p = evaluate(perf_example_with_a2(a2, q0, gamma2));
            CurveSample {
                a2,
                q0,
                gamma2,
                h2: p.h2,
                decentralized: p.decentralized,
                offdiag_mass: p.offdiag_mass,
                status: p.status,
            }
        })
        .collect();
    Ok((grid, curve))
}

pub fn summarize(result: &SweepResult) -> SweepSummary {
    let solved: Vec<_> = result
        .records
        .iter()
        .filter_map(|r| r.h2.map(|h| (h, r)))
        .collect();
    let pick = |better: fn(f64, f64) -> bool| {
        solved
            .iter()
            .fold(None::<&(f64, &SweepRecord)>, |best, cand| match best {
                Some(b) if !better(cand.0, b.0) => Some(b),
                _ => Some(cand),
            })
            .map(|(h2, r)| Extremum {
                h2: *h2,
                axis1: r.axis1,
                axis2: r.axis2,
            })
    };
    SweepSummary {
        points: result.records.len(),
        solved: solved.len(),
        failed: result.records.len() - solved.len(),
        decentralized: result.records.iter().filter(|r| r.decentralized).count(),
        min: pick(|a, b| a < b),
        max: pick(|a, b| a > b),
    }
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepOutput> {
    let (result, curve) = match cfg.coupling {
        Coupling::QrRatios => (sweep_qr(cfg)?, None),
        Coupling::QVsA2 => {
            let (grid, curve) = sweep_qa_with_curve(cfg)?;
            (grid, Some(curve))
        }
    };
    let summary = summarize(&result);
    Ok(SweepOutput {
        config: cfg.clone(),
        result,
        curve,
        summary,
    })
}

/// Columns `axis1, axis2, h2, decentralized, offdiag_mass, status`.
pub fn write_csv<W: Write>(result: &SweepResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io_err = |e: csv::Error| Error::Input(format!("writing CSV: {e}"));
    w.write_record(["axis1", "axis2", "h2", "decentralized", "offdiag_mass", "status"])
        .map_err(io_err)?;
    for r in &result.records {
        w.write_record([
            fmt_f64(r.axis1),
            fmt_f64(r.axis2),
            r.h2.map(fmt_f64).unwrap_or_default(),
            if r.decentralized { "1" } else { "0" }.to_string(),
            r.offdiag_mass.map(fmt_f64).unwrap_or_default(),
            r.status.clone(),
        ])
        .map_err(io_err)?;
    }
    w.flush()
        .map_err(|e| Error::Input(format!("writing CSV: {e}")))?;
    Ok(())
}

pub fn csv_string(result: &SweepResult) -> String {
    let mut buf = Vec::new();
    write_csv(result, &mut buf).expect("CSV into memory");
    String::from_utf8(buf).expect("CSV is UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_axis_hits_endpoints_and_unit_midpoint() {
        let v = Axis::log("x", 0.2, 5.0, 21).values();
        assert_eq!(v.len(), 21);
        assert_eq!(v[0], 0.2);
        assert_eq!(v[20], 5.0);
        assert!((v[10] - 1.0).abs() < 1e-15);
        assert!(v.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn axis_validation() {
        assert!(Axis::log("x", 1.0, 1.0, 5).validate().is_err());
        assert!(Axis::log("x", 0.0, 1.0, 5).validate().is_err());
        assert!(Axis::log("x", 0.1, 1.0, 1).validate().is_err());
        let lin = Axis {
            spacing: Spacing::Linear,
            ..Axis::log("x", -1.0, 1.0, 3)
        };
        assert_eq!(lin.values(), vec![-1.0, 0.0, 1.0]);
    }

    #[test]
    fn small_qr_grid() {
        let cfg = SweepConfig {
            axis1: Axis::log("q", 0.5, 2.0, 3),
            axis2: Axis::log("g", 0.5, 2.0, 3),
            ..SweepConfig::default_qr()
        };
        let res = sweep_qr(&cfg).unwrap();
        assert_eq!(res.records.len(), 9);
        let mid = res.get(1, 1);
        assert!(mid.decentralized);
        let expected = (2.0 * (1.0 + 2f64.sqrt())).sqrt();
        assert!((mid.h2.unwrap() - expected).abs() < 1e-9);
        assert!(!res.get(0, 2).decentralized);
        let csv = csv_string(&res);
        assert_eq!(csv.lines().count(), 10);
        assert!(csv.starts_with("axis1,axis2,h2,decentralized,offdiag_mass,status\n"));
    }

    #[test]
    fn curve_excludes_nonpositive_a2() {
        let cfg = SweepConfig {
            axis2: Axis {
                spacing: Spacing::Linear,
                ..Axis::log("a2", -1.0, 2.0, 3)
            },
            axis1: Axis::log("q0", 0.5, 2.0, 2),
            curve_samples: 4,
            ..SweepConfig::default_qa()
        };
        let (_, curve) = sweep_qa_with_curve(&cfg).unwrap();
        assert_eq!(curve.len(), 4);
        assert!(!curve[0].included());
        assert!(curve[0].status.starts_with("excluded"));
        assert!(!curve[1].included());
        assert!(curve[2..].iter().all(|c| c.included() && c.decentralized));
    }

    #[test]
    fn config_json() {
        let text = r#"{"axis1":{"name":"q0_over_q2","min":0.2,"max":5,"steps":21},
                       "axis2":{"name":"gamma0_over_gamma2","min":0.2,"max":5,"steps":21},
                       "coupling":"qr_ratios","output":"grid.csv"}"#;
        let cfg = SweepConfig::from_json(text).unwrap();
        assert_eq!(cfg, SweepConfig {
            output: Some("grid.csv".into()),
            ..SweepConfig::default_qr()
        });
        assert!(SweepConfig::from_json(&text.replace("21}", "1}")).is_err());
        assert!(SweepConfig::from_json(&text.replace("qr_ratios", "other")).is_err());
    }
}
