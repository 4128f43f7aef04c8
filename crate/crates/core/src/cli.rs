//! Command-line front end: `solve`, `check`, `sweep`, `model`, `reduce`.
//!
//! Exit status is 0 on success, 1 for usage and input errors and 2 when a
//! solver fails.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::decentral::{
    cor3_check, oracle_check, thm1_check, thm1_p_roots, thm1_synthesize, thm2_find_c, ConditionVerdict,
    DecentralReport, Thm1System, THM2_DEFAULT_TOL,
};
use crate::error::{Error, Result};
use crate::io::{fmt_f64, to_json_17, CirculantQuad, ModelTag, SystemFile};
use crate::lqr::{solve_lqr, LqrProblem};
use crate::matcore::Matrix;
use crate::models::{
    chamber_system, diffusion_decentralizing_cost, diffusion_operator, perf_example_with_a2,
    predator_prey_jacobian, ChamberParams, PredatorPreyParams,
};
use crate::secondorder::{check_second_order_decentral, reduce_and_solve, SecondOrderSystem};
use crate::spectral::CirculantSpec;
use crate::sweep::{csv_string, run_sweep, SweepConfig};

#[derive(Debug, Parser)]
#[command(name = "decentral-lqr", version, about = "LQR solving and decentralization analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the LQR problem in a system file and print P, K, h2 and the residual.
    Solve(SystemArgs),
    /// Run a decentralization check on a system file.
    Check {
        #[arg(value_enum)]
        which: CheckKind,
        #[command(flatten)]
        system: SystemArgs,
    },
    /// Run a sweep config and write the CSV grid plus a JSON summary.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// CSV path; overrides the config's `output`. Without either, the CSV goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit a named model as a system file.
    Model {
        #[command(subcommand)]
        model: ModelCommand,
        /// Write to this path instead of stdout.
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Solve a second-order system by reduction and compare with the full solve.
    Reduce(SystemArgs),
}

#[derive(Debug, Args)]
struct SystemArgs {
    #[arg(long)]
    system: PathBuf,
    /// Print JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckKind {
    Thm1,
    Thm2,
    Cor3,
    Oracle,
}

impl CheckKind {
    fn name(self) -> &'static str {
        match self {
            CheckKind::Thm1 => "thm1",
            CheckKind::Thm2 => "thm2",
            CheckKind::Cor3 => "cor3",
            CheckKind::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Subcommand)]
enum ModelCommand {
    /// The 2×2 instance A = [[1,2],[-3,4]], Q = diag(3,8), R = diag(1,1/6).
    Worked,
    /// A = [[1,1],[-1,a2]], B = I, Q = diag(q0,1), R = diag(1,1/gamma2).
    Perf {
        #[arg(long, default_value_t = 1.0)]
        q0: f64,
        #[arg(long, default_value_t = 1.0)]
        gamma2: f64,
        #[arg(long, default_value_t = 1.0)]
        a2: f64,
    },
    /// Linearized predator-prey model with decentralizing diagonal costs.
    PredatorPrey {
        #[arg(long)]
        r1: f64,
        #[arg(long)]
        r2: f64,
        #[arg(long)]
        k1: f64,
        #[arg(long)]
        k2: f64,
        #[arg(long)]
        b: f64,
        #[arg(long)]
        e: f64,
        #[arg(long, default_value_t = 1.0)]
        q2: f64,
        #[arg(long, default_value_t = 1.0)]
        gamma2: f64,
    },
    /// Diffusion on a ring, B = R = I.
    Diffusion {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        /// Use Q = I - 2D² instead of Q = I.
        #[arg(long)]
        decentralizing_cost: bool,
    },
    /// Two chambers heated across a wall, Q = R = I.
    Chamber {
        #[arg(long)]
        alpha0: f64,
        #[arg(long)]
        alpha1: f64,
        #[arg(long)]
        beta0: f64,
        #[arg(long)]
        beta1: f64,
    },
    /// Second-order diffusion: A1 = A2 = D², B0 = R0 = I, Q0 = I - 2D², Q2 = 2I - 4D².
    SecondOrderDiffusion {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
    },
}

/// A decentralization report tagged with the check that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub kind: String,
    #[serde(flatten)]
    pub report: DecentralReport,
}

impl CheckReport {
    pub fn verdict(&self, name: &str) -> Option<&ConditionVerdict> {
        self.report.verdict(name)
    }
}

/// Name of the verdict comparing the oracle with the frequency-domain prediction.
pub const CONSISTENCY_VERDICT: &str = "oracle_matches_frequency_prediction";

fn chamber_verdicts(file: &SystemFile) -> Result<Vec<ConditionVerdict>> {
    let Some(tag) = file.model().filter(|t| t.name == "chamber") else {
        return Ok(Vec::new());
    };
    let params = ChamberParams::new(
        tag.param("alpha0")?,
        tag.param("alpha1")?,
        tag.param("beta0")?,
        tag.param("beta1")?,
    )?;
    let sys = chamber_system(&params)?;
    let (a0, a1, b0, b1) = (params.alpha0, params.alpha1, params.beta0, params.beta1);
    Ok(vec![
        ConditionVerdict::new("chamber_claimed_condition", sys.claimed_condition)
            .with("lhs", (a0 - a1) / (a0 + a1))
            .with("rhs", (b0 - b1) / (b0 + b1)),
        ConditionVerdict::new("chamber_cor3_condition", sys.cor3_condition)
            .with("lhs", (-a0 - a1) / (-a0 + a1))
            .with("rhs", (b0 - b1) / (b0 + b1)),
    ])
}

fn frequency_prediction(quad: &CirculantQuad, report: &mut DecentralReport) -> Result<Option<f64>> {
    let c = thm2_find_c(&quad.A, &quad.B, &quad.Q, &quad.R, THM2_DEFAULT_TOL)?;
    let mut thm2 = ConditionVerdict::new("thm2", c.is_some());
    if let Some(c) = c {
        thm2 = thm2.with("c", c);
    }
    report.analytic_verdicts.push(thm2);
    report.analytic_verdicts.push(ConditionVerdict::new(
        CONSISTENCY_VERDICT,
        c.is_some() == report.oracle_decentralized,
    ));
    report.scalar_gain_c = c;
    Ok(c)
}

fn thm1_report(file: &SystemFile) -> Result<DecentralReport> {
    let prob = match file {
        SystemFile::Dense { problem, .. } => problem,
        _ => return Err(Error::Input("thm1 needs a dense 2×2 system file".into())),
    };
    let sys = Thm1System::from_problem(prob)?;
    let v = thm1_check(&sys)?;
    let mut report = oracle_check(prob, &file.neighborhoods()?)?;
    let mut verdict = ConditionVerdict::new("thm1", v.holds)
        .with("opposite_coupling", v.opposite_coupling as u8 as f64)
        .with("same_sign_diagonal", v.same_sign_diagonal as u8 as f64)
        .with("q_ratio", v.q_ratio)
        .with("required_q_ratio", v.required_q_ratio)
        .with("gamma_ratio", v.gamma_ratio)
        .with("required_gamma_ratio", v.required_gamma_ratio);
    if v.holds {
        let (p0, p2) = thm1_p_roots(&sys)?;
        verdict = verdict.with("p0", p0).with("p2", p2);
    }
    report.analytic_verdicts.push(verdict);
    report
        .analytic_verdicts
        .push(ConditionVerdict::new("oracle_matches_thm1", v.holds == report.oracle_decentralized));
    Ok(report)
}

fn circulant_quad(file: &SystemFile, what: &str) -> Result<CirculantQuad> {
    match file {
        SystemFile::Circulant { quad, .. } => Ok(quad.clone()),
        _ => Err(Error::Input(format!("{what} needs a circulant system file"))),
    }
}

/// Runs one check on a parsed system file.
pub fn check_system(file: &SystemFile, which: CheckKind) -> Result<CheckReport> {
    let mut report = match which {
        CheckKind::Thm1 => thm1_report(file)?,
        CheckKind::Thm2 => {
            let quad = circulant_quad(file, "thm2")?;
            let mut report = oracle_check(&quad.to_problem()?, &file.neighborhoods()?)?;
            frequency_prediction(&quad, &mut report)?;
            report
        }
        CheckKind::Cor3 => {
            let quad = circulant_quad(file, "cor3")?;
            let mut report = oracle_check(&quad.to_problem()?, &file.neighborhoods()?)?;
            let v = cor3_check(&quad.A, &quad.B, &quad.Q, &quad.R)?;
            report.analytic_verdicts.push(
                ConditionVerdict::new("cor3", v.holds)
                    .with("a_ratio", v.a_ratio)
                    .with("b_ratio", v.b_ratio)
                    .with("q_ratio", v.q_ratio)
                    .with("r_ratio", v.r_ratio),
            );
            frequency_prediction(&quad, &mut report)?;
            report
        }
        CheckKind::Oracle => match file {
            SystemFile::SecondOrder { system, .. } => {
                let sol = reduce_and_solve(system)?;
                check_second_order_decentral(&sol, crate::decentral::ORACLE_TOL)?
            }
            SystemFile::Circulant { quad, .. } => {
                let mut report = oracle_check(&quad.to_problem()?, &file.neighborhoods()?)?;
                frequency_prediction(quad, &mut report)?;
                report
            }
            SystemFile::Dense { problem, .. } => oracle_check(problem, &file.neighborhoods()?)?,
        },
    };
    report.analytic_verdicts.extend(chamber_verdicts(file)?);
    Ok(CheckReport {
        check: which.name().to_string(),
        kind: file.kind().to_string(),
        report,
    })
}

/// Builds a named model's system file.
fn build_model(model: &ModelCommand) -> Result<SystemFile> {
    Ok(match *model {
        ModelCommand::Worked => SystemFile::dense(LqrProblem::new(
            Matrix::from_rows(&[[1.0, 2.0], [-3.0, 4.0]])?,
            Matrix::identity(2),
            Matrix::from_diag(&[3.0, 8.0]),
            Matrix::from_diag(&[1.0, 1.0 / 6.0]),
        )?)
        .with_model(ModelTag::new("worked", &[])),
        ModelCommand::Perf { q0, gamma2, a2 } => SystemFile::dense(perf_example_with_a2(a2, q0, gamma2)?)
            .with_model(ModelTag::new("perf", &[("q0", q0), ("gamma2", gamma2), ("a2", a2)])),
        ModelCommand::PredatorPrey {
            r1,
            r2,
            k1,
            k2,
            b,
            e,
            q2,
            gamma2,
        } => {
            let params = PredatorPreyParams::new(r1, r2, k1, k2, b, e)?;
            let j = predator_prey_jacobian(&params)?;
            let sys = thm1_synthesize(j[(0, 0)], j[(0, 1)], j[(1, 0)], j[(1, 1)], q2, gamma2)?;
            SystemFile::dense(sys.to_problem()?).with_model(ModelTag::new(
                "predator_prey",
                &[("r1", r1), ("r2", r2), ("k1", k1), ("k2", k2), ("b", b), ("e", e)],
            ))
        }
        ModelCommand::Diffusion {
            n,
            delta,
            decentralizing_cost,
        } => {
            let lap = diffusion_operator(n, delta)?;
            let q = if decentralizing_cost {
                diffusion_decentralizing_cost(n, delta)?.q
            } else {
                CirculantSpec::identity(n)
            };
            SystemFile::Circulant {
                quad: CirculantQuad {
                    A: lap,
                    B: CirculantSpec::identity(n),
                    Q: q,
                    R: CirculantSpec::identity(n),
                },
                model: None,
            }
            .with_model(ModelTag::new("diffusion", &[("n", n as f64), ("delta", delta)]))
        }
        ModelCommand::Chamber {
            alpha0,
            alpha1,
            beta0,
            beta1,
        } => {
            let sys = chamber_system(&ChamberParams::new(alpha0, alpha1, beta0, beta1)?)?;
            SystemFile::Circulant {
                quad: CirculantQuad {
                    A: sys.a,
                    B: sys.b,
                    Q: CirculantSpec::identity(2),
                    R: CirculantSpec::identity(2),
                },
                model: None,
            }
            .with_model(ModelTag::new(
                "chamber",
                &[("alpha0", alpha0), ("alpha1", alpha1), ("beta0", beta0), ("beta1", beta1)],
            ))
        }
        ModelCommand::SecondOrderDiffusion { n, delta } => {
            let lap = diffusion_operator(n, delta)?.materialize();
            let id = Matrix::identity(n);
            let q0 = &id - &lap.scale(2.0);
            let q2 = &id.scale(2.0) - &lap.scale(4.0);
            SystemFile::SecondOrder {
                system: SecondOrderSystem::new(lap.clone(), lap, id.clone(), q0, q2, id)?,
                model: None,
            }
            .with_model(ModelTag::new(
                "second_order_diffusion",
                &[("n", n as f64), ("delta", delta)],
            ))
        }
    })
}

fn read_system(path: &Path) -> Result<SystemFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("reading {}: {e}", path.display())))?;
    SystemFile::from_json(&text)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::Input(format!("writing {}: {e}", path.display())))
}

#[derive(Serialize)]
struct SolveOutput<'a> {
    #[serde(rename = "P")]
    p: &'a Matrix,
    #[serde(rename = "K")]
    k: &'a Matrix,
    h2: f64,
    h2_squared: f64,
    residual: f64,
    iterations: usize,
}

#[derive(Serialize)]
struct ReduceOutput<'a> {
    gain_pos: &'a Matrix,
    gain_vel: &'a Matrix,
    #[serde(rename = "P1")]
    p1: &'a Matrix,
    #[serde(rename = "P2")]
    p2: &'a Matrix,
    agreement_residual: f64,
    full_p1_asymmetry: f64,
    report: &'a DecentralReport,
}

fn render_report(r: &CheckReport) -> String {
    let mut s = format!("check: {} ({} system)\n", r.check, r.kind);
    s += &format!("oracle decentralized: {}\n", r.report.oracle_decentralized);
    s += &format!("offdiag mass: {}\n", fmt_f64(r.report.offdiag_mass));
    if let Some(c) = r.report.scalar_gain_c {
        s += &format!("scalar gain c: {}\n", fmt_f64(c));
    }
    for v in &r.report.analytic_verdicts {
        s += &format!("{}: {}", v.name, v.holds);
        for (k, val) in &v.witness {
            s += &format!(" {k}={}", fmt_f64(*val));
        }
        s.push('\n');
    }
    s += &format!("K =\n{}", r.report.k);
    s
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<()> {
    let emit = |out: &mut dyn Write, text: &str| -> Result<()> {
        out.write_all(text.as_bytes())
            .and_then(|_| if text.ends_with('\n') { Ok(()) } else { out.write_all(b"\n") })
            .map_err(|e| Error::Input(format!("writing output: {e}")))
    };
    match cli.command {
        Command::Solve(args) => {
            let prob = read_system(&args.system)?.to_problem()?;
            let sol = solve_lqr(&prob)?;
            let view = SolveOutput {
                p: &sol.care.p,
                k: &sol.care.k,
                h2: sol.h2(),
                h2_squared: sol.h2_squared,
                residual: sol.care.residual,
                iterations: sol.care.iterations,
            };
            let text = if args.json {
                to_json_17(&view)
            } else {
                format!(
                    "P =\n{}K =\n{}h2 = {}\nh2^2 = {}\nresidual = {}\niterations = {}\n",
                    view.p,
                    view.k,
                    fmt_f64(view.h2),
                    fmt_f64(view.h2_squared),
                    fmt_f64(view.residual),
                    view.iterations
                )
            };
            emit(out, &text)
        }
        Command::Check { which, system } => {
            let report = check_system(&read_system(&system.system)?, which)?;
            let text = if system.json {
                to_json_17(&report)
            } else {
                render_report(&report)
            };
            emit(out, &text)
        }
        Command::Sweep { config, out: csv_path } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| Error::Input(format!("reading {}: {e}", config.display())))?;
            let cfg = SweepConfig::from_json(&text)?;
            let output = run_sweep(&cfg)?;
            let csv = csv_string(&output.result);
            match csv_path.or_else(|| cfg.output.as_ref().map(PathBuf::from)) {
                Some(path) => {
                    write_file(&path, &csv)?;
                    let mut sidecar = path.clone().into_os_string();
                    sidecar.push(".summary.json");
                    write_file(Path::new(&sidecar), &to_json_17(&output))?;
                    emit(
                        out,
                        &format!(
                            "wrote {} rows to {} and summary to {}",
                            output.result.records.len(),
                            path.display(),
                            Path::new(&sidecar).display()
                        ),
                    )
                }
                None => emit(out, &csv),
            }
        }
        Command::Model { model, out: path } => {
            let json = build_model(&model)?.to_json();
            match path {
                Some(path) => write_file(&path, &format!("{json}\n")),
                None => emit(out, &json),
            }
        }
        Command::Reduce(args) => {
            let system = match read_system(&args.system)? {
                SystemFile::SecondOrder { system, .. } => system,
                _ => return Err(Error::Input("reduce needs a second_order system file".into())),
            };
            let sol = reduce_and_solve(&system)?;
            let report = check_second_order_decentral(&sol, crate::decentral::ORACLE_TOL)?;
            let view = ReduceOutput {
                gain_pos: &sol.gain_pos,
                gain_vel: &sol.gain_vel,
                p1: &sol.p1,
                p2: &sol.p2,
                agreement_residual: sol.agreement_residual,
                full_p1_asymmetry: sol.full_p1_asymmetry,
                report: &report,
            };
            let text = if args.json {
                to_json_17(&view)
            } else {
                format!(
                    "gain_pos =\n{}gain_vel =\n{}agreement_residual = {}\nfull_p1_asymmetry = {}\ndecentralized = {}\n",
                    view.gain_pos,
                    view.gain_vel,
                    fmt_f64(view.agreement_residual),
                    fmt_f64(view.full_p1_asymmetry),
                    report.oracle_decentralized
                )
            };
            emit(out, &text)
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_solver_failure() {
                2
            } else {
                1
            }
        }
    }
}
