use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use serde::{Deserialize, Serialize};
use timeopt_core::control::{
    minimal_norm_curve, norm_optimal, time_optimal, verify_solution, Check, ControlProblem,
    ControlTrajectory, CurvePoint, NormOptimalSolution, ResidualReport, TimeOptimalSolution,
};
use timeopt_core::homogenize::{homogenized_coefficient_1d, CellPreset, PeriodicCoefficient1D};
use timeopt_core::sweep::{emit_report, run_sweep, SweepReport};
use timeopt_core::Error;

use crate::config::{config_error, load_config, Loaded, OperatorSpec, RunConfig};

pub const SOLUTION_SCHEMA: u32 = 1;

/// How a command that ran to completion turned out.
#[derive(Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// Non-convergence or a failing residual; the summary says which.
    Failed,
}

/// `timeopt time` output, self-contained so `timeopt verify` needs nothing else.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSolutionFile {
    pub schema: u32,
    pub tool_version: String,
    pub config: RunConfig,
    pub solution: TimeOptimalSolution<f64>,
    pub residuals: ResidualReport,
}

#[derive(Serialize)]
struct NormSolutionFile<'a> {
    schema: u32,
    tool_version: &'a str,
    config: &'a RunConfig,
    solution: &'a NormOptimalSolution<f64>,
    checks: &'a [Check],
}

#[derive(Serialize)]
struct CurveFile<'a> {
    schema: u32,
    tool_version: &'a str,
    config: &'a RunConfig,
    tau_hat: f64,
    points: &'a [CurvePoint<f64>],
}

#[derive(Serialize)]
struct HomogFile<'a> {
    schema: u32,
    tool_version: &'a str,
    coefficient: &'a CellPreset,
    homogenized_coefficient: f64,
    arithmetic_mean: f64,
    bounds: (f64, f64),
    smooth: bool,
}

const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Loads the config and echoes the keys that took default values.
pub fn load(path: &Path) -> anyhow::Result<RunConfig> {
    let Loaded { config, defaulted } = load_config(path)?;
    if !defaulted.is_empty() {
        eprintln!("defaults applied:");
        for d in &defaulted {
            eprintln!("  {d}");
        }
    }
    Ok(config)
}

pub fn output_dir(config: &RunConfig, flag: Option<&Path>) -> anyhow::Result<PathBuf> {
    let dir = flag
        .map(Path::to_path_buf)
        .unwrap_or_else(|| config.output.dir.clone());
    fs::create_dir_all(&dir).with_context(|| format!("creating output directory {}", dir.display()))?;
    Ok(dir)
}

fn write_json<S: Serialize>(path: &Path, value: &S) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

/// Solver errors that stem from the requested parameters rather than the numerics.
fn classify(e: Error) -> anyhow::Error {
    match e {
        Error::OutsideReachWindow { .. } | Error::InvalidParameter(_) | Error::InvalidEpsilon { .. } => {
            config_error(e)
        }
        e => anyhow::Error::new(e),
    }
}

fn check_table(checks: &[Check]) -> String {
    let mut out = format!("  {:<22} {:>12} {:>12}  status\n", "residual", "value", "limit");
    for c in checks {
        let _ = writeln!(
            out,
            "  {:<22} {:>12.4e} {:>12.4e}  {}",
            c.name,
            c.value,
            c.limit,
            if c.pass { "pass" } else { "FAIL" }
        );
    }
    out
}

fn report_failures(checks: &[Check]) -> Status {
    let failing: Vec<&str> = checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| c.name.as_str())
        .collect();
    if failing.is_empty() {
        Status::Ok
    } else {
        eprintln!("failing residuals: {}", failing.join(", "));
        Status::Failed
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "NO"
    }
}

pub fn norm(config: &RunConfig, tau: Option<f64>, out: &Path) -> anyhow::Result<Status> {
    let tau = tau
        .or(config.norm.tau)
        .ok_or_else(|| config_error("norm needs a horizon: pass --tau or set norm.tau"))?;
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(config_error(format!(
            "--tau must be positive and finite, got {tau}"
        )));
    }
    let problem = config.build_problem()?;
    let sol = norm_optimal(&problem, tau, &config.solver, None).map_err(classify)?;
    let r = problem.radius();
    let mk = |name: &str, value: f64, limit: f64| Check {
        name: name.into(),
        value,
        limit,
        pass: value.is_finite() && value <= limit,
    };
    let checks = vec![
        mk("el_residual", sol.residuals.el_residual, config.solver.tol_el),
        mk(
            "target_residual",
            sol.residuals.target_residual.abs(),
            config.solver.tol_target * r,
        ),
        mk(
            "duality_gap",
            sol.residuals.duality_gap,
            config.verify.duality * sol.n_star.powi(2).max(1.0),
        ),
    ];
    println!("norm-optimal control at tau = {tau}");
    println!("  N*(tau)    = {:.10}", sol.n_star);
    println!("  V*(tau)    = {:.10}", sol.v_star);
    println!("  tau_hat    = {:.10}", problem.tau_hat());
    println!("  iterations = {}", sol.residuals.iterations);
    println!("  converged  = {}", yes_no(sol.converged));
    print!("{}", check_table(&checks));
    write_json(
        &out.join("norm.json"),
        &NormSolutionFile {
            schema: SOLUTION_SCHEMA,
            tool_version: VERSION,
            config,
            solution: &sol,
            checks: &checks,
        },
    )?;
    let status = report_failures(&checks);
    if !sol.converged {
        eprintln!("minimizer did not converge");
        return Ok(Status::Failed);
    }
    Ok(status)
}

pub fn time(config: &RunConfig, m: Option<f64>, out: &Path) -> anyhow::Result<Status> {
    let m = m
        .or(config.time.m)
        .ok_or_else(|| config_error("time needs a control bound: pass --M or set time.M"))?;
    if !(m > 0.0 && m.is_finite()) {
        return Err(config_error(format!("--M must be positive and finite, got {m}")));
    }
    let problem = config.build_problem()?;
    let sol = time_optimal(&problem, m, &config.solver).map_err(classify)?;
    let report = verify_solution(&problem, &sol, &config.verify, &config.solver)?;
    println!("time-optimal control with M = {m}");
    if sol.is_degenerate() {
        println!("  initial state already lies in the target ball; null control");
    }
    println!("  tau*       = {:.10}", sol.tau_star);
    println!("  N*(tau*)   = {:.10}", sol.n_star);
    println!("  V*(tau*)   = {:.10}", sol.v_star);
    println!("  tau_hat    = {:.10}", sol.tau_hat);
    println!("  converged  = {}", yes_no(sol.converged));
    print!("{}", check_table(&report.checks));
    let status = report_failures(&report.checks);
    let converged = sol.converged;
    write_json(
        &out.join("time.json"),
        &TimeSolutionFile {
            schema: SOLUTION_SCHEMA,
            tool_version: VERSION.into(),
            config: config.clone(),
            solution: sol,
            residuals: report,
        },
    )?;
    if !converged {
        eprintln!("root find did not converge");
        return Ok(Status::Failed);
    }
    Ok(status)
}

pub fn curve(config: &RunConfig, taus: &[f64], out: &Path) -> anyhow::Result<Status> {
    let taus = if taus.is_empty() {
        &config.curve.tau_list
    } else {
        taus
    };
    if taus.is_empty() {
        return Err(config_error(
            "curve needs horizons: pass --tau-list or set curve.tau_list",
        ));
    }
    let problem = config.build_problem()?;
    let points = minimal_norm_curve(&problem, taus, &config.solver).map_err(classify)?;
    println!("minimal-norm curve (tau_hat = {:.10})", problem.tau_hat());
    println!("  {:>14} {:>16} {:>16}  converged", "tau", "N*(tau)", "V*(tau)");
    let mut csv = String::from("tau,n_star,v_star,converged\n");
    for p in &points {
        println!(
            "  {:>14.8} {:>16.10} {:>16.10}  {}",
            p.tau,
            p.n_star,
            p.v_star,
            yes_no(p.converged)
        );
        let _ = writeln!(
            csv,
            "{:.16e},{:.16e},{:.16e},{}",
            p.tau, p.n_star, p.v_star, p.converged
        );
    }
    let csv_path = out.join("curve.csv");
    fs::write(&csv_path, csv).with_context(|| format!("writing {}", csv_path.display()))?;
    println!("wrote {}", csv_path.display());
    write_json(
        &out.join("curve.json"),
        &CurveFile {
            schema: SOLUTION_SCHEMA,
            tool_version: VERSION,
            config,
            tau_hat: problem.tau_hat(),
            points: &points,
        },
    )?;
    let unconverged: Vec<String> = points
        .iter()
        .filter(|p| !p.converged)
        .map(|p| p.tau.to_string())
        .collect();
    if unconverged.is_empty() {
        Ok(Status::Ok)
    } else {
        eprintln!("minimizer did not converge at tau = {}", unconverged.join(", "));
        Ok(Status::Failed)
    }
}

pub fn homog(config: &RunConfig, out: &Path) -> anyhow::Result<Status> {
    let preset = match &config.problem.operator {
        OperatorSpec::Diffusion { coefficient, .. } => coefficient,
        _ => {
            return Err(config_error(
                "homog needs a diffusion operator in problem.operator",
            ))
        }
    };
    let base = PeriodicCoefficient1D::<f64>::new(preset.clone()).map_err(config_error)?;
    let a0 = homogenized_coefficient_1d(&base);
    let bounds = base.bounds();
    println!("homogenized coefficient of {preset:?}");
    println!("  a_0             = {a0:.12}");
    println!("  arithmetic mean = {:.12}", base.arithmetic_mean());
    println!("  bounds          = [{}, {}]", bounds.0, bounds.1);
    println!("  smooth          = {}", yes_no(base.is_smooth()));
    if !base.is_smooth() {
        println!("  note: the coefficient is not smooth; convergence results may not apply");
    }
    write_json(
        &out.join("homog.json"),
        &HomogFile {
            schema: SOLUTION_SCHEMA,
            tool_version: VERSION,
            coefficient: preset,
            homogenized_coefficient: a0,
            arithmetic_mean: base.arithmetic_mean(),
            bounds,
            smooth: base.is_smooth(),
        },
    )?;
    Ok(Status::Ok)
}

pub fn sweep(config: &RunConfig, out: &Path) -> anyhow::Result<Status> {
    let sweep_config = config.sweep_config()?;
    let report: SweepReport<f64> = run_sweep(&sweep_config).map_err(classify)?;
    let b = &report.baseline;
    println!("epsilon sweep (config hash {})", report.config_hash);
    if let Some(a0) = b.homogenized_coefficient {
        println!("  a_0        = {a0:.12}");
    }
    println!("  tau*_0     = {:.10}", b.tau_star);
    println!("  N*_0       = {:.10}", b.n_star);
    println!("  delta      = {:.10}", report.delta);
    println!(
        "  baseline   = {}",
        if b.converged { "converged" } else { "NOT converged" }
    );
    if report.outside_hypotheses {
        println!("  note: the coefficient is not smooth; convergence results may not apply");
    }
    println!(
        "  {:>10} {:>12} {:>10} {:>10} {:>10} {:>10} {:>10}  converged",
        "epsilon", "tau*", "tau_err", "ctrl_l2", "ctrl_linf", "semigroup", "resolvent"
    );
    for r in &report.records {
        println!(
            "  {:>10.6} {:>12.8} {:>10.3e} {:>10.3e} {:>10.3e} {:>10.3e} {:>10.3e}  {}",
            r.epsilon,
            r.tau_star,
            r.tau_err,
            r.ctrl_l2,
            r.ctrl_linf_trunc,
            r.semigroup_dist,
            r.resolvent_dist,
            yes_no(r.converged)
        );
    }
    let paths = emit_report(&report, out)?;
    println!("wrote {}", paths.csv.display());
    println!("wrote {}", paths.json.display());
    println!("wrote {}", paths.plotdata.display());

    let mut status = Status::Ok;
    if !b.converged {
        let failing: Vec<&str> = b.residuals.failing().map(|c| c.name.as_str()).collect();
        eprintln!("homogenized solve failed: {}", failing.join(", "));
        status = Status::Failed;
    }
    for r in report.records.iter().filter(|r| !r.converged) {
        let why = match (&r.error, &r.residuals) {
            (Some(e), _) => e.clone(),
            (None, Some(res)) => res
                .failing()
                .map(|c| c.name.as_str())
                .collect::<Vec<_>>()
                .join(", "),
            (None, None) => "no residuals".into(),
        };
        eprintln!("epsilon = {}: {why}", r.epsilon);
        status = Status::Failed;
    }
    Ok(status)
}

/// Recomputes every optimality residual of a `time.json` written by [`time`].
pub fn verify(path: &Path) -> anyhow::Result<Status> {
    let text =
        fs::read_to_string(path).map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
    let file: TimeSolutionFile = serde_json::from_str(&text)
        .map_err(|e| config_error(format!("{} is not a time solution file: {e}", path.display())))?;
    if file.schema != SOLUTION_SCHEMA {
        return Err(config_error(format!(
            "{}: unsupported schema {}",
            path.display(),
            file.schema
        )));
    }
    file.config
        .validate()
        .map_err(|e| config_error(format!("{}: embedded config: {e:#}", path.display())))?;
    let problem = file.config.build_problem()?;
    println!("verifying {}", path.display());
    println!("  M          = {}", file.solution.m);
    println!("  tau*       = {:.10}", file.solution.tau_star);

    if let Err(reason) = structural_checks(&problem, &file.solution) {
        println!("  {:<22} FAIL  {reason}", "structure");
        eprintln!("failing residuals: structure ({reason})");
        return Ok(Status::Failed);
    }
    let report = verify_solution(&problem, &file.solution, &file.config.verify, &file.config.solver)
        .map_err(|e| anyhow!("recomputing residuals: {e}"))?;
    print!("{}", check_table(&report.checks));
    Ok(report_failures(&report.checks))
}

/// Shape and support invariants that deserialization alone does not enforce.
fn structural_checks(problem: &ControlProblem<f64>, sol: &TimeOptimalSolution<f64>) -> Result<(), String> {
    let n = problem.op().mesh().n_interior();
    if sol.eta_hat.len() != n {
        return Err(format!("eta_hat has {} entries, the mesh {n}", sol.eta_hat.len()));
    }
    if !(sol.m > 0.0 && sol.m.is_finite()) {
        return Err(format!("M = {} is not positive", sol.m));
    }
    if sol.u_star.is_null() {
        return Ok(());
    }
    if (sol.u_star.grid().tau() - sol.tau_star).abs() > 1e-12 * sol.tau_star.max(1.0) {
        return Err(format!(
            "control horizon {} differs from tau* = {}",
            sol.u_star.grid().tau(),
            sol.tau_star
        ));
    }
    let rebuilt = ControlTrajectory::new(
        sol.u_star.grid().clone(),
        sol.u_star.samples().to_vec(),
        problem.mask(),
    )
    .map_err(|e| format!("control: {e}"))?;
    if (rebuilt.sup_norm() - sol.u_star.sup_norm()).abs() > 1e-12 * sol.m {
        return Err(format!(
            "recorded sup-norm {} differs from the samples' {}",
            sol.u_star.sup_norm(),
            rebuilt.sup_norm()
        ));
    }
    Ok(())
}
