use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::SweepConfig;
use super::distance::control_distance;
use super::finite_or_null;
use crate::control::{
    time_optimal, time_optimal_from, verify_solution, ControlProblem, ResidualReport, TimeOptimalSolution,
    VerifyTolerances, WarmStart,
};
use crate::error::{Error, Result};
use crate::homogenize::EpsilonFamily;
use crate::quadrature::TimeGrid;
use crate::scalar::Scalar;
use crate::spectral::{ControlMask, DiscreteOperator, Mesh1D, StateVec};

pub const REPORT_SCHEMA: u32 = 1;

/// One family member compared against the limit problem.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct SweepRecord<T> {
    pub epsilon: T,
    #[serde(with = "finite_or_null")]
    pub tau_star: T,
    /// `|tau*_eps - tau*_0|`
    #[serde(with = "finite_or_null")]
    pub tau_err: T,
    /// `||u*_eps - u*_0||` in `L2(0, tau*_0)`, `u*_eps` extended by zero.
    #[serde(with = "finite_or_null")]
    pub ctrl_l2: T,
    /// Sup over nodes in `[0, tau*_0 - delta]`.
    #[serde(with = "finite_or_null")]
    pub ctrl_linf_trunc: T,
    /// `max_t ||T^eps_t psi - T^0_t psi||` over the grid on `[0, tau*_0]`.
    pub semigroup_dist: T,
    /// `||A_eps^{-1} psi - A_0^{-1} psi||`
    pub resolvent_dist: T,
    pub converged: bool,
    pub residuals: Option<ResidualReport>,
    pub error: Option<String>,
    pub config_hash: String,
}

/// The homogenized (or limit) solve every member is compared with.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Baseline<T> {
    /// Homogenized diffusion coefficient; absent for reaction families.
    pub homogenized_coefficient: Option<T>,
    pub tau_star: T,
    pub tau_hat: T,
    pub n_star: T,
    pub converged: bool,
    pub residuals: ResidualReport,
}

/// Least-squares slopes of `log(column)` against `log(epsilon)` over the
/// positive finite entries; informational only.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Slopes {
    pub tau_err: Option<f64>,
    pub ctrl_l2: Option<f64>,
    pub ctrl_linf_trunc: Option<f64>,
    pub semigroup_dist: Option<f64>,
    pub resolvent_dist: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct SweepReport<T> {
    pub schema: u32,
    pub tool_version: String,
    pub config_hash: String,
    pub config: SweepConfig,
    /// The coefficient violates the smoothness the convergence theory assumes.
    pub outside_hypotheses: bool,
    pub baseline: Baseline<T>,
    pub delta: T,
    pub observed_slopes: Slopes,
    pub records: Vec<SweepRecord<T>>,
}

/// Solves the limit problem, then every family member (in parallel,
/// warm-started from the limit solution), and measures their distances.
/// Member failures are recorded rather than propagated.
pub fn run_sweep<T: Scalar>(config: &SweepConfig) -> Result<SweepReport<T>> {
    config.validate()?;
    let config_hash = config.hash();
    let family = EpsilonFamily::new(
        &config.family,
        config.epsilons.iter().map(|&e| T::lit(e)).collect(),
    )?;
    let mesh = Mesh1D::<T>::new(config.n_interior)?;
    family.validate_on(&mesh)?;
    if !family.is_smooth() {
        log::warn!("coefficient is not smooth; the sweep runs outside the convergence hypotheses");
    }
    let mask = ControlMask::interval(&mesh, T::lit(config.omega[0]), T::lit(config.omega[1]))?;
    let psi = config.psi.sample(&mesh)?;
    let (r, m) = (T::lit(config.r), T::lit(config.m));
    let settings = &config.settings;
    let tolerances = VerifyTolerances::default();

    let op0 = DiscreteOperator::assemble(&family.limit_field(&mesh)?, &mesh, config.k_modes)?;
    let p0 = ControlProblem::new(op0, mask.clone(), psi.clone(), r, config.n_t)?;
    let sol0 = time_optimal(&p0, m, settings)?;
    if sol0.is_degenerate() {
        return Err(Error::InvalidParameter(
            "initial state already lies in the target ball; nothing to sweep".into(),
        ));
    }
    let report0 = verify_solution(&p0, &sol0, &tolerances, settings)?;
    let tau0 = sol0.tau_star;
    let delta = config.delta.map(T::lit).unwrap_or(tau0 / T::lit(10.0));
    if !(delta > T::zero() && delta < tau0) {
        return Err(Error::InvalidParameter(format!(
            "delta = {delta} must lie in (0, tau*_0 = {tau0})"
        )));
    }
    let baseline = Baseline {
        homogenized_coefficient: family.homogenized_value(),
        tau_star: tau0,
        tau_hat: sol0.tau_hat,
        n_star: sol0.n_star,
        converged: sol0.converged && report0.pass,
        residuals: report0,
    };

    let probe_grid = TimeGrid::new(tau0, config.n_t)?;
    let free0 = probe_grid
        .nodes()
        .iter()
        .map(|&t| p0.op().semigroup_apply(t, &psi))
        .collect::<Result<Vec<_>>>()?;
    let inv0 = p0.op().resolvent_apply(T::zero(), &psi)?;

    let member = Member {
        config,
        mask: &mask,
        psi: &psi,
        r,
        m,
        delta,
        sol0: &sol0,
        probe_grid: &probe_grid,
        free0: &free0,
        inv0: &inv0,
        tolerances: &tolerances,
        hash: &config_hash,
    };
    let records = family
        .operators(&mesh, config.k_modes)?
        .into_par_iter()
        .map(|(eps, op)| member.solve(eps, op))
        .collect::<Result<Vec<_>>>()?;

    Ok(SweepReport {
        schema: REPORT_SCHEMA,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash,
        config: config.clone(),
        outside_hypotheses: !family.is_smooth(),
        observed_slopes: slopes(&records),
        baseline,
        delta,
        records,
    })
}

struct Member<'a, T> {
    config: &'a SweepConfig,
    mask: &'a ControlMask<T>,
    psi: &'a StateVec<T>,
    r: T,
    m: T,
    delta: T,
    sol0: &'a TimeOptimalSolution<T>,
    probe_grid: &'a TimeGrid<T>,
    free0: &'a [StateVec<T>],
    inv0: &'a StateVec<T>,
    tolerances: &'a VerifyTolerances,
    hash: &'a str,
}

impl<T: Scalar> Member<'_, T> {
    fn solve(&self, eps: T, op: DiscreteOperator<T>) -> Result<SweepRecord<T>> {
        let mut semigroup_dist = T::zero();
        for (&t, f0) in self.probe_grid.nodes().iter().zip(self.free0) {
            semigroup_dist = semigroup_dist.max(op.semigroup_apply(t, self.psi)?.sub(f0).norm());
        }
        let resolvent_dist = op.resolvent_apply(T::zero(), self.psi)?.sub(self.inv0).norm();
        let problem = ControlProblem::new(op, self.mask.clone(), self.psi.clone(), self.r, self.config.n_t)?;
        let warm = WarmStart {
            tau: self.sol0.tau_star,
            eta: &self.sol0.eta_hat,
        };
        let settings = &self.config.settings;
        let mut record = SweepRecord {
            epsilon: eps,
            tau_star: T::nan(),
            tau_err: T::nan(),
            ctrl_l2: T::nan(),
            ctrl_linf_trunc: T::nan(),
            semigroup_dist,
            resolvent_dist,
            converged: false,
            residuals: None,
            error: None,
            config_hash: self.hash.to_string(),
        };
        let outcome = time_optimal_from(&problem, self.m, settings, Some(warm)).and_then(|sol| {
            let report = verify_solution(&problem, &sol, self.tolerances, settings)?;
            let (l2, linf) =
                control_distance(&sol.u_star, &self.sol0.u_star, self.sol0.tau_star, self.delta)?;
            Ok((sol, report, l2, linf))
        });
        match outcome {
            Ok((sol, report, l2, linf)) => {
                record.tau_star = sol.tau_star;
                record.tau_err = (sol.tau_star - self.sol0.tau_star).abs();
                record.ctrl_l2 = l2;
                record.ctrl_linf_trunc = linf;
                record.converged = sol.converged && report.pass;
                if !record.converged {
                    let failing: Vec<&str> = report.failing().map(|c| c.name.as_str()).collect();
                    log::warn!("eps = {eps}: solve flagged, failing checks {failing:?}");
                }
                record.residuals = Some(report);
            }
            Err(e) => {
                log::warn!("eps = {eps}: {e}");
                record.error = Some(e.to_string());
            }
        }
        Ok(record)
    }
}

fn slopes<T: Scalar>(records: &[SweepRecord<T>]) -> Slopes {
    let fit = |col: fn(&SweepRecord<T>) -> T| {
        let pts: Vec<(f64, f64)> = records
            .iter()
            .map(|r| (r.epsilon.as_f64(), col(r).as_f64()))
            .filter(|&(e, v)| e > 0.0 && v > 0.0 && v.is_finite())
            .map(|(e, v)| (e.ln(), v.ln()))
            .collect();
        if pts.len() < 2 {
            return None;
        }
        let n = pts.len() as f64;
        let (mx, my) = pts
            .iter()
            .fold((0.0, 0.0), |(a, b), (x, y)| (a + x / n, b + y / n));
        let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
        let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
        Some(sxy / sxx)
    };
    Slopes {
        tau_err: fit(|r| r.tau_err),
        ctrl_l2: fit(|r| r.ctrl_l2),
        ctrl_linf_trunc: fit(|r| r.ctrl_linf_trunc),
        semigroup_dist: fit(|r| r.semigroup_dist),
        resolvent_dist: fit(|r| r.resolvent_dist),
    }
}
