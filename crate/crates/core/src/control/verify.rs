//! Post-hoc optimality checks on a time-optimal solution.

use serde::{Deserialize, Serialize};

use super::functional::Kernel;
use super::minimize::minimize_modal;
use super::problem::{ControlProblem, SolverSettings};
use super::time::{control_residuals, TimeOptimalSolution};
use crate::error::Result;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyTolerances {
    /// On `| ||u(t)|| - M |`, relative to `M`.
    pub bang_bang: f64,
    /// On the transversality residual, relative to `r`.
    pub transversality: f64,
    /// On the node-wise maximum-principle gap (already relative).
    pub max_principle: f64,
    /// On `|V* + N*^2/2|`, relative to `max(1, N*^2)`.
    pub duality: f64,
    /// On `|N*(tau*) - M|`, relative to `M`.
    pub inverse_relation: f64,
}

impl Default for VerifyTolerances {
    fn default() -> Self {
        Self {
            bang_bang: 1e-6,
            transversality: 1e-5,
            max_principle: 1e-8,
            duality: 1e-8,
            inverse_relation: 1e-4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub bang_bang_dev: f64,
    pub transversality_res: f64,
    pub max_principle_res: f64,
    pub duality_gap: f64,
    pub inverse_relation_res: f64,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl ResidualReport {
    pub fn failing(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// Recomputes every optimality residual of `solution` from its control and
/// adjoint seed. `N*(tau*)` is re-derived by a fresh minimization of `J^{tau*}`.
pub fn verify_solution<T: Scalar>(
    problem: &ControlProblem<T>,
    solution: &TimeOptimalSolution<T>,
    tolerances: &VerifyTolerances,
    settings: &SolverSettings,
) -> Result<ResidualReport> {
    if solution.is_degenerate() {
        let names = [
            ("bang_bang_dev", tolerances.bang_bang),
            ("transversality_res", tolerances.transversality),
            ("max_principle_res", tolerances.max_principle),
            ("duality_gap", tolerances.duality),
            ("inverse_relation_res", tolerances.inverse_relation),
        ];
        return Ok(ResidualReport {
            bang_bang_dev: 0.0,
            transversality_res: 0.0,
            max_principle_res: 0.0,
            duality_gap: 0.0,
            inverse_relation_res: 0.0,
            checks: names
                .iter()
                .map(|(n, l)| Check {
                    name: (*n).to_string(),
                    value: 0.0,
                    limit: *l,
                    pass: true,
                })
                .collect(),
            pass: problem.is_degenerate(),
        });
    }

    let m = solution.m;
    let tau = solution.tau_star;
    let res = control_residuals(problem, &solution.u_star, &solution.eta_hat, m)?;

    let kernel = Kernel::new(problem, problem.grid(tau)?, settings.vanish_cut);
    let eta = problem.op().project(&solution.eta_hat);
    let s = kernel.s(&eta);
    let duality_gap = (kernel.j(&eta) + s * s / T::lit(2.0)).abs().as_f64();
    let n_star = minimize_modal(problem, tau, settings, Some(&eta))?.s;
    let inverse_relation_res = ((n_star - m).abs() / m).as_f64();

    let m64 = m.as_f64();
    let r64 = problem.radius().as_f64();
    let n2 = s.as_f64().powi(2).max(1.0);
    let mk = |name: &str, value: f64, limit: f64| Check {
        name: name.to_string(),
        value,
        limit,
        pass: value.is_finite() && value <= limit,
    };
    let checks = vec![
        mk("bang_bang_dev", res.bang_bang_dev, tolerances.bang_bang * m64),
        mk(
            "transversality_res",
            res.transversality,
            tolerances.transversality * r64,
        ),
        mk("max_principle_res", res.max_principle, tolerances.max_principle),
        mk("duality_gap", duality_gap, tolerances.duality * n2),
        mk(
            "inverse_relation_res",
            inverse_relation_res,
            tolerances.inverse_relation,
        ),
    ];
    let pass = checks.iter().all(|c| c.pass);
    Ok(ResidualReport {
        bang_bang_dev: res.bang_bang_dev,
        transversality_res: res.transversality,
        max_principle_res: res.max_principle,
        duality_gap,
        inverse_relation_res,
        checks,
        pass,
    })
}
