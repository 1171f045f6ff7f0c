use serde::{Deserialize, Serialize};

use super::functional::Kernel;
use super::minimize::{minimize_modal, Minimizer};
use super::problem::{ControlProblem, SolverSettings};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spectral::{terminal_state, ControlTrajectory, StateVec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormResiduals {
    /// `||grad g(eta_hat) + r eta_hat / ||eta_hat|| ||`
    pub el_residual: f64,
    /// `||z(tau; psi, f_hat)|| - r`
    pub target_residual: f64,
    /// `|V* + N*^2 / 2|`
    pub duality_gap: f64,
    pub vanishing_nodes: usize,
    pub iterations: usize,
}

/// Norm-optimal control for a fixed horizon, built from the minimizer of `J^tau`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NormOptimalSolution<T> {
    pub tau: T,
    pub eta_hat: StateVec<T>,
    pub n_star: T,
    pub v_star: T,
    pub control: ControlTrajectory<T>,
    pub residuals: NormResiduals,
    pub converged: bool,
}

/// `bound * B* T_{tau-t} eta / ||B* T_{tau-t} eta||` on the kernel's grid.
/// Nodes with a vanishing observation get the zero control.
pub(crate) fn bang_bang_control<T: Scalar>(
    problem: &ControlProblem<T>,
    kernel: &Kernel<'_, T>,
    eta_modal: &[T],
    bound: T,
    vanish_cut: f64,
) -> Result<ControlTrajectory<T>> {
    let cut = T::lit(vanish_cut) * crate::scalar::norm2(eta_modal);
    let samples = kernel
        .observation_fields(eta_modal)
        .into_iter()
        .map(|phi| {
            let n = phi.norm();
            if n <= cut || n == T::zero() {
                StateVec::zeros(problem.op().mesh())
            } else {
                phi.scaled(bound / n)
            }
        })
        .collect();
    ControlTrajectory::new(kernel.grid().clone(), samples, problem.mask())
}

pub(crate) fn assemble_norm_solution<T: Scalar>(
    problem: &ControlProblem<T>,
    tau: T,
    min: Minimizer<T>,
    settings: &SolverSettings,
) -> Result<NormOptimalSolution<T>> {
    let kernel = Kernel::new(problem, problem.grid(tau)?, settings.vanish_cut);
    let n_star = min.s;
    let control = bang_bang_control(problem, &kernel, &min.eta_modal, n_star, settings.vanish_cut)?;
    let z = terminal_state(problem.op(), problem.mask(), problem.psi(), &control)?;
    let target_residual = (z.norm() - problem.radius()).as_f64();
    let duality_gap = (min.value + n_star * n_star / T::lit(2.0)).abs().as_f64();
    let converged =
        min.diagnostics.converged && target_residual <= settings.tol_target * problem.radius().as_f64();
    Ok(NormOptimalSolution {
        tau,
        eta_hat: min.eta,
        n_star,
        v_star: min.value,
        control,
        residuals: NormResiduals {
            el_residual: min.diagnostics.el_residual,
            target_residual,
            duality_gap,
            vanishing_nodes: min.diagnostics.vanishing_nodes,
            iterations: min.diagnostics.iterations,
        },
        converged,
    })
}

/// Solves the minimal-norm problem at horizon `tau`; requires `||T_tau psi|| > r`.
pub fn norm_optimal<T: Scalar>(
    problem: &ControlProblem<T>,
    tau: T,
    settings: &SolverSettings,
    warm: Option<&StateVec<T>>,
) -> Result<NormOptimalSolution<T>> {
    let warm = warm.map(|w| problem.op().project(w));
    let min = minimize_modal(problem, tau, settings, warm.as_deref())?;
    assemble_norm_solution(problem, tau, min, settings)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint<T> {
    pub tau: T,
    pub n_star: T,
    pub v_star: T,
    pub converged: bool,
}

/// `tau -> N*(tau)` over a sorted list inside `(0, tau_hat)`, warm-started
/// along the list. Fails if the column is not strictly decreasing.
pub fn minimal_norm_curve<T: Scalar>(
    problem: &ControlProblem<T>,
    taus: &[T],
    settings: &SolverSettings,
) -> Result<Vec<CurvePoint<T>>> {
    if taus.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter(
            "tau list must be strictly increasing".into(),
        ));
    }
    let tau_hat = problem.tau_hat();
    if let Some(&bad) = taus.iter().find(|&&t| !(t > T::zero() && t < tau_hat)) {
        return Err(Error::OutsideReachWindow {
            tau: bad.as_f64(),
            tau_hat: tau_hat.as_f64(),
        });
    }
    let mut out: Vec<CurvePoint<T>> = Vec::with_capacity(taus.len());
    let mut warm: Option<Vec<T>> = None;
    for &tau in taus {
        let m = minimize_modal(problem, tau, settings, warm.as_deref())?;
        out.push(CurvePoint {
            tau,
            n_star: m.s,
            v_star: m.value,
            converged: m.diagnostics.converged,
        });
        warm = Some(m.eta_modal);
    }
    if let Some(w) = out.windows(2).find(|w| !(w[1].n_star < w[0].n_star)) {
        return Err(Error::InvalidParameter(format!(
            "minimal norm not decreasing: N*({}) = {} then N*({}) = {}",
            w[0].tau, w[0].n_star, w[1].tau, w[1].n_star
        )));
    }
    Ok(out)
}
