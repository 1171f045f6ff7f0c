//! Time-optimal control through the inverse relation `N*(tau*(M)) = M`.

use serde::{Deserialize, Serialize};

use super::functional::Kernel;
use super::minimize::{minimize_modal, Minimizer};
use super::norm::bang_bang_control;
use super::problem::{ControlProblem, SolverSettings};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spectral::{terminal_state, ControlTrajectory, StateVec};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TimeResiduals {
    /// `max_t | ||u*(t)|| - M |`
    pub bang_bang_dev: f64,
    /// `||z(tau*; psi, u*) + r eta_hat / ||eta_hat|| ||`
    pub transversality: f64,
    /// `max_t (M ||phi(t)|| - <u*(t), phi(t)>) / (M ||phi(t)||)`, `phi = B* T_{tau*-t} eta_hat`
    pub max_principle: f64,
    pub bracket_width: f64,
    pub el_residual: f64,
    pub evaluations: usize,
    pub vanishing_nodes: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TimeOptimalSolution<T> {
    pub m: T,
    pub tau_star: T,
    pub tau_hat: T,
    pub u_star: ControlTrajectory<T>,
    pub eta_hat: StateVec<T>,
    /// `N*(tau*)` as evaluated by the last minimization.
    pub n_star: T,
    pub v_star: T,
    pub residuals: TimeResiduals,
    pub converged: bool,
}

impl<T: Scalar> TimeOptimalSolution<T> {
    /// Null control: the initial state already lies in the target.
    pub fn degenerate(problem: &ControlProblem<T>, m: T) -> Self {
        Self {
            m,
            tau_star: T::zero(),
            tau_hat: T::zero(),
            u_star: ControlTrajectory::null(),
            eta_hat: StateVec::zeros(problem.op().mesh()),
            n_star: T::zero(),
            v_star: T::zero(),
            residuals: TimeResiduals::default(),
            converged: true,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.u_star.is_null()
    }
}

/// Horizon and adjoint seed from a related solve, e.g. a homogenized problem.
#[derive(Clone, Copy, Debug)]
pub struct WarmStart<'a, T> {
    pub tau: T,
    pub eta: &'a StateVec<T>,
}

struct Evaluator<'a, T> {
    problem: &'a ControlProblem<T>,
    settings: &'a SolverSettings,
    cache: Vec<(T, Minimizer<T>)>,
    seed: Option<Vec<T>>,
}

impl<'a, T: Scalar> Evaluator<'a, T> {
    /// `N*(tau)`, warm-started from the nearest horizon evaluated so far.
    fn n_star(&mut self, tau: T) -> Result<T> {
        let warm = self
            .cache
            .iter()
            .min_by(|a, b| {
                (a.0 - tau)
                    .abs()
                    .partial_cmp(&(b.0 - tau).abs())
                    .expect("finite horizons")
            })
            .map(|(_, m)| m.eta_modal.clone())
            .or_else(|| self.seed.clone());
        let m = minimize_modal(self.problem, tau, self.settings, warm.as_deref())?;
        let s = m.s;
        self.cache.push((tau, m));
        Ok(s)
    }

    fn take(mut self, tau: T) -> Option<Minimizer<T>> {
        let i = self.cache.iter().position(|(t, _)| *t == tau)?;
        Some(self.cache.swap_remove(i).1)
    }
}

/// Minimal time to steer `psi` into `B(0, r)` with `||u(t)|| <= m`.
pub fn time_optimal<T: Scalar>(
    problem: &ControlProblem<T>,
    m: T,
    settings: &SolverSettings,
) -> Result<TimeOptimalSolution<T>> {
    time_optimal_from(problem, m, settings, None)
}

/// [`time_optimal`] with the bracket grown around `warm.tau` and the first
/// minimization seeded by `warm.eta`.
pub fn time_optimal_from<T: Scalar>(
    problem: &ControlProblem<T>,
    m: T,
    settings: &SolverSettings,
    warm: Option<WarmStart<'_, T>>,
) -> Result<TimeOptimalSolution<T>> {
    settings.validate()?;
    if !(m > T::zero()) || !m.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "control bound must be positive, got {m}"
        )));
    }
    if problem.is_degenerate() {
        return Ok(TimeOptimalSolution::degenerate(problem, m));
    }
    let tau_hat = problem.tau_hat();
    let mut ev = Evaluator {
        problem,
        settings,
        cache: Vec::new(),
        seed: warm.map(|w| problem.op().project(w.eta)),
    };
    let f = |ev: &mut Evaluator<'_, T>, tau: T| ev.n_star(tau).map(|n| n - m);
    let bracket_failure = |lo: T, hi: T, f_lo: T, f_hi: T| Error::BracketFailure {
        lo: lo.as_f64(),
        hi: hi.as_f64(),
        n_lo: (f_lo + m).as_f64(),
        n_hi: (f_hi + m).as_f64(),
        target: m.as_f64(),
    };

    // N* vanishes at tau_hat and blows up at 0+. Without a hint, halving from
    // tau_hat/2 finds a lower end with N* > M; with one, the bracket grows
    // geometrically from the hinted horizon.
    let mut hi = tau_hat;
    let mut f_hi = -m;
    let start = warm
        .map(|w| w.tau)
        .filter(|&t| t > T::zero() && t < tau_hat)
        .unwrap_or(tau_hat / T::lit(2.0));
    let mut lo = start;
    let mut f_lo = f(&mut ev, lo)?;
    if f_lo == T::zero() {
        return finish(problem, m, lo, T::zero(), ev, settings);
    }
    if f_lo < T::zero() {
        let mut factor = T::lit(if warm.is_some() { 0.9 } else { 0.5 });
        let mut steps = 0;
        while f_lo <= T::zero() {
            if f_lo == T::zero() {
                return finish(problem, m, lo, T::zero(), ev, settings);
            }
            hi = lo;
            f_hi = f_lo;
            lo *= factor;
            if warm.is_some() {
                factor = factor * factor;
            }
            steps += 1;
            if steps > 60 || lo <= T::zero() {
                return Err(bracket_failure(lo, hi, f_lo, f_hi));
            }
            f_lo = f(&mut ev, lo)?;
        }
    } else if warm.is_some() {
        let mut gap = (tau_hat - lo) / T::lit(10.0);
        while hi == tau_hat {
            let t = lo + gap;
            if t >= tau_hat || gap <= T::epsilon() * tau_hat {
                break;
            }
            let ft = f(&mut ev, t)?;
            if ft == T::zero() {
                return finish(problem, m, t, T::zero(), ev, settings);
            }
            if ft > T::zero() {
                lo = t;
                f_lo = ft;
                gap *= T::lit(2.0);
            } else {
                hi = t;
                f_hi = ft;
            }
        }
    }

    let tol_f = T::lit(settings.tol_norm) * m.max(T::one());
    let width_goal = T::lit(settings.bisect_width) * tau_hat;
    while hi - lo > width_goal {
        let mid = (lo + hi) / T::lit(2.0);
        let fm = f(&mut ev, mid)?;
        if fm.abs() <= tol_f {
            return finish(problem, m, mid, hi - lo, ev, settings);
        }
        if fm > T::zero() {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
            f_hi = fm;
        }
    }

    // Illinois-modified secant keeps the bracket while converging superlinearly.
    let min_width = T::lit(1e-3 * settings.tol_tau).max(T::lit(16.0) * T::epsilon() * tau_hat);
    let mut side = 0i8;
    let mut best = if f_lo.abs() < f_hi.abs() { lo } else { hi };
    let mut best_f = f_lo.abs().min(f_hi.abs());
    for _ in 0..200 {
        let mut c = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
        if !(c > lo && c < hi) {
            c = (lo + hi) / T::lit(2.0);
        }
        let fc = f(&mut ev, c)?;
        if fc.abs() < best_f {
            best = c;
            best_f = fc.abs();
        }
        if fc.abs() <= tol_f {
            break;
        }
        if fc > T::zero() {
            lo = c;
            f_lo = fc;
            if side == 1 {
                f_hi /= T::lit(2.0);
            }
            side = 1;
        } else {
            hi = c;
            f_hi = fc;
            if side == -1 {
                f_lo /= T::lit(2.0);
            }
            side = -1;
        }
        if hi - lo <= min_width {
            break;
        }
    }
    if best == tau_hat {
        // Only reachable if no interior evaluation beat the free-decay end.
        best = (lo + hi) / T::lit(2.0);
        f(&mut ev, best)?;
    }
    let width = hi - lo;
    finish(problem, m, best, width, ev, settings)
}

fn finish<T: Scalar>(
    problem: &ControlProblem<T>,
    m: T,
    tau_star: T,
    width: T,
    ev: Evaluator<'_, T>,
    settings: &SolverSettings,
) -> Result<TimeOptimalSolution<T>> {
    let evaluations = ev.cache.len();
    let min = ev.take(tau_star).expect("tau* was evaluated");
    let kernel = Kernel::new(problem, problem.grid(tau_star)?, settings.vanish_cut);
    let u_star = bang_bang_control(problem, &kernel, &min.eta_modal, m, settings.vanish_cut)?;
    let mut residuals = control_residuals(problem, &u_star, &min.eta, m)?;
    residuals.bracket_width = width.as_f64();
    residuals.el_residual = min.diagnostics.el_residual;
    residuals.evaluations = evaluations;
    residuals.vanishing_nodes = min.diagnostics.vanishing_nodes;
    let root_ok =
        width <= T::lit(settings.tol_tau) || (min.s - m).abs() <= T::lit(settings.tol_norm) * m.max(T::one());
    Ok(TimeOptimalSolution {
        m,
        tau_star,
        tau_hat: problem.tau_hat(),
        u_star,
        eta_hat: min.eta,
        n_star: min.s,
        v_star: min.value,
        residuals,
        converged: root_ok && min.diagnostics.converged,
    })
}

/// Bang-bang deviation, transversality and maximum-principle residuals of a
/// control against the adjoint seed `eta`, all evaluated on grid functions.
pub(crate) fn control_residuals<T: Scalar>(
    problem: &ControlProblem<T>,
    u: &ControlTrajectory<T>,
    eta: &StateVec<T>,
    m: T,
) -> Result<TimeResiduals> {
    let op = problem.op();
    let mask = problem.mask();
    let grid = u.grid();
    let tau = grid.tau();
    let bang_bang_dev = u
        .node_norms()
        .into_iter()
        .map(|n| (n - m).abs())
        .fold(T::zero(), T::max);

    let z = terminal_state(op, mask, problem.psi(), u)?;
    let eta_norm = eta.norm();
    let mut target = eta.scaled(problem.radius() / eta_norm);
    target.add_scaled(T::one(), &z);
    let transversality = target.norm();

    let mut max_principle = T::zero();
    for (&t, sample) in grid.nodes().iter().zip(u.samples()) {
        let phi = crate::spectral::observe(op, mask, tau - t, eta)?;
        let pn = phi.norm();
        if pn == T::zero() {
            continue;
        }
        let gap = (m * pn - sample.inner(&phi)) / (m * pn);
        max_principle = max_principle.max(gap.abs());
    }
    Ok(TimeResiduals {
        bang_bang_dev: bang_bang_dev.as_f64(),
        transversality: transversality.as_f64(),
        max_principle: max_principle.as_f64(),
        ..TimeResiduals::default()
    })
}
