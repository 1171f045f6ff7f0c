//! Accelerated proximal gradient for `min_eta g(eta) + r ||eta||`.
//!
//! The proximal map of `r ||.||` is block soft-thresholding. Step sizes come
//! from backtracking on the smooth part; momentum is reset whenever it points
//! against the last step (gradient-based adaptive restart). When the linear
//! rate stalls on ill-conditioned instances, damped Newton steps on the
//! Euler-Lagrange equation finish the job.

use serde::{Deserialize, Serialize};

use super::functional::{Kernel, SmoothEval};
use super::problem::{ControlProblem, SolverSettings};
use crate::error::{Error, Result};
use crate::linalg::cholesky_solve;
use crate::scalar::{dot, norm2, Scalar};
use crate::spectral::StateVec;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinimizeDiagnostics {
    pub iterations: usize,
    pub el_residual: f64,
    pub converged: bool,
    pub vanishing_nodes: usize,
    pub restarts: usize,
    pub newton_steps: usize,
}

#[derive(Clone, Debug)]
pub struct Minimizer<T> {
    pub eta: StateVec<T>,
    pub(crate) eta_modal: Vec<T>,
    /// `V* = J(eta_hat)`.
    pub value: T,
    /// `S(eta_hat)`, which equals `N*(tau)` at the minimizer.
    pub s: T,
    pub diagnostics: MinimizeDiagnostics,
}

/// APG iterations before the first Newton polish is attempted.
const NEWTON_AFTER: usize = 400;
const NEWTON_MAX_STEPS: usize = 40;

/// `(1 - step r / ||v||)_+ v`.
pub(crate) fn block_soft_threshold<T: Scalar>(v: &[T], thresh: T) -> Vec<T> {
    let n = norm2(v);
    if n <= thresh {
        return vec![T::zero(); v.len()];
    }
    let f = T::one() - thresh / n;
    v.iter().map(|&x| x * f).collect()
}

/// Minimizer of `J^tau` for `tau` in `(0, tau_hat)`.
pub fn minimize_j<T: Scalar>(
    problem: &ControlProblem<T>,
    tau: T,
    settings: &SolverSettings,
    warm: Option<&StateVec<T>>,
) -> Result<Minimizer<T>> {
    let warm = warm.map(|w| problem.op().project(w));
    minimize_modal(problem, tau, settings, warm.as_deref())
}

pub(crate) fn check_window<T: Scalar>(problem: &ControlProblem<T>, tau: T) -> Result<()> {
    if !(tau > T::zero()) || !(problem.free_norm(tau) > problem.radius()) {
        return Err(Error::OutsideReachWindow {
            tau: tau.as_f64(),
            tau_hat: problem.tau_hat().as_f64(),
        });
    }
    Ok(())
}

pub(crate) fn minimize_modal<T: Scalar>(
    problem: &ControlProblem<T>,
    tau: T,
    settings: &SolverSettings,
    warm: Option<&[T]>,
) -> Result<Minimizer<T>> {
    settings.validate()?;
    check_window(problem, tau)?;
    let kernel = Kernel::new(problem, problem.grid(tau)?, settings.vanish_cut);
    let r = problem.radius();
    let tol = T::lit(settings.tol_el);
    let tol_gap = T::lit(settings.tol_gap);
    // At a stationary point J = -S^2/2; the gap is at most |residual| * ||eta||.
    let done = move |res: T, ev: &SmoothEval<T>, x: &[T]| {
        let gap = (ev.value + r * norm2(x) + ev.s * ev.s / T::lit(2.0)).abs();
        res <= tol && gap <= tol_gap * (ev.s * ev.s).max(T::one())
    };

    // Along d = -T_tau psi / ||T_tau psi|| the objective is a 1-D quadratic in
    // s > 0 with minimizer (||T_tau psi|| - r) / S(d)^2.
    let ray_start = || {
        let free = kernel.free();
        let nf = norm2(free);
        let d: Vec<T> = free.iter().map(|&f| -f / nf).collect();
        let sd = kernel.s(&d);
        let step = (nf - r) / (sd * sd);
        d.into_iter().map(|x| x * step).collect::<Vec<T>>()
    };
    let mut x = match warm {
        Some(w) if w.len() == kernel.n_modes() && norm2(w) > T::zero() => {
            let w = w.to_vec();
            let cold = ray_start();
            if kernel.j(&w) <= kernel.j(&cold) {
                w
            } else {
                cold
            }
        }
        _ => ray_start(),
    };

    let mut ev_x = kernel.smooth(&x);
    let mut res = kernel.el_residual(&x, &ev_x.grad);
    let mut lip = {
        let s_unit = if norm2(&x) > T::zero() {
            ev_x.s / norm2(&x)
        } else {
            T::one()
        };
        (s_unit * s_unit).max(T::epsilon())
    };
    let mut y = x.clone();
    let mut ev_y = ev_x.clone();
    let mut t_mom = T::one();
    let mut iterations = 0;
    let mut restarts = 0;

    let mut newton_steps = 0;
    while !done(res, &ev_x, &x) && iterations < settings.max_iter {
        if iterations == NEWTON_AFTER {
            newton_steps += newton_polish(&kernel, &mut x, &mut ev_x, &mut res, &done);
            if done(res, &ev_x, &x) {
                break;
            }
            y = x.clone();
            ev_y = ev_x.clone();
            t_mom = T::one();
        }
        iterations += 1;
        // Backtracking on the quadratic upper model of g around y.
        let (x_new, ev_new) = loop {
            let trial: Vec<T> = y.iter().zip(&ev_y.grad).map(|(&yi, &gi)| yi - gi / lip).collect();
            let cand = block_soft_threshold(&trial, r / lip);
            let ev_c = kernel.smooth(&cand);
            let diff: Vec<T> = cand.iter().zip(&y).map(|(&c, &yi)| c - yi).collect();
            let model = ev_y.value + dot(&ev_y.grad, &diff) + lip / T::lit(2.0) * dot(&diff, &diff);
            let slack = T::lit(1e-13) * (ev_y.value.abs() + T::one());
            if ev_c.value <= model + slack {
                break (cand, ev_c);
            }
            lip *= T::lit(2.0);
            if !lip.is_finite() {
                return Err(Error::InvalidParameter(
                    "step size underflow in J minimization".into(),
                ));
            }
        };
        res = kernel.el_residual(&x_new, &ev_new.grad);

        let step: Vec<T> = x_new.iter().zip(&x).map(|(&a, &b)| a - b).collect();
        let against: T = y
            .iter()
            .zip(&x_new)
            .zip(&step)
            .map(|((&yi, &xi), &si)| (yi - xi) * si)
            .sum();
        if against > T::zero() {
            restarts += 1;
            t_mom = T::one();
            y = x_new.clone();
            ev_y = ev_new.clone();
        } else {
            let t_next = (T::one() + (T::one() + T::lit(4.0) * t_mom * t_mom).sqrt()) / T::lit(2.0);
            let beta = (t_mom - T::one()) / t_next;
            y = x_new.iter().zip(&step).map(|(&a, &s)| a + beta * s).collect();
            ev_y = if beta == T::zero() {
                ev_new.clone()
            } else {
                kernel.smooth(&y)
            };
            t_mom = t_next;
        }
        x = x_new;
        ev_x = ev_new;
        lip *= T::lit(0.9);
    }

    if !done(res, &ev_x, &x) && norm2(&x) > T::zero() {
        newton_steps += newton_polish(&kernel, &mut x, &mut ev_x, &mut res, &done);
    }
    let converged = done(res, &ev_x, &x);
    if !converged {
        log::warn!(
            "J minimization at tau = {tau} stopped after {iterations} iterations with EL residual {res}"
        );
    }
    let value = ev_x.value + r * norm2(&x);
    Ok(Minimizer {
        eta: problem.op().synthesize(&x),
        value,
        s: ev_x.s,
        diagnostics: MinimizeDiagnostics {
            iterations,
            el_residual: res.as_f64(),
            converged,
            vanishing_nodes: ev_x.vanishing,
            restarts,
            newton_steps,
        },
        eta_modal: x,
    })
}

/// Stop test on `(J, smooth part, gradient)`.
type StopRule<T> = dyn Fn(T, &SmoothEval<T>, &[T]) -> bool;

/// Damped Newton on `grad g(eta) + r eta / ||eta|| = 0` with Armijo
/// backtracking on `J`. Near the minimizer the decrease of `J` drops below
/// rounding, so a step that lowers the residual without raising `J` beyond
/// rounding is also accepted. Returns the number of accepted steps.
fn newton_polish<T: Scalar>(
    kernel: &Kernel<'_, T>,
    x: &mut Vec<T>,
    ev: &mut SmoothEval<T>,
    res: &mut T,
    done: &StopRule<T>,
) -> usize {
    let r = kernel.radius();
    let k = x.len();
    let noise = T::lit(16.0) * T::epsilon();
    let mut steps = 0;
    while steps < NEWTON_MAX_STEPS && !done(*res, ev, x) {
        let n = norm2(x);
        if n == T::zero() {
            break;
        }
        let f: Vec<T> = ev
            .grad
            .iter()
            .zip(x.iter())
            .map(|(&g, &e)| g + r * e / n)
            .collect();
        let h = kernel.hessian(x, ev.s);
        let trace = (0..k).map(|i| h[i * k + i]).sum::<T>();
        let mut shift = T::zero();
        let p = loop {
            let mut a = h.clone();
            for i in 0..k {
                a[i * k + i] += shift;
            }
            let mut p: Vec<T> = f.iter().map(|&v| -v).collect();
            if cholesky_solve(&mut a, &mut p) {
                break Some(p);
            }
            shift = if shift == T::zero() {
                noise * trace
            } else {
                shift * T::lit(100.0)
            };
            if shift > trace {
                break None;
            }
        };
        let Some(p) = p else { break };
        let slope = dot(&f, &p);
        if !(slope < T::zero()) {
            break;
        }
        let j0 = ev.value + r * n;
        let mut t = T::one();
        let accepted = loop {
            let cand: Vec<T> = x.iter().zip(&p).map(|(&a, &b)| a + t * b).collect();
            let ev_c = kernel.smooth(&cand);
            let j_c = ev_c.value + r * norm2(&cand);
            let res_c = kernel.el_residual(&cand, &ev_c.grad);
            let armijo = j_c <= j0 + T::lit(1e-4) * t * slope;
            let flat = res_c < *res && j_c <= j0 + noise * j0.abs().max(T::one());
            if armijo || flat {
                break Some((cand, ev_c, res_c));
            }
            t /= T::lit(2.0);
            if t < T::lit(1e-10) {
                break None;
            }
        };
        let Some((cand, ev_c, res_c)) = accepted else {
            break;
        };
        *x = cand;
        *ev = ev_c;
        *res = res_c;
        steps += 1;
    }
    steps
}
