//! The functional
//!
//! ```text
//! J(eta) = 1/2 (int_0^tau ||B* T_{tau-t} eta|| dt)^2 + <psi, T_tau eta> + r ||eta||
//! ```
//!
//! evaluated in modal coordinates. With `a(t) = e^{-lambda (tau - t)} eta` the
//! observation norm is `sqrt(a^T G a)` for the mask Gram matrix `G`; modes
//! whose decay factor has underflowed below `DECAY_CUTOFF` are skipped node by node.

use super::problem::ControlProblem;
use crate::error::Result;
use crate::quadrature::TimeGrid;
use crate::scalar::{dot, norm2, Scalar};
use crate::spectral::StateVec;

const DECAY_CUTOFF: f64 = 1e-30;

/// Precomputed decay tables for one horizon.
pub(crate) struct Kernel<'a, T> {
    problem: &'a ControlProblem<T>,
    grid: TimeGrid<T>,
    /// `decay[j][k] = e^{-lambda_k (tau - t_j)}` for the active modes at node `j`.
    decay: Vec<Vec<T>>,
    /// Modal coefficients of `T_tau psi`.
    free: Vec<T>,
    vanish_cut: T,
}

/// Smooth part `g = 1/2 S^2 + <T_tau psi, eta>` with its gradient.
#[derive(Clone, Debug)]
pub(crate) struct SmoothEval<T> {
    pub s: T,
    pub value: T,
    pub grad: Vec<T>,
    pub vanishing: usize,
}

impl<'a, T: Scalar> Kernel<'a, T> {
    pub fn new(problem: &'a ControlProblem<T>, grid: TimeGrid<T>, vanish_cut: f64) -> Self {
        let lambdas = problem.op().eigenvalues();
        let tau = grid.tau();
        let cutoff = T::lit(DECAY_CUTOFF);
        let decay = grid
            .nodes()
            .iter()
            .map(|&t| {
                let lag = tau - t;
                lambdas
                    .iter()
                    .map(|&l| (-l * lag).exp())
                    .take_while(|&d| d >= cutoff)
                    .collect()
            })
            .collect();
        let free = problem.op().semigroup_modal(tau, problem.psi_modal());
        Self {
            problem,
            grid,
            decay,
            free,
            vanish_cut: T::lit(vanish_cut),
        }
    }

    pub fn grid(&self) -> &TimeGrid<T> {
        &self.grid
    }

    pub fn free(&self) -> &[T] {
        &self.free
    }

    pub fn radius(&self) -> T {
        self.problem.radius()
    }

    pub fn n_modes(&self) -> usize {
        self.free.len()
    }

    /// Modal observation `a_j = decay_j * eta` and `G a_j` at node `j`.
    fn observe_node(&self, j: usize, eta: &[T], a: &mut Vec<T>, ga: &mut Vec<T>) -> T {
        let d = &self.decay[j];
        let kj = d.len();
        let k = self.n_modes();
        let g = self.problem.gram();
        a.clear();
        a.extend(d.iter().zip(eta).map(|(&x, &e)| x * e));
        ga.clear();
        ga.extend((0..kj).map(|p| dot(&g[p * k..p * k + kj], a)));
        dot(a, ga).max(T::zero()).sqrt()
    }

    /// Node-wise observation norms `||B* T_{tau - t_j} eta||`.
    pub fn observation_norms(&self, eta: &[T]) -> Vec<T> {
        let mut a = Vec::new();
        let mut ga = Vec::new();
        (0..self.grid.len())
            .map(|j| self.observe_node(j, eta, &mut a, &mut ga))
            .collect()
    }

    /// `S(eta) = int_0^tau ||B* T_{tau-t} eta|| dt`.
    pub fn s(&self, eta: &[T]) -> T {
        self.grid.integrate(&self.observation_norms(eta))
    }

    pub fn smooth(&self, eta: &[T]) -> SmoothEval<T> {
        let k = self.n_modes();
        let mut dir = vec![T::zero(); k];
        let mut s = T::zero();
        let mut vanishing = 0;
        let cut = self.vanish_cut * norm2(eta);
        let mut a = Vec::with_capacity(k);
        let mut ga = Vec::with_capacity(k);
        for (j, &w) in self.grid.weights().iter().enumerate() {
            let nrm = self.observe_node(j, eta, &mut a, &mut ga);
            s += w * nrm;
            if nrm <= cut || nrm == T::zero() {
                vanishing += 1;
                continue;
            }
            let c = w / nrm;
            for ((o, &d), &x) in dir.iter_mut().zip(&self.decay[j]).zip(ga.iter()) {
                *o += c * d * x;
            }
        }
        let grad: Vec<T> = dir.iter().zip(&self.free).map(|(&d, &f)| s * d + f).collect();
        let value = s * s / T::lit(2.0) + dot(&self.free, eta);
        SmoothEval {
            s,
            value,
            grad,
            vanishing,
        }
    }

    /// Hessian of `J` (row-major, `K x K`) at `eta != 0`, given `S(eta)`.
    ///
    /// Per node, with `v = d * G a / n`, the observation norm `n` has Hessian
    /// `(D G D - v v^T) / n`; then `H = grad S grad S^T + S hess S + hess(r ||eta||)`.
    pub fn hessian(&self, eta: &[T], s: T) -> Vec<T> {
        let k = self.n_modes();
        let g = self.problem.gram();
        let mut h = vec![T::zero(); k * k];
        let mut grad_s = vec![T::zero(); k];
        let cut = self.vanish_cut * norm2(eta);
        let mut a = Vec::with_capacity(k);
        let mut ga = Vec::with_capacity(k);
        let mut v = Vec::with_capacity(k);
        for (j, &w) in self.grid.weights().iter().enumerate() {
            let nrm = self.observe_node(j, eta, &mut a, &mut ga);
            if nrm <= cut || nrm == T::zero() {
                continue;
            }
            let d = &self.decay[j];
            let kj = d.len();
            v.clear();
            v.extend(d.iter().zip(&ga).map(|(&x, &y)| x * y / nrm));
            let c = s * w / nrm;
            for p in 0..kj {
                grad_s[p] += w * v[p];
                let row = &g[p * k..p * k + kj];
                for q in 0..kj {
                    h[p * k + q] += c * (d[p] * row[q] * d[q] - v[p] * v[q]);
                }
            }
        }
        let r = self.problem.radius();
        let n = norm2(eta);
        for p in 0..k {
            for q in 0..k {
                let id = if p == q { T::one() } else { T::zero() };
                h[p * k + q] += grad_s[p] * grad_s[q] + r * (id - eta[p] * eta[q] / (n * n)) / n;
            }
        }
        h
    }

    pub fn j(&self, eta: &[T]) -> T {
        let s = self.s(eta);
        s * s / T::lit(2.0) + dot(&self.free, eta) + self.problem.radius() * norm2(eta)
    }

    /// `||grad g(eta) + r eta / ||eta|| ||`; at `eta = 0` the distance from
    /// `-grad g(0)` to the subdifferential ball of radius `r`.
    pub fn el_residual(&self, eta: &[T], grad: &[T]) -> T {
        let r = self.problem.radius();
        let n = norm2(eta);
        if n == T::zero() {
            return (norm2(grad) - r).max(T::zero());
        }
        grad.iter()
            .zip(eta)
            .map(|(&g, &e)| {
                let v = g + r * e / n;
                v * v
            })
            .sum::<T>()
            .sqrt()
    }

    /// Modal coefficients of the node observations, synthesized as grid
    /// functions restricted to omega.
    pub fn observation_fields(&self, eta: &[T]) -> Vec<StateVec<T>> {
        let op = self.problem.op();
        let mask = self.problem.mask();
        self.decay
            .iter()
            .map(|d| {
                let a: Vec<T> = d.iter().zip(eta).map(|(&x, &e)| x * e).collect();
                mask.restrict(&op.synthesize(&a))
            })
            .collect()
    }
}

fn kernel_for<T: Scalar>(problem: &ControlProblem<T>, tau: T) -> Result<Kernel<'_, T>> {
    let grid = problem.grid(tau)?;
    Ok(Kernel::new(
        problem,
        grid,
        super::SolverSettings::default().vanish_cut,
    ))
}

/// `J^tau(eta)` on the problem's default quadrature grid.
pub fn eval_j<T: Scalar>(problem: &ControlProblem<T>, tau: T, eta: &StateVec<T>) -> Result<T> {
    let k = kernel_for(problem, tau)?;
    Ok(k.j(&problem.op().project(eta)))
}

/// Smooth part `g(eta) = 1/2 S(eta)^2 + <psi, T_tau eta>`.
pub fn smooth_part<T: Scalar>(problem: &ControlProblem<T>, tau: T, eta: &StateVec<T>) -> Result<T> {
    let k = kernel_for(problem, tau)?;
    Ok(k.smooth(&problem.op().project(eta)).value)
}

/// Gradient of the smooth part together with the count of skipped
/// (vanishing-observation) quadrature nodes.
#[derive(Clone, Debug)]
pub struct SmoothGradient<T> {
    pub grad: StateVec<T>,
    pub vanishing_nodes: usize,
}

pub fn grad_smooth_part<T: Scalar>(
    problem: &ControlProblem<T>,
    tau: T,
    eta: &StateVec<T>,
) -> Result<SmoothGradient<T>> {
    let k = kernel_for(problem, tau)?;
    let ev = k.smooth(&problem.op().project(eta));
    Ok(SmoothGradient {
        grad: problem.op().synthesize(&ev.grad),
        vanishing_nodes: ev.vanishing,
    })
}
