use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::TimeGrid;
use crate::scalar::Scalar;
use crate::spectral::{reach_time_modal, ControlMask, DiscreteOperator, StateVec};

/// Controlled system `z' + A z = chi_omega u`, `z(0) = psi`, with target ball `B(0, r)`.
#[derive(Clone, Debug)]
pub struct ControlProblem<T> {
    op: DiscreteOperator<T>,
    mask: ControlMask<T>,
    psi: StateVec<T>,
    r: T,
    n_t: usize,
    psi_modal: Vec<T>,
    gram: Vec<T>,
    tau_hat: T,
}

impl<T: Scalar> ControlProblem<T> {
    /// `n_t` is the (odd) Simpson node count used for every horizon.
    pub fn new(
        op: DiscreteOperator<T>,
        mask: ControlMask<T>,
        psi: StateVec<T>,
        r: T,
        n_t: usize,
    ) -> Result<Self> {
        if !(r > T::zero()) || !r.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "radius must be positive, got {r}"
            )));
        }
        let n = op.mesh().n_interior();
        if psi.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: psi.len(),
            });
        }
        if mask.indicator().len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: mask.indicator().len(),
            });
        }
        // Validates the density once so later grids cannot fail on it.
        TimeGrid::new(T::one(), n_t)?;
        let psi_modal = op.project(&psi);
        let gram = op.mask_gram(&mask);
        let tau_hat = reach_time_modal(op.eigenvalues(), &psi_modal, r);
        Ok(Self {
            op,
            mask,
            psi,
            r,
            n_t,
            psi_modal,
            gram,
            tau_hat,
        })
    }

    pub fn op(&self) -> &DiscreteOperator<T> {
        &self.op
    }

    pub fn mask(&self) -> &ControlMask<T> {
        &self.mask
    }

    pub fn psi(&self) -> &StateVec<T> {
        &self.psi
    }

    pub fn radius(&self) -> T {
        self.r
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn grid(&self, tau: T) -> Result<TimeGrid<T>> {
        TimeGrid::new(tau, self.n_t)
    }

    pub(crate) fn psi_modal(&self) -> &[T] {
        &self.psi_modal
    }

    pub(crate) fn gram(&self) -> &[T] {
        &self.gram
    }

    /// Whether the initial state already lies in the target ball.
    pub fn is_degenerate(&self) -> bool {
        self.psi.norm() <= self.r
    }

    /// Free-decay reach time of the retained dynamics.
    pub fn tau_hat(&self) -> T {
        self.tau_hat
    }

    /// `||T_tau psi||`.
    pub fn free_norm(&self, tau: T) -> T {
        crate::spectral::decayed_norm(self.op.eigenvalues(), &self.psi_modal, tau)
    }

    /// Fraction of `||psi||^2` carried by the retained modes.
    pub fn psi_capture(&self) -> T {
        self.op.captured_fraction(&self.psi)
    }
}

/// Iteration and tolerance knobs shared by the solvers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSettings {
    /// Euler-Lagrange residual at which the J-minimizer stops.
    pub tol_el: f64,
    /// Bound on `|J + S^2/2|` relative to `max(1, S^2)`, also required to stop.
    pub tol_gap: f64,
    pub max_iter: usize,
    /// Absolute tolerance on the optimal time.
    pub tol_tau: f64,
    /// Relative tolerance on `|N*(tau) - M|` in the time-optimal root find.
    pub tol_norm: f64,
    /// Bisection phase stops once the bracket is this fraction of `tau_hat`.
    pub bisect_width: f64,
    /// Observations below this fraction of `||eta||` count as vanishing.
    pub vanish_cut: f64,
    /// Allowed `||z(tau)|| - r` for norm-optimal controls, relative to `r`.
    pub tol_target: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            tol_el: 1e-7,
            tol_gap: 1e-9,
            max_iter: 20_000,
            tol_tau: 1e-6,
            tol_norm: 1e-9,
            bisect_width: 1e-3,
            vanish_cut: 1e-14,
            tol_target: 1e-5,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        let pos = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "{name} must be positive, got {v}"
                )))
            }
        };
        pos("tol_el", self.tol_el)?;
        pos("tol_gap", self.tol_gap)?;
        pos("tol_tau", self.tol_tau)?;
        pos("tol_norm", self.tol_norm)?;
        pos("bisect_width", self.bisect_width)?;
        pos("vanish_cut", self.vanish_cut)?;
        pos("tol_target", self.tol_target)?;
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}
