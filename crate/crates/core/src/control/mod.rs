//! Norm- and time-optimal control through the minimizer of `J^tau`.

mod functional;
mod minimize;
mod norm;
mod problem;
mod time;
mod verify;

pub use functional::{eval_j, grad_smooth_part, smooth_part, SmoothGradient};
pub use minimize::{minimize_j, MinimizeDiagnostics, Minimizer};
pub use norm::{minimal_norm_curve, norm_optimal, CurvePoint, NormOptimalSolution, NormResiduals};
pub use problem::{ControlProblem, SolverSettings};
pub use time::{time_optimal, time_optimal_from, TimeOptimalSolution, TimeResiduals, WarmStart};
pub use verify::{verify_solution, Check, ResidualReport, VerifyTolerances};

pub use crate::spectral::ControlTrajectory;
