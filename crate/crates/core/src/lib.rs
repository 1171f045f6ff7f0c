//! Time-optimal and norm-optimal control of one-dimensional parabolic
//! systems steered into a ball, with an epsilon-sweep harness for
//! oscillating-coefficient families.
//!
//! Numerical types are generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the common concrete choices.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod control;
pub mod error;
pub mod homogenize;
mod linalg;
pub mod presets;
pub mod quadrature;
pub mod scalar;
pub mod spectral;
pub mod sweep;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Mesh = spectral::Mesh1D<f64>;
pub type StateVecF64 = spectral::StateVec<f64>;
pub type StateVecF32 = spectral::StateVec<f32>;
pub type DiscreteOperatorF64 = spectral::DiscreteOperator<f64>;
pub type DiscreteOperatorF32 = spectral::DiscreteOperator<f32>;
pub type ControlProblemF64 = control::ControlProblem<f64>;
pub type ControlProblemF32 = control::ControlProblem<f32>;
pub type ControlTrajectoryF64 = spectral::ControlTrajectory<f64>;
pub type NormOptimalSolutionF64 = control::NormOptimalSolution<f64>;
pub type TimeOptimalSolutionF64 = control::TimeOptimalSolution<f64>;
pub type TimeOptimalSolutionF32 = control::TimeOptimalSolution<f32>;
pub type SweepReportF64 = sweep::SweepReport<f64>;
