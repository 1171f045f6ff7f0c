//! One-dimensional self-adjoint generators, their semigroups, and the
//! control/observation maps built on them.

mod field;
mod maps;
mod mesh;
mod operator;
mod state;
pub mod tridiag;

pub use field::{CoefficientField, FieldKind};
pub(crate) use maps::{decayed_norm, reach_time_modal};
pub use maps::{free_reach_time, input_map, observe, terminal_state};
pub use mesh::Mesh1D;
pub use operator::DiscreteOperator;
pub use state::{ControlMask, ControlTrajectory, StateVec};
