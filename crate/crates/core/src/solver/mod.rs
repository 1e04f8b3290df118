//! Residual and tangent assembly, loads, constraints and the Newton driver.

pub mod dofs;
pub mod internal;
pub mod loads;
pub mod newton;

pub use dofs::DofMap;
pub use internal::{internal_force_and_tangent, Contribution};
pub use loads::{
    contact_force_and_tangent, external_force_and_tangent, normal_penalty, reaction_moment,
    Indenter, Load, NormalConstraint,
};
pub use newton::{
    newton_solve, newton_solve_from, sparse_solve, NewtonFailure, NewtonOptions, NewtonReport,
    NewtonResult, ShellSystem, Solution, StepRecord,
};
