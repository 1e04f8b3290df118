//! Nonlinear isogeometric Kirchhoff–Love shells with hyperelastic materials.

pub mod constitution;
pub mod error;
pub mod iga;
pub mod kinematics;
pub mod material;
pub mod quadrature;
pub mod solver;
pub mod tensor;
pub mod verify;
