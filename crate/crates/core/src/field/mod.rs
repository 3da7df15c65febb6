//! Periodic continuous-Galerkin Poisson solver with monopole and dipole
//! deposition, field evaluation, and the closed-form single-source solution.

mod error_norm;
mod exact;
mod mesh;
mod poisson;

pub use error_norm::l2_error;
pub use exact::exact_single_source;
pub use mesh::{shape_eval, PeriodicMesh, ShapeEval, MAX_DEGREE};
pub use poisson::{deposit_charge, Deposit, FieldEval, FieldState, StiffnessSystem, SOLVE_TOLERANCE};
