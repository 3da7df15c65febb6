//! 1D1V Vlasov-Poisson kinetic simulation toolkit.
//!
//! The crate implements two particle discretizations of the electrostatic
//! Vlasov-Poisson system on a periodic box:
//!
//! * standard particle-in-cell (PIC), where markers carry `(Q, P, psi*)`, and
//! * the Scovel-Weinstein decorated-particle method, where each particle
//!   additionally carries a dipole pair `(q*, p*)` evolving by a noncanonical
//!   Lie-Poisson bracket.
//!
//! Around those sit a periodic Lagrange finite-element Poisson solver with
//! monopole + dipole deposition ([`field`]), a k-means compressor that turns
//! marker ensembles into decorated particles ([`reduction`]), a geometric
//! verification layer for the underlying Heisenberg-group brackets
//! ([`brackets`]), a kick-drift-kick integrator ([`dynamics`]), and a
//! benchmark harness with a semi-Lagrangian grid reference ([`scenario`]).

pub mod brackets;
pub mod domain;
pub mod dynamics;
pub mod error;
pub mod field;
pub mod quadrature;
pub mod reduction;
pub mod rng;
pub mod scenario;

pub use domain::{min_image, wrap_position, DecoratedParticle, DomainSpec, MarkerParticle, Topology};
pub use error::{Error, Result};
pub use rng::Rng;
