//! Shared domain types and periodic bookkeeping.
//!
//! Positions live on a circle of circumference `L`. `wrap_position` maps any
//! finite coordinate into `[0, L)` and `min_image` maps a displacement to its
//! unique representative in `(-L/2, L/2]`. The half-open convention keeps
//! `sgn r` well defined at `r = L/2`, which the closed-form single-source
//! potential relies on.

use crate::error::{Error, Result};

/// Spatial topology of the configuration space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    /// Periodic box `[0, L)`; used by every simulation scenario.
    Torus,
    /// Unbounded line; only relevant to the linear compression moments.
    Unbounded,
}

/// Simulation box description.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainSpec {
    pub length: f64,
    pub topology: Topology,
}

impl DomainSpec {
    pub fn torus(length: f64) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::domain(format!("box length must be positive, got {length}")));
        }
        Ok(DomainSpec { length, topology: Topology::Torus })
    }

    pub fn unbounded() -> Self {
        DomainSpec { length: f64::INFINITY, topology: Topology::Unbounded }
    }
}

/// Standard PIC marker particle: position, momentum, weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkerParticle {
    pub q: f64,
    pub p: f64,
    pub psi_star: f64,
}

/// Monopole-dipole decorated particle.
///
/// On top of the marker state this carries the dual pair `(q_star, p_star)`:
/// `p_star` is the spatial dipole moment and `q_star` the momentum dipole
/// moment. The weight `psi_star` is a Casimir of the reduced bracket and stays
/// exactly constant along any trajectory. The unobservable group phase is not
/// stored; it decouples from every observable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoratedParticle {
    pub q: f64,
    pub p: f64,
    pub q_star: f64,
    pub p_star: f64,
    pub psi_star: f64,
}

impl DecoratedParticle {
    /// Embeds a marker as a decorated particle with vanishing dipole block.
    pub fn from_marker(m: &MarkerParticle) -> Self {
        DecoratedParticle { q: m.q, p: m.p, q_star: 0.0, p_star: 0.0, psi_star: m.psi_star }
    }
}

/// Maps `q` to its representative in `[0, L)`.
pub fn wrap_position(q: f64, length: f64) -> Result<f64> {
    if !q.is_finite() {
        return Err(Error::domain(format!("cannot wrap non-finite position {q}")));
    }
    if !(length > 0.0) || !length.is_finite() {
        return Err(Error::domain(format!("wrap length must be positive, got {length}")));
    }
    let mut r = q % length;
    if r < 0.0 {
        r += length;
    }
    // `q % L` can round to exactly L for tiny negative q.
    if r >= length {
        r = 0.0;
    }
    Ok(r)
}

/// Maps a displacement to its minimum-image representative in `(-L/2, L/2]`.
pub fn min_image(dq: f64, length: f64) -> Result<f64> {
    if !(length > 0.0) || !length.is_finite() {
        return Err(Error::domain(format!("min-image length must be positive, got {length}")));
    }
    if !dq.is_finite() {
        return Err(Error::domain(format!("cannot reduce non-finite displacement {dq}")));
    }
    let mut r = dq - length * (dq / length).round();
    // Half-open convention: +L/2 is the representative, -L/2 is not.
    if r <= -0.5 * length {
        r += length;
    }
    if r > 0.5 * length {
        r -= length;
    }
    Ok(r)
}
