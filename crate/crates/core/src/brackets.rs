//! Heisenberg-group mechanics underlying the decorated-particle bracket.
//!
//! The single-particle phase space is the left-trivialized cotangent bundle
//! of the Heisenberg group `B = R^d_Q x R^d_P x R_Psi`, i.e. `B x b*` with
//! dual coordinates `(q*, p*, psi*)`. This module evaluates the group law,
//! the trivialization map, the full Poisson bracket on `B x b*`, its
//! reduction to `(Q, P, q*, p*)` once the phase `Psi` is eliminated, and the
//! associated Hamiltonian vector field. Everything here is a pure evaluator;
//! gradients are supplied by the caller so tests can choose between analytic
//! and finite-difference differentiation.

use crate::error::{Error, Result};

/// Group element `(Q, P, Psi)`; `d = q.len()` components per leg.
#[derive(Debug, Clone, PartialEq)]
pub struct HeisenbergPoint {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    pub phase: f64,
}

impl HeisenbergPoint {
    pub fn new(q: Vec<f64>, p: Vec<f64>, phase: f64) -> Result<Self> {
        if q.len() != p.len() || q.is_empty() {
            return Err(Error::domain("Q and P must have equal positive dimension"));
        }
        Ok(HeisenbergPoint { q, p, phase })
    }

    pub fn identity(dim: usize) -> Self {
        HeisenbergPoint { q: vec![0.0; dim], p: vec![0.0; dim], phase: 0.0 }
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }
}

/// Dual-algebra element `(q*, p*, psi*)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoAlgebraPoint {
    pub q_star: Vec<f64>,
    pub p_star: Vec<f64>,
    pub psi_star: f64,
}

impl CoAlgebraPoint {
    pub fn dim(&self) -> usize {
        self.q_star.len()
    }
}

/// Cotangent covector `(Q*, P*, Psi*)` before left trivialization.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumCovector {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    pub phase: f64,
}

/// Partial derivatives of a scalar observable at a point of `B x b*`.
#[derive(Debug, Clone, Default)]
pub struct GradientAt {
    pub d_q: Vec<f64>,
    pub d_p: Vec<f64>,
    pub d_phase: f64,
    pub d_q_star: Vec<f64>,
    pub d_p_star: Vec<f64>,
    pub d_psi_star: f64,
}

impl GradientAt {
    pub fn zero(dim: usize) -> Self {
        GradientAt {
            d_q: vec![0.0; dim],
            d_p: vec![0.0; dim],
            d_phase: 0.0,
            d_q_star: vec![0.0; dim],
            d_p_star: vec![0.0; dim],
            d_psi_star: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.d_q.len()
    }
}

/// Tangent vector on `B x b*` produced by a Hamiltonian vector field.
#[derive(Debug, Clone)]
pub struct Tangent {
    pub q_dot: Vec<f64>,
    pub p_dot: Vec<f64>,
    pub phase_dot: f64,
    pub q_star_dot: Vec<f64>,
    pub p_star_dot: Vec<f64>,
    pub psi_star_dot: f64,
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::domain(format!("dimension mismatch: {a} vs {b}")));
    }
    Ok(())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Group product `(Q1+Q2, P1+P2, Psi1+Psi2 + (Q1.P2 - Q2.P1)/2)`.
pub fn heisenberg_mul(b1: &HeisenbergPoint, b2: &HeisenbergPoint) -> Result<HeisenbergPoint> {
    check_dims(b1.dim(), b2.dim())?;
    let q = b1.q.iter().zip(&b2.q).map(|(a, b)| a + b).collect();
    let p = b1.p.iter().zip(&b2.p).map(|(a, b)| a + b).collect();
    let twist = 0.5 * (dot(&b1.q, &b2.p) - dot(&b2.q, &b1.p));
    Ok(HeisenbergPoint { q, p, phase: b1.phase + b2.phase + twist })
}

/// Group inverse `(-Q, -P, -Psi)`.
pub fn heisenberg_inverse(b: &HeisenbergPoint) -> HeisenbergPoint {
    HeisenbergPoint {
        q: b.q.iter().map(|v| -v).collect(),
        p: b.p.iter().map(|v| -v).collect(),
        phase: -b.phase,
    }
}

/// Left trivialization of a cotangent covector at `b`:
/// `(q*, p*, psi*) = (Q* - Psi* P / 2, P* + Psi* Q / 2, Psi*)`.
pub fn left_trivialize(b: &HeisenbergPoint, cov: &MomentumCovector) -> Result<CoAlgebraPoint> {
    check_dims(b.dim(), cov.q.len())?;
    check_dims(cov.q.len(), cov.p.len())?;
    let q_star = cov
        .q
        .iter()
        .zip(&b.p)
        .map(|(qs, p)| qs - 0.5 * cov.phase * p)
        .collect();
    let p_star = cov
        .p
        .iter()
        .zip(&b.q)
        .map(|(ps, q)| ps + 0.5 * cov.phase * q)
        .collect();
    Ok(CoAlgebraPoint { q_star, p_star, psi_star: cov.phase })
}

/// Inverse of [`left_trivialize`]; exact algebraic round-trip.
pub fn inverse_trivialize(b: &HeisenbergPoint, dual: &CoAlgebraPoint) -> Result<MomentumCovector> {
    check_dims(b.dim(), dual.dim())?;
    let q = dual
        .q_star
        .iter()
        .zip(&b.p)
        .map(|(qs, p)| qs + 0.5 * dual.psi_star * p)
        .collect();
    let p = dual
        .p_star
        .iter()
        .zip(&b.q)
        .map(|(ps, q)| ps - 0.5 * dual.psi_star * q)
        .collect();
    Ok(MomentumCovector { q, p, phase: dual.psi_star })
}

/// Full Poisson bracket on `B x b*` in left-trivialized coordinates.
///
/// Four groups of terms: the canonical pairing of `(Q, P)` with `(q*, p*)`,
/// the `Psi`-`psi*` pairing, the `-psi*` dual-dual twist, and the half-phase
/// correction coupling `dPsi` to the dual gradients.
pub fn full_bracket(
    gf: &GradientAt,
    gg: &GradientAt,
    at_group: &HeisenbergPoint,
    at_dual: &CoAlgebraPoint,
) -> Result<f64> {
    let d = gf.dim();
    check_dims(d, gg.dim())?;
    check_dims(d, at_group.dim())?;
    check_dims(d, at_dual.dim())?;
    let mut acc = 0.0;
    for i in 0..d {
        acc += gf.d_q[i] * gg.d_q_star[i] - gg.d_q[i] * gf.d_q_star[i];
        acc += gf.d_p[i] * gg.d_p_star[i] - gg.d_p[i] * gf.d_p_star[i];
        acc -= at_dual.psi_star
            * (gf.d_q_star[i] * gg.d_p_star[i] - gg.d_q_star[i] * gf.d_p_star[i]);
    }
    acc += gf.d_phase * gg.d_psi_star - gg.d_phase * gf.d_psi_star;
    let twist_g = dot(&at_group.q, &gg.d_p_star) - dot(&at_group.p, &gg.d_q_star);
    let twist_f = dot(&at_group.q, &gf.d_p_star) - dot(&at_group.p, &gf.d_q_star);
    acc += 0.5 * (gf.d_phase * twist_g - gg.d_phase * twist_f);
    Ok(acc)
}

/// Gradient on the reduced phase space `(Q, P, q*, p*)`.
#[derive(Debug, Clone, Default)]
pub struct ReducedGradient {
    pub d_q: Vec<f64>,
    pub d_p: Vec<f64>,
    pub d_q_star: Vec<f64>,
    pub d_p_star: Vec<f64>,
}

impl ReducedGradient {
    pub fn zero(dim: usize) -> Self {
        ReducedGradient {
            d_q: vec![0.0; dim],
            d_p: vec![0.0; dim],
            d_q_star: vec![0.0; dim],
            d_p_star: vec![0.0; dim],
        }
    }
}

/// Reduced bracket after eliminating the phase:
/// `{f,g}_2 = (f_Z g_{z*} - g_Z f_{z*}) - psi* (f_{q*} g_{p*} - g_{q*} f_{p*})`.
pub fn reduced_bracket(gf: &ReducedGradient, gg: &ReducedGradient, psi_star: f64) -> f64 {
    let d = gf.d_q.len();
    debug_assert_eq!(d, gg.d_q.len());
    let mut acc = 0.0;
    for i in 0..d {
        acc += gf.d_q[i] * gg.d_q_star[i] - gg.d_q[i] * gf.d_q_star[i];
        acc += gf.d_p[i] * gg.d_p_star[i] - gg.d_p[i] * gf.d_p_star[i];
        acc -= psi_star * (gf.d_q_star[i] * gg.d_p_star[i] - gg.d_q_star[i] * gf.d_p_star[i]);
    }
    acc
}

/// Hamilton equations of the full bracket for a Hamiltonian gradient `gh`.
pub fn hamiltonian_vector_field(
    gh: &GradientAt,
    at_group: &HeisenbergPoint,
    at_dual: &CoAlgebraPoint,
) -> Result<Tangent> {
    let d = gh.dim();
    check_dims(d, at_group.dim())?;
    check_dims(d, at_dual.dim())?;
    let psi = at_dual.psi_star;
    let q_dot: Vec<f64> = gh.d_q_star.clone();
    let p_dot: Vec<f64> = gh.d_p_star.clone();
    let phase_dot = gh.d_psi_star
        + 0.5 * (dot(&at_group.q, &gh.d_p_star) - dot(&at_group.p, &gh.d_q_star));
    let psi_star_dot = -gh.d_phase;
    let mut q_star_dot = vec![0.0; d];
    let mut p_star_dot = vec![0.0; d];
    for i in 0..d {
        q_star_dot[i] = -gh.d_q[i] - psi * gh.d_p_star[i] + 0.5 * at_group.p[i] * gh.d_phase;
        p_star_dot[i] = -gh.d_p[i] + psi * gh.d_q_star[i] - 0.5 * at_group.q[i] * gh.d_phase;
    }
    Ok(Tangent { q_dot, p_dot, phase_dot, q_star_dot, p_star_dot, psi_star_dot })
}

/// A point of `B x b*` for observable-based checks.
#[derive(Debug, Clone)]
pub struct PhasePoint {
    pub group: HeisenbergPoint,
    pub dual: CoAlgebraPoint,
}

impl PhasePoint {
    pub fn dim(&self) -> usize {
        self.group.dim()
    }

    fn coords(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(4 * self.dim() + 2);
        v.extend(&self.group.q);
        v.extend(&self.group.p);
        v.push(self.group.phase);
        v.extend(&self.dual.q_star);
        v.extend(&self.dual.p_star);
        v.push(self.dual.psi_star);
        v
    }

    fn from_coords(dim: usize, v: &[f64]) -> Self {
        let d = dim;
        PhasePoint {
            group: HeisenbergPoint {
                q: v[0..d].to_vec(),
                p: v[d..2 * d].to_vec(),
                phase: v[2 * d],
            },
            dual: CoAlgebraPoint {
                q_star: v[2 * d + 1..3 * d + 1].to_vec(),
                p_star: v[3 * d + 1..4 * d + 1].to_vec(),
                psi_star: v[4 * d + 1],
            },
        }
    }
}

/// Central-difference gradient of a scalar observable.
pub fn fd_gradient(
    f: &dyn Fn(&PhasePoint) -> f64,
    at: &PhasePoint,
    rel_step: f64,
) -> GradientAt {
    let d = at.dim();
    let base = at.coords();
    let mut grad = vec![0.0; base.len()];
    for (i, g) in grad.iter_mut().enumerate() {
        let h = rel_step * (1.0 + base[i].abs());
        let mut up = base.clone();
        up[i] += h;
        let mut dn = base.clone();
        dn[i] -= h;
        *g = (f(&PhasePoint::from_coords(d, &up)) - f(&PhasePoint::from_coords(d, &dn)))
            / (2.0 * h);
    }
    GradientAt {
        d_q: grad[0..d].to_vec(),
        d_p: grad[d..2 * d].to_vec(),
        d_phase: grad[2 * d],
        d_q_star: grad[2 * d + 1..3 * d + 1].to_vec(),
        d_p_star: grad[3 * d + 1..4 * d + 1].to_vec(),
        d_psi_star: grad[4 * d + 1],
    }
}

/// Bracket of two observables as a scalar field, gradients by central FD.
pub fn bracket_of(
    f: &dyn Fn(&PhasePoint) -> f64,
    g: &dyn Fn(&PhasePoint) -> f64,
    at: &PhasePoint,
    rel_step: f64,
) -> f64 {
    let gf = fd_gradient(f, at, rel_step);
    let gg = fd_gradient(g, at, rel_step);
    full_bracket(&gf, &gg, &at.group, &at.dual).expect("dimensions agree by construction")
}

/// `|{f,{g,h}} + {g,{h,f}} + {h,{f,g}}|` with nested central differences.
///
/// The theory guarantees zero; the returned value measures only
/// finite-difference noise, of order `rel_step` squared plus round-off
/// amplified by `1 / rel_step^2`. The default `rel_step = 1e-5` balances the
/// two near 1e-6 for smooth observables.
pub fn jacobi_residual(
    f: &dyn Fn(&PhasePoint) -> f64,
    g: &dyn Fn(&PhasePoint) -> f64,
    h: &dyn Fn(&PhasePoint) -> f64,
    at: &PhasePoint,
    rel_step: f64,
) -> f64 {
    let fg = |x: &PhasePoint| bracket_of(f, g, x, rel_step);
    let gh = |x: &PhasePoint| bracket_of(g, h, x, rel_step);
    let hf = |x: &PhasePoint| bracket_of(h, f, x, rel_step);
    let t1 = bracket_of(f, &gh, at, rel_step);
    let t2 = bracket_of(g, &hf, at, rel_step);
    let t3 = bracket_of(h, &fg, at, rel_step);
    (t1 + t2 + t3).abs()
}

pub const DEFAULT_FD_STEP: f64 = 1e-5;
