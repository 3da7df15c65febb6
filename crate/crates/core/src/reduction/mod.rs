//! Marker sampling and compression into decorated particles.
//!
//! Compression groups markers by k-means in phase space, picks the marker
//! closest to each cluster's weighted mean as the central particle, and
//! assigns the dipole pair from first moments about it:
//!
//! ```text
//! psi*_a = sum_A w_A
//! p*_a   = sum_A w_A c(Q_a, Q_A)
//! q*_a   = -sum_A w_A (P_a - P_A)
//! ```
//!
//! On the line `c(Q_a, Q_A) = Q_a - Q_A` (Taylor matching); on the circle the
//! first Fourier mode `c(Q_a, Q_A) = (L / 2 pi) sin(2 pi (Q_a - Q_A) / L)` is
//! matched instead, which agrees with the linear form to cubic order for
//! narrow clusters.

mod kmeans;

pub use kmeans::{kmeans_cluster, ClusterAssignment, MAX_LLOYD_ITERATIONS};

use crate::domain::{min_image, DecoratedParticle, DomainSpec, MarkerParticle, Topology};
use crate::error::{Error, Result};
use crate::rng::Rng;

/// Benchmark initial distributions.
#[derive(Debug, Clone, Copy)]
pub enum InitialDistribution {
    /// Two symmetric beams at `p = +-1`, each Maxwellian with temperature `T`.
    TwoStream { temperature: f64 },
    /// Perturbed Maxwellian `f_M(p) (1 + A cos(k q))`.
    Landau { amplitude: f64, wavenumber: f64 },
}

/// Draws `n` markers with uniform weights `L / n` (unit mean density).
pub fn sample_initial(
    dist: &InitialDistribution,
    n: usize,
    length: f64,
    rng: &mut Rng,
) -> Result<Vec<MarkerParticle>> {
    if n == 0 {
        return Err(Error::domain("need at least one marker"));
    }
    if !(length > 0.0) || !length.is_finite() {
        return Err(Error::domain(format!("length must be positive, got {length}")));
    }
    let weight = length / n as f64;
    let mut markers = Vec::with_capacity(n);
    match *dist {
        InitialDistribution::TwoStream { temperature } => {
            if !(temperature > 0.0) {
                return Err(Error::domain(format!(
                    "beam temperature must be positive, got {temperature}"
                )));
            }
            let sigma = temperature.sqrt();
            for _ in 0..n {
                let q = rng.uniform_in(0.0, length);
                let beam = if rng.uniform() < 0.5 { -1.0 } else { 1.0 };
                let p = beam + sigma * rng.normal();
                markers.push(MarkerParticle { q, p, psi_star: weight });
            }
        }
        InitialDistribution::Landau { amplitude, wavenumber } => {
            if amplitude.abs() >= 1.0 {
                return Err(Error::domain(format!(
                    "perturbation amplitude must satisfy |A| < 1, got {amplitude}"
                )));
            }
            let cycles = wavenumber * length / std::f64::consts::TAU;
            if (cycles - cycles.round()).abs() > 1e-9 || cycles.round() < 1.0 {
                return Err(Error::domain(format!(
                    "wavenumber {wavenumber} is not an integer multiple of 2 pi / L"
                )));
            }
            for _ in 0..n {
                let u = rng.uniform();
                let q = invert_perturbed_cdf(u, amplitude, wavenumber, length);
                let p = rng.normal();
                markers.push(MarkerParticle { q, p, psi_star: weight });
            }
        }
    }
    Ok(markers)
}

/// Solves `(q + (A/k) sin(k q)) / L = u` for `q` by bisection.
fn invert_perturbed_cdf(u: f64, amplitude: f64, wavenumber: f64, length: f64) -> f64 {
    let cdf = |q: f64| (q + amplitude / wavenumber * (wavenumber * q).sin()) / length;
    let (mut lo, mut hi) = (0.0, length);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cdf(mid) < u {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * length {
            break;
        }
    }
    let q = 0.5 * (lo + hi);
    if q >= length {
        0.0
    } else {
        q
    }
}

/// Spatial moment kernel used in the dipole assignment.
#[derive(Debug, Clone, Copy)]
pub enum CFunction {
    /// `c(Q_a, Q_A) = Q_a - Q_A` (unbounded-domain Taylor matching).
    Linear,
    /// `c(Q_a, Q_A) = (L / 2 pi) sin(2 pi (Q_a - Q_A) / L)` (Fourier matching).
    PeriodicSine { length: f64 },
}

impl CFunction {
    pub fn eval(&self, q_center: f64, q_marker: f64) -> f64 {
        match *self {
            CFunction::Linear => q_center - q_marker,
            CFunction::PeriodicSine { length } => {
                let k = std::f64::consts::TAU / length;
                (k * (q_center - q_marker)).sin() / k
            }
        }
    }
}

/// Compresses clustered markers into one decorated particle per non-empty
/// cluster. Distances to the cluster mean use the minimum image on a torus;
/// ties in the central-particle choice go to the lowest marker index.
pub fn build_decorated(
    markers: &[MarkerParticle],
    assignment: &ClusterAssignment,
    c: CFunction,
    domain: &DomainSpec,
) -> Vec<DecoratedParticle> {
    assert_eq!(markers.len(), assignment.labels.len(), "assignment length mismatch");
    let n_clusters = assignment.centers.len();
    let mut members: Vec<Vec<u32>> = vec![Vec::new(); n_clusters];
    for (i, &label) in assignment.labels.iter().enumerate() {
        members[label].push(i as u32);
    }
    let q_dist = |a: f64, b: f64| -> f64 {
        match domain.topology {
            Topology::Torus => min_image(a - b, domain.length).expect("valid torus length"),
            Topology::Unbounded => a - b,
        }
    };

    let mut out = Vec::new();
    for group in &members {
        if group.is_empty() {
            continue;
        }
        // weighted mean; circular in q when matching Fourier moments
        let total_weight: f64 = group.iter().map(|&a| markers[a as usize].psi_star).sum();
        let p_mean: f64 = group
            .iter()
            .map(|&a| markers[a as usize].psi_star * markers[a as usize].p)
            .sum::<f64>()
            / total_weight;
        let q_mean = match c {
            CFunction::Linear => {
                group
                    .iter()
                    .map(|&a| markers[a as usize].psi_star * markers[a as usize].q)
                    .sum::<f64>()
                    / total_weight
            }
            CFunction::PeriodicSine { length } => {
                let k = std::f64::consts::TAU / length;
                let (mut cs, mut sn) = (0.0, 0.0);
                for &a in group {
                    let m = &markers[a as usize];
                    cs += m.psi_star * (k * m.q).cos();
                    sn += m.psi_star * (k * m.q).sin();
                }
                let mut q = sn.atan2(cs) / k;
                if q < 0.0 {
                    q += length;
                }
                q
            }
        };
        // central particle: closest member to the mean, lowest index on ties
        let mut best = f64::INFINITY;
        let mut central = group[0] as usize;
        for &a in group {
            let m = &markers[a as usize];
            let dq = q_dist(m.q, q_mean);
            let dp = m.p - p_mean;
            let d2 = dq * dq + dp * dp;
            if d2 < best {
                best = d2;
                central = a as usize;
            }
        }
        let center = &markers[central];
        let mut p_star = 0.0;
        let mut q_star = 0.0;
        for &a in group {
            let m = &markers[a as usize];
            p_star += m.psi_star * c.eval(center.q, m.q);
            q_star -= m.psi_star * (center.p - m.p);
        }
        out.push(DecoratedParticle {
            q: center.q,
            p: center.p,
            q_star,
            p_star,
            psi_star: total_weight,
        });
    }
    out
}
