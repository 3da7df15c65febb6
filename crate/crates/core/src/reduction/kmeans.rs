//! Lloyd's k-means over phase space `(q, p)` with k-means++ seeding.
//!
//! Distances use the minimum image in `q` and plain differences in `p`;
//! center updates take the circular mean in `q` (unit-circle embedding) and
//! the arithmetic mean in `p`. Nearest-center queries run against a uniform
//! grid of square cells with an expanding ring search, which keeps large
//! cluster counts tractable without changing any result: the search is exact.

use crate::domain::MarkerParticle;
use crate::error::{Error, Result};
use crate::rng::Rng;

pub const MAX_LLOYD_ITERATIONS: usize = 300;

/// Labels per marker plus final cluster centers.
#[derive(Debug, Clone)]
pub struct ClusterAssignment {
    pub labels: Vec<usize>,
    pub centers: Vec<(f64, f64)>,
    pub iterations: usize,
    /// Lloyd objective (sum of squared distances) after each assignment pass.
    pub objective_trace: Vec<f64>,
}

#[inline]
fn wrap_diff(dq: f64, length: f64, inv_length: f64) -> f64 {
    dq - length * (dq * inv_length).round()
}

#[inline]
fn dist2(q: f64, p: f64, cq: f64, cp: f64, length: f64, inv_length: f64) -> f64 {
    let dq = wrap_diff(q - cq, length, inv_length);
    let dp = p - cp;
    dq * dq + dp * dp
}

/// Exact nearest-center index over a cell grid.
///
/// The `q` axis is split into `gq` columns of exactly `length / gq` so the
/// periodic wrap lands on a column boundary; `p` uses a band of `gp` rows
/// covering the observed momentum range.
struct CenterGrid {
    cell_q: f64,
    cell_p: f64,
    gq: usize,
    gp: usize,
    p_min: f64,
    length: f64,
    inv_length: f64,
    buckets: Vec<Vec<u32>>,
}

impl CenterGrid {
    fn build(centers: &[(f64, f64)], length: f64) -> Self {
        let k = centers.len().max(1);
        let (mut p_min, mut p_max) = (f64::INFINITY, f64::NEG_INFINITY);
        for &(_, p) in centers {
            p_min = p_min.min(p);
            p_max = p_max.max(p);
        }
        if !p_min.is_finite() {
            p_min = 0.0;
            p_max = 0.0;
        }
        let span = (p_max - p_min).max(1e-9 * length);
        let target = (length * span / k as f64).sqrt().max(1e-12 * length);
        let gq = ((length / target).round() as usize).clamp(1, 4096);
        let cell_q = length / gq as f64;
        let gp = ((span / target).ceil() as usize + 1).clamp(1, 4096);
        let cell_p = (span / (gp as f64 - 0.5)).max(1e-300);
        let mut grid = CenterGrid {
            cell_q,
            cell_p,
            gq,
            gp,
            p_min,
            length,
            inv_length: 1.0 / length,
            buckets: vec![Vec::new(); gq * gp],
        };
        for (i, &(cq, cp)) in centers.iter().enumerate() {
            let b = grid.bucket_of(cq, cp);
            grid.buckets[b].push(i as u32);
        }
        grid
    }

    #[inline]
    fn bucket_of(&self, q: f64, p: f64) -> usize {
        let iq = ((q / self.cell_q) as usize).min(self.gq - 1);
        let ip = (((p - self.p_min) / self.cell_p).max(0.0) as usize).min(self.gp - 1);
        iq * self.gp + ip
    }

    fn nearest(&self, centers: &[(f64, f64)], q: f64, p: f64) -> usize {
        let iq0 = (q / self.cell_q).floor() as isize;
        let ip0 = ((p - self.p_min) / self.cell_p).floor() as isize;
        let bound_cell = self.cell_q.min(self.cell_p);
        let mut best = f64::INFINITY;
        let mut best_idx = 0usize;
        let r_max = (self.gq + self.gp + 1) as isize;
        for r in 0..=r_max {
            // any cell at Chebyshev ring r is at least (r-1) cells away
            if r >= 1 {
                let bound = (r - 1) as f64 * bound_cell;
                if bound * bound > best {
                    break;
                }
            }
            let mut scan = |dq: isize, dp: isize| {
                let ip = ip0 + dp;
                if ip < 0 || ip >= self.gp as isize {
                    return;
                }
                let iq = (iq0 + dq).rem_euclid(self.gq as isize) as usize;
                for &ci in &self.buckets[iq * self.gp + ip as usize] {
                    let (cq, cp) = centers[ci as usize];
                    let d2 = dist2(q, p, cq, cp, self.length, self.inv_length);
                    if d2 < best || (d2 == best && (ci as usize) < best_idx) {
                        best = d2;
                        best_idx = ci as usize;
                    }
                }
            };
            if r == 0 {
                scan(0, 0);
            } else {
                for dq in -r..=r {
                    scan(dq, -r);
                    scan(dq, r);
                }
                for dp in (-r + 1)..r {
                    scan(-r, dp);
                    scan(r, dp);
                }
            }
        }
        best_idx
    }
}

/// k-means++ seeding: first center uniform, then proportional to squared
/// distance from the chosen set.
fn seed_centers(
    markers: &[MarkerParticle],
    n_clusters: usize,
    rng: &mut Rng,
    length: f64,
) -> Vec<(f64, f64)> {
    let inv_length = 1.0 / length;
    let n = markers.len();
    let mut centers = Vec::with_capacity(n_clusters);
    let first = rng.index(n);
    centers.push((markers[first].q, markers[first].p));
    let mut d2: Vec<f64> = markers
        .iter()
        .map(|m| dist2(m.q, m.p, centers[0].0, centers[0].1, length, inv_length))
        .collect();
    while centers.len() < n_clusters {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.uniform() * total;
            let mut idx = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                target -= w;
                if target <= 0.0 {
                    idx = i;
                    break;
                }
            }
            idx
        } else {
            // all remaining points coincide with chosen centers
            rng.index(n)
        };
        let c = (markers[pick].q, markers[pick].p);
        centers.push(c);
        for (i, m) in markers.iter().enumerate() {
            let d = dist2(m.q, m.p, c.0, c.1, length, inv_length);
            if d < d2[i] {
                d2[i] = d;
            }
        }
    }
    centers
}

/// Clusters markers into `n_clusters` groups; deterministic for a fixed seed.
pub fn kmeans_cluster(
    markers: &[MarkerParticle],
    n_clusters: usize,
    rng: &mut Rng,
    length: f64,
) -> Result<ClusterAssignment> {
    if markers.is_empty() {
        return Err(Error::domain("cannot cluster an empty marker set"));
    }
    if n_clusters == 0 || n_clusters > markers.len() {
        return Err(Error::domain(format!(
            "cluster count {n_clusters} must be in 1..={}",
            markers.len()
        )));
    }
    if !(length > 0.0) || !length.is_finite() {
        return Err(Error::domain(format!("length must be positive, got {length}")));
    }
    let inv_length = 1.0 / length;
    let tau = std::f64::consts::TAU;

    let mut centers = seed_centers(markers, n_clusters, rng, length);
    let mut labels = vec![usize::MAX; markers.len()];
    let mut objective_trace = Vec::new();
    let mut iterations = 0;

    for iter in 0..MAX_LLOYD_ITERATIONS {
        iterations = iter + 1;
        let grid = CenterGrid::build(&centers, length);
        let mut changed = 0usize;
        let mut objective = 0.0;
        for (i, m) in markers.iter().enumerate() {
            let nearest = grid.nearest(&centers, m.q, m.p);
            objective += dist2(m.q, m.p, centers[nearest].0, centers[nearest].1, length, inv_length);
            if labels[i] != nearest {
                labels[i] = nearest;
                changed += 1;
            }
        }
        objective_trace.push(objective);
        if changed == 0 {
            break;
        }
        // center update: circular mean in q, arithmetic mean in p
        let mut cos_sum = vec![0.0; n_clusters];
        let mut sin_sum = vec![0.0; n_clusters];
        let mut p_sum = vec![0.0; n_clusters];
        let mut count = vec![0usize; n_clusters];
        for (m, &label) in markers.iter().zip(&labels) {
            let angle = tau * m.q * inv_length;
            cos_sum[label] += angle.cos();
            sin_sum[label] += angle.sin();
            p_sum[label] += m.p;
            count[label] += 1;
        }
        for c in 0..n_clusters {
            if count[c] == 0 {
                continue; // empty cluster keeps its center
            }
            let angle = sin_sum[c].atan2(cos_sum[c]);
            let mut q = angle * length / tau;
            if q < 0.0 {
                q += length;
            }
            if q >= length {
                q = 0.0;
            }
            centers[c] = (q, p_sum[c] / count[c] as f64);
        }
    }

    Ok(ClusterAssignment { labels, centers, iterations, objective_trace })
}
