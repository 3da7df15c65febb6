//! Periodic Lagrange finite-element mesh on `[0, L)`.
//!
//! Elements are the intervals between consecutive boundary points, with the
//! last element closing the circle back to `q = 0`. Degree-`k` elements carry
//! `k + 1` equispaced reference nodes; the right end node of each element is
//! shared with (or wraps to) the next, so the global space has
//! `N = k * n_elements` degrees of freedom.

use crate::error::{Error, Result};
use crate::wrap_position;

pub const MAX_DEGREE: usize = 3;

/// Largest allowed ratio `max h_e / min h_e`.
const QUASI_UNIFORMITY_BOUND: f64 = 4.0;

#[derive(Debug, Clone)]
pub struct PeriodicMesh {
    length: f64,
    degree: usize,
    /// Element boundaries `0 = b_0 < b_1 < ... < b_{n} = L`.
    boundaries: Vec<f64>,
    /// Global node coordinates in `[0, L)`, strictly increasing, length `k * n`.
    nodes: Vec<f64>,
    uniform: bool,
}

impl PeriodicMesh {
    pub fn uniform(length: f64, n_elements: usize, degree: usize) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::mesh(format!("mesh length must be positive, got {length}")));
        }
        let h = length / n_elements as f64;
        let boundaries = (0..=n_elements)
            .map(|i| if i == n_elements { length } else { i as f64 * h })
            .collect();
        let mut mesh = Self::from_boundaries(length, boundaries, degree)?;
        mesh.uniform = true;
        Ok(mesh)
    }

    /// Builds a mesh from explicit element boundaries.
    ///
    /// `boundaries` must start at 0, end at `length`, and be strictly
    /// increasing with element-size ratio at most 4 (quasi-uniformity).
    pub fn from_boundaries(length: f64, boundaries: Vec<f64>, degree: usize) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::mesh(format!("mesh length must be positive, got {length}")));
        }
        if !(1..=MAX_DEGREE).contains(&degree) {
            return Err(Error::mesh(format!("element degree must be 1..=3, got {degree}")));
        }
        if boundaries.len() < 3 {
            return Err(Error::mesh("mesh needs at least 2 elements"));
        }
        if boundaries[0] != 0.0 || *boundaries.last().unwrap() != length {
            return Err(Error::mesh("boundaries must span exactly [0, length]"));
        }
        let mut h_min = f64::INFINITY;
        let mut h_max = 0.0f64;
        for w in boundaries.windows(2) {
            let h = w[1] - w[0];
            if !(h > 0.0) {
                return Err(Error::mesh(format!(
                    "degenerate element [{}, {}]",
                    w[0], w[1]
                )));
            }
            h_min = h_min.min(h);
            h_max = h_max.max(h);
        }
        if h_max / h_min > QUASI_UNIFORMITY_BOUND {
            return Err(Error::mesh(format!(
                "mesh is not quasi-uniform: max/min element size {} > {}",
                h_max / h_min,
                QUASI_UNIFORMITY_BOUND
            )));
        }
        let n_elements = boundaries.len() - 1;
        let mut nodes = Vec::with_capacity(degree * n_elements);
        for e in 0..n_elements {
            let (xl, xr) = (boundaries[e], boundaries[e + 1]);
            for j in 0..degree {
                nodes.push(xl + (xr - xl) * j as f64 / degree as f64);
            }
        }
        Ok(PeriodicMesh { length, degree, boundaries, nodes, uniform: false })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn n_elements(&self) -> usize {
        self.boundaries.len() - 1
    }

    pub fn n_dofs(&self) -> usize {
        self.nodes.len()
    }

    /// Global node coordinates, sorted, in `[0, L)`.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn element_span(&self, e: usize) -> (f64, f64) {
        (self.boundaries[e], self.boundaries[e + 1])
    }

    pub fn element_size(&self, e: usize) -> f64 {
        self.boundaries[e + 1] - self.boundaries[e]
    }

    pub fn max_element_size(&self) -> f64 {
        self.boundaries
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    /// Global DOF index of local node `j` of element `e`.
    #[inline]
    pub fn global_dof(&self, e: usize, j: usize) -> usize {
        (e * self.degree + j) % self.n_dofs()
    }

    /// Index of the element containing `q` (which must lie in `[0, L)`).
    #[inline]
    pub fn element_of(&self, q: f64) -> usize {
        let n = self.n_elements();
        if self.uniform {
            let mut e = ((q / self.length) * n as f64) as usize;
            if e >= n {
                e = n - 1;
            }
            // guard against rounding at element boundaries
            if q < self.boundaries[e] {
                e -= 1;
            } else if q >= self.boundaries[e + 1] {
                e += 1;
            }
            e
        } else {
            self.boundaries.partition_point(|&b| b <= q).clamp(1, n) - 1
        }
    }

    /// Wraps `q` and returns `(element, local coordinate in [0, 1))`.
    pub fn locate(&self, q: f64) -> Result<(usize, f64)> {
        let qw = wrap_position(q, self.length)?;
        let e = self.element_of(qw);
        let (xl, xr) = self.element_span(e);
        Ok((e, (qw - xl) / (xr - xl)))
    }
}

/// Reference-element shape function values for equispaced Lagrange nodes on `[0, 1]`.
///
/// Returns values, first, and second derivatives with respect to the
/// reference coordinate; entries beyond `degree + 1` are zero.
#[derive(Debug, Clone, Copy)]
pub struct ShapeEval {
    pub value: [f64; MAX_DEGREE + 1],
    pub deriv: [f64; MAX_DEGREE + 1],
    pub deriv2: [f64; MAX_DEGREE + 1],
}

pub fn shape_eval(degree: usize, xi: f64) -> ShapeEval {
    debug_assert!((1..=MAX_DEGREE).contains(&degree));
    let n = degree + 1;
    let mut xs = [0.0; MAX_DEGREE + 1];
    for (j, x) in xs.iter_mut().enumerate().take(n) {
        *x = j as f64 / degree as f64;
    }
    let mut out = ShapeEval {
        value: [0.0; MAX_DEGREE + 1],
        deriv: [0.0; MAX_DEGREE + 1],
        deriv2: [0.0; MAX_DEGREE + 1],
    };
    for j in 0..n {
        // value: prod_{i != j} (xi - x_i) / (x_j - x_i)
        let mut v = 1.0;
        for i in 0..n {
            if i != j {
                v *= (xi - xs[i]) / (xs[j] - xs[i]);
            }
        }
        out.value[j] = v;
        // first derivative
        let mut d = 0.0;
        for m in 0..n {
            if m == j {
                continue;
            }
            let mut term = 1.0 / (xs[j] - xs[m]);
            for i in 0..n {
                if i != j && i != m {
                    term *= (xi - xs[i]) / (xs[j] - xs[i]);
                }
            }
            d += term;
        }
        out.deriv[j] = d;
        // second derivative
        let mut d2 = 0.0;
        for m in 0..n {
            if m == j {
                continue;
            }
            for l in 0..n {
                if l == j || l == m {
                    continue;
                }
                let mut term = 1.0 / ((xs[j] - xs[m]) * (xs[j] - xs[l]));
                for i in 0..n {
                    if i != j && i != m && i != l {
                        term *= (xi - xs[i]) / (xs[j] - xs[i]);
                    }
                }
                d2 += term;
            }
        }
        out.deriv2[j] = d2;
    }
    out
}
