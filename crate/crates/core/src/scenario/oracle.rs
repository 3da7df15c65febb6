//! Grid-based Vlasov reference solution by Strang-split semi-Lagrangian
//! advection with periodic cubic interpolation in `q`, cubic interpolation
//! with zero inflow in `p`, and the shared FEM pipeline for the field solve.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{PeriodicMesh, StiffnessSystem};

use super::diagnostics::GridField;

/// Distribution samples on a uniform `[0, L) x [-p_max, p_max]` grid.
///
/// `q` is node-based and periodic with `n_q` columns; `p` is node-based with
/// `n_p` rows including both endpoints. Values are clipped nonnegative after
/// every interpolation sweep.
#[derive(Debug, Clone)]
pub struct PhaseGrid {
    pub length: f64,
    pub n_q: usize,
    pub n_p: usize,
    pub p_max: f64,
    /// Row-major in `q`: `f[iq * n_p + ip]`.
    f: Vec<f64>,
}

impl PhaseGrid {
    pub fn from_fn(
        length: f64,
        n_q: usize,
        n_p: usize,
        p_max: f64,
        f0: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        if n_q < 8 || n_p < 8 {
            return Err(Error::domain("phase grid needs at least 8 points per axis"));
        }
        if !(length > 0.0) || !(p_max > 0.0) {
            return Err(Error::domain("phase grid extents must be positive"));
        }
        let dq = length / n_q as f64;
        let dp = 2.0 * p_max / (n_p - 1) as f64;
        let mut f = vec![0.0; n_q * n_p];
        for iq in 0..n_q {
            let q = iq as f64 * dq;
            for ip in 0..n_p {
                let p = -p_max + ip as f64 * dp;
                f[iq * n_p + ip] = f0(q, p).max(0.0);
            }
        }
        Ok(PhaseGrid { length, n_q, n_p, p_max, f })
    }

    pub fn dq(&self) -> f64 {
        self.length / self.n_q as f64
    }

    pub fn dp(&self) -> f64 {
        2.0 * self.p_max / (self.n_p - 1) as f64
    }

    pub fn value(&self, iq: usize, ip: usize) -> f64 {
        self.f[iq * self.n_p + ip]
    }

    /// Total phase-space mass (trapezoidal in `p`, exact in periodic `q`).
    pub fn mass(&self) -> f64 {
        self.density().iter().sum::<f64>() * self.dq()
    }

    /// `rho(q_i) = \int f dp` by the trapezoidal rule.
    pub fn density(&self) -> Vec<f64> {
        let dp = self.dp();
        (0..self.n_q)
            .map(|iq| {
                let row = &self.f[iq * self.n_p..(iq + 1) * self.n_p];
                let interior: f64 = row[1..self.n_p - 1].iter().sum();
                (interior + 0.5 * (row[0] + row[self.n_p - 1])) * dp
            })
            .collect()
    }

    /// Shifts every `p` row by `p dt` in `q` (periodic cubic Lagrange).
    fn advect_q(&mut self, dt: f64) {
        let n_q = self.n_q as isize;
        let dq = self.dq();
        let mut column = vec![0.0; self.n_q];
        let mut shifted = vec![0.0; self.n_q];
        for ip in 0..self.n_p {
            let p = -self.p_max + ip as f64 * self.dp();
            for iq in 0..self.n_q {
                column[iq] = self.f[iq * self.n_p + ip];
            }
            // sample at q_i - p dt
            let offset = p * dt / dq;
            let base = (-offset).floor();
            let t = -offset - base;
            let (wm1, w0, w1, w2) = cubic_weights(t);
            let base = base as isize;
            for iq in 0..self.n_q {
                let i = iq as isize + base;
                let fm1 = column[(i - 1).rem_euclid(n_q) as usize];
                let f0 = column[i.rem_euclid(n_q) as usize];
                let f1 = column[(i + 1).rem_euclid(n_q) as usize];
                let f2 = column[(i + 2).rem_euclid(n_q) as usize];
                shifted[iq] = (wm1 * fm1 + w0 * f0 + w1 * f1 + w2 * f2).max(0.0);
            }
            for iq in 0..self.n_q {
                self.f[iq * self.n_p + ip] = shifted[iq];
            }
        }
    }

    /// Shifts each `q` column by `E(q) dt` in `p`; outside the band `f = 0`.
    fn kick_p(&mut self, e_nodes: &[f64], dt: f64) {
        assert_eq!(e_nodes.len(), self.n_q);
        let dp = self.dp();
        let n_p = self.n_p as isize;
        let mut row = vec![0.0; self.n_p];
        for iq in 0..self.n_q {
            let offset = e_nodes[iq] * dt / dp;
            let base = (-offset).floor();
            let t = -offset - base;
            let (wm1, w0, w1, w2) = cubic_weights(t);
            let base = base as isize;
            row.copy_from_slice(&self.f[iq * self.n_p..(iq + 1) * self.n_p]);
            let fetch = |i: isize| -> f64 {
                if i < 0 || i >= n_p {
                    0.0
                } else {
                    row[i as usize]
                }
            };
            for ip in 0..self.n_p {
                let i = ip as isize + base;
                let v = wm1 * fetch(i - 1) + w0 * fetch(i) + w1 * fetch(i + 1)
                    + w2 * fetch(i + 2);
                self.f[iq * self.n_p + ip] = v.max(0.0);
            }
        }
    }
}

#[inline]
fn cubic_weights(t: f64) -> (f64, f64, f64, f64) {
    (
        -t * (t - 1.0) * (t - 2.0) / 6.0,
        (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
        -(t + 1.0) * t * (t - 2.0) / 2.0,
        (t + 1.0) * t * (t - 1.0) / 6.0,
    )
}

/// Semi-Lagrangian stepper owning a grid and its matching field solver.
pub struct SlOracle {
    grid: PhaseGrid,
    sys: StiffnessSystem,
    initial_mass: f64,
}

impl SlOracle {
    pub fn new(grid: PhaseGrid) -> Result<Self> {
        let mesh = Arc::new(PeriodicMesh::uniform(grid.length, grid.n_q, 1)?);
        let sys = StiffnessSystem::assemble(mesh)?;
        let initial_mass = grid.mass();
        Ok(SlOracle { grid, sys, initial_mass })
    }

    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    /// Electric field at the grid nodes from the current density.
    ///
    /// The rectangle-rule projection of `rho` onto the nodal degree-1 basis
    /// is `b_j = dq rho_j`; the solve subtracts the neutralizing background.
    /// `E` at a node is the average of the two one-sided slopes of `phi_h`,
    /// i.e. a centered difference of the coefficients.
    pub fn e_field(&self) -> Result<Vec<f64>> {
        let dq = self.grid.dq();
        let b: Vec<f64> = self.grid.density().iter().map(|r| r * dq).collect();
        let state = self.sys.solve_potential(&b)?;
        let phi = state.coefficients();
        let n = phi.len();
        Ok((0..n)
            .map(|i| -(phi[(i + 1) % n] - phi[(i + n - 1) % n]) / (2.0 * dq))
            .collect())
    }

    pub fn e_amplitude(&self) -> Result<f64> {
        let e = self.e_field()?;
        Ok((e.iter().map(|v| v * v).sum::<f64>() / e.len() as f64).sqrt())
    }

    pub fn e_grid_field(&self) -> Result<GridField> {
        GridField::new(self.grid.length, self.e_field()?)
    }

    /// One Strang-split step; errors out if a single step moves the total
    /// mass by more than 0.1% of the initial mass.
    pub fn step(&mut self, dt: f64) -> Result<()> {
        let before = self.grid.mass();
        self.grid.advect_q(0.5 * dt);
        let e = self.e_field()?;
        self.grid.kick_p(&e, dt);
        self.grid.advect_q(0.5 * dt);
        let after = self.grid.mass();
        if (after - before).abs() > 1e-3 * self.initial_mass {
            return Err(Error::OracleIntegrity(format!(
                "mass moved by {:.3e} in one step (initial mass {:.3e})",
                after - before,
                self.initial_mass
            )));
        }
        Ok(())
    }
}
