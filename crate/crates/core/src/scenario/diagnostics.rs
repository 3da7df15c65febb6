//! Run diagnostics: field amplitude, rate fitting, reference comparison.

use crate::error::{Error, Result};
use crate::field::FieldState;
use crate::quadrature::GaussRule;

/// Sampled diagnostic with strictly increasing times.
#[derive(Debug, Clone, Default)]
pub struct TimeSeries {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::domain("times and values must have equal length"));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::domain("times must be strictly increasing"));
        }
        Ok(TimeSeries { times, values })
    }

    pub fn push(&mut self, t: f64, v: f64) {
        assert!(
            self.times.last().is_none_or(|&last| t > last),
            "times must be strictly increasing"
        );
        self.times.push(t);
        self.values.push(v);
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Root-mean-square electric field `((1/L) \int E^2 dq)^{1/2}` with `E = -phi_h'`.
pub fn e_amplitude(field: &FieldState) -> f64 {
    let mesh = field.mesh();
    let rule = GaussRule::new(mesh.degree() + 1);
    let mut total = 0.0;
    for e in 0..mesh.n_elements() {
        let (xl, xr) = mesh.element_span(e);
        total += rule.integrate(xl, xr, |q| {
            let d = field.eval(q).dphi;
            d * d
        });
    }
    (total / mesh.length()).sqrt()
}

/// Least-squares slope of `ln(values)` against time inside `[t0, t1]`.
pub fn fit_rate(series: &TimeSeries, window: (f64, f64)) -> Result<f64> {
    let (t0, t1) = window;
    let eps = 1e-12 * (1.0 + t1.abs());
    let mut ts = Vec::new();
    let mut logs = Vec::new();
    for (&t, &v) in series.times().iter().zip(series.values()) {
        if t < t0 - eps || t > t1 + eps {
            continue;
        }
        if !(v > 0.0) {
            return Err(Error::domain(format!(
                "fit window contains a nonpositive value {v} at t = {t}"
            )));
        }
        ts.push(t);
        logs.push(v.ln());
    }
    if ts.len() < 10 {
        return Err(Error::domain(format!(
            "fit window [{t0}, {t1}] holds {} samples; need at least 10",
            ts.len()
        )));
    }
    let n = ts.len() as f64;
    let t_mean = ts.iter().sum::<f64>() / n;
    let l_mean = logs.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (&t, &l) in ts.iter().zip(&logs) {
        num += (t - t_mean) * (l - l_mean);
        den += (t - t_mean) * (t - t_mean);
    }
    Ok(num / den)
}

/// Periodic samples `values[i]` at `q = i L / n`, evaluated anywhere by
/// 4-point (cubic Lagrange) interpolation.
#[derive(Debug, Clone)]
pub struct GridField {
    length: f64,
    values: Vec<f64>,
}

impl GridField {
    pub fn new(length: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() < 4 {
            return Err(Error::domain("grid field needs at least 4 samples"));
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::domain(format!("length must be positive, got {length}")));
        }
        Ok(GridField { length, values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn eval(&self, q: f64) -> f64 {
        let n = self.values.len();
        let x = (q / self.length * n as f64).rem_euclid(n as f64);
        let i0 = x.floor() as usize % n;
        let t = x - x.floor();
        let f = |off: isize| -> f64 {
            let idx = (i0 as isize + off).rem_euclid(n as isize) as usize;
            self.values[idx]
        };
        let wm1 = -t * (t - 1.0) * (t - 2.0) / 6.0;
        let w0 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
        let w1 = -(t + 1.0) * t * (t - 2.0) / 2.0;
        let w2 = (t + 1.0) * t * (t - 1.0) / 6.0;
        wm1 * f(-1) + w0 * f(0) + w1 * f(1) + w2 * f(2)
    }

    pub fn rms(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() / self.values.len() as f64).sqrt()
    }
}

/// `|| E_num - E_ref ||_{L2} / || E_ref ||_{L2}` with both norms on the same
/// per-element Gauss points; `E_num = -phi_h'` and `E_ref` interpolated
/// cubically from the reference grid.
pub fn relative_e_error(
    field: &FieldState,
    reference: &GridField,
    quad_per_element: usize,
) -> Result<f64> {
    let mesh = field.mesh();
    if (mesh.length() - reference.length()).abs() > 1e-12 * mesh.length() {
        return Err(Error::domain("field and reference cover different domains"));
    }
    let rule = GaussRule::new(quad_per_element.max(mesh.degree() + 2));
    let mut num = 0.0;
    let mut den = 0.0;
    for e in 0..mesh.n_elements() {
        let (xl, xr) = mesh.element_span(e);
        let span = xr - xl;
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            let q = xl + span * x;
            let e_num = -field.eval(q).dphi;
            let e_ref = reference.eval(q);
            num += w * span * (e_num - e_ref) * (e_num - e_ref);
            den += w * span * e_ref * e_ref;
        }
    }
    if den <= 0.0 {
        return Err(Error::domain("reference field is identically zero"));
    }
    Ok((num / den).sqrt())
}
