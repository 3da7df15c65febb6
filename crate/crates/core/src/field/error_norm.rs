//! L2 distance between a solved field and a reference function.

use crate::quadrature::GaussRule;

use super::poisson::FieldState;

/// `|| phi_h - exact ||_{L2(0, L)}` by per-element Gauss quadrature.
///
/// `quad_per_element` must be at least `degree + 3`. Quadrature intervals are
/// additionally split at each entry of `breaks` (source positions), so a
/// jump in the reference solution never sits inside a quadrature panel.
pub fn l2_error(
    state: &FieldState,
    exact: impl Fn(f64) -> f64,
    quad_per_element: usize,
    breaks: &[f64],
) -> f64 {
    let mesh = state.mesh();
    assert!(
        quad_per_element >= mesh.degree() + 3,
        "need at least degree + 3 quadrature points per element"
    );
    let rule = GaussRule::new(quad_per_element);
    let mut total = 0.0;
    for e in 0..mesh.n_elements() {
        let (xl, xr) = mesh.element_span(e);
        let mut cuts = vec![xl];
        for &b in breaks {
            if b > xl && b < xr {
                cuts.push(b);
            }
        }
        cuts.push(xr);
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for w in cuts.windows(2) {
            total += rule.integrate(w[0], w[1], |q| {
                let d = state.eval(q).phi - exact(q);
                d * d
            });
        }
    }
    total.sqrt()
}
