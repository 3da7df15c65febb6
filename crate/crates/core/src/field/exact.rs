//! Closed-form periodic potential of one monopole-dipole source.

use crate::domain::min_image;

/// Zero-mean solution of `-phi'' = psi* delta(q - Q) + p* delta'(q - Q) - n0`
/// on the circle of circumference `length`, with `n0 = psi* / length`.
///
/// With `r = min_image(q - Q)` the potential is
///
/// ```text
/// phi(q) = psi* [ r^2/(2L) - |r|/2 + L/12 ] + p* [ r/L - sgn(r)/2 ]
/// ```
///
/// using `sgn(0) = 0`. Across the source it jumps by `-p*` and its gradient
/// jumps by `-psi*`.
pub fn exact_single_source(psi_star: f64, p_star: f64, length: f64, source_q: f64, q: f64) -> f64 {
    let r = min_image(q - source_q, length).expect("length must be positive and finite");
    let sgn = if r > 0.0 {
        1.0
    } else if r < 0.0 {
        -1.0
    } else {
        0.0
    };
    psi_star * (r * r / (2.0 * length) - r.abs() / 2.0 + length / 12.0)
        + p_star * (r / length - 0.5 * sgn)
}
