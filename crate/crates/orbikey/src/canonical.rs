//! Canonical metric data: holomorphic-form evaluation and derived
//! densities. This first slice carries the eta function, used across
//! modules as a closed-form reference object.

use num_complex::Complex64;
use std::f64::consts::PI;

/// Dedekind eta: q^{1/24} prod_{n>=1} (1 - q^n) with q = e^{2 pi i z}.
/// Direct product; callers should hand in points with Im z bounded away
/// from zero (reduce first), where a handful of factors reach the double
/// floor.
pub fn dedekind_eta(z: Complex64) -> Complex64 {
    assert!(z.im > 0.0);
    let i = Complex64::new(0.0, 1.0);
    let q = (2.0 * PI * i * z).exp();
    let mut qn = Complex64::new(1.0, 0.0);
    let mut product = Complex64::new(1.0, 0.0);
    for _ in 0..2000 {
        qn *= q;
        product *= 1.0 - qn;
        if qn.norm() < 1e-18 {
            break;
        }
    }
    (PI * i * z / 12.0).exp() * product
}
