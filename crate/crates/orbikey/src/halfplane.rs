//! Geometry of the hyperbolic upper half-plane: the point-pair invariant,
//! distance, local charts around points and their boundary behaviour, and
//! the disk coordinate used for polar integration around a center.

use num_complex::Complex64;

/// Point-pair invariant u(z, w) = |z - w|^2 / (4 Im z Im w). Vanishes on the
/// diagonal and satisfies cosh d(z, w) = 1 + 2 u(z, w).
#[inline]
pub fn u_invariant(z: Complex64, w: Complex64) -> f64 {
    let d = z - w;
    d.norm_sqr() / (4.0 * z.im * w.im)
}

/// Hyperbolic distance via acosh(1 + 2u).
#[inline]
pub fn distance(z: Complex64, w: Complex64) -> f64 {
    let u = u_invariant(z, w);
    // acosh(1 + 2u) = ln(1 + 2u + 2 sqrt(u(1+u))), stable near the diagonal.
    (2.0 * u + 2.0 * (u * (1.0 + u)).sqrt()).ln_1p()
}

/// ln(1 + 1/u) without cancellation at either end of the range.
#[inline]
pub fn log1p_inv(u: f64) -> f64 {
    debug_assert!(u > 0.0);
    if u >= 1.0 {
        (1.0 / u).ln_1p()
    } else {
        u.ln_1p() - u.ln()
    }
}

/// Squared modulus form of the identity chart at a non-boundary point:
/// |theta_z(w)|^2 = |(w - z)/(w - conj z)|^2. Its negative log equals
/// ln(1 + 1/u(z, w)); both sides are exposed for the chart tests and for
/// metric regularisation near the diagonal.
#[inline]
pub fn log_theta_sq(z: Complex64, w: Complex64) -> f64 {
    let num = (w - z).norm_sqr();
    let den = (w - z.conj()).norm_sqr();
    (num / den).ln()
}

/// Conformal disk coordinate centered at z: xi in the unit disk maps to
/// w = (z - xi conj z)/(1 - xi), with u(z, w) = |xi|^2/(1 - |xi|^2).
#[inline]
pub fn from_disk(z: Complex64, xi: Complex64) -> Complex64 {
    (z - xi * z.conj()) / (Complex64::new(1.0, 0.0) - xi)
}

/// Inverse of `from_disk`: xi = (w - z)/(w - conj z).
#[inline]
pub fn to_disk(z: Complex64, w: Complex64) -> Complex64 {
    (w - z) / (w - z.conj())
}

/// Hyperbolic area density in the disk coordinate, per Euclidean area
/// element d(Re xi) d(Im xi): 4/(1 - |xi|^2)^2.
#[inline]
pub fn disk_density(xi: Complex64) -> f64 {
    let r2 = xi.norm_sqr();
    4.0 / ((1.0 - r2) * (1.0 - r2))
}

/// u as a function of the disk radius rho = |xi|.
#[inline]
pub fn u_of_disk_radius(rho: f64) -> f64 {
    rho * rho / (1.0 - rho * rho)
}

/// Disk radius realising a given u: inverse of `u_of_disk_radius`.
#[inline]
pub fn disk_radius_of_u(u: f64) -> f64 {
    (u / (1.0 + u)).sqrt()
}
