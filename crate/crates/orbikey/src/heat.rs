//! Heat kernels: the rotation-invariant kernel of the hyperbolic plane,
//! its time integrals and tails, fixed-time radial profiles, and windowed
//! sums over a congruence group.
//!
//! The free kernel is evaluated through its integral representation
//!   K(t; u) = 4 e^{-t/4} (4 pi t)^{-3/2} Int_0^infty h(u + w^2) dw,
//! where h(x) = (rho/sinh rho) e^{-rho^2/(4t)} and rho(x) is the distance
//! with cosh rho = 1 + 2x. Substituting rho in the integral recovers the
//! classical descent formula, so this form is exact, and the integrand is
//! smooth and positive.

use num_complex::Complex64;

use crate::fuchsian::{enumerate, Gamma0};
use crate::halfplane;
use crate::numeric::{quad, Chebyshev};

/// Distance squared as a function of the point-pair invariant:
/// rho(u) = arcsinh(2 sqrt(u + u^2)), returned as q = rho^2.
#[inline]
pub fn q_of_u(u: f64) -> f64 {
    let s = 2.0 * (u * (1.0 + u)).sqrt();
    let rho = s.asinh();
    rho * rho
}

/// Inverse map: u = sinh^2(rho/2) at rho = sqrt(q).
#[inline]
pub fn u_of_q(q: f64) -> f64 {
    let s = (0.5 * q.sqrt()).sinh();
    s * s
}

/// rho / sinh rho at the distance belonging to x, using
/// sinh rho = 2 sqrt(x + x^2) exactly; series fallback near zero.
#[inline]
fn distance_ratio(x: f64) -> f64 {
    let s = 2.0 * (x * (1.0 + x)).sqrt();
    if s < 1e-6 {
        // arcsinh(s)/s = 1 - s^2/6 + 3 s^4/40 - ...
        1.0 - s * s / 6.0
    } else {
        s.asinh() / s
    }
}

/// Free hyperbolic heat kernel at time t and point-pair invariant u.
///
/// The integral over w runs on geometrically growing panels out to the
/// radius where the exponent has dropped by 4t * 40 below its peak; the
/// integrand is smooth and unimodal, so fixed Gauss-Legendre panels reach
/// full precision deterministically.
pub fn free_kernel(t: f64, u: f64) -> f64 {
    assert!(t > 0.0 && u >= 0.0);
    let q0 = q_of_u(u);
    if q0 / (4.0 * t) > 700.0 {
        return 0.0;
    }
    let integrand = |w: f64| {
        let x = u + w * w;
        let q = q_of_u(x);
        distance_ratio(x) * (-(q - q0) / (4.0 * t)).exp()
    };
    // Cutoff: q(u + W^2) = q0 + 160 t, i.e. a decay factor below 1e-17.
    let q_max = q0 + 160.0 * t;
    let x_max = u_of_q(q_max);
    let w_max = (x_max - u).sqrt();
    let mut acc = crate::numeric::Accumulator::new();
    let mut lo = 0.0f64;
    let mut hi = t.sqrt().min(w_max);
    loop {
        acc.add(quad::gauss(24, lo, hi, &integrand));
        if hi >= w_max {
            break;
        }
        lo = hi;
        hi = (2.0 * hi).min(w_max);
    }
    let pref = 4.0 * (-t / 4.0 - q0 / (4.0 * t)).exp()
        / (4.0 * std::f64::consts::PI * t).powf(1.5);
    pref * acc.value()
}

/// Closed form of the full time integral of the free kernel:
/// Int_0^infty K(t; u) dt = ln(1 + 1/u) / (4 pi).
#[inline]
pub fn free_kernel_time_integral(u: f64) -> f64 {
    halfplane::log1p_inv(u) / (4.0 * std::f64::consts::PI)
}

/// Tail of the time integral from t0: Int_{t0}^infty K(t; u) dt. Smooth in
/// u across the diagonal (the singularity of the full integral lives
/// entirely in the small-time part).
pub fn free_kernel_tail(t0: f64, u: f64) -> f64 {
    assert!(t0 > 0.0);
    quad::adaptive_to_infinity(t0, 4.0, 3e-14, |t| free_kernel(t, u))
}

/// Resolvent-weighted tail: Int_{t0}^infty e^{-sigma t} K(t; u) dt.
pub fn free_kernel_weighted_tail(t0: f64, sigma: f64, u: f64) -> f64 {
    assert!(t0 > 0.0 && sigma >= 0.0);
    let window = 4.0 / (1.0 + sigma);
    quad::adaptive_to_infinity(t0, window, 3e-14, |t| (-sigma * t).exp() * free_kernel(t, u))
}

/// Window defect of the resolvent weight:
/// Int_0^{t0} (1 - e^{-sigma t}) K(t; u) dt. The integrand extends
/// continuously by sigma/(4 pi) to the corner t -> 0 on the diagonal, so
/// the integral is regular for every u >= 0.
pub fn resolvent_window_defect(t0: f64, sigma: f64, u: f64) -> f64 {
    assert!(t0 > 0.0 && sigma >= 0.0);
    if sigma == 0.0 {
        return 0.0;
    }
    quad::adaptive(1e-12, t0, 3e-14, |t| {
        (-(-sigma * t).exp_m1()) * free_kernel(t, u)
    })
}

/// Radius such that the kernel at time t has decayed below eps relative to
/// its diagonal value: q_max = 4 t ln(1/eps), reported as a u-cutoff.
pub fn u_cutoff(t: f64, eps: f64) -> f64 {
    assert!(eps > 0.0 && eps < 1.0);
    u_of_q(4.0 * t * (1.0 / eps).ln())
}

/// Fixed-time radial profile: Chebyshev interpolant of the kernel in the
/// squared-distance variable, for fast repeated evaluation in group sums.
pub struct KernelProfile {
    pub t: f64,
    q_max: f64,
    cheb: Chebyshev,
}

impl KernelProfile {
    pub fn build(t: f64, eps: f64) -> Self {
        let q_max = 4.0 * t * (1.0 / eps).ln();
        // The kernel in q decays like e^{-q/4t}; degree follows the range
        // of the exponent with comfortable margin.
        let n = 80;
        let cheb = Chebyshev::fit(0.0, q_max, n, |q| free_kernel(t, u_of_q(q.max(0.0))));
        Self { t, q_max, cheb }
    }

    #[inline]
    pub fn eval_u(&self, u: f64) -> f64 {
        let q = q_of_u(u);
        if q >= self.q_max {
            0.0
        } else {
            self.cheb.eval(q)
        }
    }

    pub fn u_max(&self) -> f64 {
        u_of_q(self.q_max)
    }

    pub fn fit_quality(&self) -> f64 {
        self.cheb.tail_bound(4)
    }
}

/// Heat kernel of the quotient as a lattice sum over the group within the
/// profile's window: sum_gamma K(t; u(z, gamma w)). Exact up to the profile
/// cutoff; valid as stated for times where the window stays affordable.
pub fn automorphic_kernel_windowed(
    group: &Gamma0,
    profile: &KernelProfile,
    z: Complex64,
    w: Complex64,
) -> f64 {
    enumerate::fold_ball(
        group,
        z,
        w,
        profile.u_max(),
        crate::numeric::Accumulator::new,
        |acc, term| acc.add(profile.eval_u(term.u)),
        |mut a, b| {
            a.merge(&b);
            a
        },
    )
    .value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn time_integral_identity() {
        // Quadrature of the kernel in t against the closed form; the
        // integrand vanishes to all orders at t -> 0 for u > 0, so starting
        // the quadrature near zero loses nothing.
        for &u in &[0.1, 1.0, 5.0] {
            let direct = quad::adaptive(1e-4, 2.0, 1e-13, |t| free_kernel(t, u))
                + free_kernel_tail(2.0, u);
            assert_relative_eq!(direct, free_kernel_time_integral(u), max_relative = 1e-10);
        }
    }

    #[test]
    fn normalisation_on_the_plane() {
        // Int_H K dmu = 1 in polar coordinates: Int_0^infty K 2 pi sinh(rho) drho.
        for &t in &[0.1f64, 1.0] {
            let total = quad::adaptive_to_infinity(0.0, (4.0 * t).sqrt(), 1e-13, |rho| {
                let u = u_of_q(rho * rho);
                free_kernel(t, u) * 2.0 * std::f64::consts::PI * rho.sinh()
            });
            assert_relative_eq!(total, 1.0, max_relative = 1e-9);
        }
    }

    #[test]
    fn satisfies_radial_heat_equation() {
        // d/dt K = -(Laplacian K); radially the operator is
        // -(d^2/drho^2 + coth(rho) d/drho). Finite differences with
        // Richardson refinement give plenty of accuracy to certify.
        let (t, rho) = (0.7, 1.3);
        let k = |t: f64, rho: f64| free_kernel(t, u_of_q(rho * rho));
        let h = 5e-3;
        let d_t = (8.0 * (k(t + h, rho) - k(t - h, rho))
            - (k(t + 2.0 * h, rho) - k(t - 2.0 * h, rho)))
            / (12.0 * h);
        let d_rho = (8.0 * (k(t, rho + h) - k(t, rho - h))
            - (k(t, rho + 2.0 * h) - k(t, rho - 2.0 * h)))
            / (12.0 * h);
        let d_rho2 = (-30.0 * k(t, rho) + 16.0 * (k(t, rho + h) + k(t, rho - h))
            - (k(t, rho + 2.0 * h) + k(t, rho - 2.0 * h)))
            / (12.0 * h * h);
        // Positive Laplacian: Delta = -(d^2/drho^2 + coth(rho) d/drho).
        let residual = d_t - d_rho2 - d_rho / rho.tanh();
        assert!(
            residual.abs() < 1e-7 * d_t.abs(),
            "heat-equation residual {residual:.3e} against scale {:.3e}",
            d_t.abs()
        );
    }

    #[test]
    fn small_time_diagonal_asymptotics() {
        // K(t; 0) ~ 1/(4 pi t) as t -> 0.
        for &t in &[0.01, 0.001] {
            let k = free_kernel(t, 0.0);
            let leading = 1.0 / (4.0 * std::f64::consts::PI * t);
            assert!((k / leading - 1.0).abs() < 2.0 * t);
        }
    }

    #[test]
    fn tail_splits_consistently() {
        let u = 0.4;
        let whole = free_kernel_tail(0.5, u);
        let split = quad::adaptive(0.5, 3.0, 1e-14, |t| free_kernel(t, u)) + free_kernel_tail(3.0, u);
        assert_relative_eq!(whole, split, max_relative = 1e-10);
    }

    #[test]
    fn weighted_tail_matches_unweighted_at_zero() {
        let u = 1.3;
        assert_relative_eq!(
            free_kernel_weighted_tail(1.0, 0.0, u),
            free_kernel_tail(1.0, u),
            max_relative = 1e-12
        );
        // And decreases in sigma.
        let a = free_kernel_weighted_tail(1.0, 0.3, u);
        let b = free_kernel_weighted_tail(1.0, 1.0, u);
        assert!(a > b && b > 0.0);
    }

    #[test]
    fn resolvent_defect_cross_check() {
        // Direct quadrature against the definition at positive u, where the
        // integrand vanishes at t -> 0 and nothing is delicate.
        let (t0, sigma, u) = (1.5, 0.75, 0.8);
        let direct = quad::adaptive(1e-10, t0, 1e-15, |t| {
            (1.0 - (-sigma * t).exp()) * free_kernel(t, u)
        });
        assert_relative_eq!(
            resolvent_window_defect(t0, sigma, u),
            direct,
            max_relative = 1e-9
        );
        assert_eq!(resolvent_window_defect(t0, 0.0, u), 0.0);
    }

    #[test]
    fn profile_matches_direct_kernel() {
        let t = 0.8;
        let profile = KernelProfile::build(t, 1e-14);
        assert!(profile.fit_quality() < 1e-13);
        // Interpolation error is absolute over the fit interval, so compare
        // against the kernel's peak value, which is what group sums add up.
        let peak = free_kernel(t, 0.0);
        for &u in &[0.0, 0.03, 0.7, 4.0, 30.0] {
            if u < profile.u_max() {
                let direct = free_kernel(t, u);
                let interp = profile.eval_u(u);
                assert!(
                    (direct - interp).abs() <= 1e-12 * peak,
                    "u = {u}: {direct:.16e} vs {interp:.16e}"
                );
            }
        }
    }

    #[test]
    fn windowed_sum_is_invariant_and_symmetric() {
        let group = Gamma0::new(11).unwrap();
        let profile = KernelProfile::build(0.6, 1e-12);
        let z = Complex64::new(0.23, 0.85);
        let w = Complex64::new(-0.4, 1.6);
        let base = automorphic_kernel_windowed(&group, &profile, z, w);
        assert!(base > 0.0);
        let gamma = crate::fuchsian::GroupElement::new(1, 0, 11, 1);
        let moved = automorphic_kernel_windowed(&group, &profile, gamma.apply(z), gamma.apply(w));
        assert_relative_eq!(base, moved, max_relative = 1e-11);
        let swapped = automorphic_kernel_windowed(&group, &profile, w, z);
        assert_relative_eq!(base, swapped, max_relative = 1e-11);
    }

    #[test]
    fn windowed_sum_dominates_free_kernel() {
        // The group sum includes the identity term plus positive terms.
        let group = Gamma0::new(11).unwrap();
        let t = 0.5;
        let profile = KernelProfile::build(t, 1e-12);
        let z = Complex64::new(0.1, 1.1);
        let w = Complex64::new(0.2, 1.2);
        let total = automorphic_kernel_windowed(&group, &profile, z, w);
        let direct = free_kernel(t, halfplane::u_invariant(z, w));
        assert!(total > direct);
        assert!(total < direct + 1.0);
    }
}
