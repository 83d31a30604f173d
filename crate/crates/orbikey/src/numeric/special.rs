//! Special functions on complex arguments: Gamma via Lanczos, the Riemann
//! zeta and completed zeta via Euler-Maclaurin, and modified Bessel K of
//! complex order through its cosh-integral representation. Everything here
//! is needed on domains where no real-only shortcut applies.

use num_complex::Complex64;

use super::chebyshev::Chebyshev;
use super::quad;

/// Bernoulli numbers B_2, B_4, ..., B_28 as exact rational quotients.
pub const BERNOULLI_EVEN: [f64; 14] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
];

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
];

/// Complex Gamma function, Lanczos approximation with reflection for
/// Re z < 1/2. Relative accuracy around 1e-13 on moderate arguments.
pub fn gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // Reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z).
        let pi = std::f64::consts::PI;
        return pi / ((pi * z).sin() * gamma(Complex64::new(1.0, 0.0) - z));
    }
    let zm = z - 1.0;
    let mut acc = Complex64::new(LANCZOS_COEFFS[0], 0.0);
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (zm + i as f64);
    }
    let t = zm + LANCZOS_G + 0.5;
    let sqrt_two_pi = (2.0 * std::f64::consts::PI).sqrt();
    sqrt_two_pi * t.powc(zm + 0.5) * (-t).exp() * acc
}

/// Riemann zeta for complex s away from s = 1, by Euler-Maclaurin with a
/// height-dependent cutoff. Covers Re s > -20 at full double accuracy for
/// the argument heights used here (|Im s| up to a few hundred).
pub fn zeta(s: Complex64) -> Complex64 {
    assert!(
        (s - 1.0).norm() > 1e-12,
        "zeta pole at s = 1 must be handled by the caller"
    );
    let cutoff = 16 + (1.3 * s.im.abs()) as usize;
    let n = cutoff as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 1..cutoff {
        sum += (-s * (k as f64).ln()).exp();
    }
    let n_pow = (-s * n.ln()).exp();
    sum += n_pow * n / (s - 1.0);
    sum += 0.5 * n_pow;
    // Correction terms B_{2k}/(2k)! * s (s+1) ... (s+2k-2) * n^{-s-2k+1}.
    let mut poch = s;
    let mut factorial = 1.0;
    for (k, &b) in BERNOULLI_EVEN.iter().enumerate() {
        let m = 2 * (k + 1);
        factorial *= ((m - 1) * m) as f64;
        let term = b / factorial * poch * n_pow * n.powi(1 - m as i32);
        sum += term;
        poch *= (s + (m - 1) as f64) * (s + m as f64);
    }
    sum
}

/// Completed zeta xi(s) = pi^{-s/2} Gamma(s/2) zeta(s), satisfying
/// xi(s) = xi(1-s).
pub fn xi(s: Complex64) -> Complex64 {
    let pi = std::f64::consts::PI;
    (-s / 2.0 * pi.ln()).exp() * gamma(s / 2.0) * zeta(s)
}

fn cosh_complex(z: Complex64) -> Complex64 {
    ((z).exp() + (-z).exp()) * 0.5
}

/// Scaled modified Bessel integrand cutoff: smallest U with
/// x (cosh U - 1) - |Re nu| U comfortably past the double-precision floor.
fn bessel_cutoff(x: f64, nu_re_abs: f64) -> f64 {
    let mut u = 5.0f64;
    for _ in 0..5 {
        u = ((46.0 + nu_re_abs * u) / x + 1.0).acosh();
    }
    u
}

/// e^x K_nu(x) for complex order and real x > 0, by adaptive quadrature of
/// the cosh-integral representation.
pub fn bessel_k_scaled(nu: Complex64, x: f64) -> Complex64 {
    assert!(x > 0.0);
    let u_max = bessel_cutoff(x, nu.re.abs());
    let re = quad::adaptive(0.0, u_max, 1e-14, |u| {
        (x * (1.0 - u.cosh())).exp() * cosh_complex(nu * u).re
    });
    let im = quad::adaptive(0.0, u_max, 1e-14, |u| {
        (x * (1.0 - u.cosh())).exp() * cosh_complex(nu * u).im
    });
    Complex64::new(re, im)
}

/// e^x K_nu'(x): derivative in x of K, same scaling.
pub fn bessel_k_deriv_scaled(nu: Complex64, x: f64) -> Complex64 {
    assert!(x > 0.0);
    let u_max = bessel_cutoff(x, nu.re.abs());
    let re = quad::adaptive(0.0, u_max, 1e-14, |u| {
        -u.cosh() * (x * (1.0 - u.cosh())).exp() * cosh_complex(nu * u).re
    });
    let im = quad::adaptive(0.0, u_max, 1e-14, |u| {
        -u.cosh() * (x * (1.0 - u.cosh())).exp() * cosh_complex(nu * u).im
    });
    Complex64::new(re, im)
}

/// Chebyshev line cache for K_nu and K_nu' at fixed order over an x-range,
/// fitted in log x on the scaled functions e^x K. Repeated Fourier-series
/// evaluations hit this instead of re-integrating.
pub struct ScaledKBessel {
    pub nu: Complex64,
    x_min: f64,
    x_max: f64,
    k_re: Chebyshev,
    k_im: Chebyshev,
    kp_re: Chebyshev,
    kp_im: Chebyshev,
}

impl ScaledKBessel {
    pub fn new(nu: Complex64, x_min: f64, x_max: f64, n: usize) -> Self {
        let (t0, t1) = (x_min.ln(), x_max.ln());
        let k_re = Chebyshev::fit(t0, t1, n, |t| bessel_k_scaled(nu, t.exp()).re);
        let k_im = Chebyshev::fit(t0, t1, n, |t| bessel_k_scaled(nu, t.exp()).im);
        let kp_re = Chebyshev::fit(t0, t1, n, |t| bessel_k_deriv_scaled(nu, t.exp()).re);
        let kp_im = Chebyshev::fit(t0, t1, n, |t| bessel_k_deriv_scaled(nu, t.exp()).im);
        Self {
            nu,
            x_min,
            x_max,
            k_re,
            k_im,
            kp_re,
            kp_im,
        }
    }

    /// K_nu(x), unscaled. Beyond x_max the value is below the double floor
    /// and reported as zero; below x_min falls back to direct integration.
    pub fn k(&self, x: f64) -> Complex64 {
        if x > self.x_max {
            return Complex64::new(0.0, 0.0);
        }
        if x < self.x_min {
            return bessel_k_scaled(self.nu, x) * (-x).exp();
        }
        let t = x.ln();
        Complex64::new(self.k_re.eval(t), self.k_im.eval(t)) * (-x).exp()
    }

    /// K_nu'(x), unscaled.
    pub fn k_deriv(&self, x: f64) -> Complex64 {
        if x > self.x_max {
            return Complex64::new(0.0, 0.0);
        }
        if x < self.x_min {
            return bessel_k_deriv_scaled(self.nu, x) * (-x).exp();
        }
        let t = x.ln();
        Complex64::new(self.kp_re.eval(t), self.kp_im.eval(t)) * (-x).exp()
    }

    /// Interpolation quality proxy: largest trailing coefficient over the
    /// four fitted series.
    pub fn tail_bound(&self) -> f64 {
        self.k_re
            .tail_bound(4)
            .max(self.k_im.tail_bound(4))
            .max(self.kp_re.tail_bound(4))
            .max(self.kp_im.tail_bound(4))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn gamma_half_integers() {
        let pi = std::f64::consts::PI;
        assert_relative_eq!(gamma(c(0.5, 0.0)).re, pi.sqrt(), max_relative = 1e-13);
        assert_relative_eq!(gamma(c(5.0, 0.0)).re, 24.0, max_relative = 1e-13);
        // Gamma(3/2) = sqrt(pi)/2.
        assert_relative_eq!(gamma(c(1.5, 0.0)).re, 0.5 * pi.sqrt(), max_relative = 1e-13);
    }

    #[test]
    fn gamma_modulus_identity_on_vertical_line() {
        // |Gamma(1 + i t)|^2 = pi t / sinh(pi t).
        let pi = std::f64::consts::PI;
        for &t in &[0.5, 1.0, 3.0, 8.0] {
            let g = gamma(c(1.0, t));
            assert_relative_eq!(g.norm_sqr(), pi * t / (pi * t).sinh(), max_relative = 1e-12);
        }
    }

    #[test]
    fn gamma_recurrence() {
        for &(re, im) in &[(0.3, 2.0), (1.7, -4.0), (-1.3, 0.7), (2.5, 11.0)] {
            let z = c(re, im);
            let lhs = gamma(z + 1.0);
            let rhs = z * gamma(z);
            assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm());
        }
    }

    #[test]
    fn zeta_even_integers() {
        let pi = std::f64::consts::PI;
        assert_relative_eq!(zeta(c(2.0, 0.0)).re, pi * pi / 6.0, max_relative = 1e-13);
        assert_relative_eq!(zeta(c(4.0, 0.0)).re, pi.powi(4) / 90.0, max_relative = 1e-13);
        assert_relative_eq!(zeta(c(6.0, 0.0)).re, pi.powi(6) / 945.0, max_relative = 1e-13);
    }

    #[test]
    fn zeta_functional_equation() {
        // zeta(s) = 2^s pi^{s-1} sin(pi s/2) Gamma(1-s) zeta(1-s), exercised
        // at complex points; checks zeta and gamma jointly.
        let pi = std::f64::consts::PI;
        for &(re, im) in &[(0.5, 14.0), (-1.5, 3.0), (0.0, -2.0), (2.0, 5.0)] {
            let s = c(re, im);
            let lhs = zeta(s);
            let rhs = (s * (2.0f64).ln()).exp()
                * ((s - 1.0) * pi.ln()).exp()
                * (pi * s / 2.0).sin()
                * gamma(1.0 - s)
                * zeta(1.0 - s);
            assert!(
                (lhs - rhs).norm() <= 1e-11 * lhs.norm().max(1.0),
                "functional equation mismatch at {s}: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn xi_symmetry() {
        for &(re, im) in &[(0.3, 1.7), (0.5, 6.0), (-0.2, 0.9), (1.0, 16.0)] {
            let s = c(re, im);
            let a = xi(s);
            let b = xi(1.0 - s);
            assert!((a - b).norm() <= 1e-11 * a.norm());
        }
    }

    #[test]
    fn bessel_half_order_closed_form() {
        // K_{1/2}(x) = sqrt(pi/(2x)) e^{-x}; scaled form drops the e^{-x}.
        let pi = std::f64::consts::PI;
        for &x in &[0.3, 1.0, 4.0, 20.0, 100.0] {
            let v = bessel_k_scaled(c(0.5, 0.0), x);
            assert_relative_eq!(v.re, (pi / (2.0 * x)).sqrt(), max_relative = 1e-12);
            assert!(v.im.abs() < 1e-14);
        }
    }

    #[test]
    fn bessel_three_halves_closed_form() {
        // K_{3/2}(x) = sqrt(pi/(2x)) e^{-x} (1 + 1/x).
        let pi = std::f64::consts::PI;
        for &x in &[0.5, 2.0, 9.0] {
            let v = bessel_k_scaled(c(1.5, 0.0), x);
            assert_relative_eq!(
                v.re,
                (pi / (2.0 * x)).sqrt() * (1.0 + 1.0 / x),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn bessel_recurrence_complex_order() {
        // K_{nu+1} - K_{nu-1} = (2 nu / x) K_nu, at imaginary order.
        let nu = c(0.0, 3.0);
        for &x in &[1.5, 6.0, 30.0] {
            let km = bessel_k_scaled(nu - 1.0, x);
            let kp = bessel_k_scaled(nu + 1.0, x);
            let k0 = bessel_k_scaled(nu, x);
            let lhs = kp - km;
            let rhs = 2.0 * nu / x * k0;
            assert!((lhs - rhs).norm() <= 1e-11 * k0.norm().max(1e-30));
        }
    }

    #[test]
    fn bessel_imaginary_order_is_real() {
        for &r in &[0.5, 2.0, 7.5] {
            for &x in &[1.0, 5.5, 40.0] {
                let v = bessel_k_scaled(c(0.0, r), x);
                assert!(v.im.abs() <= 1e-13 * v.re.abs().max(1e-30));
            }
        }
    }

    #[test]
    fn bessel_derivative_matches_difference_quotient() {
        let nu = c(0.0, 2.0);
        let x = 7.0;
        let h = 1e-5;
        // Unscaled central difference of K against the scaled derivative.
        let km = bessel_k_scaled(nu, x - h) * (-(x - h) as f64).exp();
        let kp = bessel_k_scaled(nu, x + h) * (-(x + h) as f64).exp();
        let fd = (kp - km) / (2.0 * h);
        let an = bessel_k_deriv_scaled(nu, x) * (-x).exp();
        assert!((fd - an).norm() <= 1e-9 * an.norm());
    }

    #[test]
    fn bessel_line_cache_agrees_with_direct() {
        let nu = c(0.0, 4.0);
        let line = ScaledKBessel::new(nu, 5.0, 700.0, 140);
        assert!(line.tail_bound() < 1e-12);
        for &x in &[5.2, 11.0, 43.0, 350.0, 600.0] {
            let direct = bessel_k_scaled(nu, x) * (-x).exp();
            let cached = line.k(x);
            assert!((direct - cached).norm() <= 1e-11 * direct.norm().max(1e-300));
            let d_direct = bessel_k_deriv_scaled(nu, x) * (-x).exp();
            let d_cached = line.k_deriv(x);
            assert!((d_direct - d_cached).norm() <= 1e-11 * d_direct.norm().max(1e-300));
        }
    }
}
