//! The real-analytic Eisenstein series of the full modular group,
//! evaluated through its Fourier expansion after reduction to the standard
//! fundamental domain:
//!
//!   E(z, s) = y^s + phi(s) y^{1-s}
//!           + (4 / xi(2s)) sqrt(y) sum_{n>=1} n^{s-1/2} sigma_{1-2s}(n)
//!             K_{s-1/2}(2 pi n y) cos(2 pi n x),
//!
//! with phi(s) = xi(2s-1)/xi(2s). Reduction keeps y >= sqrt(3)/2, so the
//! Bessel arguments start at 2 pi sqrt(3)/2 and a single line cache of
//! K_{s-1/2} covers every term that is not already below the double floor.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::fuchsian::reduce;
use crate::numeric::special::{self, ScaledKBessel};

/// Series value together with both first derivatives at the original
/// (unreduced) point: d is the z-derivative, dbar the conjugate one.
#[derive(Clone, Copy, Debug)]
pub struct SeriesValue {
    pub value: Complex64,
    pub d: Complex64,
    pub dbar: Complex64,
}

/// Scattering value of the full modular group, xi(2s-1)/xi(2s).
pub fn phi_level_one(s: Complex64) -> Complex64 {
    special::xi(2.0 * s - 1.0) / special::xi(2.0 * s)
}

pub struct LevelOneEisenstein {
    pub s: Complex64,
    phi: Complex64,
    /// 4 n^{s-1/2} sigma_{1-2s}(n) / xi(2s) for n = 1, 2, ...
    coeff: Vec<Complex64>,
    bessel: ScaledKBessel,
    x_cut: f64,
}

impl LevelOneEisenstein {
    pub fn new(s: Complex64) -> Self {
        // Smallest Bessel argument after reduction, with a hair of margin
        // for points reduced onto the domain boundary.
        let x_min = 2.0 * PI * (3.0f64.sqrt() / 2.0) * 0.999;
        // Terms decay like e^{-x}; 45 e-foldings below the first term is
        // past the double floor.
        let x_cut = x_min + 45.0;
        let bessel = ScaledKBessel::new(s - 0.5, x_min, x_cut, 72);
        let xi2s = special::xi(2.0 * s);
        let n_max = (45.0 / x_min).ceil() as usize + 1;
        let coeff = (1..=n_max)
            .map(|n| {
                let nf = Complex64::new(n as f64, 0.0);
                let sigma: Complex64 = (1..=n)
                    .filter(|d| n % d == 0)
                    .map(|d| Complex64::new(d as f64, 0.0).powc(1.0 - 2.0 * s))
                    .sum();
                4.0 * nf.powc(s - 0.5) * sigma / xi2s
            })
            .collect();
        Self {
            s,
            phi: phi_level_one(s),
            coeff,
            bessel,
            x_cut,
        }
    }

    pub fn phi(&self) -> Complex64 {
        self.phi
    }

    /// Value and derivatives at the reduced point, before transport.
    fn eval_reduced(&self, zr: Complex64) -> (Complex64, Complex64, Complex64) {
        let (x, y) = (zr.re, zr.im);
        let lny = y.ln();
        let ys = (self.s * lny).exp();
        let y1s = ((1.0 - self.s) * lny).exp();
        let sqy = y.sqrt();
        let mut value = ys + self.phi * y1s;
        let mut ddx = Complex64::new(0.0, 0.0);
        let mut ddy = self.s * ys / y + (1.0 - self.s) * self.phi * y1s / y;
        for (i, &c) in self.coeff.iter().enumerate() {
            let n = (i + 1) as f64;
            let arg = 2.0 * PI * n * y;
            if arg > self.x_cut {
                break;
            }
            let kv = self.bessel.k(arg);
            let kp = self.bessel.k_deriv(arg);
            let (sin_nx, cos_nx) = (2.0 * PI * n * x).sin_cos();
            value += c * sqy * kv * cos_nx;
            ddx -= c * sqy * kv * 2.0 * PI * n * sin_nx;
            ddy += c * (kv / (2.0 * sqy) + sqy * 2.0 * PI * n * kp) * cos_nx;
        }
        (value, ddx, ddy)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let (zr, _) = reduce::reduce_level_one(z);
        self.eval_reduced(zr).0
    }

    /// Value plus first derivatives, transported back through the reducing
    /// element: the map z -> gamma z is holomorphic, so the z-derivative
    /// picks up (cz+d)^{-2} and the conjugate one its conjugate.
    pub fn eval_full(&self, z: Complex64) -> SeriesValue {
        let (zr, g) = reduce::reduce_level_one(z);
        let (value, ddx, ddy) = self.eval_reduced(zr);
        let i = Complex64::new(0.0, 1.0);
        let d_red = (ddx - i * ddy) / 2.0;
        let dbar_red = (ddx + i * ddy) / 2.0;
        let j = g.denominator(z);
        let j2 = j * j;
        SeriesValue {
            value,
            d: d_red / j2,
            dbar: dbar_red / j2.conj(),
        }
    }
}
