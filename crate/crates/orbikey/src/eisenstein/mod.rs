//! Parabolic Eisenstein series of the congruence group: cusp-attached
//! series E_p(z, s) = sum over the stabiliser cosets of Im(sigma_p^{-1}
//! gamma z)^s, their scattering entries, and the limit functions at s = 1.
//!
//! For prime level the two cusp series are exact linear combinations of the
//! full-modular series at z and N z, which reduces every evaluation to the
//! rapidly convergent level-one Fourier expansion. A direct coset-sum
//! backend with density-corrected tails lives in `lattice` as an
//! independent check on that route.

pub mod lattice;
pub mod level_one;

use num_complex::Complex64;

use crate::fuchsian::Gamma0;
use crate::numeric::fitting;
use crate::{Error, Result};

pub use level_one::{phi_level_one, LevelOneEisenstein, SeriesValue};

fn is_prime(n: i64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Cusp Eisenstein series at prime level: index 0 is the cusp at infinity,
/// index 1 the cusp at zero, matching the group's cusp ordering.
pub struct PrimeCuspEisenstein {
    pub level: i64,
    pub s: Complex64,
    e1: LevelOneEisenstein,
    ns: Complex64,
    denom: Complex64,
}

impl PrimeCuspEisenstein {
    pub fn new(level: i64, s: Complex64) -> Result<Self> {
        if !is_prime(level) {
            return Err(Error::Unsupported(format!(
                "cusp series combinations require prime level, got {level}"
            )));
        }
        let nf = Complex64::new(level as f64, 0.0);
        let ns = nf.powc(s);
        Ok(Self {
            level,
            s,
            e1: LevelOneEisenstein::new(s),
            ns,
            denom: ns * ns - 1.0,
        })
    }

    /// E_infinity = (N^s E(Nz) - E(z)) / (N^{2s} - 1),
    /// E_0        = (N^s E(z) - E(Nz)) / (N^{2s} - 1).
    pub fn eval(&self, cusp: usize, z: Complex64) -> Complex64 {
        let a = self.e1.eval(z);
        let b = self.e1.eval(z * self.level as f64);
        match cusp {
            0 => (self.ns * b - a) / self.denom,
            1 => (self.ns * a - b) / self.denom,
            _ => panic!("prime level has two cusps"),
        }
    }

    /// Value with transported first derivatives; the inner map z -> Nz
    /// contributes a factor N to both derivative slots.
    pub fn eval_full(&self, cusp: usize, z: Complex64) -> SeriesValue {
        let a = self.e1.eval_full(z);
        let b = self.e1.eval_full(z * self.level as f64);
        let n = self.level as f64;
        let combine = |va: Complex64, vb: Complex64, sign: bool| {
            if sign {
                (self.ns * vb - va) / self.denom
            } else {
                (self.ns * va - vb) / self.denom
            }
        };
        let inf = cusp == 0;
        match cusp {
            0 | 1 => SeriesValue {
                value: combine(a.value, b.value, inf),
                d: combine(a.d, n * b.d, inf),
                dbar: combine(a.dbar, n * b.dbar, inf),
            },
            _ => panic!("prime level has two cusps"),
        }
    }

    /// Both cusp values at once, sharing the two level-one evaluations.
    pub fn eval_both(&self, z: Complex64) -> [Complex64; 2] {
        let a = self.e1.eval(z);
        let b = self.e1.eval(z * self.level as f64);
        [
            (self.ns * b - a) / self.denom,
            (self.ns * a - b) / self.denom,
        ]
    }

    /// Both cusp values with transported derivatives, sharing evaluations.
    pub fn eval_both_full(&self, z: Complex64) -> [SeriesValue; 2] {
        let a = self.e1.eval_full(z);
        let b = self.e1.eval_full(z * self.level as f64);
        let n = self.level as f64;
        let inf = |va: Complex64, vb: Complex64| (self.ns * vb - va) / self.denom;
        let zero = |va: Complex64, vb: Complex64| (self.ns * va - vb) / self.denom;
        [
            SeriesValue {
                value: inf(a.value, b.value),
                d: inf(a.d, n * b.d),
                dbar: inf(a.dbar, n * b.dbar),
            },
            SeriesValue {
                value: zero(a.value, b.value),
                d: zero(a.d, n * b.d),
                dbar: zero(a.dbar, n * b.dbar),
            },
        ]
    }

    /// Scattering matrix entry phi_{pq}(s) (constant-term coefficient of
    /// y^{1-s} for E_p seen at cusp q). Symmetric, and equal on the
    /// diagonal by the Fricke swap of the two cusps.
    pub fn scattering(&self, p: usize, q: usize) -> Complex64 {
        assert!(p < 2 && q < 2);
        let phi = self.e1.phi();
        let nf = Complex64::new(self.level as f64, 0.0);
        if p == q {
            phi * (self.level as f64 - 1.0) / self.denom
        } else {
            phi * (self.ns - nf.powc(Complex64::new(1.0, 0.0) - self.s)) / self.denom
        }
    }
}

/// Limit function at s = 1: the constant term of E_p(z, s) - 1/(vol (s-1)),
/// extracted by evaluating on a dyadic grid of s and extrapolating the
/// polynomial part to s = 1.
pub struct KroneckerLimit {
    eps: Vec<f64>,
    series: Vec<PrimeCuspEisenstein>,
    volume: f64,
}

impl KroneckerLimit {
    pub fn new(group: &Gamma0) -> Result<Self> {
        let eps: Vec<f64> = (2..=6).map(|k| 0.5f64.powi(k)).collect();
        let series = eps
            .iter()
            .map(|&e| PrimeCuspEisenstein::new(group.level as i64, Complex64::new(1.0 + e, 0.0)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            eps,
            series,
            volume: group.volume(),
        })
    }

    pub fn eval(&self, cusp: usize, z: Complex64) -> f64 {
        let ys: Vec<f64> = self
            .series
            .iter()
            .zip(&self.eps)
            .map(|(e, &eps)| e.eval(cusp, z).re - 1.0 / (self.volume * eps))
            .collect();
        fitting::extrapolate_to_zero(&self.eps, &ys, 4)
    }
}

/// Level-one limit function at several points, sharing one grid of series
/// across the points. Reference object for closed-form checks.
pub fn kronecker_limit_level_one(points: &[Complex64]) -> Vec<f64> {
    let eps: Vec<f64> = (2..=6).map(|k| 0.5f64.powi(k)).collect();
    let series: Vec<LevelOneEisenstein> = eps
        .iter()
        .map(|&e| LevelOneEisenstein::new(Complex64::new(1.0 + e, 0.0)))
        .collect();
    let volume = std::f64::consts::PI / 3.0;
    points
        .iter()
        .map(|&z| {
            let ys: Vec<f64> = series
                .iter()
                .zip(&eps)
                .map(|(e, &eps)| e.eval(z).re - 1.0 / (volume * eps))
                .collect();
            fitting::extrapolate_to_zero(&eps, &ys, 4)
        })
        .collect()
}
