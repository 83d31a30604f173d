//! Continuous-spectrum tail of automorphic kernels: cusp Eisenstein series
//! sampled on a Gauss-Legendre grid in the spectral parameter r, combined
//! into weighted pair sums.  The contribution of an automorphic kernel's
//! continuous part at spectral weight W is
//!   (1/2 pi) int_0^inf sum_p E_p(z, 1/2 + i r) conj(E_p(w, 1/2 + i r))
//!       W(1/4 + r^2) dr,
//! truncated at r_max where the e^{-lambda t0} weights make the remainder
//! negligible.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::eisenstein::{PrimeCuspEisenstein, SeriesValue};
use crate::numeric::quad::GaussLegendre;
use crate::Result;

pub struct SpectralTail {
    lambdas: Vec<f64>,
    weights: Vec<f64>,
    series: Vec<PrimeCuspEisenstein>,
}

/// Eisenstein data of one point across the whole r-grid; gradients are
/// carried only when a Laplacian channel is requested.
pub struct PointSpectrum {
    y: f64,
    vals: Vec<[Complex64; 2]>,
    grads: Option<Vec<[SeriesValue; 2]>>,
}

impl SpectralTail {
    pub fn build(level: i64, r_max: f64, n_r: usize) -> Result<Self> {
        let gl = GaussLegendre::cached(n_r);
        let rs: Vec<f64> = gl.nodes.iter().map(|x| 0.5 * r_max * (x + 1.0)).collect();
        // Gauss-Legendre weight, interval scale, and the 1/(2 pi) of the
        // spectral measure, folded into one coefficient per node.
        let weights: Vec<f64> = gl
            .weights
            .iter()
            .map(|w| w * 0.5 * r_max / (2.0 * std::f64::consts::PI))
            .collect();
        let series: Vec<PrimeCuspEisenstein> = rs
            .par_iter()
            .map(|&r| PrimeCuspEisenstein::new(level, Complex64::new(0.5, r)))
            .collect::<Result<_>>()?;
        let lambdas = rs.iter().map(|r| 0.25 + r * r).collect();
        Ok(Self { lambdas, weights, series })
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn point(&self, z: Complex64, with_grad: bool) -> PointSpectrum {
        if with_grad {
            let grads: Vec<[SeriesValue; 2]> =
                self.series.par_iter().map(|e| e.eval_both_full(z)).collect();
            let vals = grads.iter().map(|g| [g[0].value, g[1].value]).collect();
            PointSpectrum { y: z.im, vals, grads: Some(grads) }
        } else {
            let vals = self.series.par_iter().map(|e| e.eval_both(z)).collect();
            PointSpectrum { y: z.im, vals, grads: None }
        }
    }

    /// Weighted pair sum: the continuous part of a kernel with spectral
    /// weight `w(lambda)` evaluated at the two profiled points.
    pub fn pair_sum<W: Fn(f64) -> f64>(&self, a: &PointSpectrum, b: &PointSpectrum, w: W) -> f64 {
        let mut acc = crate::numeric::kahan::Accumulator::new();
        for k in 0..self.lambdas.len() {
            let cross = (a.vals[k][0] * b.vals[k][0].conj() + a.vals[k][1] * b.vals[k][1].conj()).re;
            acc.add(self.weights[k] * w(self.lambdas[k]) * cross);
        }
        acc.value()
    }

    /// Laplacian (in the base point, acting on both slots of the diagonal)
    /// of the weighted sum at coincident points: for an eigenfunction,
    /// Delta |E|^2 = 2 lambda |E|^2 - 4 y^2 (|dE|^2 + |dbar E|^2).
    pub fn laplacian_diag_sum<W: Fn(f64) -> f64>(&self, a: &PointSpectrum, w: W) -> f64 {
        let grads = a.grads.as_ref().expect("point was profiled without gradients");
        let y2 = a.y * a.y;
        let mut acc = crate::numeric::kahan::Accumulator::new();
        for k in 0..self.lambdas.len() {
            let mut term = 0.0;
            for p in 0..2 {
                let g = &grads[k][p];
                let e2 = g.value.norm_sqr();
                term += 2.0 * self.lambdas[k] * e2
                    - 4.0 * y2 * (g.d.norm_sqr() + g.dbar.norm_sqr());
            }
            acc.add(self.weights[k] * w(self.lambdas[k]) * term);
        }
        acc.value()
    }
}
