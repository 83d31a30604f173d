//! Radial profiles for windowed group sums.  Every function of the point-pair
//! invariant that gets folded over the group orbit (the time-integrated kernel
//! window, fixed-time kernels at fit nodes, resolvent window defects) is
//! interpolated once and evaluated millions of times inside the orbit fold.

use rayon::prelude::*;

use crate::heat;
use crate::numeric::chebyshev::Chebyshev;

/// Hyperbolic distance as a function of the point-pair invariant u.
pub(crate) fn rho_of_u(u: f64) -> f64 {
    2.0 * u.sqrt().asinh()
}

/// Inverse of `rho_of_u`: u = sinh^2(rho/2).
pub(crate) fn u_of_rho(rho: f64) -> f64 {
    let s = (0.5 * rho).sinh();
    s * s
}

/// Smooth radial function on [0, u_max], interpolated in u on [0, 1] and in
/// rho = 2 asinh(sqrt u) beyond.  The u piece keeps derivative chains regular
/// at the diagonal; the rho piece tracks exponential decay at modest degree.
/// Evaluation outside [0, u_max] returns zero.
pub struct TwoPiece {
    lo: Chebyshev,
    lo_d: Chebyshev,
    lo_dd: Chebyshev,
    hi: Chebyshev,
    hi_d: Chebyshev,
    hi_dd: Chebyshev,
    u_max: f64,
}

const SPLIT_U: f64 = 1.0;

impl TwoPiece {
    pub fn build<F: Fn(f64) -> f64 + Sync>(u_max: f64, n_lo: usize, n_hi: usize, f: F) -> Self {
        assert!(u_max > 2.0, "two-piece profile needs u_max above the split");
        let lo = Chebyshev::fit_par(0.0, SPLIT_U, n_lo, &f);
        let hi = Chebyshev::fit_par(rho_of_u(SPLIT_U), rho_of_u(u_max), n_hi, |rho| f(u_of_rho(rho)));
        let lo_d = lo.derivative();
        let lo_dd = lo_d.derivative();
        let hi_d = hi.derivative();
        let hi_dd = hi_d.derivative();
        Self { lo, lo_d, lo_dd, hi, hi_d, hi_dd, u_max }
    }

    pub fn u_max(&self) -> f64 {
        self.u_max
    }

    pub fn eval(&self, u: f64) -> f64 {
        if u >= self.u_max {
            0.0
        } else if u <= SPLIT_U {
            self.lo.eval(u)
        } else {
            self.hi.eval(rho_of_u(u))
        }
    }

    /// Value together with first and second u-derivatives.  On the rho piece
    /// the chain rule uses rho'(u) = 1/sqrt(u(1+u)) and
    /// rho''(u) = -(1+2u) / (2 (u(1+u))^{3/2}).
    pub fn eval_d(&self, u: f64) -> (f64, f64, f64) {
        if u >= self.u_max {
            (0.0, 0.0, 0.0)
        } else if u <= SPLIT_U {
            (self.lo.eval(u), self.lo_d.eval(u), self.lo_dd.eval(u))
        } else {
            let rho = rho_of_u(u);
            let p = self.hi.eval(rho);
            let p1 = self.hi_d.eval(rho);
            let p2 = self.hi_dd.eval(rho);
            let w = u * (1.0 + u);
            let rp = 1.0 / w.sqrt();
            let rpp = -(1.0 + 2.0 * u) / (2.0 * w.powf(1.5));
            (p, p1 * rp, p2 * rp * rp + p1 * rpp)
        }
    }
}

/// Logarithmic part of the time-integrated free kernel:
/// int_0^inf K_H(t; u) dt = log(1 + 1/u) / 4 pi.
pub fn log_part(u: f64) -> f64 {
    crate::halfplane::log1p_inv(u) / (4.0 * std::f64::consts::PI)
}

/// First and second u-derivatives of `log_part`.
pub fn log_part_d(u: f64) -> (f64, f64) {
    let four_pi = 4.0 * std::f64::consts::PI;
    let w = u * (1.0 + u);
    (-1.0 / (four_pi * w), (1.0 + 2.0 * u) / (four_pi * w * w))
}

/// Window defect int_0^{t0} (1 - e^{-sigma t}) K_H dt.  The sigma weight
/// turns the short-time region into an exponential-integral transform, so
/// the defect carries a u log u endpoint singularity at the diagonal and a
/// plain interpolant in u stalls near 1e-7 there.  Instead the low piece is
/// assembled exactly: full-time log part, minus the closed resolvent kernel,
/// minus an interpolated tail difference that is analytic on [0, u_max].
struct DefectProfile {
    s: f64,
    lo_tail_diff: Chebyshev,
    hi: Chebyshev,
    u_max: f64,
}

impl DefectProfile {
    fn build(t0: f64, sigma: f64, u_max: f64) -> Self {
        let s = 0.5 * (1.0 + (1.0 + 4.0 * sigma).sqrt());
        let lo_tail_diff = Chebyshev::fit_par(0.0, SPLIT_U, 48, |u| {
            heat::free_kernel_tail(t0, u) - heat::free_kernel_weighted_tail(t0, sigma, u)
        });
        let hi = Chebyshev::fit_par(rho_of_u(SPLIT_U), rho_of_u(u_max), 130, |rho| {
            heat::resolvent_window_defect(t0, sigma, u_of_rho(rho))
        });
        Self { s, lo_tail_diff, hi, u_max }
    }

    fn eval(&self, u: f64) -> f64 {
        if u >= self.u_max {
            0.0
        } else if u > SPLIT_U {
            self.hi.eval(rho_of_u(u))
        } else {
            log_part(u)
                - super::euler_resolvent(self.s, u) / (4.0 * std::f64::consts::PI)
                - self.lo_tail_diff.eval(u)
        }
    }
}

/// All radial interpolants needed by the windowed evaluators at one window
/// length t0: the window itself (as log part minus interpolated tail), the
/// fixed-time kernels at the fit and calibration times, and the resolvent
/// window defects int_0^{t0} (1 - e^{-sigma t}) K_H dt for each sigma.
pub struct WindowProfiles {
    t0: f64,
    u_max: f64,
    tail_at_zero: f64,
    tail: TwoPiece,
    times: Vec<f64>,
    nodes: Vec<TwoPiece>,
    sigmas: Vec<f64>,
    defects: Vec<DefectProfile>,
}

impl WindowProfiles {
    pub fn build(t0: f64, u_max: f64, times: &[f64], sigmas: &[f64]) -> Self {
        assert!(t0 > 0.0 && u_max > 2.0);
        // Tail and defect nodes each cost an adaptive quadrature, so the
        // builds run node-parallel; fixed-time kernels are direct evaluations.
        let tail = TwoPiece::build(u_max, 48, 130, |u| heat::free_kernel_tail(t0, u));
        let nodes: Vec<TwoPiece> = times
            .par_iter()
            .map(|&t| TwoPiece::build(u_max, 48, 130, |u| heat::free_kernel(t, u)))
            .collect();
        let defects: Vec<DefectProfile> = sigmas
            .par_iter()
            .map(|&s| DefectProfile::build(t0, s, u_max))
            .collect();
        Self {
            t0,
            u_max,
            tail_at_zero: heat::free_kernel_tail(t0, 0.0),
            tail,
            times: times.to_vec(),
            nodes,
            sigmas: sigmas.to_vec(),
            defects,
        }
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn u_max(&self) -> f64 {
        self.u_max
    }

    /// int_{t0}^inf K_H(t; 0) dt, the tail subtracted on the diagonal.
    pub fn tail_at_zero(&self) -> f64 {
        self.tail_at_zero
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn sigmas(&self) -> &[f64] {
        &self.sigmas
    }

    /// Window value int_0^{t0} K_H(t; u) dt, as exact log part minus the
    /// interpolated tail so the large-u cancellation happens in closed form.
    pub fn window(&self, u: f64) -> f64 {
        if u >= self.u_max {
            0.0
        } else {
            log_part(u) - self.tail.eval(u)
        }
    }

    /// Window value with first and second u-derivatives.
    pub fn window_d(&self, u: f64) -> (f64, f64, f64) {
        if u >= self.u_max {
            return (0.0, 0.0, 0.0);
        }
        let (t, t1, t2) = self.tail.eval_d(u);
        let (l1, l2) = log_part_d(u);
        (log_part(u) - t, l1 - t1, l2 - t2)
    }

    /// Fixed-time kernel K_H(times[i]; u).
    pub fn node(&self, i: usize, u: f64) -> f64 {
        self.nodes[i].eval(u)
    }

    pub fn node_d(&self, i: usize, u: f64) -> (f64, f64, f64) {
        self.nodes[i].eval_d(u)
    }

    /// Resolvent window defect int_0^{t0} (1 - e^{-sigmas[j] t}) K_H dt.
    pub fn defect(&self, j: usize, u: f64) -> f64 {
        self.defects[j].eval(u)
    }
}
