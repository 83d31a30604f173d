//! Fundamental-domain reduction: the classical modular reduction for the
//! full group, and maximal-height reduction for a congruence subgroup. Both
//! return the reduced point together with the group element realising it.

use num_complex::Complex64;

use super::{ext_gcd, gcd, Gamma0, GroupElement};

/// Reduce into the standard fundamental domain of the full modular group:
/// |Re z| <= 1/2, |z| >= 1. Returns (gamma z, gamma).
pub fn reduce_level_one(z: Complex64) -> (Complex64, GroupElement) {
    let mut zz = z;
    let mut g = GroupElement::IDENTITY;
    for _ in 0..200 {
        let shift = zz.re.round();
        if shift != 0.0 {
            let t = GroupElement::translation(-(shift as i64));
            zz = Complex64::new(zz.re - shift, zz.im);
            g = t.compose(&g);
        }
        if zz.norm_sqr() < 1.0 - 1e-15 {
            let s = GroupElement::new(0, -1, 1, 0);
            zz = -zz.conj() / zz.norm_sqr();
            g = s.compose(&g);
        } else {
            break;
        }
    }
    (zz, g)
}

/// Reduce by the congruence group to the orbit point of maximal height,
/// then normalise the abscissa to [-1/2, 1/2). The returned point is where
/// cusp expansions at infinity converge fastest.
pub fn reduce_max_height(group: &Gamma0, z: Complex64) -> (Complex64, GroupElement) {
    let n = group.level as i64;
    let mut zz = z;
    let mut g = GroupElement::IDENTITY;
    for _ in 0..100 {
        let (x, y) = (zz.re, zz.im);
        // Minimise |c zz + d|^2 over bottom rows of the group; the current
        // position corresponds to (c, d) = (0, 1) with value 1.
        let mut best: Option<(i64, i64, f64)> = None;
        let mut best_q2 = 1.0f64;
        let mut k = 1i64;
        loop {
            let c = k * n;
            let cy = c as f64 * y;
            if cy * cy >= best_q2 {
                break;
            }
            let delta = (best_q2 - cy * cy).sqrt();
            let center = -(c as f64) * x;
            let lo = (center - delta).ceil() as i64;
            let hi = (center + delta).floor() as i64;
            for d in lo..=hi {
                if gcd(c, d) != 1 {
                    continue;
                }
                let re = c as f64 * x + d as f64;
                let q2 = re * re + cy * cy;
                if q2 < best_q2 * (1.0 - 1e-12) {
                    best_q2 = q2;
                    best = Some((c, d, q2));
                }
            }
            k += 1;
        }
        match best {
            None => break,
            Some((c, d, _)) => {
                // Complete the bottom row: a d - b c = 1.
                let (g1, xx, yy) = ext_gcd(d, c);
                debug_assert_eq!(g1, 1);
                let gamma = GroupElement::new(xx, -yy, c, d);
                zz = gamma.apply(zz);
                g = gamma.compose(&g);
            }
        }
    }
    let shift = zz.re.round();
    if shift != 0.0 {
        let t = GroupElement::translation(-(shift as i64));
        zz = Complex64::new(zz.re - shift, zz.im);
        g = t.compose(&g);
    }
    (zz, g)
}
