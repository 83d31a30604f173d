//! Window enumeration of group elements: all gamma (one per projective
//! class) with the point-pair invariant u(z, gamma w) below a cutoff. The
//! enumeration streams, never materialising the element list, and reduces
//! over parallel chunks in a fixed order so results are deterministic.

use num_complex::Complex64;
use rayon::prelude::*;

use super::{ext_gcd, gcd, Gamma0, GroupElement};

/// One enumerated element, with the quantities every consumer needs: the
/// invariant u, the denominator q = c w + d, the displacement
/// e = z q - (a w + b) (so u = |e|^2 / (4 Im z Im w)), and the matrix.
#[derive(Clone, Copy, Debug)]
pub struct PairTerm {
    pub u: f64,
    pub q: Complex64,
    pub e: Complex64,
    pub mat: GroupElement,
}

/// Geometry of a window query, fixed across chunks.
struct Window {
    z: Complex64,
    w: Complex64,
    inv_4yyw: f64,
    s2: f64,
    t_max: f64,
    level: i64,
}

impl Window {
    fn new(group: &Gamma0, z: Complex64, w: Complex64, u_max: f64) -> Self {
        let (y, yw) = (z.im, w.im);
        assert!(y > 0.0 && yw > 0.0 && u_max > 0.0);
        let s2 = 4.0 * y * yw * u_max;
        let s = s2.sqrt();
        // |q| bound from |Im(e conj q)| = |y |q|^2 - yw| <= |e| |q| <= s |q|.
        let t_max = (s + (s2 + 4.0 * y * yw).sqrt()) / (2.0 * y);
        Self {
            z,
            w,
            inv_4yyw: 1.0 / (4.0 * y * yw),
            s2,
            t_max,
            level: group.level as i64,
        }
    }

    /// Emit all terms for the translation family (c = 0, d = 1).
    fn emit_translations<F: FnMut(&PairTerm)>(&self, f: &mut F) {
        let e_base = self.z - self.w;
        let s = self.s2.sqrt();
        let lo = (e_base.re - s).ceil() as i64;
        let hi = (e_base.re + s).floor() as i64;
        for b in lo..=hi {
            let e = Complex64::new(e_base.re - b as f64, e_base.im);
            let n2 = e.norm_sqr();
            if n2 <= self.s2 {
                f(&PairTerm {
                    u: n2 * self.inv_4yyw,
                    q: Complex64::new(1.0, 0.0),
                    e,
                    mat: GroupElement::translation(b),
                });
            }
        }
    }

    /// Emit all terms with bottom row (c, d), c > 0 fixed.
    fn emit_for_c<F: FnMut(&PairTerm)>(&self, c: i64, f: &mut F) {
        let cyw = c as f64 * self.w.im;
        if cyw >= self.t_max {
            return;
        }
        let delta = (self.t_max * self.t_max - cyw * cyw).sqrt();
        let center = -(c as f64) * self.w.re;
        let d_lo = (center - delta).ceil() as i64;
        let d_hi = (center + delta).floor() as i64;
        for d in d_lo..=d_hi {
            if gcd(c, d) != 1 {
                continue;
            }
            let q = Complex64::new(c as f64 * self.w.re + d as f64, cyw);
            // Base solution of a d - b c = 1.
            let (g, x, yy) = ext_gcd(d, c);
            debug_assert_eq!(g, 1);
            let (a0, b0) = (x, -yy);
            let e0 = self.z * q - (self.w * a0 as f64 + b0 as f64);
            // e = e0 - m q; |e| <= s restricts m to an interval.
            let q2 = q.norm_sqr();
            let mc = (e0 * q.conj()).re / q2;
            let half = (self.s2 / q2).sqrt();
            let m_lo = (mc - half).ceil() as i64;
            let m_hi = (mc + half).floor() as i64;
            for m in m_lo..=m_hi {
                let e = e0 - q * m as f64;
                let n2 = e.norm_sqr();
                if n2 <= self.s2 {
                    f(&PairTerm {
                        u: n2 * self.inv_4yyw,
                        q,
                        e,
                        mat: GroupElement {
                            a: a0 + m * c,
                            b: b0 + m * d,
                            c,
                            d,
                        },
                    });
                }
            }
        }
    }
}

/// Stream every group element with u(z, gamma w) <= u_max through a fold.
/// `init` builds a per-chunk state, `term` absorbs one element, and `merge`
/// combines chunk states left to right in chunk order.
pub fn fold_ball<P, I, T, M>(
    group: &Gamma0,
    z: Complex64,
    w: Complex64,
    u_max: f64,
    init: I,
    term: T,
    merge: M,
) -> P
where
    P: Send,
    I: Fn() -> P + Sync,
    T: Fn(&mut P, &PairTerm) + Sync,
    M: Fn(P, P) -> P,
{
    let win = Window::new(group, z, w, u_max);
    let k_max = (win.t_max / (group.level as f64 * w.im)).floor() as i64;
    // Contiguous k-chunks, sized so parallelism kicks in on big windows
    // while small windows stay single-chunk.
    let chunk = ((k_max + 1) / (8 * rayon::current_num_threads() as i64).max(1)).max(16);
    let starts: Vec<i64> = (0..=k_max).step_by(chunk as usize).collect();
    let partials: Vec<P> = starts
        .par_iter()
        .map(|&k0| {
            let mut state = init();
            let k1 = (k0 + chunk).min(k_max + 1);
            for k in k0..k1 {
                if k == 0 {
                    win.emit_translations(&mut |t| term(&mut state, t));
                } else {
                    win.emit_for_c(k * win.level, &mut |t| term(&mut state, t));
                }
            }
            state
        })
        .collect();
    let mut it = partials.into_iter();
    let first = it.next().unwrap_or_else(&init);
    it.fold(first, merge)
}

/// Number of elements in the window.
pub fn count_ball(group: &Gamma0, z: Complex64, w: Complex64, u_max: f64) -> u64 {
    fold_ball(
        group,
        z,
        w,
        u_max,
        || 0u64,
        |n, _| *n += 1,
        |a, b| a + b,
    )
}

/// Materialised window, for small cutoffs and tests.
pub fn terms_in_ball(group: &Gamma0, z: Complex64, w: Complex64, u_max: f64) -> Vec<PairTerm> {
    fold_ball(
        group,
        z,
        w,
        u_max,
        Vec::new,
        |v, t| v.push(*t),
        |mut a, mut b| {
            a.append(&mut b);
            a
        },
    )
}
