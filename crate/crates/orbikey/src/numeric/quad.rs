//! Gauss-Legendre quadrature with cached node tables, plus adaptive and
//! semi-infinite drivers built on top of it.

use std::collections::HashMap;
use std::sync::Mutex;
use std::sync::OnceLock;

/// Nodes and weights on the reference interval [-1, 1].
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Newton iteration on the Legendre polynomial; accurate to machine
    /// precision for any practical order.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for k in 0..m {
            // Tricomi initial guess for the k-th positive root.
            let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut pp = 0.0;
            for _ in 0..100 {
                // Evaluate P_n and its derivative by upward recurrence.
                let mut p0 = 1.0;
                let mut p1 = x;
                for j in 2..=n {
                    let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                    p0 = p1;
                    p1 = p2;
                }
                pp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / pp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            nodes[k] = -x;
            nodes[n - 1 - k] = x;
            let w = 2.0 / ((1.0 - x * x) * pp * pp);
            weights[k] = w;
            weights[n - 1 - k] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Shared table for a given order; building nodes is cheap but hot loops
    /// request the same orders thousands of times.
    pub fn cached(n: usize) -> &'static GaussLegendre {
        static TABLES: OnceLock<Mutex<HashMap<usize, &'static GaussLegendre>>> = OnceLock::new();
        let tables = TABLES.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = tables.lock().unwrap();
        guard
            .entry(n)
            .or_insert_with(|| Box::leak(Box::new(GaussLegendre::new(n))))
    }

    /// Integrate f over [a, b] with this rule.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut acc = super::kahan::Accumulator::new();
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc.add(w * f(mid + half * x));
        }
        half * acc.value()
    }
}

/// Fixed-order rule on [a, b]; convenience wrapper.
pub fn gauss<F: FnMut(f64) -> f64>(n: usize, a: f64, b: f64, f: F) -> f64 {
    GaussLegendre::cached(n).integrate(a, b, f)
}

/// Adaptive bisection: accept a panel when doubling the order moves the
/// result by less than the panel's share of the tolerance.
pub fn adaptive<F: FnMut(f64) -> f64>(a: f64, b: f64, tol: f64, f: F) -> f64 {
    let mut f = f;
    adaptive_impl(a, b, tol, &mut f, 0)
}

fn adaptive_impl<F: FnMut(f64) -> f64>(a: f64, b: f64, tol: f64, f: &mut F, depth: usize) -> f64 {
    let coarse = GaussLegendre::cached(15).integrate(a, b, &mut *f);
    let fine = GaussLegendre::cached(31).integrate(a, b, &mut *f);
    let diff = (fine - coarse).abs();
    // Stop on the requested tolerance, on the rounding floor of the panel
    // value (splitting further only chases noise), or at the depth cap.
    if diff <= tol || diff <= 1e-15 * fine.abs() || depth >= 24 {
        return fine;
    }
    let mid = 0.5 * (a + b);
    adaptive_impl(a, mid, 0.5 * tol, f, depth + 1) + adaptive_impl(mid, b, 0.5 * tol, f, depth + 1)
}

/// Integral over [a, infinity) of a decaying integrand: window doubling with
/// adaptive panels, stopping when a window contributes below tolerance.
pub fn adaptive_to_infinity<F: FnMut(f64) -> f64>(a: f64, first_window: f64, tol: f64, f: F) -> f64 {
    let mut f = f;
    let mut total = super::kahan::Accumulator::new();
    let mut lo = a;
    let mut width = first_window;
    for _ in 0..64 {
        let hi = lo + width;
        let part = adaptive_impl(lo, hi, tol * 0.25, &mut f, 0);
        total.add(part);
        if part.abs() < tol * 0.25 && width >= 8.0 * first_window {
            break;
        }
        lo = hi;
        width *= 2.0;
    }
    total.value()
}

/// Trapezoid rule for smooth periodic integrands over one period; spectrally
/// accurate in the number of nodes.
pub fn trapezoid_periodic<F: FnMut(f64) -> f64>(n: usize, period: f64, mut f: F) -> f64 {
    let h = period / n as f64;
    let mut acc = super::kahan::Accumulator::new();
    for k in 0..n {
        acc.add(f(k as f64 * h));
    }
    h * acc.value()
}
