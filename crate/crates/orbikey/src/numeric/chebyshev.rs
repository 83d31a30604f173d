//! Chebyshev interpolation on an interval: fit at first-kind nodes, Clenshaw
//! evaluation, and spectral differentiation. Used for the radial kernel
//! profiles where one expensive function gets evaluated at many abscissae.

/// Truncated Chebyshev series on [a, b]. `coeffs[j]` multiplies T_j of the
/// affinely mapped variable; the constant coefficient is stored plainly.
#[derive(Clone, Debug)]
pub struct Chebyshev {
    pub a: f64,
    pub b: f64,
    pub coeffs: Vec<f64>,
}

impl Chebyshev {
    /// Interpolate f at the n first-kind Chebyshev nodes of [a, b].
    pub fn fit<F: FnMut(f64) -> f64>(a: f64, b: f64, n: usize, mut f: F) -> Self {
        assert!(n >= 1 && b > a);
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let samples: Vec<f64> = (0..n)
            .map(|k| {
                let theta = std::f64::consts::PI * (k as f64 + 0.5) / n as f64;
                f(mid + half * theta.cos())
            })
            .collect();
        Self::from_samples(a, b, &samples)
    }

    /// Parallel variant for expensive sample functions (each node costs a
    /// quadrature or a group sum).
    pub fn fit_par<F: Fn(f64) -> f64 + Sync>(a: f64, b: f64, n: usize, f: F) -> Self {
        use rayon::prelude::*;
        assert!(n >= 1 && b > a);
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let samples: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|k| {
                let theta = std::f64::consts::PI * (k as f64 + 0.5) / n as f64;
                f(mid + half * theta.cos())
            })
            .collect();
        Self::from_samples(a, b, &samples)
    }

    /// Coefficients from values at the first-kind nodes, in node order.
    fn from_samples(a: f64, b: f64, samples: &[f64]) -> Self {
        let n = samples.len();
        let mut coeffs = vec![0.0; n];
        for (j, c) in coeffs.iter_mut().enumerate() {
            let mut acc = super::kahan::Accumulator::new();
            for (k, &s) in samples.iter().enumerate() {
                let theta = std::f64::consts::PI * (k as f64 + 0.5) / n as f64;
                acc.add(s * (j as f64 * theta).cos());
            }
            let norm = if j == 0 { 1.0 } else { 2.0 };
            *c = norm * acc.value() / n as f64;
        }
        Self { a, b, coeffs }
    }

    #[inline]
    fn map(&self, x: f64) -> f64 {
        (2.0 * x - self.a - self.b) / (self.b - self.a)
    }

    /// Clenshaw recurrence. Mild extrapolation outside [a, b] is permitted;
    /// callers fit on padded intervals when they need guaranteed accuracy.
    pub fn eval(&self, x: f64) -> f64 {
        let t = self.map(x);
        let two_t = 2.0 * t;
        let mut b1 = 0.0;
        let mut b2 = 0.0;
        for &c in self.coeffs.iter().skip(1).rev() {
            let next = two_t * b1 - b2 + c;
            b2 = b1;
            b1 = next;
        }
        t * b1 - b2 + self.coeffs[0]
    }

    /// Series for the derivative df/dx on the same interval.
    pub fn derivative(&self) -> Chebyshev {
        let n = self.coeffs.len();
        // Work in the halved-constant convention where the recurrence
        // d_{j-1} = d_{j+1} + 2 j a_j holds uniformly down to j = 1.
        let mut dh = vec![0.0; n + 1];
        for j in (1..n).rev() {
            dh[j - 1] = dh[j + 1] + 2.0 * j as f64 * self.coeffs[j];
        }
        let scale = 2.0 / (self.b - self.a);
        let mut coeffs: Vec<f64> = dh[..n.max(1)].to_vec();
        coeffs[0] *= 0.5;
        for c in coeffs.iter_mut() {
            *c *= scale;
        }
        Chebyshev {
            a: self.a,
            b: self.b,
            coeffs,
        }
    }

    /// Largest coefficient magnitude among the trailing k terms; a proxy for
    /// the truncation error of the interpolant.
    pub fn tail_bound(&self, k: usize) -> f64 {
        let n = self.coeffs.len();
        self.coeffs[n.saturating_sub(k)..]
            .iter()
            .fold(0.0, |m, c| m.max(c.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn interpolates_exp_to_machine_precision() {
        let ch = Chebyshev::fit(0.0, 1.0, 20, f64::exp);
        for k in 0..=50 {
            let x = k as f64 / 50.0;
            assert_relative_eq!(ch.eval(x), x.exp(), max_relative = 1e-14);
        }
    }

    #[test]
    fn derivative_of_exp_is_exp() {
        // Differentiation amplifies the coefficient noise floor; eleven
        // digits is the expected accuracy at this length, not a slack bound.
        let ch = Chebyshev::fit(0.0, 1.0, 24, f64::exp);
        let d = ch.derivative();
        for k in 0..=50 {
            let x = k as f64 / 50.0;
            assert_relative_eq!(d.eval(x), x.exp(), max_relative = 1e-10);
        }
    }

    #[test]
    fn second_derivative_of_sin() {
        let ch = Chebyshev::fit(-2.0, 3.0, 40, f64::sin);
        let dd = ch.derivative().derivative();
        for k in 0..=60 {
            let x = -2.0 + 5.0 * k as f64 / 60.0;
            assert!((dd.eval(x) + x.sin()).abs() < 5e-9);
        }
    }

    #[test]
    fn runge_function_converges() {
        let f = |x: f64| 1.0 / (1.0 + 25.0 * x * x);
        let ch = Chebyshev::fit(-1.0, 1.0, 120, f);
        for k in 0..=100 {
            let x = -1.0 + 2.0 * k as f64 / 100.0;
            assert!((ch.eval(x) - f(x)).abs() < 1e-9);
        }
        assert!(ch.tail_bound(5) < 1e-9);
    }

    #[test]
    fn exact_for_polynomials_of_fit_degree() {
        let f = |x: f64| 3.0 * x * x * x - 2.0 * x + 7.0;
        let ch = Chebyshev::fit(1.0, 4.0, 4, f);
        assert_relative_eq!(ch.eval(2.5), f(2.5), max_relative = 1e-13);
        assert_relative_eq!(ch.derivative().eval(2.5), 9.0 * 2.5 * 2.5 - 2.0, max_relative = 1e-12);
    }
}
