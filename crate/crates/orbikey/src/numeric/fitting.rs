//! Small dense least-squares helpers: Householder QR, polynomial
//! extrapolation, and a variable-projection fit for two-exponential tails.

/// Solve the least-squares problem min |A x - b| for a tall dense A given in
/// row-major form. Householder QR; intended for a handful of columns.
pub fn lstsq(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let m = a.len();
    assert!(m >= 1 && m == b.len());
    let n = a[0].len();
    assert!(n >= 1 && m >= n);
    let mut r: Vec<Vec<f64>> = a.to_vec();
    let mut y = b.to_vec();
    for col in 0..n {
        // Householder vector for the subcolumn r[col.., col].
        let mut norm = 0.0f64;
        for row in col..m {
            norm += r[row][col] * r[row][col];
        }
        let norm = norm.sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = if r[col][col] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (col..m).map(|row| r[row][col]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for j in col..n {
            let dot: f64 = (col..m).map(|row| v[row - col] * r[row][j]).sum();
            let scale = 2.0 * dot / vnorm2;
            for row in col..m {
                r[row][j] -= scale * v[row - col];
            }
        }
        let dot: f64 = (col..m).map(|row| v[row - col] * y[row]).sum();
        let scale = 2.0 * dot / vnorm2;
        for row in col..m {
            y[row] -= scale * v[row - col];
        }
    }
    // Back substitution on the upper-triangular part.
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for j in (i + 1)..n {
            s -= r[i][j] * x[j];
        }
        x[i] = if r[i][i] != 0.0 { s / r[i][i] } else { 0.0 };
    }
    x
}

/// Residual two-norm of a candidate solution.
pub fn residual_norm(a: &[Vec<f64>], b: &[f64], x: &[f64]) -> f64 {
    let mut s = 0.0;
    for (row, &bi) in a.iter().zip(b) {
        let pred: f64 = row.iter().zip(x).map(|(aij, xj)| aij * xj).sum();
        s += (pred - bi) * (pred - bi);
    }
    s.sqrt()
}

/// Fit y = sum_j c_j x^j and return the value at zero, i.e. the constant
/// coefficient: Richardson-style extrapolation through a small grid.
pub fn extrapolate_to_zero(xs: &[f64], ys: &[f64], degree: usize) -> f64 {
    assert!(xs.len() == ys.len() && xs.len() > degree);
    let a: Vec<Vec<f64>> = xs
        .iter()
        .map(|&x| (0..=degree).map(|j| x.powi(j as i32)).collect())
        .collect();
    lstsq(&a, ys)[0]
}

/// Result of a two-exponential variable-projection fit.
#[derive(Clone, Copy, Debug)]
pub struct TwoExpFit {
    pub lambda1: f64,
    pub lambda2: f64,
    pub c1: f64,
    pub c2: f64,
    pub residual: f64,
}

fn two_exp_solve(ts: &[f64], ys: &[f64], l1: f64, l2: f64) -> (f64, f64, f64) {
    let a: Vec<Vec<f64>> = ts
        .iter()
        .map(|&t| vec![(-l1 * t).exp(), (-l2 * t).exp()])
        .collect();
    let x = lstsq(&a, ys);
    let r = residual_norm(&a, ys, &x);
    (x[0], x[1], r)
}

/// Variable projection for y(t) ~ c1 e^{-l1 t} + c2 e^{-l2 t} with
/// 0 < l1 < l2: coarse log-grid scan then cyclic golden-section refinement.
/// Deterministic; returns the best fit found.
pub fn fit_two_exponentials(ts: &[f64], ys: &[f64], l_min: f64, l_max: f64) -> TwoExpFit {
    assert!(ts.len() == ys.len() && ts.len() >= 4);
    let (l1, l2) = fit_shared_rates(ts, std::slice::from_ref(&ys.to_vec()), l_min, l_max);
    let (c1, c2, residual) = two_exp_solve(ts, ys, l1, l2);
    TwoExpFit {
        lambda1: l1,
        lambda2: l2,
        c1,
        c2,
        residual,
    }
}

/// Joint variable projection across several series sharing the same two
/// rates; each series keeps its own linear coefficients. Returns the rates
/// minimising the summed squared residual.
pub fn fit_shared_rates(ts: &[f64], series: &[Vec<f64>], l_min: f64, l_max: f64) -> (f64, f64) {
    assert!(!series.is_empty() && series.iter().all(|y| y.len() == ts.len()));
    assert!(ts.len() >= 4);
    assert!(0.0 < l_min && l_min < l_max);
    let joint = |l1: f64, l2: f64| -> f64 {
        series
            .iter()
            .map(|ys| {
                let r = two_exp_solve(ts, ys, l1, l2).2;
                r * r
            })
            .sum::<f64>()
            .sqrt()
    };
    let grid: Vec<f64> = (0..40)
        .map(|k| l_min * (l_max / l_min).powf(k as f64 / 39.0))
        .collect();
    let mut best = (l_min, l_max, f64::INFINITY);
    for (i, &l1) in grid.iter().enumerate() {
        for &l2 in &grid[i + 1..] {
            let r = joint(l1, l2);
            if r < best.2 {
                best = (l1, l2, r);
            }
        }
    }
    let (l1g, l2g, _) = best;
    // Refine with Nelder-Mead in (ln l1, ln(l2 - l1)): the gap
    // parametrisation keeps the ordering constraint implicit, and the inner
    // linear solve stays exact (variable projection).
    let obj = |p: [f64; 2]| -> f64 {
        let l1 = p[0].exp();
        let l2 = l1 + p[1].exp();
        if !(l1 >= l_min * 0.5 && l2 <= l_max * 2.0) {
            return f64::INFINITY;
        }
        joint(l1, l2)
    };
    let mut simplex = [
        [l1g.ln(), (l2g - l1g).max(1e-12).ln()],
        [l1g.ln() + 0.15, (l2g - l1g).max(1e-12).ln()],
        [l1g.ln(), (l2g - l1g).max(1e-12).ln() + 0.15],
    ];
    let mut values = simplex.map(obj);
    for _ in 0..250 {
        // Order ascending by value.
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        let (b, m, wst) = (idx[0], idx[1], idx[2]);
        if (values[wst] - values[b]).abs() <= 1e-15 * (1.0 + values[b].abs()) {
            break;
        }
        let centroid = [
            0.5 * (simplex[b][0] + simplex[m][0]),
            0.5 * (simplex[b][1] + simplex[m][1]),
        ];
        let reflect = [
            2.0 * centroid[0] - simplex[wst][0],
            2.0 * centroid[1] - simplex[wst][1],
        ];
        let fr = obj(reflect);
        if fr < values[b] {
            let expand = [
                3.0 * centroid[0] - 2.0 * simplex[wst][0],
                3.0 * centroid[1] - 2.0 * simplex[wst][1],
            ];
            let fe = obj(expand);
            if fe < fr {
                simplex[wst] = expand;
                values[wst] = fe;
            } else {
                simplex[wst] = reflect;
                values[wst] = fr;
            }
        } else if fr < values[m] {
            simplex[wst] = reflect;
            values[wst] = fr;
        } else {
            let contract = [
                0.5 * (centroid[0] + simplex[wst][0]),
                0.5 * (centroid[1] + simplex[wst][1]),
            ];
            let fc = obj(contract);
            if fc < values[wst] {
                simplex[wst] = contract;
                values[wst] = fc;
            } else {
                for i in [m, wst] {
                    simplex[i] = [
                        0.5 * (simplex[i][0] + simplex[b][0]),
                        0.5 * (simplex[i][1] + simplex[b][1]),
                    ];
                    values[i] = obj(simplex[i]);
                }
            }
        }
    }
    let mut bi = 0;
    for i in 1..3 {
        if values[i] < values[bi] {
            bi = i;
        }
    }
    let l1 = simplex[bi][0].exp();
    let l2 = l1 + simplex[bi][1].exp();
    (l1, l2)
}

/// Linear coefficients for fixed rates, with the fit residual.
pub fn two_exp_coefficients(ts: &[f64], ys: &[f64], l1: f64, l2: f64) -> (f64, f64, f64) {
    two_exp_solve(ts, ys, l1, l2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn lstsq_solves_square_system() {
        let a = vec![vec![2.0, 1.0], vec![1.0, 3.0]];
        let b = vec![5.0, 10.0];
        let x = lstsq(&a, &b);
        assert_relative_eq!(x[0], 1.0, max_relative = 1e-12);
        assert_relative_eq!(x[1], 3.0, max_relative = 1e-12);
    }

    #[test]
    fn lstsq_overdetermined_projects() {
        // Fit a line through three collinear points plus one outlier; the
        // normal-equation solution is known in closed form.
        let a = vec![
            vec![1.0, 0.0],
            vec![1.0, 1.0],
            vec![1.0, 2.0],
            vec![1.0, 3.0],
        ];
        let b = vec![1.0, 3.0, 5.0, 7.0];
        let x = lstsq(&a, &b);
        assert_relative_eq!(x[0], 1.0, max_relative = 1e-12);
        assert_relative_eq!(x[1], 2.0, max_relative = 1e-12);
    }

    #[test]
    fn extrapolation_recovers_constant_term() {
        let xs: Vec<f64> = (2..=6).map(|k| 0.5f64.powi(k)).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| 3.25 - 1.1 * x + 0.7 * x * x).collect();
        let v = extrapolate_to_zero(&xs, &ys, 2);
        assert_relative_eq!(v, 3.25, max_relative = 1e-10);
    }

    #[test]
    fn shared_rates_across_series() {
        // Two series with different coefficients but common rates; the joint
        // fit should recover the rates better than either noisy series alone.
        let (l1, l2) = (1.4, 5.2);
        let ts: Vec<f64> = (0..12).map(|k| 0.3 + 0.08 * k as f64).collect();
        let make = |c1: f64, c2: f64| -> Vec<f64> {
            ts.iter()
                .map(|&t| c1 * (-l1 * t).exp() + c2 * (-l2 * t).exp())
                .collect()
        };
        let series = vec![make(1.7, 0.4), make(0.5, 1.1), make(-0.3, 0.8)];
        let (g1, g2) = fit_shared_rates(&ts, &series, 0.2, 30.0);
        assert_relative_eq!(g1, l1, max_relative = 1e-4);
        assert_relative_eq!(g2, l2, max_relative = 1e-3);
        let (c1, c2, r) = two_exp_coefficients(&ts, &series[0], g1, g2);
        assert_relative_eq!(c1, 1.7, max_relative = 1e-3);
        assert_relative_eq!(c2, 0.4, max_relative = 1e-2);
        assert!(r < 1e-9);
    }

    #[test]
    fn two_exp_recovery() {
        let (l1, l2, c1, c2) = (0.9, 3.7, 2.0, -0.6);
        let ts: Vec<f64> = (0..24).map(|k| 0.2 + 0.15 * k as f64).collect();
        let ys: Vec<f64> = ts
            .iter()
            .map(|&t| c1 * (-l1 * t).exp() + c2 * (-l2 * t).exp())
            .collect();
        let fit = fit_two_exponentials(&ts, &ys, 0.05, 20.0);
        assert_relative_eq!(fit.lambda1, l1, max_relative = 1e-5);
        assert_relative_eq!(fit.lambda2, l2, max_relative = 1e-4);
        assert_relative_eq!(fit.c1, c1, max_relative = 1e-4);
        assert_relative_eq!(fit.c2, c2, max_relative = 1e-3);
        assert!(fit.residual < 1e-8);
    }
}
