//! Quadrature over the quotient surface and the verification checks built
//! on it.
//!
//! The scheme tiles a fundamental domain of the congruence group by coset
//! translates of the modular triangle: per coset, tensor Gauss-Legendre
//! panels in (x, log y) up to a local cusp height, one extra node row that
//! integrates a + b log y tails exactly, and a half-order twin grid whose
//! disagreement with the full grid is the error estimate.  Integrands with
//! log singularities are handled by subtracting a compactly supported
//! invariant log model whose exact integral is a single radial integral.

use num_complex::Complex64;

use crate::fuchsian::coset::coset_representatives;
use crate::fuchsian::{enumerate, Gamma0, GroupElement, RealMat2};
use crate::numeric::kahan::Accumulator;
use crate::numeric::quad::{adaptive_to_infinity, GaussLegendre};
use crate::{Error, Result};

mod checks;
mod testfns;

/// Panel layout of one scheme build: panel counts and Gauss orders in the
/// abscissa and in log height.
#[derive(Clone, Copy, Debug)]
pub struct SchemeResolution {
    pub x_panels: usize,
    pub x_order: usize,
    /// Target panel length in tau = log y.
    pub tau_panel: f64,
    pub tau_order: usize,
}

impl SchemeResolution {
    /// Default resolution for cheap integrands.
    pub fn standard() -> Self {
        Self { x_panels: 2, x_order: 7, tau_panel: 0.8, tau_order: 7 }
    }

    /// Reduced resolution for integrands with expensive point evaluations.
    pub fn light() -> Self {
        Self { x_panels: 1, x_order: 6, tau_panel: 1.3, tau_order: 5 }
    }

    /// Minimal resolution for double integrals.
    pub fn micro() -> Self {
        Self { x_panels: 1, x_order: 4, tau_panel: 1.8, tau_order: 4 }
    }

    /// One refinement step: double both Gauss orders, halving the node
    /// spacing everywhere.
    pub fn refined(self) -> Self {
        Self {
            x_panels: self.x_panels,
            x_order: 2 * self.x_order,
            tau_panel: self.tau_panel,
            tau_order: 2 * self.tau_order,
        }
    }

    fn halved(self) -> Self {
        Self {
            x_panels: self.x_panels,
            x_order: self.x_order.div_ceil(2).max(2),
            tau_panel: self.tau_panel,
            tau_order: self.tau_order.div_ceil(2).max(2),
        }
    }
}

/// One quadrature node: the transformed point on the upper half plane, its
/// hyperbolic weight, and the coset it came from.
#[derive(Clone, Copy, Debug)]
pub struct SchemeNode {
    pub point: Complex64,
    pub weight: f64,
    pub coset: usize,
}

/// Which of the twin grids a cached value belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridSide {
    Fine,
    Coarse,
}

/// Values cached per node, aligned with the twin grids of one scheme.
pub struct GridCache<T> {
    pub fine: Vec<T>,
    pub coarse: Vec<T>,
}

/// Quadrature scheme over the quotient: twin node sets (full and
/// half-order) tiling a fundamental domain, truncated at local cusp
/// height `y0` with exact log-linear tail rows.
pub struct QuadratureScheme {
    group: Gamma0,
    y0: f64,
    res: SchemeResolution,
    fine: Vec<SchemeNode>,
    coarse: Vec<SchemeNode>,
}

/// Value and error estimate of one integral; the estimate is the
/// disagreement of the twin grids.
#[derive(Clone, Copy, Debug)]
pub struct Integral {
    pub value: f64,
    pub estimate: f64,
}

/// A declared log singularity of an integrand: near the orbit of `at` the
/// integrand behaves like `coeff * log(1 + 1/u)` plus something smooth.
#[derive(Clone, Copy, Debug)]
pub struct LogModel {
    pub at: Complex64,
    pub coeff: f64,
}

const BUMP_INNER_U: f64 = 0.25;
const BUMP_OUTER_U: f64 = 1.0;

/// Smooth cutoff in u: one inside the inner radius, zero outside the outer.
fn bump(u: f64) -> f64 {
    let x = (u - BUMP_INNER_U) / (BUMP_OUTER_U - BUMP_INNER_U);
    if x <= 0.0 {
        1.0
    } else if x >= 1.0 {
        0.0
    } else {
        let b = |t: f64| (-1.0 / t).exp();
        b(1.0 - x) / (b(x) + b(1.0 - x))
    }
}

/// Radial profile of the invariant log model.
fn log_model_profile(u: f64) -> f64 {
    if u >= BUMP_OUTER_U {
        0.0
    } else {
        crate::halfplane::log1p_inv(u) * bump(u)
    }
}

/// Exact integral of the log model over the half plane: the area element
/// in u is 4 pi du.
pub fn log_model_mass() -> f64 {
    use std::sync::OnceLock;
    static MASS: OnceLock<f64> = OnceLock::new();
    *MASS.get_or_init(|| {
        let ub = BUMP_OUTER_U;
        // Substitute u = ub e^{-s}; the log endpoint becomes linear decay.
        let inner = adaptive_to_infinity(0.0, 4.0, 1e-13, |s| {
            let u = ub * (-s).exp();
            log_model_profile(u) * u
        });
        4.0 * std::f64::consts::PI * inner
    })
}

/// Invariant log model: the radial profile summed over the orbit of `at`.
pub fn log_model_value(group: &Gamma0, p: Complex64, at: Complex64) -> f64 {
    enumerate::fold_ball(
        group,
        p,
        at,
        BUMP_OUTER_U,
        || 0.0f64,
        |acc, term| *acc += log_model_profile(term.u),
        |a, b| a + b,
    )
}

impl QuadratureScheme {
    pub fn new(group: &Gamma0, res: SchemeResolution, y0: f64) -> Result<Self> {
        if !(y0 > 2.0) {
            return Err(Error::InvalidArgument(format!(
                "cusp truncation height {y0} must exceed 2"
            )));
        }
        if res.x_panels == 0 || res.x_order < 2 || res.tau_order < 2 || !(res.tau_panel > 0.0) {
            return Err(Error::InvalidArgument(
                "degenerate quadrature resolution".into(),
            ));
        }
        let reps = coset_representatives(group);
        let fine = build_grid(group, &reps, res, y0)?;
        let coarse = build_grid(group, &reps, res.halved(), y0)?;
        Ok(Self {
            group: group.clone(),
            y0,
            res,
            fine,
            coarse,
        })
    }

    pub fn group(&self) -> &Gamma0 {
        &self.group
    }

    pub fn y0(&self) -> f64 {
        self.y0
    }

    pub fn resolution(&self) -> SchemeResolution {
        self.res
    }

    pub fn fine(&self) -> &[SchemeNode] {
        &self.fine
    }

    pub fn coarse(&self) -> &[SchemeNode] {
        &self.coarse
    }

    /// The scheme one refinement step up: node spacing halved everywhere.
    pub fn refined(&self) -> Result<Self> {
        Self::new(&self.group, self.res.refined(), self.y0)
    }

    /// Total node mass of both grids; each should reproduce the hyperbolic
    /// volume to quadrature accuracy.
    pub fn mass(&self) -> (f64, f64) {
        let sum = |nodes: &[SchemeNode]| {
            let mut acc = Accumulator::new();
            for n in nodes {
                acc.add(n.weight);
            }
            acc.value()
        };
        (sum(&self.fine), sum(&self.coarse))
    }

    /// Evaluate a closure on every node of both grids.
    pub fn cache<T, F>(&self, f: F) -> Result<GridCache<T>>
    where
        F: Fn(Complex64) -> Result<T>,
    {
        let eval = |nodes: &[SchemeNode]| -> Result<Vec<T>> {
            nodes.iter().map(|n| f(n.point)).collect()
        };
        Ok(GridCache {
            fine: eval(&self.fine)?,
            coarse: eval(&self.coarse)?,
        })
    }
}

/// Classify which cusp a coset representative sends infinity to, and the
/// height scale of the approach: Im sigma_p^{-1}(rep z) = h * Im z for
/// large Im z.  Returns (cusp index, h).
fn cusp_approach(group: &Gamma0, rep: &GroupElement) -> Result<(usize, f64)> {
    let rm = RealMat2::from_group_element(rep);
    for (p, cusp) in group.cusps.iter().enumerate() {
        let m = cusp.scaling.inverse().compose(&rm);
        if m.c.abs() < 1e-9 {
            return Ok((p, m.a * m.a));
        }
    }
    Err(Error::Domain(format!(
        "coset representative {rep:?} approaches no listed cusp"
    )))
}

fn build_grid(
    group: &Gamma0,
    reps: &[GroupElement],
    res: SchemeResolution,
    y0: f64,
) -> Result<Vec<SchemeNode>> {
    let glx = GaussLegendre::cached(res.x_order);
    let glt = GaussLegendre::cached(res.tau_order);
    let mut nodes = Vec::new();
    for (j, rep) in reps.iter().enumerate() {
        let (_, h) = cusp_approach(group, rep)?;
        // Local height y0 at the approached cusp caps the column at
        // upstairs height lambda.
        let lambda = y0 / h;
        let tau_top = lambda.ln();
        for px in 0..res.x_panels {
            let x_lo = -0.5 + px as f64 / res.x_panels as f64;
            let x_hi = x_lo + 1.0 / res.x_panels as f64;
            for (xi, wx) in glx.nodes.iter().zip(&glx.weights) {
                let x = 0.5 * (x_lo + x_hi) + 0.5 * (x_hi - x_lo) * xi;
                let wxs = wx * 0.5 * (x_hi - x_lo);
                let tau_bot = 0.5 * (1.0 - x * x).ln();
                let n_panels = ((tau_top - tau_bot) / res.tau_panel).ceil().max(1.0) as usize;
                let dt = (tau_top - tau_bot) / n_panels as f64;
                for pt in 0..n_panels {
                    let t_lo = tau_bot + pt as f64 * dt;
                    for (ti, wt) in glt.nodes.iter().zip(&glt.weights) {
                        let tau = t_lo + 0.5 * dt * (ti + 1.0);
                        let w = wxs * wt * 0.5 * dt * (-tau).exp();
                        let base = Complex64::new(x, tau.exp());
                        nodes.push(SchemeNode {
                            point: rep.apply(base),
                            weight: w,
                            coset: j,
                        });
                    }
                }
                // Tail row: sampling at e * lambda with weight 1/lambda
                // integrates a + b log y exactly against dy/y^2.
                let base = Complex64::new(x, std::f64::consts::E * lambda);
                nodes.push(SchemeNode {
                    point: rep.apply(base),
                    weight: wxs / lambda,
                    coset: j,
                });
            }
        }
    }
    Ok(nodes)
}

fn grid_sum<F>(nodes: &[SchemeNode], f: &F) -> Result<f64>
where
    F: Fn(usize, &SchemeNode) -> Result<f64>,
{
    let mut acc = Accumulator::new();
    for (i, n) in nodes.iter().enumerate() {
        acc.add(n.weight * f(i, n)?);
    }
    Ok(acc.value())
}

/// Integrate a pointwise integrand against the hyperbolic area element.
/// The value comes from the full grid; the estimate is the disagreement
/// with the half-order twin, and exceeding `tol` is an error.
pub fn integrate<F>(scheme: &QuadratureScheme, tol: f64, f: F) -> Result<Integral>
where
    F: Fn(Complex64) -> Result<f64>,
{
    integrate_indexed(scheme, tol, |_, _, n| f(n.point))
}

/// Integrate with node identity exposed, so callers can mix cached node
/// data into the integrand.
pub fn integrate_indexed<F>(scheme: &QuadratureScheme, tol: f64, f: F) -> Result<Integral>
where
    F: Fn(GridSide, usize, &SchemeNode) -> Result<f64>,
{
    integrate_log_singular_indexed(scheme, &[], tol, f)
}

/// Integrate an integrand with declared log singularities: each model is
/// subtracted as a compactly supported invariant log profile around the
/// orbit of its point and restored through the exact model mass.
pub fn integrate_log_singular<F>(
    scheme: &QuadratureScheme,
    models: &[LogModel],
    tol: f64,
    f: F,
) -> Result<Integral>
where
    F: Fn(Complex64) -> Result<f64>,
{
    integrate_log_singular_indexed(scheme, models, tol, |_, _, n| f(n.point))
}

/// Indexed variant of `integrate_log_singular`.
pub fn integrate_log_singular_indexed<F>(
    scheme: &QuadratureScheme,
    models: &[LogModel],
    tol: f64,
    f: F,
) -> Result<Integral>
where
    F: Fn(GridSide, usize, &SchemeNode) -> Result<f64>,
{
    let group = &scheme.group;
    let reg = |side: GridSide, i: usize, n: &SchemeNode| -> Result<f64> {
        let mut v = f(side, i, n)?;
        for m in models {
            v -= m.coeff * log_model_value(group, n.point, m.at);
        }
        Ok(v)
    };
    let vf = grid_sum(&scheme.fine, &|i, n| reg(GridSide::Fine, i, n))?;
    let vc = grid_sum(&scheme.coarse, &|i, n| reg(GridSide::Coarse, i, n))?;
    let restored: f64 = models.iter().map(|m| m.coeff * log_model_mass()).sum();
    let value = vf + restored;
    let estimate = (vf - vc).abs();
    if estimate > tol {
        return Err(Error::Convergence(format!(
            "quadrature estimate {estimate:.3e} above tolerance {tol:.3e} (value {value:.6e})"
        )));
    }
    Ok(Integral { value, estimate })
}
