//! Quadrature over the truncated modular fundamental domain
//! `{ |x| <= 1/2, x^2 + y^2 >= 1, y <= 1 }` against `dx dy / y^2`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::gauss::gauss_legendre;
use super::quad::QuadratureResult;
use super::sum::{CompensatedSum, ComplexSum};
use crate::error::{Error, Result};

/// Hyperbolic area of the truncated domain: pi/3 - 1.
pub fn truncated_domain_area() -> f64 {
    std::f64::consts::FRAC_PI_3 - 1.0
}

/// Slack on the closed boundary conditions, so that rounded corner points
/// such as `1/2 + i sqrt(3)/2` count as inside.
const BOUNDARY_TOL: f64 = 1e-12;

/// Closed membership test for the truncated fundamental domain.
pub fn in_truncated_domain(x: f64, y: f64) -> bool {
    x.abs() <= 0.5 + BOUNDARY_TOL && x * x + y * y >= 1.0 - BOUNDARY_TOL && y <= 1.0 + BOUNDARY_TOL
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum ChartRule {
    /// Tensor Gauss-Legendre with `order` nodes per dimension on each of the
    /// two x-panels `[-1/2, 0]` and `[0, 1/2]`.
    GaussLegendre { order: usize },
    /// Seeded rejection sampling from the bounding box.
    MonteCarlo { points: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartNode {
    pub x: f64,
    pub y: f64,
    /// Includes the `1/y^2` density.
    pub weight: f64,
}

/// Deterministic node set for `rule`.
pub fn chart_nodes(rule: ChartRule) -> Vec<ChartNode> {
    match rule {
        ChartRule::GaussLegendre { order } => gauss_nodes(order.max(1)),
        ChartRule::MonteCarlo { points, seed } => monte_carlo_nodes(points, seed),
    }
}

fn gauss_nodes(order: usize) -> Vec<ChartNode> {
    let (t, w) = gauss_legendre(order);
    let mut out = Vec::with_capacity(2 * order * order);
    for (lo, hi) in [(-0.5, 0.0), (0.0, 0.5)] {
        let hx = 0.5 * (hi - lo);
        let cx = 0.5 * (hi + lo);
        for (tx, wx) in t.iter().zip(&w) {
            let x = cx + hx * tx;
            let y_lo = (1.0 - x * x).sqrt();
            let hy = 0.5 * (1.0 - y_lo);
            let cy = 0.5 * (1.0 + y_lo);
            for (ty, wy) in t.iter().zip(&w) {
                let y = cy + hy * ty;
                out.push(ChartNode { x, y, weight: hx * wx * hy * wy / (y * y) });
            }
        }
    }
    out
}

const BOX_Y_LO: f64 = 0.866_025_403_784_438_6; // sqrt(3)/2

fn monte_carlo_nodes(points: usize, seed: u64) -> Vec<ChartNode> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let box_area = 1.0 - BOX_Y_LO;
    let w = box_area / points.max(1) as f64;
    let mut out = Vec::new();
    for _ in 0..points {
        let x: f64 = rng.gen_range(-0.5..=0.5);
        let y: f64 = rng.gen_range(BOX_Y_LO..=1.0);
        if in_truncated_domain(x, y) {
            out.push(ChartNode { x, y, weight: w / (y * y) });
        }
    }
    out
}

/// Monte-Carlo estimate of `integral f dmu` with its standard error, counting
/// rejected draws as zeros.
pub fn monte_carlo_estimate<F: Fn(f64, f64) -> f64>(f: F, points: usize, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let box_area = 1.0 - BOX_Y_LO;
    let mut s1 = CompensatedSum::new();
    let mut s2 = CompensatedSum::new();
    for _ in 0..points {
        let x: f64 = rng.gen_range(-0.5..=0.5);
        let y: f64 = rng.gen_range(BOX_Y_LO..=1.0);
        let v = if in_truncated_domain(x, y) { box_area * f(x, y) / (y * y) } else { 0.0 };
        s1.add(v);
        s2.add(v * v);
    }
    let n = points as f64;
    let mean = s1.value() / n;
    let var = (s2.value() / n - mean * mean).max(0.0) * n / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Integrate `f(x, y)` against `dx dy / y^2` over the truncated domain.
///
/// Gauss-Legendre starts at the requested order and doubles until two
/// successive estimates agree to `tol`; Monte Carlo reports its standard error.
pub fn quad_chart<F>(f: F, rule: ChartRule, tol: f64) -> Result<QuadratureResult>
where
    F: Fn(f64, f64) -> Complex64,
{
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let eval = |nodes: &[ChartNode]| -> ComplexSum {
        nodes.iter().map(|n| f(n.x, n.y) * n.weight).collect()
    };
    match rule {
        ChartRule::GaussLegendre { order } => {
            let mut order = order.max(2);
            let mut nodes = gauss_nodes(order);
            let mut evaluations = nodes.len();
            let mut prev = eval(&nodes).value();
            loop {
                order *= 2;
                nodes = gauss_nodes(order);
                evaluations += nodes.len();
                let acc = eval(&nodes);
                let cur = acc.value();
                let err = (cur - prev).norm().max(16.0 * f64::EPSILON * acc.abs_total());
                if err <= tol {
                    return Ok(QuadratureResult { value: cur, err, evaluations });
                }
                if order >= 512 {
                    return Err(Error::NoConvergence { err, tol });
                }
                prev = cur;
            }
        }
        ChartRule::MonteCarlo { points, seed } => {
            let re = monte_carlo_estimate(|x, y| f(x, y).re, points, seed);
            let im = monte_carlo_estimate(|x, y| f(x, y).im, points, seed);
            let err = re.1.hypot(im.1);
            if err > tol {
                return Err(Error::NoConvergence { err, tol });
            }
            Ok(QuadratureResult { value: Complex64::new(re.0, im.0), err, evaluations: 2 * points })
        }
    }
}
