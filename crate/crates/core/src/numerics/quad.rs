//! Adaptive one-dimensional quadrature with error estimates.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;
use serde::Serialize;

use super::gauss::{WG7, WGK15, XGK15};
use super::sum::ComplexSum;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: Complex64,
    pub err: f64,
    pub evaluations: usize,
}

impl QuadratureResult {
    pub fn zero() -> Self {
        Self { value: Complex64::new(0.0, 0.0), err: 0.0, evaluations: 0 }
    }
}

/// Panel budget and behaviour for [`quad_1d_with`].
#[derive(Debug, Clone, Copy)]
pub struct Quad1dConfig {
    pub max_panels: usize,
}

impl Default for Quad1dConfig {
    fn default() -> Self {
        Self { max_panels: 4000 }
    }
}

/// Integrate `f` over `[a, b]`; `b` may be `f64::INFINITY`.
pub fn quad_1d<F>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Complex64,
{
    quad_1d_with(f, a, b, tol, Quad1dConfig::default())
}

pub fn quad_1d_with<F>(f: F, a: f64, b: f64, tol: f64, cfg: Quad1dConfig) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Complex64,
{
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    if !a.is_finite() || b.is_nan() {
        return Err(Error::Domain("lower limit must be finite".into()));
    }
    if b == a {
        return Ok(QuadratureResult::zero());
    }
    if b.is_finite() {
        return adaptive(&f, a, b, tol, cfg.max_panels);
    }
    if b < a {
        return Err(Error::Domain("upper limit -inf is not supported".into()));
    }

    // [a, a+1] directly, then x = a + e^u on geometrically growing u-segments.
    let mut total = adaptive(&f, a, a + 1.0, tol / 4.0, cfg.max_panels)?;
    let g = |u: f64| {
        let e = u.exp();
        f(a + e) * e
    };
    let mut lo = 0.0;
    let mut hi = 4.0;
    let mut share = tol / 4.0;
    loop {
        let piece = adaptive(&g, lo, hi, share, cfg.max_panels)?;
        total.value += piece.value;
        total.err += piece.err;
        total.evaluations += piece.evaluations;
        let magnitude = piece.value.norm() + piece.err;
        if magnitude <= tol / 10.0 && lo > 0.0 {
            // last segment bounds the decaying remainder
            total.err += magnitude;
            break;
        }
        if hi >= 700.0 {
            return Err(Error::NoConvergence { err: magnitude, tol });
        }
        lo = hi;
        hi = (2.0 * hi).min(700.0);
        share /= 2.0;
    }
    if total.err > tol {
        return Err(Error::NoConvergence { err: total.err, tol });
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err).then(other.a.total_cmp(&self.a))
    }
}

fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK15[7];
    let mut gauss = fc * WG7[3];
    let mut abs = fc.norm() * WGK15[7];
    for j in 0..7 {
        let dx = h * XGK15[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        kron += (f1 + f2) * WGK15[j];
        abs += (f1.norm() + f2.norm()) * WGK15[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG7[j / 2];
        }
    }
    let value = kron * h;
    let err = ((kron - gauss) * h).norm().max(4.0 * f64::EPSILON * abs * h.abs());
    Panel { a, b, value, err }
}

fn adaptive<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    max_panels: usize,
) -> Result<QuadratureResult> {
    let first = gk15(f, a, b);
    let mut evaluations = 15;
    let mut heap = BinaryHeap::new();
    let mut err_total = first.err;
    heap.push(first);
    while err_total > tol && heap.len() < max_panels {
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // panel cannot be split further in floating point
            heap.push(worst);
            break;
        }
        let left = gk15(f, worst.a, mid);
        let right = gk15(f, mid, worst.b);
        evaluations += 30;
        err_total += left.err + right.err - worst.err;
        heap.push(left);
        heap.push(right);
    }
    // Re-sum in a canonical order so the result does not depend on heap layout.
    let mut panels = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value: ComplexSum = panels.iter().map(|p| p.value).collect();
    let err: f64 = panels.iter().map(|p| p.err).sum();
    if !value.value().re.is_finite() || !value.value().im.is_finite() {
        return Err(Error::Domain("integrand is not finite on the interval".into()));
    }
    if err > tol {
        return Err(Error::NoConvergence { err, tol });
    }
    Ok(QuadratureResult { value: value.value(), err, evaluations })
}

/// Real-valued convenience wrapper.
pub fn quad_1d_real<F>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadratureResult>
where
    F: Fn(f64) -> f64,
{
    quad_1d(|x| Complex64::new(f(x), 0.0), a, b, tol)
}
