//! Gaussian theta series `sum_{v in L} exp(-pi |v|^2)` with a rigorous
//! bound on the discarded tail.
//!
//! Tail bound: if `lambda_1` is the minimum of an `N`-dimensional lattice,
//! balls of radius `lambda_1 / 2` around lattice points are disjoint, so
//! `#{|v| <= rho} <= (1 + 2 rho / lambda_1)^N`. Integrating by parts against
//! `exp(-pi rho^2)` and bounding the incomplete gamma function gives, for
//! `2 pi R^2 > N`,
//!
//! ```text
//! sum_{|v| > R} exp(-pi |v|^2) <= (1 + 2R/lambda_1)^N exp(-pi R^2) / (1 - N / (2 pi R^2)).
//! ```

use serde::Serialize;

use super::enumerate::{shortest_length, visit, BOUNDARY_SLACK, DEFAULT_CAPACITY};
use super::MetrizedLattice;
use crate::error::{Error, Result};
use crate::numerics::CompensatedSum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThetaValue {
    /// `1 + excess`; always at least 1.
    pub value: f64,
    /// Contribution of the nonzero vectors, summed on its own so that
    /// `value - 1` does not lose precision for sparse lattices.
    pub excess: f64,
    pub tail_bound: f64,
    /// Enumeration cutoff.
    pub radius: f64,
    /// Number of nonzero vectors summed.
    pub points: u64,
}

impl ThetaValue {
    /// `value^a - 1`, computed without cancellation.
    pub fn pow_minus_one(&self, a: f64) -> f64 {
        (a * self.excess.ln_1p()).exp_m1()
    }
}

/// Upper bound on `sum_{|v| > R} exp(-pi |v|^2)`; infinite when the closed
/// form does not apply.
pub fn tail_bound(radius: f64, lambda1: f64, dim: usize) -> f64 {
    let n = dim as f64;
    let q = 2.0 * std::f64::consts::PI * radius * radius;
    if q <= n || !(lambda1 > 0.0) {
        return f64::INFINITY;
    }
    let log_count = n * (2.0 * radius / lambda1).ln_1p();
    (log_count - std::f64::consts::PI * radius * radius).exp() / (1.0 - n / q)
}

/// Bound on the whole nonzero part `theta - 1` from the minimum alone.
pub fn excess_bound(lambda1: f64, dim: usize) -> f64 {
    tail_bound(lambda1 * (1.0 - 1e-12), lambda1, dim)
}

/// Smallest radius (up to a small factor) whose tail bound is below `tol`.
pub fn radius_for(tol: f64, lambda1: f64, dim: usize) -> f64 {
    let n = dim as f64;
    let pi = std::f64::consts::PI;
    let target = -tol.ln();
    let mut r = ((n + 1.0) / pi).sqrt().max(1e-3);
    for _ in 0..50 {
        let q = 2.0 * pi * r * r;
        let extra = if q > n { -(1.0 - n / q).ln() } else { 1.0 };
        let next = ((target + n * (2.0 * r / lambda1).ln_1p() + extra) / pi).sqrt();
        let next = next.max(((n + 1.0) / (2.0 * pi)).sqrt());
        if (next - r).abs() <= 1e-12 * r {
            r = next;
            break;
        }
        r = next;
    }
    while tail_bound(r, lambda1, dim) > tol {
        r *= 1.001;
    }
    r
}

pub fn theta(lattice: &MetrizedLattice, tol: f64) -> Result<ThetaValue> {
    theta_with_capacity(lattice, tol, DEFAULT_CAPACITY)
}

pub fn theta_with_capacity(lattice: &MetrizedLattice, tol: f64, capacity: u64) -> Result<ThetaValue> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("theta tolerance must be positive, got {tol}")));
    }
    let dim = lattice.z_rank();
    let lambda1 = shortest_length(lattice)?;
    let radius = radius_for(tol, lambda1, dim);
    let tail = tail_bound(radius, lambda1, dim);
    let red = lattice.reduction();
    let mut acc = CompensatedSum::new();
    let r2 = radius * radius * (1.0 + BOUNDARY_SLACK);
    let points = visit(red, r2, true, capacity / 2, |_, n2| {
        acc.add(2.0 * (-std::f64::consts::PI * n2).exp());
    })?;
    let excess = acc.value();
    Ok(ThetaValue { value: 1.0 + excess, excess, tail_bound: tail, radius, points: 2 * points })
}
