//! The arithmetic cohomology numbers `h0`, `h1` and the Riemann-Roch and
//! Serre-duality residuals.
//!
//! `h0(L) = log theta(L)` and `h1(L) = h0(dual L)`. Both residuals vanish by
//! Poisson summation; each comes back with the bound propagated from the
//! theta tail bounds plus a rounding allowance.

use serde::Serialize;

use crate::error::Result;
use crate::lattice::{theta, MetrizedLattice, ThetaValue};

/// Multiplier on machine epsilon for the rounding part of residual bounds.
const ROUNDING_ULPS: f64 = 16.0;

pub fn h0(lattice: &MetrizedLattice, tol: f64) -> Result<f64> {
    Ok(theta(lattice, tol)?.excess.ln_1p())
}

pub fn h1(lattice: &MetrizedLattice, tol: f64) -> Result<f64> {
    h0(&lattice.dual(), tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residual {
    pub residual: f64,
    pub bound: f64,
    pub h0: f64,
    pub h1: f64,
    pub degree: f64,
}

impl Residual {
    pub fn within_bound(&self) -> bool {
        self.residual.abs() <= self.bound
    }
}

struct Sides {
    theta0: ThetaValue,
    theta1: ThetaValue,
    h0: f64,
    h1: f64,
    degree: f64,
    shift: f64,
}

fn sides(lattice: &MetrizedLattice, tol: f64) -> Result<Sides> {
    let theta0 = theta(lattice, tol)?;
    let theta1 = theta(&lattice.dual(), tol)?;
    Ok(Sides {
        h0: theta0.excess.ln_1p(),
        h1: theta1.excess.ln_1p(),
        theta0,
        theta1,
        degree: lattice.degree(),
        shift: 0.5 * lattice.rank_over_field() as f64 * lattice.field().log_abs_discriminant(),
    })
}

/// `(h0 - h1) - (deg - (r/2) log|Delta_F|)`.
pub fn rr_residual(lattice: &MetrizedLattice, tol: f64) -> Result<Residual> {
    let s = sides(lattice, tol)?;
    let residual = (s.h0 - s.h1) - (s.degree - s.shift);
    let tails = s.theta0.tail_bound / s.theta0.value + s.theta1.tail_bound / s.theta1.value;
    let scale = 1.0 + s.h0.abs() + s.h1.abs() + s.degree.abs() + s.shift.abs();
    Ok(Residual { residual, bound: tails + ROUNDING_ULPS * f64::EPSILON * scale, h0: s.h0, h1: s.h1, degree: s.degree })
}

/// Multiplicative form: `e^{h0} - e^{h1} N(L) N(kappa_F)^{-r/2}` with
/// `N(L) = e^{deg}` and `N(kappa_F) = |Delta_F|`.
pub fn serre_residual(lattice: &MetrizedLattice, tol: f64) -> Result<Residual> {
    let s = sides(lattice, tol)?;
    let factor = (s.degree - s.shift).exp();
    let lhs = s.theta0.value;
    let rhs = s.theta1.value * factor;
    let residual = lhs - rhs;
    let tails = s.theta0.tail_bound + s.theta1.tail_bound * factor;
    let scale = lhs.abs() + rhs.abs();
    Ok(Residual { residual, bound: tails + ROUNDING_ULPS * f64::EPSILON * scale, h0: s.h0, h1: s.h1, degree: s.degree })
}
