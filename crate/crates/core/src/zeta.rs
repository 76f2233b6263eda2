//! The rank-`r` non-abelian zeta function
//!
//! ```text
//! Z(s) = int over M_{F,r} of (theta(L)^A - 1) covol(L)^s dmu(L)
//! ```
//!
//! evaluated two ways. The direct path integrates the whole covolume line
//! and needs `Re s > A`. The continued path splits at covolume 1, folds the
//! lower half onto the upper one by Poisson summation and reads
//!
//! ```text
//! Z(s) = I(s) + I(A - s) - W/s - W/(A - s),   I(s) = int_{covol >= 1} (theta^A - 1) covol^s dmu,
//! ```
//!
//! with `W` the exact slice volume. `I` is entire, so the continued path is
//! valid away from the simple poles at `0` and `A`.
//!
//! Node values `theta^A - 1` are independent of `s`; an evaluator computes
//! them once (in parallel) and every `Z(s)` is then a weighted exponential
//! sum, accumulated sequentially with compensation.

use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::NumberFieldData;
use crate::lattice::{excess_bound, shortest_length, theta};
use crate::moduli::{moduli_volume, ChartSample, ModuliChart, Parametrization, QuadratureSpec, V_ORDER, V_ORDER_COARSE};
use crate::numerics::{CompensatedSum, ComplexSum, CompositeRule};
use crate::par::{self, Execution};

const ROUNDING_ULPS: f64 = 64.0;
/// Relative distance to a pole treated as hitting it.
const POLE_TOL: f64 = 1e-12;
const FIT_POINTS: usize = 32;
/// Safety factor on chart-sampled shortest lengths used in tail bounds.
const LAMBDA_SAFETY: f64 = 0.95;
const TAIL_STEP: f64 = 1.0 / 32.0;

#[derive(Debug, Clone)]
pub struct ZetaSpec {
    pub field: Arc<NumberFieldData>,
    pub rank: usize,
    pub a: f64,
    pub quad: QuadratureSpec,
    pub tol: f64,
}

impl ZetaSpec {
    pub fn new(field: Arc<NumberFieldData>, rank: usize, a: f64) -> Result<Self> {
        let spec = Self { field, rank, a, quad: QuadratureSpec::default(), tol: 1e-12 };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_quad(mut self, quad: QuadratureSpec) -> Result<Self> {
        quad.validate()?;
        self.quad = quad;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(Error::Domain(format!("A must be a positive finite real, got {}", self.a)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Domain(format!("tolerance must be positive, got {}", self.tol)));
        }
        Ok(())
    }

    fn theta_tol(&self) -> f64 {
        (self.tol * 1e-6).min(1e-18)
    }

    fn truncation_target(&self) -> f64 {
        (self.tol * 1e-10).min(1e-22)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Direct,
    Continued,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Direct => "direct",
            Method::Continued => "continued",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaPoint {
    pub s: Complex64,
    pub value: Complex64,
    pub err: f64,
    pub method: Method,
}

impl Serialize for ZetaPoint {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = ser.serialize_struct("ZetaPoint", 4)?;
        st.serialize_field("s", &[self.s.re, self.s.im])?;
        st.serialize_field("value", &[self.value.re, self.value.im])?;
        st.serialize_field("err", &self.err)?;
        st.serialize_field("method", &self.method)?;
        st.end()
    }
}

/// One covolume-line quadrature with the chart already summed out:
/// `sum_k w_k G(u_k) e^{s u_k}`.
#[derive(Debug, Clone)]
struct LineRule {
    u: Vec<f64>,
    w: Vec<f64>,
    g: Vec<f64>,
    g_err: Vec<f64>,
}

impl LineRule {
    /// Value, rounding scale and propagated theta error.
    fn eval(&self, s: Complex64) -> (Complex64, f64, f64) {
        let mut acc = ComplexSum::new();
        let mut theta_err = CompensatedSum::new();
        for k in 0..self.u.len() {
            let e = (s * self.u[k]).exp();
            acc.add(e * (self.w[k] * self.g[k]));
            theta_err.add(self.w[k].abs() * self.g_err[k] * e.norm());
        }
        (acc.value(), acc.abs_total(), theta_err.value())
    }
}

/// A covolume range `[e^lo, e^hi]` with fine, coarse-in-u and coarse-chart
/// rules for the error estimate.
#[derive(Debug, Clone)]
struct Side {
    lo: f64,
    hi: f64,
    fine: LineRule,
    coarse_u: LineRule,
    coarse_chart: Option<LineRule>,
}

impl Side {
    fn eval(&self, s: Complex64) -> (Complex64, f64) {
        let (f, scale, theta_err) = self.fine.eval(s);
        let (cu, _, _) = self.coarse_u.eval(s);
        let mut err = (f - cu).norm() + ROUNDING_ULPS * f64::EPSILON * scale + theta_err;
        if let Some(cc) = &self.coarse_chart {
            err += (f - cc.eval(s).0).norm();
        }
        (f, err)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Residues {
    pub res0: f64,
    pub res_a: f64,
    /// Contour-integral estimates of the residues at `0` and `A`.
    pub fit0: [f64; 2],
    pub fit_a: [f64; 2],
    pub fit_err0: f64,
    pub fit_err_a: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FeRow {
    pub s: [f64; 2],
    pub value: [f64; 2],
    pub reflected: [f64; 2],
    pub residual: f64,
    pub err: f64,
    /// `|direct - continued|` and the combined error, when `Re s > A`.
    pub path_residual: Option<f64>,
    pub path_err: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FeScan {
    pub max_residual: f64,
    /// `max_residual` relative to the magnitude of the summed terms.
    pub max_relative_residual: f64,
    pub max_path_residual: Option<f64>,
    /// Largest `path_residual - path_err`; non-positive when every direct
    /// value agrees with its continued value within the reported errors.
    pub max_path_excess: Option<f64>,
    pub rows: Vec<FeRow>,
}

/// Precomputed zeta quadrature for one spec.
#[derive(Debug)]
pub struct ZetaEvaluator {
    spec: ZetaSpec,
    exec: Execution,
    chart: ModuliChart,
    fine: Vec<ChartSample>,
    coarse: Option<Vec<ChartSample>>,
    volume: f64,
    chart_mass: f64,
    dim: usize,
    lambda_min: f64,
    dual_lambda_min: f64,
    upper: Side,
    direct: OnceLock<Side>,
}

impl ZetaEvaluator {
    pub fn new(spec: ZetaSpec) -> Result<Self> {
        Self::with_execution(spec, Execution::default())
    }

    pub fn with_execution(spec: ZetaSpec, exec: Execution) -> Result<Self> {
        spec.validate()?;
        let chart = ModuliChart::new(spec.field.clone(), spec.rank)?;
        let volume = moduli_volume(&spec.field, spec.rank)?;
        let fine = chart.samples(&spec.quad)?;
        let coarse = if chart.parametrization() == Parametrization::Point {
            None
        } else {
            Some(chart.samples(&spec.quad.coarse())?)
        };
        let dim = spec.rank * spec.field.degree;
        let mut lambda_min = f64::INFINITY;
        let mut dual_lambda_min = f64::INFINITY;
        for s in fine.iter().chain(coarse.iter().flatten()) {
            let l = chart.lattice(&s.params, 1.0)?;
            lambda_min = lambda_min.min(shortest_length(&l)?);
            dual_lambda_min = dual_lambda_min.min(shortest_length(&l.dual())?);
        }
        if chart.dimension() > 0 {
            lambda_min *= LAMBDA_SAFETY;
            dual_lambda_min *= LAMBDA_SAFETY;
        }
        let chart_mass: f64 = fine.iter().map(|s| s.weight.abs()).collect::<CompensatedSum>().value();
        let mut ev = Self {
            spec,
            exec,
            chart,
            fine,
            coarse,
            volume,
            chart_mass,
            dim,
            lambda_min,
            dual_lambda_min,
            upper: Side { lo: 0.0, hi: 0.0, fine: empty_rule(), coarse_u: empty_rule(), coarse_chart: None },
            direct: OnceLock::new(),
        };
        let hi = ev.upper_cut();
        ev.upper = ev.build_side(0.0, hi, ev.spec.quad.v_panels)?;
        Ok(ev)
    }

    pub fn spec(&self) -> &ZetaSpec {
        &self.spec
    }

    /// The exact slice volume `W`.
    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// Bound on `theta - 1` at log-covolume `u` over the whole chart.
    fn excess_at(&self, u: f64) -> f64 {
        excess_bound(self.lambda_min * (u / self.dim as f64).exp(), self.dim)
    }

    /// Bound on `theta(dual) - 1` at log-covolume `u`.
    fn dual_excess_at(&self, u: f64) -> f64 {
        excess_bound(self.dual_lambda_min * (-u / self.dim as f64).exp(), self.dim)
    }

    fn upper_cut(&self) -> f64 {
        if let Some(v) = self.spec.quad.v_max {
            return v.ln();
        }
        let target = self.spec.truncation_target();
        let mut u = 0.5;
        while !(self.excess_at(u) <= target) {
            u += 0.125;
        }
        u
    }

    fn lower_cut(&self) -> f64 {
        let target = self.spec.truncation_target();
        let mut u = -0.5;
        while !(self.dual_excess_at(u) <= target) {
            u -= 0.125;
        }
        u
    }

    fn build_side(&self, lo: f64, hi: f64, panels: usize) -> Result<Side> {
        let fine_u = CompositeRule::new(lo, hi, panels, V_ORDER);
        let coarse_u = CompositeRule::new(lo, hi, panels, V_ORDER_COARSE);
        Ok(Side {
            lo,
            hi,
            fine: self.line_rule(&self.fine, &fine_u)?,
            coarse_u: self.line_rule(&self.fine, &coarse_u)?,
            coarse_chart: match &self.coarse {
                Some(c) => Some(self.line_rule(c, &fine_u)?),
                None => None,
            },
        })
    }

    fn line_rule(&self, samples: &[ChartSample], rule: &CompositeRule) -> Result<LineRule> {
        let jobs: Vec<(usize, f64)> =
            rule.nodes.iter().flat_map(|&u| (0..samples.len()).map(move |j| (j, u))).collect();
        let a = self.spec.a;
        let tol = self.spec.theta_tol();
        let values = par::try_map(self.exec, &jobs, |&(j, u)| -> Result<(f64, f64)> {
            let l = self.chart.lattice(&samples[j].params, u.exp())?;
            let t = theta(&l, tol)?;
            let growth = (t.value + t.tail_bound).powf((a - 1.0).max(0.0));
            Ok((t.pow_minus_one(a), a * t.tail_bound * growth))
        })?;
        let m = samples.len();
        let mut g = Vec::with_capacity(rule.len());
        let mut g_err = Vec::with_capacity(rule.len());
        for chunk in values.chunks(m) {
            let mut acc = CompensatedSum::new();
            let mut err = CompensatedSum::new();
            for (s, (v, e)) in samples.iter().zip(chunk) {
                acc.add(s.weight * v);
                err.add(s.weight.abs() * e);
            }
            g.push(acc.value());
            g_err.push(err.value() + ROUNDING_ULPS * f64::EPSILON * acc.abs_total());
        }
        Ok(LineRule { u: rule.nodes.clone(), w: rule.weights.clone(), g, g_err })
    }

    fn direct_side(&self) -> Result<&Side> {
        if let Some(side) = self.direct.get() {
            return Ok(side);
        }
        let lo = self.lower_cut();
        let hi = self.upper.hi;
        let panels = ((self.spec.quad.v_panels as f64) * (hi - lo) / hi).ceil() as usize;
        let side = self.build_side(lo, hi, panels)?;
        Ok(self.direct.get_or_init(|| side))
    }

    /// Bound on `chart_mass * int_{hi}^inf A E e^{A E} e^{sigma u} du`,
    /// summing the per-step supremum of the integrand.
    fn upper_tail(&self, hi: f64, sigma: f64) -> f64 {
        let a = self.spec.a;
        let h = TAIL_STEP;
        let mut total = 0.0;
        for k in 0..100_000 {
            let u = hi + h * k as f64;
            let e = self.excess_at(u);
            if !e.is_finite() {
                return f64::INFINITY;
            }
            let growth = if sigma > 0.0 { (sigma * (u + h)).exp() } else { (sigma * u).exp() };
            let term = h * a * e * (a * e).exp() * growth;
            total += term;
            if term <= 1e-30 * total || term == 0.0 {
                break;
            }
        }
        self.chart_mass * total
    }

    pub fn i_integral(&self, s: Complex64) -> Result<ZetaPoint> {
        let (value, err) = self.upper.eval(s);
        let err = err + self.upper_tail(self.upper.hi, s.re);
        Ok(ZetaPoint { s, value, err, method: Method::Continued })
    }

    pub fn direct(&self, s: Complex64) -> Result<ZetaPoint> {
        let a = self.spec.a;
        if !(s.re > a) {
            return Err(Error::Domain(format!("the defining integral needs Re(s) > A = {a}, got Re(s) = {}", s.re)));
        }
        let side = self.direct_side()?;
        let (body, err) = side.eval(s);
        // Below e^lo only the zero vector of the dual survives, so
        // theta^A - 1 = V^{-A} - 1 up to the remainder bounded next.
        let v_min = side.lo.exp();
        let sa = s - a;
        let head = self.chart_mass * ((sa * side.lo).exp() / sa - (s * side.lo).exp() / s);
        let e = self.dual_excess_at(side.lo);
        let head_err = self.chart_mass * a * e * (a * e).exp() * v_min.powf(s.re - a) / (s.re - a);
        let tail = self.upper_tail(side.hi, s.re);
        let value = body + head;
        let rounding = ROUNDING_ULPS * f64::EPSILON * (body.norm() + head.norm());
        Ok(ZetaPoint { s, value, err: err + head_err + tail + rounding, method: Method::Direct })
    }

    fn check_pole(&self, s: Complex64) -> Result<()> {
        for p in [0.0, self.spec.a] {
            if (s - p).norm() <= POLE_TOL * (1.0 + p) {
                return Err(Error::Pole { re: s.re, im: s.im });
            }
        }
        Ok(())
    }

    /// Continued value together with the magnitude of its summed terms.
    fn continued_parts(&self, s: Complex64) -> Result<(ZetaPoint, f64)> {
        self.check_pole(s)?;
        let w = self.volume;
        let r = self.spec.a - s;
        let i1 = self.i_integral(s)?;
        let i2 = self.i_integral(r)?;
        let p1 = w / s;
        let p2 = w / r;
        let value = (i1.value + i2.value) - (p1 + p2);
        let scale = i1.value.norm() + i2.value.norm() + p1.norm() + p2.norm();
        let err = i1.err + i2.err + ROUNDING_ULPS * f64::EPSILON * scale;
        Ok((ZetaPoint { s, value, err, method: Method::Continued }, scale))
    }

    pub fn continued(&self, s: Complex64) -> Result<ZetaPoint> {
        Ok(self.continued_parts(s)?.0)
    }

    /// Signed residues `(-W, +W)` plus contour-integral estimates
    /// `(1/M) sum (s_k - s_0) Z(s_k)` on circles around both poles.
    pub fn residues(&self) -> Result<Residues> {
        let a = self.spec.a;
        let rho = (a / 4.0).min(0.1);
        let fit = |center: f64| -> Result<(Complex64, f64)> {
            let mut acc = ComplexSum::new();
            let mut err = 0.0;
            for k in 0..FIT_POINTS {
                let d = Complex64::from_polar(rho, std::f64::consts::TAU * k as f64 / FIT_POINTS as f64);
                let z = self.continued(center + d)?;
                acc.add(d * z.value);
                err += rho * z.err;
            }
            // Aliasing from the other pole, at distance A from the center.
            let alias = 2.0 * self.volume * (rho / (a - rho)).powi(FIT_POINTS as i32);
            Ok((acc.value() / FIT_POINTS as f64, err / FIT_POINTS as f64 + alias))
        };
        let (f0, e0) = fit(0.0)?;
        let (fa, ea) = fit(a)?;
        Ok(Residues {
            res0: -self.volume,
            res_a: self.volume,
            fit0: [f0.re, f0.im],
            fit_a: [fa.re, fa.im],
            fit_err0: e0,
            fit_err_a: ea,
        })
    }

    pub fn fe_scan(&self, grid: &[Complex64]) -> Result<FeScan> {
        let a = self.spec.a;
        let mut rows = Vec::with_capacity(grid.len());
        let mut max_residual: f64 = 0.0;
        let mut max_rel: f64 = 0.0;
        let mut max_path: Option<f64> = None;
        let mut max_excess: Option<f64> = None;
        for &s in grid {
            let (z, scale1) = self.continued_parts(s)?;
            let (zr, scale2) = self.continued_parts(a - s)?;
            let residual = (z.value - zr.value).norm();
            max_residual = max_residual.max(residual);
            let scale = scale1.max(scale2);
            if scale > 0.0 {
                max_rel = max_rel.max(residual / scale);
            }
            let (path_residual, path_err) = if s.re > a {
                let d = self.direct(s)?;
                let r = (d.value - z.value).norm();
                let e = d.err + z.err;
                max_path = Some(max_path.map_or(r, |m| m.max(r)));
                max_excess = Some(max_excess.map_or(r - e, |m| m.max(r - e)));
                (Some(r), Some(e))
            } else {
                (None, None)
            };
            rows.push(FeRow {
                s: [s.re, s.im],
                value: [z.value.re, z.value.im],
                reflected: [zr.value.re, zr.value.im],
                residual,
                err: z.err + zr.err,
                path_residual,
                path_err,
            });
        }
        Ok(FeScan {
            max_residual,
            max_relative_residual: max_rel,
            max_path_residual: max_path,
            max_path_excess: max_excess,
            rows,
        })
    }
}

fn empty_rule() -> LineRule {
    LineRule { u: Vec::new(), w: Vec::new(), g: Vec::new(), g_err: Vec::new() }
}

pub fn zeta_direct(spec: &ZetaSpec, s: Complex64) -> Result<ZetaPoint> {
    ZetaEvaluator::new(spec.clone())?.direct(s)
}

pub fn i_integral(spec: &ZetaSpec, s: Complex64) -> Result<ZetaPoint> {
    ZetaEvaluator::new(spec.clone())?.i_integral(s)
}

pub fn zeta_continued(spec: &ZetaSpec, s: Complex64) -> Result<ZetaPoint> {
    ZetaEvaluator::new(spec.clone())?.continued(s)
}

pub fn residues(spec: &ZetaSpec) -> Result<Residues> {
    ZetaEvaluator::new(spec.clone())?.residues()
}

pub fn fe_scan(spec: &ZetaSpec, grid: &[Complex64]) -> Result<FeScan> {
    ZetaEvaluator::new(spec.clone())?.fe_scan(grid)
}
