//! Charts on moduli of semistable lattices and their volumes.
//!
//! Every supported moduli space factors as (fixed-covolume slice) x (covolume
//! line). The slice carries the hyperbolic measure `dx dy / y^2` for rank 2
//! over `Q`, and mass `2^{r1} R / w` per ideal class on the unit torus for
//! rank 1; the covolume direction carries `dV / V`.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::NumberFieldData;
use crate::lattice::MetrizedLattice;
use crate::numerics::{chart_nodes, in_truncated_domain, ChartRule, CompositeRule};

/// Order of the Gauss-Legendre rule on each covolume panel.
pub const V_ORDER: usize = 16;
pub const V_ORDER_COARSE: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChartRuleKind {
    GaussLegendre,
    MonteCarlo,
}

/// Quadrature settings shared by moduli and zeta integrals.
///
/// `chart_points` is the per-axis Gauss-Legendre order on the rank-2 chart,
/// the number of midpoint nodes on a unit torus, or the Monte Carlo sample
/// count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureSpec {
    pub v_panels: usize,
    pub v_max: Option<f64>,
    pub chart_rule: ChartRuleKind,
    pub chart_points: usize,
    pub seed: u64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { v_panels: 12, v_max: None, chart_rule: ChartRuleKind::GaussLegendre, chart_points: 16, seed: 0 }
    }
}

impl QuadratureSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text).map_err(|e| Error::Parse(format!("quadrature spec: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.v_panels == 0 || self.chart_points == 0 {
            return Err(Error::Domain("v_panels and chart_points must be positive".into()));
        }
        if let Some(v) = self.v_max {
            if !(v > 1.0 && v.is_finite()) {
                return Err(Error::Domain(format!("v_max must be a finite value above 1, got {v}")));
            }
        }
        Ok(())
    }

    /// The lower-resolution companion used for error estimates.
    pub fn coarse(&self) -> Self {
        let points = match self.chart_rule {
            ChartRuleKind::GaussLegendre => (3 * self.chart_points).div_ceil(4),
            ChartRuleKind::MonteCarlo => self.chart_points.div_ceil(2),
        };
        Self { chart_points: points.max(1), ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Parametrization {
    Point,
    UnitTorusTimesClassGroup,
    Rank2QDomain,
}

#[derive(Debug, Clone)]
pub struct ModuliChart {
    field: Arc<NumberFieldData>,
    rank: usize,
    parametrization: Parametrization,
}

/// One chart point with its share of the slice measure.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartSample {
    pub params: Vec<f64>,
    pub weight: f64,
}

impl ModuliChart {
    pub fn new(field: Arc<NumberFieldData>, rank: usize) -> Result<Self> {
        let parametrization = match (rank, field.is_rationals(), field.unit_rank()) {
            (1, _, 0) => Parametrization::Point,
            (1, _, 1) => Parametrization::UnitTorusTimesClassGroup,
            (2, true, _) => Parametrization::Rank2QDomain,
            (1, _, u) => return Err(Error::Unsupported(format!("rank-1 charts for unit rank {u}"))),
            (r, _, _) => {
                return Err(Error::Unsupported(format!("rank-{r} moduli over a degree-{} field", field.degree)))
            }
        };
        if rank == 1 {
            field.class_representatives()?;
            if parametrization == Parametrization::UnitTorusTimesClassGroup && field.fundamental_units.is_none() {
                return Err(Error::MissingData("fundamental_units"));
            }
        }
        Ok(Self { field, rank, parametrization })
    }

    pub fn field(&self) -> &Arc<NumberFieldData> {
        &self.field
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn parametrization(&self) -> Parametrization {
        self.parametrization
    }

    /// Real dimension of the fixed-covolume slice.
    pub fn dimension(&self) -> usize {
        match self.parametrization {
            Parametrization::Point => 0,
            Parametrization::UnitTorusTimesClassGroup => 1,
            Parametrization::Rank2QDomain => 2,
        }
    }

    pub fn measure(&self) -> &'static str {
        match self.parametrization {
            Parametrization::Point => "counting measure with mass 2^r1 / w per ideal class",
            Parametrization::UnitTorusTimesClassGroup => "dt on [0,1) with mass 2^r1 R / w per ideal class",
            Parametrization::Rank2QDomain => "dx dy / y^2 on |x| <= 1/2, x^2 + y^2 >= 1, y <= 1",
        }
    }

    /// Rank-1 parameters are `[class]` or `[class, t]`; a bare `[t]` on a
    /// torus chart means class 0.
    fn rank1_params(&self, params: &[f64]) -> Result<(usize, f64)> {
        let torus = self.parametrization == Parametrization::UnitTorusTimesClassGroup;
        let (k, t) = match (params, torus) {
            ([], false) => (0.0, 0.0),
            ([k], false) => (*k, 0.0),
            ([t], true) => (0.0, *t),
            ([k, t], true) => (*k, *t),
            _ => return Err(Error::Domain(format!("wrong number of chart parameters: {}", params.len()))),
        };
        let h = self.field.class_number()?;
        if k.fract() != 0.0 || k < 0.0 || k as usize >= h {
            return Err(Error::Domain(format!("class index {k} is not in 0..{h}")));
        }
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::Domain(format!("torus parameter {t} is outside [0, 1]")));
        }
        Ok((k as usize, t))
    }

    pub fn contains(&self, params: &[f64]) -> bool {
        match self.parametrization {
            Parametrization::Rank2QDomain => matches!(params, [x, y] if in_truncated_domain(*x, *y)),
            _ => self.rank1_params(params).is_ok(),
        }
    }

    /// Sample points of the fixed-covolume slice.
    pub fn samples(&self, quad: &QuadratureSpec) -> Result<Vec<ChartSample>> {
        quad.validate()?;
        Ok(match self.parametrization {
            Parametrization::Rank2QDomain => {
                let rule = match quad.chart_rule {
                    ChartRuleKind::GaussLegendre => ChartRule::GaussLegendre { order: quad.chart_points },
                    ChartRuleKind::MonteCarlo => ChartRule::MonteCarlo { points: quad.chart_points, seed: quad.seed },
                };
                chart_nodes(rule).into_iter().map(|n| ChartSample { params: vec![n.x, n.y], weight: n.weight }).collect()
            }
            Parametrization::Point => {
                let h = self.field.class_number()?;
                let mass = class_mass(&self.field)?;
                (0..h).map(|k| ChartSample { params: vec![k as f64], weight: mass }).collect()
            }
            Parametrization::UnitTorusTimesClassGroup => {
                let h = self.field.class_number()?;
                let mass = class_mass(&self.field)?;
                let m = quad.chart_points;
                (0..h)
                    .flat_map(|k| {
                        (0..m).map(move |j| ChartSample {
                            params: vec![k as f64, (j as f64 + 0.5) / m as f64],
                            weight: mass / m as f64,
                        })
                    })
                    .collect()
            }
        })
    }

    /// The lattice of covolume `v` at a chart point.
    pub fn lattice(&self, params: &[f64], v: f64) -> Result<MetrizedLattice> {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Domain(format!("covolume must be positive, got {v}")));
        }
        match self.parametrization {
            Parametrization::Rank2QDomain => {
                let [x, y] = params else {
                    return Err(Error::Domain("rank-2 chart points are (x, y)".into()));
                };
                if !in_truncated_domain(*x, *y) {
                    return Err(Error::Domain(format!("({x}, {y}) is outside the rank-2 chart")));
                }
                let c = (v / y).sqrt();
                let g = DMatrix::from_row_slice(2, 2, &[c, 0.0, c * x, c * y]);
                MetrizedLattice::new(self.field.clone(), 2, g)
            }
            _ => {
                let (k, t) = self.rank1_params(params)?;
                let reps = self.field.class_representatives()?;
                let mut g = reps[k].clone();
                if let Some(units) = &self.field.fundamental_units {
                    if t != 0.0 {
                        let logs = self.field.place_logs(&units[0]);
                        for (pl, l) in logs.iter().enumerate() {
                            let f = (t * l).exp();
                            let cols: Vec<usize> = if pl < self.field.r1 {
                                vec![pl]
                            } else {
                                let c = self.field.r1 + 2 * (pl - self.field.r1);
                                vec![c, c + 1]
                            };
                            for c in cols {
                                g.column_mut(c).scale_mut(f);
                            }
                        }
                    }
                }
                let base = MetrizedLattice::new(self.field.clone(), 1, g)?;
                let n = self.field.degree as f64;
                Ok(base.scaled((v / base.covolume()).powf(1.0 / n)))
            }
        }
    }
}

pub fn chart_to_lattice(chart: &ModuliChart, params: &[f64], v: f64) -> Result<MetrizedLattice> {
    chart.lattice(params, v)
}

/// `2^{r1} R / w`, the slice mass of one ideal class.
fn class_mass(field: &NumberFieldData) -> Result<f64> {
    Ok(2f64.powi(field.r1 as i32) * field.regulator_value()? / f64::from(field.roots_of_unity))
}

/// Exact slice volume `W_F(r)` for the supported cases.
pub fn moduli_volume(field: &NumberFieldData, rank: usize) -> Result<f64> {
    match rank {
        1 => Ok(field.class_number()? as f64 * class_mass(field)?),
        2 if field.is_rationals() => Ok(PI / 3.0 - 1.0),
        _ => Err(Error::Unsupported(format!("moduli volume of rank {rank} over a degree-{} field", field.degree))),
    }
}

/// Quadrature mass of the slice at covolume `v`: the summed weights of the
/// chart samples whose lattices exist at that covolume.
pub fn slice_volume(chart: &ModuliChart, quad: &QuadratureSpec, v: f64) -> Result<f64> {
    let mut acc = crate::numerics::CompensatedSum::new();
    for s in chart.samples(quad)? {
        chart.lattice(&s.params, v)?;
        acc.add(s.weight);
    }
    Ok(acc.value())
}

/// Sample lattices with weights for `int int f dmu dV/V` over
/// `v_range = (lo, hi)`. An infinite `hi` is cut at the quadrature's `v_max`
/// (default `e^4 lo`).
pub fn degree_slice_iter(
    chart: &ModuliChart,
    v_range: (f64, f64),
    quad: &QuadratureSpec,
) -> Result<impl Iterator<Item = (MetrizedLattice, f64)>> {
    let (lo, hi) = v_range;
    if !(lo > 0.0) || hi.is_nan() {
        return Err(Error::Domain(format!("invalid covolume range ({lo}, {hi})")));
    }
    let hi = if hi.is_infinite() { quad.v_max.unwrap_or(lo * 4f64.exp()) } else { hi };
    let samples = chart.samples(quad)?;
    let rule = if hi > lo { Some(CompositeRule::new(lo.ln(), hi.ln(), quad.v_panels, V_ORDER)) } else { None };
    let chart = chart.clone();
    let nodes: Vec<(f64, f64)> = rule.map(|r| r.iter().collect()).unwrap_or_default();
    Ok(nodes.into_iter().flat_map(move |(u, wu)| {
        let chart = chart.clone();
        samples.clone().into_iter().map(move |s| {
            let l = chart.lattice(&s.params, u.exp()).expect("chart samples are valid");
            (l, s.weight * wu)
        })
    }))
}
