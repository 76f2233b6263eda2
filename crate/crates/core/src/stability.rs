//! Slopes, semistability and Harder-Narasimhan filtrations for lattices of
//! small rank.
//!
//! Over `Q` the maximal-slope search is exact up to rank 3: rank-1
//! candidates come from the shortest vectors of `L`, corank-1 candidates from
//! the shortest vectors of the dual. Over a quadratic field, rank-2 modules
//! are searched along `O_F`-lines through short vectors (experimental).

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::intmat::{hermite_normal_form, kernel_of_vector, saturate, saturate_and_complete};
use crate::lattice::{enumerate, shortest_vectors, MetrizedLattice};

/// Slack in `max_sub_slope <= slope(L) + SEMISTABLE_SLACK`.
pub const SEMISTABLE_SLACK: f64 = 1e-12;
/// Largest rank over `Q` for which the sublattice search is provably complete.
pub const CERTIFIED_RANK: usize = 3;

const TIE_TOL: f64 = 1e-12;
const SHORT_REL: f64 = 1e-9;
const INTEGRALITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, Default)]
pub struct StabilityOptions {
    /// Return best-effort answers above the certified rank instead of failing.
    pub allow_uncertified: bool,
}

/// A saturated sublattice, recorded by integer coefficient rows in Hermite
/// normal form relative to the parent's generator.
#[derive(Debug, Clone)]
pub struct Sublattice {
    pub coeffs: Vec<Vec<i64>>,
    pub lattice: MetrizedLattice,
    pub slope: f64,
}

impl Sublattice {
    fn from_coeffs(parent: &MetrizedLattice, rows: Vec<Vec<i64>>, rank_over_field: usize) -> Result<Self> {
        let coeffs = hermite_normal_form(&rows);
        let lattice = parent.sublattice(&coeffs, rank_over_field)?;
        let slope = slope(&lattice);
        Ok(Self { coeffs, lattice, slope })
    }

    pub fn rank(&self) -> usize {
        self.lattice.rank_over_field()
    }
}

pub fn slope(lattice: &MetrizedLattice) -> f64 {
    lattice.degree() / lattice.rank_over_field() as f64
}

/// `true` if `a` should replace `b` as the maximal destabilizing candidate.
fn better(a: &Sublattice, b: &Sublattice) -> bool {
    let tol = TIE_TOL * (1.0 + a.slope.abs().max(b.slope.abs()));
    if a.slope > b.slope + tol {
        return true;
    }
    if a.slope < b.slope - tol {
        return false;
    }
    (a.rank(), std::cmp::Reverse(&a.coeffs)) > (b.rank(), std::cmp::Reverse(&b.coeffs))
}

fn pick_best(cands: Vec<Sublattice>) -> Option<Sublattice> {
    cands.into_iter().fold(None, |acc, c| match acc {
        Some(b) if !better(&c, &b) => Some(b),
        _ => Some(c),
    })
}

pub fn max_slope_sub(lattice: &MetrizedLattice) -> Result<Sublattice> {
    max_slope_sub_with(lattice, StabilityOptions::default())
}

/// A proper saturated sublattice of maximal slope. Ties prefer the larger
/// rank, then the lexicographically smallest Hermite form.
pub fn max_slope_sub_with(lattice: &MetrizedLattice, opts: StabilityOptions) -> Result<Sublattice> {
    if lattice.rank_over_field() < 2 {
        return Err(Error::Domain("a rank-1 lattice has no proper nonzero sublattice".into()));
    }
    if lattice.field().is_rationals() {
        rational_search(lattice, opts)
    } else {
        module_search(lattice)
    }
}

fn rational_search(lattice: &MetrizedLattice, opts: StabilityOptions) -> Result<Sublattice> {
    let n = lattice.z_rank();
    if n > CERTIFIED_RANK && !opts.allow_uncertified {
        return Err(Error::Uncertified(format!(
            "rank {n} exceeds the certified rank {CERTIFIED_RANK}; pass the override to get a best-effort answer"
        )));
    }
    let mut cands = Vec::new();
    let (_, short) = shortest_vectors(lattice, SHORT_REL)?;
    for v in short {
        cands.push(Sublattice::from_coeffs(lattice, vec![v], 1)?);
    }
    if n >= 3 {
        // Dual coefficients c give the functional x -> x . c on L's coordinates.
        let (_, dual_short) = shortest_vectors(&lattice.dual(), SHORT_REL)?;
        for c in dual_short {
            let kernel = kernel_of_vector(&c).ok_or_else(|| Error::Degenerate("zero dual vector".into()))?;
            cands.push(Sublattice::from_coeffs(lattice, kernel, n - 1)?);
        }
    }
    pick_best(cands).ok_or_else(|| Error::Degenerate("no sublattice candidates".into()))
}

/// Integer matrix `X` with `x . B . T = (x . X) . B`, i.e. the action of the
/// second integral basis element on coefficient rows.
fn omega_action(lattice: &MetrizedLattice) -> Result<Vec<Vec<i64>>> {
    let field = lattice.field();
    let n = field.degree;
    let r = lattice.rank_over_field();
    let b = lattice.generator();
    if b.ncols() != b.nrows() {
        return Err(Error::Unsupported("module mode needs a full-dimensional generator".into()));
    }
    let m = field.multiplication_matrix(1);
    let mut t = DMatrix::zeros(r * n, r * n);
    for j in 0..r {
        t.view_mut((j * n, j * n), (n, n)).copy_from(&m);
    }
    let binv = b.clone().try_inverse().ok_or_else(|| Error::Degenerate("singular generator".into()))?;
    let x = b * t * binv;
    let mut out = vec![vec![0i64; r * n]; r * n];
    for i in 0..r * n {
        for j in 0..r * n {
            let v = x[(i, j)];
            if (v - v.round()).abs() > INTEGRALITY_TOL {
                return Err(Error::Domain("lattice is not stable under multiplication by O_F".into()));
            }
            out[i][j] = v.round() as i64;
        }
    }
    Ok(out)
}

fn times(x: &[i64], m: &[Vec<i64>]) -> Vec<i64> {
    (0..m[0].len()).map(|j| x.iter().zip(m).map(|(xi, row)| xi * row[j]).sum()).collect()
}

/// Rank-2 modules over a quadratic field: the best `O_F`-line. The line
/// through a shortest vector has covolume `c0`; Hermite's bound in
/// dimension 2 then confines every better line to contain a vector of norm
/// at most `sqrt(2 c0 / sqrt 3)`, so enumerating that ball is exhaustive.
fn module_search(lattice: &MetrizedLattice) -> Result<Sublattice> {
    let field = lattice.field();
    if field.degree != 2 || lattice.rank_over_field() != 2 {
        return Err(Error::Unsupported(format!(
            "stability over a degree-{} field is implemented for rank 2 over quadratic fields only",
            field.degree
        )));
    }
    let action = omega_action(lattice)?;
    let n = lattice.z_rank();
    let line = |x: &[i64]| -> Result<Sublattice> {
        let rows = saturate(&[x.to_vec(), times(x, &action)], n)
            .ok_or_else(|| Error::Degenerate("O_F-span of a vector is not of rank 2".into()))?;
        Sublattice::from_coeffs(lattice, rows, 1)
    };
    let (_, short) = shortest_vectors(lattice, SHORT_REL)?;
    let first = line(&short[0])?;
    let radius = (2.0 * first.lattice.covolume() / 3f64.sqrt()).sqrt();
    let mut seen = std::collections::BTreeSet::new();
    let mut cands = Vec::new();
    for v in enumerate(lattice, radius)? {
        if v.coeffs.iter().all(|&c| c == 0) {
            continue;
        }
        let l = line(&v.coeffs)?;
        if seen.insert(l.coeffs.clone()) {
            cands.push(l);
        }
    }
    Ok(pick_best(cands).unwrap_or(first))
}

#[derive(Debug, Clone, Serialize)]
pub struct SemistabilityReport {
    pub semistable: bool,
    pub slope: f64,
    pub max_sub_slope: Option<f64>,
    /// Coefficient rows of the maximizing sublattice, if one exists.
    pub certificate: Option<Vec<Vec<i64>>>,
}

pub fn is_semistable(lattice: &MetrizedLattice) -> Result<SemistabilityReport> {
    is_semistable_with(lattice, StabilityOptions::default())
}

pub fn is_semistable_with(lattice: &MetrizedLattice, opts: StabilityOptions) -> Result<SemistabilityReport> {
    let mu = slope(lattice);
    if lattice.rank_over_field() < 2 {
        return Ok(SemistabilityReport { semistable: true, slope: mu, max_sub_slope: None, certificate: None });
    }
    let best = max_slope_sub_with(lattice, opts)?;
    Ok(SemistabilityReport {
        semistable: best.slope <= mu + SEMISTABLE_SLACK,
        slope: mu,
        max_sub_slope: Some(best.slope),
        certificate: Some(best.coeffs),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct HnStep {
    pub rank: usize,
    pub degree: f64,
    pub slope: f64,
    /// Coefficient rows relative to the input lattice's generator.
    pub coeffs: Vec<Vec<i64>>,
    /// Generator rows of the step in ambient coordinates.
    pub sub_generator: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct HnFiltration {
    pub steps: Vec<HnStep>,
}

impl HnFiltration {
    /// Vertices `(rank, degree)` of the HN polygon, starting at the origin.
    pub fn polygon(&self) -> Vec<(usize, f64)> {
        std::iter::once((0, 0.0)).chain(self.steps.iter().map(|s| (s.rank, s.degree))).collect()
    }

    /// Slopes of the successive quotients `E_i / E_{i-1}`.
    pub fn quotient_slopes(&self) -> Vec<f64> {
        self.polygon().windows(2).map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0) as f64).collect()
    }

    pub fn is_concave(&self) -> bool {
        self.quotient_slopes().windows(2).all(|w| w[0] > w[1])
    }
}

pub fn hn_filtration(lattice: &MetrizedLattice) -> Result<HnFiltration> {
    hn_filtration_with(lattice, StabilityOptions::default())
}

pub fn hn_filtration_with(lattice: &MetrizedLattice, opts: StabilityOptions) -> Result<HnFiltration> {
    let chain = if lattice.field().is_rationals() {
        rational_chain(lattice, opts)?
    } else {
        module_chain(lattice, opts)?
    };
    let n = lattice.field().degree;
    let steps = chain
        .into_iter()
        .map(|coeffs| {
            let sub = lattice.sublattice(&coeffs, coeffs.len() / n)?;
            let g = sub.generator();
            Ok(HnStep {
                rank: sub.rank_over_field(),
                degree: sub.degree(),
                slope: slope(&sub),
                sub_generator: g.row_iter().map(|r| r.iter().copied().collect()).collect(),
                coeffs,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HnFiltration { steps })
}

fn identity(n: usize) -> Vec<Vec<i64>> {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

fn module_chain(lattice: &MetrizedLattice, opts: StabilityOptions) -> Result<Vec<Vec<Vec<i64>>>> {
    let full = identity(lattice.z_rank());
    let report = is_semistable_with(lattice, opts)?;
    match report.certificate {
        Some(c) if !report.semistable => Ok(vec![c, full]),
        _ => Ok(vec![full]),
    }
}

/// Coefficient rows of each step, ending with the identity.
fn rational_chain(lattice: &MetrizedLattice, opts: StabilityOptions) -> Result<Vec<Vec<Vec<i64>>>> {
    let n = lattice.z_rank();
    let full = identity(n);
    if n == 1 {
        return Ok(vec![full]);
    }
    let best = max_slope_sub_with(lattice, opts)?;
    if best.slope <= slope(lattice) + SEMISTABLE_SLACK {
        return Ok(vec![full]);
    }
    let k = best.coeffs.len();
    let basis = saturate_and_complete(&best.coeffs, n).ok_or_else(|| Error::Degenerate("dependent rows".into()))?;
    let complement = &basis[k..];
    let quotient = project_quotient(lattice, &best.lattice, complement)?;
    let mut chain = vec![best.coeffs.clone()];
    for step in rational_chain(&quotient, opts)? {
        let mut rows = best.coeffs.clone();
        rows.extend(step.iter().map(|y| times(y, complement)));
        chain.push(hermite_normal_form(&rows));
    }
    Ok(chain)
}

/// `L / M` realized by projecting complement rows orthogonally to `span(M)`.
fn project_quotient(lattice: &MetrizedLattice, sub: &MetrizedLattice, complement: &[Vec<i64>]) -> Result<MetrizedLattice> {
    let gm = sub.generator();
    let gram_inv = sub
        .gram()
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Degenerate("sublattice Gram not positive definite".into()))?
        .inverse();
    let d = lattice.ambient_dim();
    let mut q = DMatrix::zeros(complement.len(), d);
    for (i, u) in complement.iter().enumerate() {
        let p = DMatrix::from_row_slice(1, d, &lattice.point(u));
        let proj = &p - (&p * gm.transpose()) * &gram_inv * gm;
        q.row_mut(i).copy_from(&proj.row(0));
    }
    MetrizedLattice::new(lattice.field().clone(), complement.len(), q)
}
