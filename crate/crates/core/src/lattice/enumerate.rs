//! Fincke-Pohst enumeration of lattice points in a ball.

use serde::Serialize;

use super::reduce::Reduction;
use super::MetrizedLattice;
use crate::error::{Error, Result};

/// Default ceiling on the number of enumerated vectors.
pub const DEFAULT_CAPACITY: u64 = 100_000_000;

/// Relative slack on the squared radius so that points on the sphere survive
/// rounding in the Gram-Schmidt recursion.
pub(crate) const BOUNDARY_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatticeVector {
    /// Coefficients with respect to the lattice's own generator rows.
    pub coeffs: Vec<i64>,
    /// Ambient coordinates.
    pub point: Vec<f64>,
    pub norm_sq: f64,
}

/// Visit every nonzero coefficient vector `x` (in reduced coordinates) with
/// `|x B|^2 <= r2`. With `half` set, only one of each pair `+-x` is visited
/// (the one whose last nonzero coordinate is positive).
pub(crate) fn visit<F>(red: &Reduction, r2: f64, half: bool, capacity: u64, mut f: F) -> Result<u64>
where
    F: FnMut(&[i64], f64),
{
    let k = red.bstar_sq.len();
    if k == 0 || !(r2 >= 0.0) {
        return Ok(0);
    }
    let mut x = vec![0i64; k];
    let mut count = 0u64;
    let mut st = Walk { red, r2, half, capacity, count: &mut count, x: &mut x };
    st.descend(k - 1, 0.0, true, &mut f)?;
    Ok(count)
}

struct Walk<'a> {
    red: &'a Reduction,
    r2: f64,
    half: bool,
    capacity: u64,
    count: &'a mut u64,
    x: &'a mut Vec<i64>,
}

impl Walk<'_> {
    fn descend<F: FnMut(&[i64], f64)>(&mut self, level: usize, partial: f64, zero_above: bool, f: &mut F) -> Result<()> {
        let k = self.x.len();
        let centre: f64 = -((level + 1)..k).map(|i| self.red.mu[i][level] * self.x[i] as f64).sum::<f64>();
        let room = self.r2 - partial;
        if room < 0.0 {
            return Ok(());
        }
        let rho = (room / self.red.bstar_sq[level]).sqrt();
        let mut lo = (centre - rho).ceil() as i64;
        let hi = (centre + rho).floor() as i64;
        if self.half && zero_above {
            lo = lo.max(0);
        }
        for xi in lo..=hi {
            let d = xi as f64 - centre;
            let p = partial + self.red.bstar_sq[level] * d * d;
            if p > self.r2 {
                continue;
            }
            self.x[level] = xi;
            let still_zero = zero_above && xi == 0;
            if level == 0 {
                if !still_zero {
                    *self.count += 1;
                    if *self.count > self.capacity {
                        return Err(Error::Capacity { limit: self.capacity });
                    }
                    f(self.x, p);
                }
            } else {
                self.descend(level - 1, p, still_zero, f)?;
            }
        }
        self.x[level] = 0;
        Ok(())
    }
}

pub(crate) fn to_original(red: &Reduction, x: &[i64]) -> Vec<i64> {
    let k = x.len();
    (0..k).map(|j| (0..k).map(|i| x[i] * red.transform[i][j]).sum()).collect()
}

/// All lattice vectors of Euclidean norm at most `radius`, zero included,
/// sorted lexicographically by their coefficient vectors.
pub fn enumerate(lattice: &MetrizedLattice, radius: f64) -> Result<Vec<LatticeVector>> {
    enumerate_with_capacity(lattice, radius, DEFAULT_CAPACITY)
}

pub fn enumerate_with_capacity(lattice: &MetrizedLattice, radius: f64, capacity: u64) -> Result<Vec<LatticeVector>> {
    if !(radius >= 0.0) {
        return Err(Error::Domain(format!("enumeration radius must be non-negative, got {radius}")));
    }
    let red = lattice.reduction();
    let r2 = radius * radius * (1.0 + BOUNDARY_SLACK);
    let mut coeffs: Vec<Vec<i64>> = vec![vec![0; lattice.z_rank()]];
    visit(red, r2, false, capacity.saturating_sub(1), |x, _| coeffs.push(to_original(red, x)))?;
    let g = lattice.generator();
    let mut out: Vec<LatticeVector> = coeffs
        .into_iter()
        .map(|c| {
            let point: Vec<f64> = (0..g.ncols())
                .map(|col| c.iter().enumerate().map(|(i, &ci)| ci as f64 * g[(i, col)]).sum())
                .collect();
            let norm_sq = point.iter().map(|v| v * v).sum();
            LatticeVector { coeffs: c, point, norm_sq }
        })
        .filter(|v| v.norm_sq <= r2)
        .collect();
    out.sort_by(|a, b| a.coeffs.cmp(&b.coeffs));
    Ok(out)
}

/// Length of a shortest nonzero vector together with every vector (up to
/// sign, first nonzero coefficient positive) within relative tolerance
/// `rel` of it.
pub fn shortest_vectors(lattice: &MetrizedLattice, rel: f64) -> Result<(f64, Vec<Vec<i64>>)> {
    let red = lattice.reduction();
    let b1 = red.bstar_sq[0];
    let mut best = f64::INFINITY;
    let mut found: Vec<(f64, Vec<i64>)> = Vec::new();
    visit(red, b1 * (1.0 + 1e-9), true, DEFAULT_CAPACITY, |x, n2| {
        best = best.min(n2);
        found.push((n2, x.to_vec()));
    })?;
    let cut = best * (1.0 + rel);
    let mut vecs: Vec<Vec<i64>> = found
        .into_iter()
        .filter(|(n2, _)| *n2 <= cut)
        .map(|(_, x)| canonical_sign(to_original(red, &x)))
        .collect();
    vecs.sort();
    vecs.dedup();
    Ok((best.sqrt(), vecs))
}

/// Exact shortest-vector length.
pub fn shortest_length(lattice: &MetrizedLattice) -> Result<f64> {
    let red = lattice.reduction();
    let mut best = red.bstar_sq[0];
    visit(red, best * (1.0 + 1e-9), true, DEFAULT_CAPACITY, |_, n2| best = best.min(n2))?;
    Ok(best.sqrt())
}

pub(crate) fn canonical_sign(mut v: Vec<i64>) -> Vec<i64> {
    if let Some(&first) = v.iter().find(|&&c| c != 0) {
        if first < 0 {
            v.iter_mut().for_each(|c| *c = -*c);
        }
    }
    v
}
