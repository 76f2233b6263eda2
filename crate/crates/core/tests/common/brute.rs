//! Exhaustive sublattice search over a ball of coefficient vectors, for
//! lattices of rank 2 and 3 over `Q`.

use adelic_zeta::MetrizedLattice;
use nalgebra::DMatrix;

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 { a.abs() } else { gcd(b, a % b) }
}

/// Every nonzero coefficient vector whose lattice point has norm at most
/// `radius`, found by scanning a coefficient box sized from the smallest
/// singular value of the generator.
pub fn short_coeffs(l: &MetrizedLattice, radius: f64) -> Vec<(Vec<i64>, Vec<f64>)> {
    let g = l.generator();
    let n = g.nrows();
    let smin = g.clone().svd(false, false).singular_values.min();
    let bound = (radius / smin).floor() as i64 + 1;
    let mut out = Vec::new();
    let mut c = vec![-bound; n];
    loop {
        if c.iter().any(|&x| x != 0) {
            let p: Vec<f64> = (0..g.ncols()).map(|j| (0..n).map(|i| c[i] as f64 * g[(i, j)]).sum()).collect();
            if p.iter().map(|x| x * x).sum::<f64>().sqrt() <= radius {
                out.push((c.clone(), p));
            }
        }
        let mut k = 0;
        loop {
            if k == n {
                return out;
            }
            c[k] += 1;
            if c[k] <= bound {
                break;
            }
            c[k] = -bound;
            k += 1;
        }
    }
}

fn gram_det(rows: &[&Vec<f64>]) -> f64 {
    let k = rows.len();
    DMatrix::from_fn(k, k, |i, j| rows[i].iter().zip(rows[j]).map(|(a, b)| a * b).sum::<f64>()).determinant()
}

/// `best[k]`: the largest degree of a saturated rank-`k` sublattice found,
/// for `k = 1 .. n-1`.
pub fn best_degrees(l: &MetrizedLattice, radius: f64) -> Vec<f64> {
    let n = l.z_rank();
    let vecs = short_coeffs(l, radius);
    let mut best = vec![f64::NEG_INFINITY; n];
    for (c, p) in &vecs {
        let g = c.iter().fold(0, |acc, &x| gcd(acc, x));
        if g == 1 {
            let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
            best[1] = best[1].max(-norm.ln());
        }
    }
    if n == 3 {
        for (i, (c1, p1)) in vecs.iter().enumerate() {
            for (c2, p2) in &vecs[i + 1..] {
                // index of span(c1, c2) in its saturation = gcd of 2x2 minors
                let minors = [
                    c1[0] * c2[1] - c1[1] * c2[0],
                    c1[0] * c2[2] - c1[2] * c2[0],
                    c1[1] * c2[2] - c1[2] * c2[1],
                ];
                let idx = minors.iter().fold(0, |acc, &x| gcd(acc, x));
                if idx == 0 {
                    continue;
                }
                let covol = gram_det(&[p1, p2]).sqrt() / idx as f64;
                best[2] = best[2].max(-covol.ln());
            }
        }
    }
    best
}

/// Radius large enough for an exhaustive search: starts at
/// `2 N covol^{1/N}` and grows until it covers the Hermite bound
/// `mu_2 <= (2/sqrt 3) covol(M) / lambda_1` for the best rank-2 sublattice.
pub fn search_radius(l: &MetrizedLattice) -> f64 {
    let n = l.z_rank();
    let mut radius = 2.0 * n as f64 * l.covolume().powf(1.0 / n as f64);
    loop {
        let vecs = short_coeffs(l, radius);
        let lambda1 = vecs.iter().map(|(_, p)| p.iter().map(|x| x * x).sum::<f64>().sqrt()).fold(f64::INFINITY, f64::min);
        if !lambda1.is_finite() {
            radius *= 2.0;
            continue;
        }
        if n < 3 {
            return radius;
        }
        let best2 = best_degrees(l, radius)[2];
        let need = 2.0 / 3f64.sqrt() * (-best2).exp() / lambda1 * 1.01;
        if need <= radius {
            return radius;
        }
        radius = need;
    }
}

/// Maximal proper sub-slope, and the breakpoints `(rank, degree)` of the
/// upper concave hull of `(k, best_degree[k])`.
pub fn brute_hn(l: &MetrizedLattice) -> (f64, Vec<(usize, f64)>) {
    let n = l.z_rank();
    let best = best_degrees(l, search_radius(l));
    let max_slope = (1..n).map(|k| best[k] / k as f64).fold(f64::NEG_INFINITY, f64::max);
    let mut pts: Vec<(usize, f64)> = vec![(0, 0.0)];
    pts.extend((1..n).map(|k| (k, best[k])));
    pts.push((n, l.degree()));
    // upper hull, dropping collinear points
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for p in pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let s1 = (b.1 - a.1) / (b.0 - a.0) as f64;
            let s2 = (p.1 - b.1) / (p.0 - b.0) as f64;
            if s2 >= s1 - 1e-10 * (1.0 + s1.abs()) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    (max_slope, hull)
}
