//! LLL reduction with Gram-Schmidt data, used to precondition enumeration.

use nalgebra::DMatrix;

/// A reduced basis together with its Gram-Schmidt data and the unimodular
/// transform `reduced = transform * original`.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub basis: DMatrix<f64>,
    pub transform: Vec<Vec<i64>>,
    /// Squared Gram-Schmidt norms `|b*_i|^2`.
    pub bstar_sq: Vec<f64>,
    /// `mu[i][j] = <b_i, b*_j> / |b*_j|^2` for `j < i`.
    pub mu: Vec<Vec<f64>>,
}

const DELTA: f64 = 0.99;
const MAX_STEPS: usize = 100_000;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn gram_schmidt(rows: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let k = rows.len();
    let mut bstar: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut bsq = vec![0.0; k];
    let mut mu = vec![vec![0.0; k]; k];
    for i in 0..k {
        let mut v = rows[i].clone();
        for j in 0..i {
            let m = dot(&rows[i], &bstar[j]) / bsq[j];
            mu[i][j] = m;
            for (vi, bj) in v.iter_mut().zip(&bstar[j]) {
                *vi -= m * bj;
            }
        }
        bsq[i] = dot(&v, &v);
        bstar.push(v);
    }
    (bsq, mu)
}

pub fn lll(generator: &DMatrix<f64>) -> Reduction {
    let k = generator.nrows();
    let mut rows: Vec<Vec<f64>> = (0..k).map(|i| generator.row(i).iter().copied().collect()).collect();
    let mut u: Vec<Vec<i64>> = (0..k)
        .map(|i| (0..k).map(|j| i64::from(i == j)).collect())
        .collect();
    let (mut bsq, mut mu) = gram_schmidt(&rows);
    let mut idx = 1;
    let mut steps = 0;
    while idx < k && steps < MAX_STEPS {
        steps += 1;
        let mut changed = false;
        for j in (0..idx).rev() {
            let q = mu[idx][j].round();
            if q != 0.0 {
                let qi = q as i64;
                let (lo, hi) = rows.split_at_mut(idx);
                for (a, b) in hi[0].iter_mut().zip(&lo[j]) {
                    *a -= q * b;
                }
                let (lo, hi) = u.split_at_mut(idx);
                for (a, b) in hi[0].iter_mut().zip(&lo[j]) {
                    *a -= qi * b;
                }
                for jj in 0..=j {
                    let mj = if jj == j { 1.0 } else { mu[j][jj] };
                    mu[idx][jj] -= q * mj;
                }
                changed = true;
            }
        }
        if changed {
            let (b2, m2) = gram_schmidt(&rows);
            bsq = b2;
            mu = m2;
        }
        if bsq[idx] >= (DELTA - mu[idx][idx - 1].powi(2)) * bsq[idx - 1] {
            idx += 1;
        } else {
            rows.swap(idx, idx - 1);
            u.swap(idx, idx - 1);
            let (b2, m2) = gram_schmidt(&rows);
            bsq = b2;
            mu = m2;
            idx = idx.saturating_sub(1).max(1);
        }
    }
    let cols = generator.ncols();
    let basis = DMatrix::from_fn(k, cols, |i, j| rows[i][j]);
    Reduction { basis, transform: u, bstar_sq: bsq, mu }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_skewed_plane_basis() {
        let g = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 37.0, 1.0]);
        let r = lll(&g);
        let n0: f64 = r.basis.row(0).norm_squared();
        let n1: f64 = r.basis.row(1).norm_squared();
        assert!((n0 - 1.0).abs() < 1e-12 && (n1 - 1.0).abs() < 1e-12);
        // transform reproduces the reduced rows
        for i in 0..2 {
            for c in 0..2 {
                let v: f64 = (0..2).map(|j| r.transform[i][j] as f64 * g[(j, c)]).sum();
                assert!((v - r.basis[(i, c)]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn transform_is_unimodular() {
        let g = DMatrix::from_row_slice(3, 3, &[3.0, 1.0, 0.2, 5.0, 2.1, 0.0, 7.0, 3.3, 1.0]);
        let r = lll(&g);
        let t = DMatrix::from_fn(3, 3, |i, j| r.transform[i][j] as f64);
        assert!((t.determinant().abs() - 1.0).abs() < 1e-9);
    }
}
