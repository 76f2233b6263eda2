//! Small integer-matrix routines: saturation, basis completion and Hermite
//! normal form. Sizes here are at most a handful of rows.

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        return if a < 0 { (-a, -1, 0) } else { (a, 1, 0) };
    }
    let (g, s, t) = ext_gcd(b, a.rem_euclid(b));
    // g = s b + t (a mod b) = t a + (s - t floor(a/b)) b
    (g, t, s - t * a.div_euclid(b))
}

/// Unimodular `V` (and its inverse) with `c V = [H | 0]`, `H` lower
/// triangular with nonzero diagonal. `None` if the rows of `c` are dependent.
fn column_reduce(c: &[Vec<i64>], n: usize) -> Option<(Vec<Vec<i64>>, Vec<Vec<i64>>)> {
    let k = c.len();
    let mut m: Vec<Vec<i64>> = c.to_vec();
    let mut v: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    let mut vinv = v.clone();
    for r in 0..k {
        for q in (r + 1)..n {
            let a = m[r][r];
            let b = m[r][q];
            if b == 0 {
                continue;
            }
            let (g, s, t) = ext_gcd(a, b);
            let (ag, bg) = (a / g, b / g);
            // columns r, q  <-  [s, -b/g; t, a/g]
            for row in m.iter_mut().chain(v.iter_mut()) {
                let (x, y) = (row[r], row[q]);
                row[r] = s * x + t * y;
                row[q] = -bg * x + ag * y;
            }
            // rows r, q of the inverse  <-  [a/g, b/g; -t, s]
            let (xr, yq) = (vinv[r].clone(), vinv[q].clone());
            for j in 0..n {
                vinv[r][j] = ag * xr[j] + bg * yq[j];
                vinv[q][j] = -t * xr[j] + s * yq[j];
            }
        }
        if m[r][r] == 0 {
            return None;
        }
    }
    Some((v, vinv))
}

/// Basis of the saturation `span_Q(c) ∩ Z^n` of independent integer rows,
/// followed by a completion to a basis of `Z^n`.
pub fn saturate_and_complete(c: &[Vec<i64>], n: usize) -> Option<Vec<Vec<i64>>> {
    let (_, vinv) = column_reduce(c, n)?;
    Some(vinv)
}

pub fn saturate(c: &[Vec<i64>], n: usize) -> Option<Vec<Vec<i64>>> {
    let all = saturate_and_complete(c, n)?;
    Some(all.into_iter().take(c.len()).collect())
}

/// Basis of `{x in Z^n : x . c = 0}` for a nonzero integer vector `c`.
pub fn kernel_of_vector(c: &[i64]) -> Option<Vec<Vec<i64>>> {
    let n = c.len();
    let (v, _) = column_reduce(&[c.to_vec()], n)?;
    Some((1..n).map(|j| (0..n).map(|i| v[i][j]).collect()).collect())
}

/// Row Hermite normal form of a full-row-rank integer matrix: upper
/// echelon, positive pivots, entries above each pivot reduced into
/// `[0, pivot)`. Two matrices have the same row lattice iff their forms agree.
pub fn hermite_normal_form(rows: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let mut m: Vec<Vec<i64>> = rows.to_vec();
    let k = m.len();
    if k == 0 {
        return m;
    }
    let n = m[0].len();
    let mut pivot_row = 0;
    let mut pivots = Vec::new();
    for col in 0..n {
        if pivot_row == k {
            break;
        }
        for r in (pivot_row + 1)..k {
            let a = m[pivot_row][col];
            let b = m[r][col];
            if b == 0 {
                continue;
            }
            let (g, s, t) = ext_gcd(a, b);
            let (ag, bg) = (a / g, b / g);
            let (p, q) = (m[pivot_row].clone(), m[r].clone());
            for j in 0..n {
                m[pivot_row][j] = s * p[j] + t * q[j];
                m[r][j] = -bg * p[j] + ag * q[j];
            }
        }
        if m[pivot_row][col] == 0 {
            continue;
        }
        if m[pivot_row][col] < 0 {
            m[pivot_row].iter_mut().for_each(|x| *x = -*x);
        }
        let piv = m[pivot_row][col];
        for r in 0..pivot_row {
            let f = m[r][col].div_euclid(piv);
            if f != 0 {
                let p = m[pivot_row].clone();
                for j in 0..n {
                    m[r][j] -= f * p[j];
                }
            }
        }
        pivots.push(col);
        pivot_row += 1;
    }
    m.truncate(pivot_row);
    m
}
