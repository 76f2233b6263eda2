//! Classical special functions, written from textbook formulas and kept
//! apart from the library: Lanczos gamma, Euler-Maclaurin Hurwitz zeta, and
//! completed zeta functions built from them.

use num_complex::Complex64;
use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

pub fn gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        return PI / ((PI * z).sin() * gamma(1.0 - z));
    }
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS[0], 0.0);
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powc(z + 0.5) * (-t).exp() * x
}

// B_2, B_4, ..., B_20.
const BERNOULLI: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// `sum_{k >= 0} (k + a)^{-s}` continued to `s != 1`.
pub fn hurwitz(s: Complex64, a: f64) -> Complex64 {
    let n = 40;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..n {
        sum += (-s * (k as f64 + a).ln()).exp();
    }
    let x = n as f64 + a;
    let lx = x.ln();
    sum += ((1.0 - s) * lx).exp() / (s - 1.0);
    sum += 0.5 * (-s * lx).exp();
    // B_{2j}/(2j)! * s (s+1) ... (s+2j-2) * x^{-s-2j+1}
    let mut rising = s;
    let mut fact = 2.0;
    for (j, b) in BERNOULLI.iter().enumerate() {
        let m = 2 * j + 1;
        if j > 0 {
            rising *= (s + (m - 2) as f64) * (s + (m - 1) as f64);
            fact *= (m as f64) * (m + 1) as f64;
        }
        sum += b / fact * rising * ((-s - m as f64) * lx).exp();
    }
    sum
}

pub fn riemann_zeta(s: Complex64) -> Complex64 {
    hurwitz(s, 1.0)
}

/// `L(s, chi)` for a character mod `m` given by its values on `1..=m`.
pub fn dirichlet_l(s: Complex64, chi: &[i32]) -> Complex64 {
    let m = chi.len() as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for (i, &c) in chi.iter().enumerate() {
        if c != 0 {
            sum += f64::from(c) * hurwitz(s, (i + 1) as f64 / m);
        }
    }
    sum * (-s * m.ln()).exp()
}

/// `pi^{-s/2} Gamma(s/2) zeta(s)`.
pub fn completed_zeta(s: Complex64) -> Complex64 {
    (-s / 2.0 * PI.ln()).exp() * gamma(s / 2.0) * riemann_zeta(s)
}

/// `sum_{v in Z^2 \ 0} |v|^{-s}`-type completion: `2 pi^{-s/2} Gamma(s/2) zeta(s/2) beta(s/2)`,
/// the rank-1 zeta over `Q` with `A = 2`.
pub fn square_lattice_zeta(s: Complex64) -> Complex64 {
    let h = s / 2.0;
    2.0 * (-h * PI.ln()).exp() * gamma(h) * riemann_zeta(h) * dirichlet_l(h, &CHI_M4)
}

/// Rank-2 zeta over `Q` with `A = 1`: `2 (xi(2s)/(s-1) - xi(2s-1)/s)`.
pub fn rank_two_zeta(s: Complex64) -> Complex64 {
    2.0 * (completed_zeta(2.0 * s) / (s - 1.0) - completed_zeta(2.0 * s - 1.0) / s)
}

pub const CHI_M4: [i32; 4] = [1, 0, -1, 0];
pub const CHI_M3: [i32; 3] = [1, -1, 0];
pub const CHI_5: [i32; 5] = [1, -1, -1, 1, 0];
pub const CHI_8: [i32; 8] = [1, 0, -1, 0, -1, 0, 1, 0];

/// Completed Dedekind zeta of a quadratic field with discriminant `d`, in
/// the rank-1 normalization: `|d|^{s/2} pi^{-s} Gamma(s/2)^2 zeta_K(s)` for
/// real fields, `|d|^{s/2} (2 pi)^{-s} Gamma(s) zeta_K(s)` for imaginary ones.
pub fn quadratic_zeta(s: Complex64, d: i64, chi: &[i32]) -> Complex64 {
    let zk = riemann_zeta(s) * dirichlet_l(s, chi);
    let ad = (d.abs() as f64).ln();
    if d > 0 {
        (s / 2.0 * ad).exp() * (-s * PI.ln()).exp() * gamma(s / 2.0).powi(2) * zk
    } else {
        (s / 2.0 * ad).exp() * (-s * (2.0 * PI).ln()).exp() * gamma(s) * zk
    }
}

/// Direct theta sum of `c Z`: `sum_{|m| <= 400} e^{-pi c^2 m^2}`.
pub fn theta_scaled_integers(c: f64) -> f64 {
    1.0 + 2.0 * (1..=400).map(|m| (-PI * c * c * (m * m) as f64).exp()).sum::<f64>()
}

#[cfg(test)]
mod tests {}
