//! Independent oracles and helpers shared by the integration tests.

#![allow(dead_code)]

pub mod brute;
pub mod oracle;

use std::path::PathBuf;
use std::sync::Arc;

use adelic_zeta::{load_field, NumberFieldData};
use nalgebra::DMatrix;
use rand::Rng;

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

pub fn field(name: &str) -> Arc<NumberFieldData> {
    Arc::new(load_field(fixture(&format!("fields/{name}.json"))).expect("fixture field loads"))
}

pub fn q() -> Arc<NumberFieldData> {
    Arc::new(NumberFieldData::rationals())
}

/// A random well-conditioned `n x n` generator: identity plus bounded noise,
/// rescaled by a random factor.
pub fn random_generator<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    loop {
        let m = DMatrix::from_fn(n, n, |i, j| f64::from(u8::from(i == j)) + rng.gen_range(-0.6..0.6));
        let det = m.determinant().abs();
        if det > 0.2 {
            let scale = rng.gen_range(0.7..1.5) / det.powf(1.0 / n as f64);
            return m * scale;
        }
    }
}

/// `O_F^r g` with a random place matrix per infinite place.
pub fn random_module_lattice<R: Rng>(rng: &mut R, f: &Arc<NumberFieldData>, r: usize) -> adelic_zeta::MetrizedLattice {
    use adelic_zeta::{MetrizedLattice, PlaceMatrix};
    use num_complex::Complex64;
    let mut places = Vec::new();
    for _ in 0..f.r1 {
        places.push(PlaceMatrix::Real(random_generator(rng, r)));
    }
    for _ in 0..f.r2 {
        let re = random_generator(rng, r);
        let im = DMatrix::from_fn(r, r, |_, _| rng.gen_range(-0.2..0.2));
        places.push(PlaceMatrix::Complex(DMatrix::from_fn(r, r, |i, j| Complex64::new(re[(i, j)], im[(i, j)]))));
    }
    MetrizedLattice::from_places(f.clone(), &places).expect("random place matrices are invertible")
}

/// The randomized suite shared by the Riemann-Roch and Serre checks:
/// 200 lattices, ranks 1-4 over `Q` and ranks 1-2 over `Q(i)` and `Q(sqrt 5)`.
pub fn rr_suite(seed: u64) -> Vec<adelic_zeta::MetrizedLattice> {
    use adelic_zeta::MetrizedLattice;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(200);
    for i in 0..120 {
        let n = 1 + i % 4;
        out.push(MetrizedLattice::over_q(random_generator(&mut rng, n)).unwrap());
    }
    for name in ["q_i", "q_sqrt5"] {
        let f = field(name);
        for i in 0..40 {
            out.push(random_module_lattice(&mut rng, &f, 1 + i % 2));
        }
    }
    out
}

/// Random generator with entries in `{-2, ..., 2} / 4`, rejecting near-singular draws.
pub fn random_quarter_generator<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    loop {
        let m = DMatrix::from_fn(n, n, |_, _| f64::from(rng.gen_range(-2i32..=2)) / 4.0);
        if m.determinant().abs() > 1e-9 {
            return m;
        }
    }
}
