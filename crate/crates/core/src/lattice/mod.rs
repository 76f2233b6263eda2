//! Metrized lattices in weighted Minkowski space.

pub mod enumerate;
pub mod reduce;
pub mod theta;

use std::sync::{Arc, OnceLock};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::NumberFieldData;

pub use enumerate::{enumerate, enumerate_with_capacity, shortest_length, shortest_vectors, LatticeVector};
pub use reduce::Reduction;
pub use theta::{excess_bound, tail_bound, theta, theta_with_capacity, ThetaValue};

/// A lattice given by generator rows in weighted Minkowski space, carrying
/// the number field it is a module over.
///
/// The generator may have fewer rows than columns (a sublattice inside the
/// ambient space); full lattices have a square generator.
#[derive(Debug, Clone)]
pub struct MetrizedLattice {
    field: Arc<NumberFieldData>,
    rank_over_field: usize,
    generator: DMatrix<f64>,
    gram: DMatrix<f64>,
    covolume: f64,
    reduced: OnceLock<Reduction>,
}

/// Hadamard-ratio floor below which a generator counts as singular.
const DEGENERACY_RATIO: f64 = 1e-12;

impl MetrizedLattice {
    pub fn new(field: Arc<NumberFieldData>, rank_over_field: usize, generator: DMatrix<f64>) -> Result<Self> {
        let k = generator.nrows();
        if rank_over_field == 0 || k != rank_over_field * field.degree {
            return Err(Error::Degenerate(format!(
                "generator has {k} rows but rank {rank_over_field} over a degree-{} field needs {}",
                field.degree,
                rank_over_field * field.degree
            )));
        }
        if generator.ncols() < k {
            return Err(Error::Degenerate(format!("{k} rows cannot be independent in dimension {}", generator.ncols())));
        }
        if generator.iter().any(|x| !x.is_finite()) {
            return Err(Error::Degenerate("generator has non-finite entries".into()));
        }
        let gram = &generator * generator.transpose();
        let chol = gram
            .clone()
            .cholesky()
            .ok_or_else(|| Error::Degenerate("Gram matrix is not positive definite".into()))?;
        let covolume: f64 = chol.l_dirty().diagonal().iter().product();
        let hadamard: f64 = (0..k).map(|i| gram[(i, i)].sqrt()).product();
        if !(covolume > DEGENERACY_RATIO * hadamard) {
            return Err(Error::Degenerate(format!(
                "covolume {covolume:.3e} is below {DEGENERACY_RATIO:e} of the Hadamard bound {hadamard:.3e}"
            )));
        }
        Ok(Self { field, rank_over_field, generator, gram, covolume, reduced: OnceLock::new() })
    }

    /// A lattice over `Q` with the given generator rows.
    pub fn over_q(generator: DMatrix<f64>) -> Result<Self> {
        let k = generator.nrows();
        Self::new(Arc::new(NumberFieldData::rationals()), k, generator)
    }

    /// The module lattice `O_F^r * g` where `g` has one `r x r` matrix per
    /// infinite place (real places first, then complex). Coordinates are laid
    /// out as `r` consecutive blocks of `n` weighted Minkowski coordinates.
    pub fn from_places(field: Arc<NumberFieldData>, places: &[PlaceMatrix]) -> Result<Self> {
        let n = field.degree;
        let (r1, r2) = (field.r1, field.r2);
        if places.len() != r1 + r2 {
            return Err(Error::Domain(format!("expected {} place matrices, got {}", r1 + r2, places.len())));
        }
        let r = places[0].dim();
        for (i, p) in places.iter().enumerate() {
            let real_place = i < r1;
            match (p, real_place) {
                (PlaceMatrix::Real(_), true) | (PlaceMatrix::Complex(_), false) => {}
                _ => return Err(Error::Domain(format!("place {i} has the wrong matrix kind"))),
            }
            if p.dim() != r {
                return Err(Error::Domain("place matrices must share one size".into()));
            }
        }
        let basis = &field.basis_embedding;
        let sqrt2 = std::f64::consts::SQRT_2;
        let mut gen = DMatrix::zeros(r * n, r * n);
        // row (j, i): the element omega_i placed in component j.
        for j in 0..r {
            for i in 0..n {
                let row = j * n + i;
                for (pl, p) in places.iter().enumerate() {
                    if pl < r1 {
                        let sigma = basis[(i, pl)];
                        let PlaceMatrix::Real(m) = p else { unreachable!() };
                        for k in 0..r {
                            gen[(row, k * n + pl)] = sigma * m[(j, k)];
                        }
                    } else {
                        let c = r1 + 2 * (pl - r1);
                        let sigma = Complex64::new(basis[(i, c)], basis[(i, c + 1)]) / sqrt2;
                        let PlaceMatrix::Complex(m) = p else { unreachable!() };
                        for k in 0..r {
                            let w = sigma * m[(j, k)] * sqrt2;
                            gen[(row, k * n + c)] = w.re;
                            gen[(row, k * n + c + 1)] = w.im;
                        }
                    }
                }
            }
        }
        Self::new(field, r, gen)
    }

    pub fn field(&self) -> &Arc<NumberFieldData> {
        &self.field
    }

    pub fn rank_over_field(&self) -> usize {
        self.rank_over_field
    }

    /// Rank as a free Z-module, `r * n`.
    pub fn z_rank(&self) -> usize {
        self.generator.nrows()
    }

    pub fn ambient_dim(&self) -> usize {
        self.generator.ncols()
    }

    pub fn generator(&self) -> &DMatrix<f64> {
        &self.generator
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn covolume(&self) -> f64 {
        self.covolume
    }

    /// Arakelov degree `(r/2) log|Delta_F| - log covol`.
    pub fn degree(&self) -> f64 {
        0.5 * self.rank_over_field as f64 * self.field.log_abs_discriminant() - self.covolume.ln()
    }

    /// Euclidean dual inside the span of the lattice: rows `G^{-1} B`.
    pub fn dual(&self) -> MetrizedLattice {
        let inv = self
            .gram
            .clone()
            .cholesky()
            .expect("Gram matrix was positive definite at construction")
            .inverse();
        let generator = inv * &self.generator;
        Self::new(self.field.clone(), self.rank_over_field, generator)
            .expect("dual of a nondegenerate lattice is nondegenerate")
    }

    /// Scale by `e^t`; the degree drops by `r n t`.
    pub fn bv_twist(&self, t: f64) -> MetrizedLattice {
        self.scaled(t.exp())
    }

    pub fn scaled(&self, c: f64) -> MetrizedLattice {
        Self::new(self.field.clone(), self.rank_over_field, &self.generator * c)
            .expect("scaling preserves nondegeneracy")
    }

    pub fn reduction(&self) -> &Reduction {
        self.reduced.get_or_init(|| reduce::lll(&self.generator))
    }

    /// Ambient point `sum_i c_i b_i`.
    pub fn point(&self, coeffs: &[i64]) -> Vec<f64> {
        (0..self.ambient_dim())
            .map(|col| coeffs.iter().enumerate().map(|(i, &c)| c as f64 * self.generator[(i, col)]).sum())
            .collect()
    }

    /// Sublattice spanned by integer combinations of the generator rows.
    pub fn sublattice(&self, coeff_rows: &[Vec<i64>], rank_over_field: usize) -> Result<MetrizedLattice> {
        let k = coeff_rows.len();
        let d = self.ambient_dim();
        let mut g = DMatrix::zeros(k, d);
        for (i, c) in coeff_rows.iter().enumerate() {
            for (j, v) in self.point(c).into_iter().enumerate() {
                g[(i, j)] = v;
            }
        }
        Self::new(self.field.clone(), rank_over_field, g)
    }
}

/// Infinite-place component of a matrix in `GL_r(A_F)`.
#[derive(Debug, Clone)]
pub enum PlaceMatrix {
    Real(DMatrix<f64>),
    Complex(DMatrix<Complex64>),
}

impl PlaceMatrix {
    pub fn dim(&self) -> usize {
        match self {
            PlaceMatrix::Real(m) => m.nrows(),
            PlaceMatrix::Complex(m) => m.nrows(),
        }
    }
}
