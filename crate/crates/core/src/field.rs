//! Declarative number-field data: loading and validation.
//!
//! Nothing here computes arithmetic invariants. The file supplies the
//! weighted Minkowski embedding of an integral basis and of the inverse
//! different, and the loader checks what can be checked numerically.
//!
//! Coordinate convention: real places first, then one `(sqrt2 Re, sqrt2 Im)`
//! pair for each complex place, so that the Euclidean norm is
//! `sum_real |x|^2 + 2 sum_complex |z|^2`.

use std::path::Path;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::MetrizedLattice;

/// Relative tolerance for every numerical invariant checked at load time.
pub const VALIDATION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct NumberFieldData {
    pub degree: usize,
    pub r1: usize,
    pub r2: usize,
    pub discriminant: i64,
    pub basis_embedding: DMatrix<f64>,
    pub inv_different_embedding: DMatrix<f64>,
    pub class_reps: Option<Vec<DMatrix<f64>>>,
    pub regulator: Option<f64>,
    pub fundamental_units: Option<Vec<Vec<f64>>>,
    pub roots_of_unity: u32,
}

/// A JSON value that is either a decimal string or a plain number.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Decimal {
    Text(String),
    Number(f64),
}

impl Decimal {
    pub fn to_f64(&self) -> Result<f64> {
        match self {
            Decimal::Number(x) => Ok(*x),
            Decimal::Text(s) => s
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("`{s}` is not a decimal: {e}"))),
        }
    }
}

impl From<f64> for Decimal {
    fn from(x: f64) -> Self {
        Decimal::Text(format!("{x:e}"))
    }
}

/// On-disk field schema.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldFile {
    pub degree: usize,
    pub r1: usize,
    pub r2: usize,
    pub discriminant: i64,
    pub basis_embedding: Vec<Vec<Decimal>>,
    pub inv_different_embedding: Vec<Vec<Decimal>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class_reps: Option<Vec<Vec<Vec<Decimal>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regulator: Option<Decimal>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fundamental_units: Option<Vec<Vec<Decimal>>>,
    pub roots_of_unity: u32,
}

pub(crate) fn matrix_from(rows: &[Vec<Decimal>], n: usize, what: &str) -> Result<DMatrix<f64>> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Parse(format!("{what} must be a {n}x{n} matrix")));
    }
    let mut m = DMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            m[(i, j)] = x.to_f64()?;
        }
    }
    Ok(m)
}

/// Max distance of `t` from the nearest integer matrix, and that matrix.
fn integrality(t: &DMatrix<f64>) -> (f64, DMatrix<f64>) {
    let rounded = t.map(f64::round);
    let residual = (t - &rounded).amax();
    (residual, rounded)
}

impl NumberFieldData {
    pub fn rationals() -> Self {
        Self {
            degree: 1,
            r1: 1,
            r2: 0,
            discriminant: 1,
            basis_embedding: DMatrix::from_element(1, 1, 1.0),
            inv_different_embedding: DMatrix::from_element(1, 1, 1.0),
            class_reps: Some(vec![DMatrix::from_element(1, 1, 1.0)]),
            regulator: Some(1.0),
            fundamental_units: Some(vec![]),
            roots_of_unity: 2,
        }
    }

    pub fn from_file_struct(f: &FieldFile) -> Result<Self> {
        let n = f.degree;
        if n == 0 {
            return Err(Error::Parse("degree must be positive".into()));
        }
        let basis_embedding = matrix_from(&f.basis_embedding, n, "basis_embedding")?;
        let inv_different_embedding = matrix_from(&f.inv_different_embedding, n, "inv_different_embedding")?;
        let class_reps = f
            .class_reps
            .as_ref()
            .map(|reps| reps.iter().map(|m| matrix_from(m, n, "class_reps entry")).collect::<Result<Vec<_>>>())
            .transpose()?;
        let regulator = f.regulator.as_ref().map(Decimal::to_f64).transpose()?;
        let fundamental_units = f
            .fundamental_units
            .as_ref()
            .map(|us| {
                us.iter()
                    .map(|u| {
                        if u.len() != n {
                            return Err(Error::Parse(format!("fundamental unit must have {n} coordinates")));
                        }
                        u.iter().map(Decimal::to_f64).collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .transpose()?;
        let data = Self {
            degree: n,
            r1: f.r1,
            r2: f.r2,
            discriminant: f.discriminant,
            basis_embedding,
            inv_different_embedding,
            class_reps,
            regulator,
            fundamental_units,
            roots_of_unity: f.roots_of_unity,
        };
        data.validate()?;
        Ok(data)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: FieldFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_file_struct(&f)
    }

    pub fn abs_discriminant(&self) -> f64 {
        self.discriminant.unsigned_abs() as f64
    }

    pub fn log_abs_discriminant(&self) -> f64 {
        self.abs_discriminant().ln()
    }

    pub fn unit_rank(&self) -> usize {
        self.r1 + self.r2 - 1
    }

    pub fn is_rationals(&self) -> bool {
        self.degree == 1
    }

    /// Class number from the declared representatives (`Q` needs none).
    pub fn class_number(&self) -> Result<usize> {
        match &self.class_reps {
            Some(reps) => Ok(reps.len()),
            None if self.is_rationals() => Ok(1),
            None => Err(Error::MissingData("class_reps")),
        }
    }

    /// Ideal-class representatives, defaulting to `O_F` itself over `Q`.
    pub fn class_representatives(&self) -> Result<Vec<DMatrix<f64>>> {
        match &self.class_reps {
            Some(reps) => Ok(reps.clone()),
            None if self.is_rationals() => Ok(vec![self.basis_embedding.clone()]),
            None => Err(Error::MissingData("class_reps")),
        }
    }

    /// `log |sigma(u)|` at each infinite place for a weighted-coordinate unit.
    pub fn place_logs(&self, unit: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.r1 + self.r2);
        for i in 0..self.r1 {
            out.push(unit[i].abs().ln());
        }
        for j in 0..self.r2 {
            let c = self.r1 + 2 * j;
            out.push((0.5 * (unit[c] * unit[c] + unit[c + 1] * unit[c + 1])).sqrt().ln());
        }
        out
    }

    /// Regulator: declared, else computed from the fundamental units; `1` for
    /// unit rank zero.
    pub fn regulator_value(&self) -> Result<f64> {
        if self.unit_rank() == 0 {
            return Ok(self.regulator.unwrap_or(1.0));
        }
        if let Some(r) = self.regulator {
            return Ok(r);
        }
        match &self.fundamental_units {
            Some(us) if us.len() == self.unit_rank() => Ok(self.regulator_from_units(us)),
            _ => Err(Error::MissingData("regulator")),
        }
    }

    fn regulator_from_units(&self, units: &[Vec<f64>]) -> f64 {
        let k = self.unit_rank();
        let m = DMatrix::from_fn(k, k, |i, j| {
            let logs = self.place_logs(&units[i]);
            let weight = if j < self.r1 { 1.0 } else { 2.0 };
            weight * logs[j]
        });
        m.determinant().abs()
    }

    /// Matrix of multiplication by the `index`-th integral basis element,
    /// acting on row vectors of weighted Minkowski coordinates.
    pub fn multiplication_matrix(&self, index: usize) -> DMatrix<f64> {
        let n = self.degree;
        let e = self.basis_embedding.row(index);
        let mut m = DMatrix::zeros(n, n);
        for i in 0..self.r1 {
            m[(i, i)] = e[i];
        }
        let s2 = std::f64::consts::SQRT_2;
        for j in 0..self.r2 {
            let c = self.r1 + 2 * j;
            let (a, b) = (e[c] / s2, e[c + 1] / s2);
            m[(c, c)] = a;
            m[(c, c + 1)] = b;
            m[(c + 1, c)] = -b;
            m[(c + 1, c + 1)] = a;
        }
        m
    }

    fn validate(&self) -> Result<()> {
        let n = self.degree;
        if self.r1 + 2 * self.r2 != n {
            return Err(Error::Invariant { invariant: "r1 + 2 r2 = degree", residual: (self.r1 + 2 * self.r2) as f64 - n as f64 });
        }
        if self.discriminant == 0 {
            return Err(Error::Invariant { invariant: "discriminant nonzero", residual: 0.0 });
        }
        let expected_sign = if self.r2 % 2 == 0 { 1 } else { -1 };
        if self.discriminant.signum() != expected_sign {
            return Err(Error::Invariant { invariant: "sign(discriminant) = (-1)^r2", residual: self.discriminant as f64 });
        }
        if self.roots_of_unity == 0 || (self.r1 > 0 && self.roots_of_unity != 2) {
            return Err(Error::Invariant { invariant: "roots_of_unity (w = 2 when r1 > 0)", residual: self.roots_of_unity as f64 });
        }

        let det = self.basis_embedding.determinant().abs();
        let expect = self.abs_discriminant().sqrt();
        let rel = (det - expect).abs() / expect;
        if !(rel <= VALIDATION_TOL) {
            return Err(Error::Invariant { invariant: "|det(basis_embedding)| = sqrt|discriminant| (covolume)", residual: rel });
        }

        // inv_different * basis^T must be an integer unimodular matrix.
        let t = &self.inv_different_embedding * self.basis_embedding.transpose();
        let (res, rounded) = integrality(&t);
        if !(res <= 1e-8) || (rounded.determinant().abs() - 1.0).abs() > 1e-9 {
            return Err(Error::Invariant {
                invariant: "inv_different_embedding spans the dual of basis_embedding",
                residual: res.max((rounded.determinant().abs() - 1.0).abs()),
            });
        }

        let basis_inv = self
            .basis_embedding
            .clone()
            .try_inverse()
            .ok_or(Error::Invariant { invariant: "basis_embedding nonsingular", residual: det })?;
        if let Some(reps) = &self.class_reps {
            if reps.is_empty() {
                return Err(Error::Invariant { invariant: "class_reps contains the identity class", residual: 0.0 });
            }
            for (k, rep) in reps.iter().enumerate() {
                let (res, rounded) = integrality(&(rep * &basis_inv));
                if !(res <= 1e-8) {
                    return Err(Error::Invariant { invariant: "class representative is an integral ideal", residual: res });
                }
                let norm = rounded.determinant().abs();
                if k == 0 && (norm - 1.0).abs() > 1e-9 {
                    return Err(Error::Invariant { invariant: "first class representative is O_F", residual: norm - 1.0 });
                }
                if norm < 0.5 {
                    return Err(Error::Invariant { invariant: "class representative nonsingular", residual: norm });
                }
            }
        }

        if let Some(units) = &self.fundamental_units {
            if units.len() != self.unit_rank() {
                return Err(Error::Invariant {
                    invariant: "number of fundamental units = r1 + r2 - 1",
                    residual: units.len() as f64 - self.unit_rank() as f64,
                });
            }
            for u in units {
                let logs = self.place_logs(u);
                let log_norm: f64 = logs.iter().enumerate().map(|(j, l)| if j < self.r1 { *l } else { 2.0 * l }).sum();
                if !(log_norm.abs() <= 1e-9) {
                    return Err(Error::Invariant { invariant: "fundamental unit has norm +-1", residual: log_norm });
                }
                let row = DMatrix::from_row_slice(1, n, u);
                let (res, _) = integrality(&(row * &basis_inv));
                if !(res <= 1e-8) {
                    return Err(Error::Invariant { invariant: "fundamental unit lies in O_F", residual: res });
                }
            }
            if let (Some(r), true) = (self.regulator, self.unit_rank() > 0) {
                let computed = self.regulator_from_units(units);
                let rel = (computed - r).abs() / r;
                if !(rel <= 1e-9) {
                    return Err(Error::Invariant { invariant: "regulator matches fundamental units", residual: rel });
                }
            }
        }
        if let Some(r) = self.regulator {
            if !(r > 0.0) {
                return Err(Error::Invariant { invariant: "regulator positive", residual: r });
            }
        }
        Ok(())
    }
}

pub fn load_field(path: impl AsRef<Path>) -> Result<NumberFieldData> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    NumberFieldData::from_json(&text)
}

/// `O_F` with its weighted Minkowski metric; degree 0.
pub fn standard_lattice(field: &Arc<NumberFieldData>) -> MetrizedLattice {
    MetrizedLattice::new(field.clone(), 1, field.basis_embedding.clone()).expect("validated basis is nonsingular")
}

/// The inverse different, degree `log |Delta_F|`.
pub fn kappa_lattice(field: &Arc<NumberFieldData>) -> MetrizedLattice {
    MetrizedLattice::new(field.clone(), 1, field.inv_different_embedding.clone())
        .expect("validated inverse different is nonsingular")
}

#[cfg(test)]
mod tests {
    use super::*;

    const GAUSSIAN: &str = r#"{
        "degree": 2, "r1": 0, "r2": 1, "discriminant": -4,
        "basis_embedding": [["1.4142135623730950488", "0"], ["0", "1.4142135623730950488"]],
        "inv_different_embedding": [["0.70710678118654752440", "0"], ["0", "0.70710678118654752440"]],
        "class_reps": [[["1.4142135623730950488", "0"], ["0", "1.4142135623730950488"]]],
        "roots_of_unity": 4
    }"#;

    #[test]
    fn accepts_gaussian_integers() {
        let f = NumberFieldData::from_json(GAUSSIAN).unwrap();
        assert!((f.basis_embedding.determinant().abs() - 2.0).abs() < 1e-14);
        assert_eq!(f.class_number().unwrap(), 1);
    }

    #[test]
    fn rejects_covolume_mismatch() {
        let bad = GAUSSIAN.replace("\"discriminant\": -4", "\"discriminant\": -5");
        let err = NumberFieldData::from_json(&bad).unwrap_err();
        assert!(matches!(err, Error::Invariant { invariant, .. } if invariant.contains("covolume")), "{err}");
        // positive 5 trips the sign check first
        let bad = GAUSSIAN.replace("\"discriminant\": -4", "\"discriminant\": 5");
        assert!(NumberFieldData::from_json(&bad).is_err());
    }

    #[test]
    fn rejects_wrong_inverse_different() {
        let bad = GAUSSIAN.replace("0.70710678118654752440\", \"0\"]", "1.4142135623730950488\", \"0\"]");
        let err = NumberFieldData::from_json(&bad).unwrap_err();
        assert!(matches!(err, Error::Invariant { invariant, .. } if invariant.contains("dual")), "{err}");
    }

    #[test]
    fn rejects_bad_signature_and_parse_errors() {
        let bad = GAUSSIAN.replace("\"r2\": 1", "\"r2\": 2");
        assert!(NumberFieldData::from_json(&bad).is_err());
        assert!(matches!(NumberFieldData::from_json("{"), Err(Error::Parse(_))));
        let bad = GAUSSIAN.replace("\"0\", \"1.4142135623730950488\"]]", "\"x\", \"1.4\"]]");
        assert!(matches!(NumberFieldData::from_json(&bad), Err(Error::Parse(_))));
    }

    #[test]
    fn standard_and_kappa_degrees() {
        let f = Arc::new(NumberFieldData::from_json(GAUSSIAN).unwrap());
        let std = standard_lattice(&f);
        assert!((std.covolume() - 2.0).abs() < 1e-14);
        assert!(std.degree().abs() < 1e-14);
        let kap = kappa_lattice(&f);
        assert!((kap.covolume() - 0.5).abs() < 1e-14);
        assert!((kap.degree() - std.degree() - 4f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn multiplication_by_i_rotates() {
        let f = NumberFieldData::from_json(GAUSSIAN).unwrap();
        let m = f.multiplication_matrix(1);
        // i * 1 = i : row (sqrt2, 0) -> (0, sqrt2)
        let v = DMatrix::from_row_slice(1, 2, &[std::f64::consts::SQRT_2, 0.0]) * m;
        assert!(v[(0, 0)].abs() < 1e-15 && (v[(0, 1)] - std::f64::consts::SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn rationals_are_trivial() {
        let q = Arc::new(NumberFieldData::rationals());
        assert_eq!(standard_lattice(&q).covolume(), 1.0);
        assert_eq!(kappa_lattice(&q).generator(), standard_lattice(&q).generator());
    }
}
