//! Arithmetic cohomology of number fields on the lattice side: theta
//! series of metrized lattices, Riemann-Roch and Serre duality as numeric
//! identities, slope stability with Harder-Narasimhan filtrations, and
//! non-abelian zeta functions with their meromorphic continuation.

pub mod cohomology;
pub mod error;
pub mod field;
pub mod intmat;
pub mod io;
pub mod lattice;
pub mod moduli;
pub mod numerics;
pub mod par;
pub mod stability;
pub mod zeta;

pub use error::{Error, Result};
pub use field::{kappa_lattice, load_field, standard_lattice, NumberFieldData};
pub use lattice::{MetrizedLattice, PlaceMatrix, ThetaValue};
pub use par::Execution;
