pub mod atiyah;
pub mod cech;
pub mod extension;
pub mod fixtures;
pub mod io;
pub mod linalg;
pub mod lr;
pub mod spectral;

pub use linalg::{CochainComplex, MatrixQ, Rational, Subquotient, Vector};
pub use lr::{BaseAlgebra, Cochain, Connection, LieRinehart, RModule};
