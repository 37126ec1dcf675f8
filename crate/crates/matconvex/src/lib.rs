//! Numerical toolkit for matrix-convex and matrix-monotone functions of a
//! fixed order: divided differences with confluent nodes, Pick and Kraus
//! criterion matrices, determinant identities, gap polynomials, fractional
//! transforms and a brute-force Hermitian-matrix oracle.

pub mod curve;
pub mod dd;
pub mod error;
pub mod funcmodel;
pub mod interval;

pub use curve::Curve;
pub use error::{Error, Result};
pub use funcmodel::{Family, FunctionModel, MobiusMap};
pub use interval::Interval;
