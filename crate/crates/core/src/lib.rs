//! Simple Euclidean Jordan algebras, their symmetric cones, and the
//! vector-valued zeta distributions attached to them: algebraic
//! decompositions, numerical evaluation with meromorphic continuation in s,
//! Laurent-data extraction at the poles, pole-order and support-rank
//! predictors, and numerical verification harnesses for the equivariance,
//! functional-equation and dimension statements at small rank.

pub mod algebra;
pub mod decomp;
pub mod error;
pub mod exact;
pub mod gamma;
pub mod mc;
pub mod poly;
pub mod polyrep;
pub mod quad;
pub mod testfn;
pub mod verify;
pub mod zeta;

pub use algebra::{make_algebra, Algebra, AlgebraDescriptor, Element, Family, Operator};
pub use error::{Error, Result};
