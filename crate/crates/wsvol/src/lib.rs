//! Exact computation of certified lower and upper bounds — and exact values
//! when the bounds meet — for weightless simplicial volumes of closed
//! oriented manifolds presented as Δ-complexes, over prime fields, a
//! quadratic extension, the rationals, and the integers.
//!
//! The crate is organized around an exact linear-algebra core (row
//! reduction over any field, Smith normal form over `Z`), a Δ-complex data
//! model with homology, a combinatorial search over model complexes that
//! yields universal lower bounds, bound assembly with provenance tags, and
//! covering-space towers for stabilisation.

pub mod bounds;
pub mod complex;
pub mod covers;
pub mod echelon;
pub mod field;
pub mod fixtures;
pub mod homology;
pub mod matrix;
pub mod model;
pub mod snf;

pub use field::{Field, FieldSpec, Fp, Fp2, Integers, PrimeField, QuadraticField, Rationals, Ring};
pub use matrix::{IntMatrix, Matrix, RatMatrix};

/// Matrices over a prime field.
pub type FpMatrix = Matrix<Fp>;
/// Matrices over the quadratic extension of a prime field.
pub type Fp2Matrix = Matrix<Fp2>;
