//! Exact constructions and variational selection for planar maps whose
//! gradient is constrained to the eight signed permutation matrices, with
//! zero boundary data.
//!
//! The crate builds the explicit piecewise-affine solutions (square pyramid
//! building block, greedy and self-similar coverings, accordion frames),
//! measures their singular skeletons, and evaluates the weighted jump energy
//! with certified geometric tail bounds.
//!
//! The geometry kernel is generic over the coordinate scalar: [`Dyadic`] for
//! exact binary-rational constructions, `f64` for general triangular
//! domains. Concrete aliases are exported at the crate root.

pub mod geom;
pub mod matrix;
pub mod scalar;

pub mod accordion;
pub mod cells;
pub mod covering;
pub mod energy;
pub mod pyramid;
pub mod report;
pub mod rng;
pub mod solution;

pub mod quad;

pub use matrix::{matrix_set_e, SignedMatrix};
pub use scalar::{Dyadic, Scalar};

/// Exact coordinate type used by the square constructions.
pub type Exact = Dyadic;
/// Floating coordinate type used by general triangular domains.
pub type Real = f64;

pub type ExactPoint = geom::Point<Exact>;
pub type RealPoint = geom::Point<Real>;
pub type ExactPolygon = geom::Polygon<Exact>;
pub type RealPolygon = geom::Polygon<Real>;
