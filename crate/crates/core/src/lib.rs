//! Exact differential calculus over graded commutative rings.
//!
//! The model ring is `A = Q[x1..xn] (x) Lambda(c1..cm)`: polynomial even
//! generators tensored with a Grassmann algebra, over arbitrary-precision
//! rationals. On top of it the crate builds graded derivations, the bigraded
//! ring of exterior forms with differential, interior product and Lie
//! derivative, differential-operator order classification, first-order jets
//! and connections with curvature, and three exact cohomology engines (de
//! Rham by weight blocks, Chevalley-Eilenberg for finite-dimensional Lie
//! algebras, and Cech for finite covers), plus the universal first-order
//! calculus over finite-dimensional noncommutative algebras.
//!
//! Everything is exact: scalars are big rationals and ranks come from
//! fraction-free elimination. All values are immutable and all operations are
//! pure functions, so everything here is safe to share across threads.

pub mod cech;
pub mod complex;
pub mod derham;
pub mod derivation;
pub mod diffop;
pub mod form;
pub mod jet;
pub mod lie;
pub mod linalg;
pub mod ncalc;
pub mod parse;
pub mod ring;
pub mod scalar;

pub use complex::{BettiTable, CochainComplex};
pub use derivation::GradedDerivation;
pub use form::{Form, FormMonomial};
pub use ring::{Element, Monomial, RingSpec, Substitution};
pub use scalar::Scalar;
