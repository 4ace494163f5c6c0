//! Exact rational and integer linear algebra.

pub mod jordan;
pub mod matrix;
pub mod poly;
pub mod rational;
pub mod smith;
pub mod span;

pub use jordan::{has_finite_order, jordan_chevalley, quasi_unipotent_test, QuasiUnipotentVerdict};
pub use matrix::RationalMatrix;
pub use poly::{char_poly, cyclotomic, Poly};
pub use rational::{frac, parse_rational, rat, Rational};
pub use smith::{smith_quotient, IntegerLatticeQuotient};
pub use span::{rref_span, CoordinateSolver, Subspace};
