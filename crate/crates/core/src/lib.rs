//! Exact growth invariants of finitely generated nilpotent groups and of
//! groups of polynomial growth given by matrices.
//!
//! * [`linalg`]: rational matrices, spans, Smith normal form, characteristic
//!   polynomials and the Jordan–Chevalley decomposition.
//! * [`liealg`]: nilpotent Lie algebras by structure constants, lower central
//!   series, gradings, dilations and the BCH product.
//! * [`nilgroup`]: unitriangular matrix groups, their Malcev algebras and
//!   the algebraic growth degree.
//! * [`wordmetric`]: word-metric balls, word length, local and conjugacy
//!   growth, growth classification.
//! * [`cone`]: asymptotic-cone experiments.
//! * [`weights`]: weights, the GNR condition and condition (S).
//! * [`cli`]: descriptors, catalog and the command runner.

pub mod cli;
pub mod cone;
pub mod error;
pub mod liealg;
pub mod linalg;
pub mod nilgroup;
pub mod weights;
pub mod wordmetric;

pub use error::{Error, Result};
