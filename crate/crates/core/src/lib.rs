//! Fixed-point machinery for generalized distance spaces.
//!
//! A distance here is any map `d: X × X → [0, ∞)`; the axioms a space does
//! or does not satisfy are checked, never assumed. On top of that sit
//! comparison functions (exact piecewise-affine), contraction checks for a
//! self-map, certified Picard iteration with a brute-force oracle, and the
//! derived distances used to reduce extended contractions to plain ones.
//!
//! Finite spaces are handled exactly over the rationals; analytic spaces
//! (formulas on an interval or the line) are checked on seeded samples.

pub mod comparison;
pub mod constructions;
pub mod corpus;
pub mod expr;
pub mod instance;
pub mod maps;
pub mod real;
pub mod solver;
pub mod spaces;
