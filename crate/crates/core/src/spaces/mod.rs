//! Distance spaces with no axioms assumed, the axiom taxonomy, balls,
//! the closed-set topology `τ_d`, and the W3 / JMS properties.
//!
//! Finite spaces are matrix-backed and every check on them is exact and
//! exhaustive. Analytic spaces are given by a formula in `x, y` over an
//! interval or the real line; their checks evaluate the formula exactly at
//! a seeded sample of points and are reported as sampled.
//!
//! Two topologies live side by side: balls `B(x, r) = {y : d(y, x) < r}`
//! and the closed-set topology in which `A` is closed iff `d(A, x) = 0`
//! forces `x ∈ A`. Balls need not be open in the latter.

mod analytic;
mod axioms;
mod finite;
mod jms;

use serde::Serialize;
use thiserror::Error;

use crate::expr::EvalError;
use crate::real::Real;

pub use analytic::{AnalyticSpace, Domain, SamplerConfig};
pub use axioms::{classify_axioms, classify_finite, AxiomCheck, AxiomReport, Taxonomy};
pub use finite::{CauchyReport, FiniteSpace, FiniteSpaceJson, W3Report, ENUMERATION_BOUND};
pub use jms::{jms_search, jms_witness, jms_witness_finite, JmsSearch, JmsWitness};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpaceError {
    #[error("space has no points")]
    Empty,
    #[error("duplicate point label `{0}`")]
    DuplicateLabel(String),
    #[error("dmatrix {rows}×{cols} for {points} points")]
    Shape { points: usize, rows: usize, cols: usize },
    #[error("negative distance d({from}, {to}) = {value}")]
    NegativeDistance { from: String, to: String, value: String },
    #[error("unknown point `{0}`")]
    UnknownPoint(String),
    #[error("{points} points exceed the subset enumeration bound {bound}")]
    EnumerationBound { points: usize, bound: usize },
    #[error("empty trace")]
    EmptyTrace,
    #[error("empty domain [{a}, {b}]")]
    EmptyDomain { a: String, b: String },
    #[error("point {0} lies outside the domain")]
    OutsideDomain(String),
    #[error("distance formula failed at ({x}, {y}): {source}")]
    Eval { x: String, y: String, source: EvalError },
    #[error("radius must be positive, got {0}")]
    NonPositiveRadius(String),
}

/// How thoroughly a property was checked.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Coverage {
    Exhaustive,
    Sampled { seed: u64, count: usize },
}

/// A point of either kind of space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Point {
    Index(usize),
    Real(f64),
}

#[derive(Debug, Clone)]
pub enum DistanceSpace {
    Finite(FiniteSpace),
    Analytic(AnalyticSpace),
}

impl DistanceSpace {
    pub fn classify(&self, sampler: &SamplerConfig) -> Result<AxiomReport, SpaceError> {
        classify_axioms(self, sampler)
    }

    pub fn as_finite(&self) -> Option<&FiniteSpace> {
        match self {
            DistanceSpace::Finite(s) => Some(s),
            DistanceSpace::Analytic(_) => None,
        }
    }

    pub fn as_analytic(&self) -> Option<&AnalyticSpace> {
        match self {
            DistanceSpace::Analytic(s) => Some(s),
            DistanceSpace::Finite(_) => None,
        }
    }

    /// Human-readable name of a point.
    pub fn point_label(&self, p: &Point) -> String {
        match (self, p) {
            (DistanceSpace::Finite(s), Point::Index(i)) => s.label(*i).to_string(),
            (_, Point::Index(i)) => i.to_string(),
            (_, Point::Real(x)) => format!("{x}"),
        }
    }

    /// Distance as a double (exact for finite spaces up to rounding).
    pub fn dist_f64(&self, a: &Point, b: &Point) -> Result<f64, SpaceError> {
        match (self, a, b) {
            (DistanceSpace::Finite(s), Point::Index(i), Point::Index(j)) => {
                Ok(crate::real::to_f64(s.d(*i, *j)))
            }
            (DistanceSpace::Analytic(s), Point::Real(x), Point::Real(y)) => s.d_f64(*x, *y),
            _ => Err(SpaceError::UnknownPoint(format!("{a:?}"))),
        }
    }
}

pub(crate) fn check_radius(r: &Real) -> Result<(), SpaceError> {
    use num_traits::Signed;
    if r.is_positive() {
        Ok(())
    } else {
        Err(SpaceError::NonPositiveRadius(crate::real::format_real(r)))
    }
}
