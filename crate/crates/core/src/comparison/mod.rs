//! Comparison functions as exact piecewise-affine maps `[0, ∞) → [0, ∞)`.
//!
//! Every one-sided `limsup` in the contraction conditions is an ordinary
//! one-sided limit for such functions, so Φ-membership, the Boyd–Wong and
//! Pasicki conditions, and monotonicity are decided exactly. Only the
//! iterate-decay part of the Matkowski condition is a bounded semi-decision.
//!
//! The monotone envelope is the running supremum `sup_{0<u≤t} f(u)`.

mod checks;
mod ops;
mod piecewise;

pub use checks::{
    check_boyd_wong, check_comparison, check_matkowski, check_monotone, check_pasicki,
    check_phi_membership, ConditionReport, MatkowskiReport, PhiReport, ProbeOutcome, DEFAULT_PROBES,
};
pub use ops::{iterate_to_zero, max_combine, monotone_envelope, IterateTrace};
pub use piecewise::{piecewise, Affine, FnError, PieceJson, PiecewiseFn, PiecewiseFnJson, Segment, TailJson};
