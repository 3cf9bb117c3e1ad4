//! Decision procedures for the comparison-function conditions.
//!
//! Because every piece is affine, each "for all t" condition reduces to
//! finitely many sign tests at breakpoints plus the sign of an affine law
//! on an open interval. All arithmetic is exact.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::ops::{iterate, Rounding};
use super::piecewise::{Affine, PiecewiseFn};
use crate::real::{format_real, int, Real};

fn ser_opt<S: serde::Serializer>(x: &Option<Real>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(r) => s.serialize_some(&format_real(r)),
        None => s.serialize_none(),
    }
}

/// A yes/no verdict with the point that decides it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionReport {
    pub holds: bool,
    /// Failing point when `holds` is false. For the limit checks in
    /// [`PhiReport`] a passing report carries the breakpoint closest to
    /// violating instead.
    #[serde(serialize_with = "ser_opt")]
    pub witness: Option<Real>,
}

impl ConditionReport {
    fn from_failure(failure: Option<Real>) -> Self {
        ConditionReport {
            holds: failure.is_none(),
            witness: failure,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PhiReport {
    pub is_comparison: bool,
    #[serde(serialize_with = "ser_opt")]
    pub comparison_witness: Option<Real>,
    pub left_limsup_ok: bool,
    #[serde(serialize_with = "ser_opt")]
    pub left_witness: Option<Real>,
    pub right_limsup_ok: bool,
    #[serde(serialize_with = "ser_opt")]
    pub right_witness: Option<Real>,
    pub plateau_ok: bool,
    #[serde(serialize_with = "ser_opt")]
    pub plateau_witness: Option<Real>,
    pub verdict: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeOutcome {
    pub probe: f64,
    pub converged: bool,
    pub steps: usize,
    pub last: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatkowskiReport {
    pub is_comparison: bool,
    pub monotone: bool,
    #[serde(serialize_with = "ser_opt")]
    pub monotone_witness: Option<Real>,
    pub probes: Vec<ProbeOutcome>,
    /// Some probe neither decayed nor provably stalled within `n_max`.
    pub undecided_iterate: bool,
    pub verdict: bool,
}

pub const DEFAULT_PROBES: [f64; 3] = [1e-3, 1.0, 1e3];

fn midpoint(s: &Real, e: Option<&Real>) -> Real {
    match e {
        Some(e) => (s + e) / int(2),
        None => s + Real::one(),
    }
}

/// A point of the open interval `(s, e)` where `g > 0` (`strict`) or
/// `g ≥ 0`, if any. `e = None` means `+∞`.
fn find_point(g: &Affine, s: &Real, e: Option<&Real>, strict: bool) -> Option<Real> {
    if g.slope.is_zero() {
        let ok = if strict {
            g.intercept.is_positive()
        } else {
            !g.intercept.is_negative()
        };
        return ok.then(|| midpoint(s, e));
    }
    let root = g.solve(&Real::zero()).expect("nonzero slope");
    let root_inside = &root > s && e.is_none_or(|e| &root < e);
    if !strict && root_inside {
        return Some(root);
    }
    if g.slope.is_positive() {
        let lo = if &root > s { &root } else { s };
        match e {
            Some(e) if lo >= e => None,
            _ => Some(midpoint(lo, e)),
        }
    } else {
        if &root <= s {
            return None;
        }
        let hi = match e {
            Some(e) if e < &root => e,
            _ => &root,
        };
        Some((s + hi) / int(2))
    }
}

/// First point of the interval between `s` and `e` (endpoints included per
/// flag) where `g` breaks `g < 0` (`strict_neg`) or `g ≤ 0`.
fn interval_violation(
    g: &Affine,
    s: &Real,
    e: Option<&Real>,
    include_s: bool,
    include_e: bool,
    strict_neg: bool,
) -> Option<Real> {
    let bad = |v: &Real| {
        if strict_neg {
            !v.is_negative()
        } else {
            v.is_positive()
        }
    };
    if include_s && bad(&g.at(s)) {
        return Some(s.clone());
    }
    if let Some(p) = find_point(g, s, e, !strict_neg) {
        return Some(p);
    }
    match e {
        Some(e) if include_e && bad(&g.at(e)) => Some(e.clone()),
        _ => None,
    }
}

/// `f(0) = 0` and `f(t) < t` for every `t > 0`.
pub fn check_comparison(f: &PiecewiseFn) -> ConditionReport {
    let segs = f.segments();
    if !segs[0].at.is_zero() {
        return ConditionReport::from_failure(Some(Real::zero()));
    }
    for (i, seg) in segs.iter().enumerate() {
        if i > 0 && seg.at >= seg.start {
            return ConditionReport::from_failure(Some(seg.start.clone()));
        }
        let g = seg.law.minus_identity();
        if let Some(t) = find_point(&g, &seg.start, f.segment_end(i), false) {
            return ConditionReport::from_failure(Some(t));
        }
    }
    ConditionReport::from_failure(None)
}

/// Breakpoint `r > 0` maximizing `limit(r) − r`.
fn closest_breakpoint(candidates: impl Iterator<Item = (Real, Real)>) -> Option<Real> {
    candidates
        .max_by(|a, b| (&a.1 - &a.0).cmp(&(&b.1 - &b.0)))
        .map(|(r, _)| r)
}

fn left_limsup(f: &PiecewiseFn) -> ConditionReport {
    let segs = f.segments();
    for (i, seg) in segs.iter().enumerate() {
        let g = seg.law.minus_identity();
        if let Some(r) = interval_violation(&g, &seg.start, f.segment_end(i), false, true, true) {
            return ConditionReport::from_failure(Some(r));
        }
    }
    let worst = closest_breakpoint(
        segs.windows(2)
            .map(|w| (w[1].start.clone(), w[0].law.at(&w[1].start))),
    );
    ConditionReport {
        holds: true,
        witness: worst,
    }
}

fn right_limsup(f: &PiecewiseFn) -> ConditionReport {
    let segs = f.segments();
    for (i, seg) in segs.iter().enumerate() {
        let g = seg.law.minus_identity();
        let include_s = seg.start.is_positive();
        if let Some(r) = interval_violation(&g, &seg.start, f.segment_end(i), include_s, false, false) {
            return ConditionReport::from_failure(Some(r));
        }
    }
    let worst = closest_breakpoint(
        segs.iter()
            .skip(1)
            .map(|s| (s.start.clone(), s.law.at(&s.start))),
    );
    ConditionReport {
        holds: true,
        witness: worst,
    }
}

/// Points `r > 0` of piece `i` where the right limit equals `r`, paired
/// with whether `f` is constant `r` just after them. `None` for the point
/// means the law is the identity on the whole piece.
fn right_fixed_points(f: &PiecewiseFn, i: usize) -> Option<(Option<Real>, bool)> {
    let seg = &f.segments()[i];
    let e = f.segment_end(i);
    let g = seg.law.minus_identity();
    if g.slope.is_zero() {
        return g.intercept.is_zero().then_some((None, false));
    }
    let r = g.solve(&Real::zero())?;
    let inside = r.is_positive() && r >= seg.start && e.is_none_or(|e| &r < e);
    inside.then(|| {
        let flat = seg.law.slope.is_zero();
        (Some(r), flat)
    })
}

fn plateau(f: &PiecewiseFn) -> ConditionReport {
    for i in 0..f.segments().len() {
        if let Some((r, flat)) = right_fixed_points(f, i) {
            if !flat {
                let r = r.unwrap_or_else(|| midpoint(&f.segments()[i].start, f.segment_end(i)));
                return ConditionReport::from_failure(Some(r));
            }
        }
    }
    ConditionReport::from_failure(None)
}

/// Membership in Φ: comparison function, left limits `< r`, right limits
/// `≤ r`, and `f ≡ s` just right of every `s` whose right limit is `s`.
pub fn check_phi_membership(f: &PiecewiseFn) -> PhiReport {
    let cmp = check_comparison(f);
    let left = left_limsup(f);
    let right = right_limsup(f);
    let plat = plateau(f);
    PhiReport {
        is_comparison: cmp.holds,
        comparison_witness: cmp.witness,
        left_limsup_ok: left.holds,
        left_witness: left.witness,
        right_limsup_ok: right.holds,
        right_witness: right.witness,
        plateau_ok: plat.holds,
        plateau_witness: plat.witness,
        verdict: cmp.holds && left.holds && right.holds && plat.holds,
    }
}

/// Right limit strictly below `s` at every `s > 0`.
pub fn check_boyd_wong(f: &PiecewiseFn) -> ConditionReport {
    for (i, seg) in f.segments().iter().enumerate() {
        let g = seg.law.minus_identity();
        let include_s = seg.start.is_positive();
        if let Some(s) = interval_violation(&g, &seg.start, f.segment_end(i), include_s, false, true) {
            return ConditionReport::from_failure(Some(s));
        }
    }
    ConditionReport::from_failure(None)
}

/// Every `s > 0` has a right neighbourhood `(s, s+ε)` on which `f ≤ s`.
pub fn check_pasicki(f: &PiecewiseFn) -> ConditionReport {
    for (i, seg) in f.segments().iter().enumerate() {
        let g = seg.law.minus_identity();
        let include_s = seg.start.is_positive();
        if let Some(s) = interval_violation(&g, &seg.start, f.segment_end(i), include_s, false, false) {
            return ConditionReport::from_failure(Some(s));
        }
        if let Some((r, _)) = right_fixed_points(f, i) {
            if seg.law.slope.is_positive() {
                let r = r.unwrap_or_else(|| midpoint(&seg.start, f.segment_end(i)));
                return ConditionReport::from_failure(Some(r));
            }
        }
    }
    ConditionReport::from_failure(None)
}

/// Exact monotone non-decreasing test; the witness is where it breaks.
pub fn check_monotone(f: &PiecewiseFn) -> ConditionReport {
    let segs = f.segments();
    if segs[0].at > segs[0].law.at(&segs[0].start) {
        return ConditionReport::from_failure(Some(segs[0].start.clone()));
    }
    for (i, seg) in segs.iter().enumerate() {
        if i > 0 {
            let left = segs[i - 1].law.at(&seg.start);
            let right = seg.law.at(&seg.start);
            if left > seg.at || seg.at > right {
                return ConditionReport::from_failure(Some(seg.start.clone()));
            }
        }
        if seg.law.slope.is_negative() {
            return ConditionReport::from_failure(Some(midpoint(&seg.start, f.segment_end(i))));
        }
    }
    ConditionReport::from_failure(None)
}

/// Monotone comparison function whose iterates vanish at every probe.
///
/// Monotonicity is exact. The iterate test is a semi-decision: each probe
/// is iterated at most `n_max` times with values rounded upward, so for a
/// monotone `f` a reported decay below `tol` is an upper bound on the true
/// orbit. A probe whose rounded orbit stops moving above `tol` provably
/// fails; one that is still moving after `n_max` steps is undecided.
pub fn check_matkowski(f: &PiecewiseFn, probes: &[f64], n_max: usize, tol: f64) -> MatkowskiReport {
    let cmp = check_comparison(f);
    let mono = check_monotone(f);
    let mut outcomes = Vec::new();
    let mut undecided = false;
    if cmp.holds && mono.holds {
        for &p in probes {
            let trace = iterate(f, p, n_max, tol, Rounding::Upward);
            if !trace.converged && !trace.stalled {
                undecided = true;
            }
            outcomes.push(ProbeOutcome {
                probe: p,
                converged: trace.converged,
                steps: trace.steps,
                last: *trace.values.last().expect("trace holds the start"),
            });
        }
    }
    let verdict = cmp.holds && mono.holds && !probes.is_empty() && outcomes.iter().all(|o| o.converged);
    MatkowskiReport {
        is_comparison: cmp.holds,
        monotone: mono.holds,
        monotone_witness: mono.witness,
        probes: outcomes,
        undecided_iterate: undecided,
        verdict,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comparison::piecewise::piecewise;
    use crate::real::ratio;

    fn half_then_plateau() -> PiecewiseFn {
        piecewise(&[("0", "0", "1/2", "0"), ("1/2", "1/4", "0", "1/2")]).unwrap()
    }

    /// t/2 on [0,1), 0.9 at 1, 2−t on (1,2), t/2 from 2 on.
    fn dip_after_one() -> PiecewiseFn {
        piecewise(&[
            ("0", "0", "1/2", "0"),
            ("1", "0.9", "-1", "2"),
            ("2", "1", "1/2", "0"),
        ])
        .unwrap()
    }

    #[test]
    fn comparison_examples() {
        assert!(check_comparison(&half_then_plateau()).holds);
        let id = check_comparison(&PiecewiseFn::linear(int(1)));
        assert!(!id.holds);
        let w = id.witness.unwrap();
        assert!(w.is_positive());
        let shifted = piecewise(&[("0", "0", "1/2", "0"), ("1", "0.7", "1", "-0.3")]).unwrap();
        assert!(check_comparison(&shifted).holds);
    }

    #[test]
    fn comparison_rejects_bad_value_at_zero_and_touching() {
        let f = piecewise(&[("0", "0.1", "0", "0")]).unwrap();
        assert_eq!(check_comparison(&f).witness, Some(Real::zero()));
        // reaches the diagonal at t = 2 inside the tail
        let g = piecewise(&[("0", "0", "1/2", "0"), ("1", "1/2", "1", "0")]).unwrap();
        let r = check_comparison(&g);
        assert!(!r.holds);
        // jump up to the diagonal at a breakpoint
        let h = piecewise(&[("0", "0", "1/2", "0"), ("1", "1", "1/2", "0")]).unwrap();
        assert_eq!(check_comparison(&h).witness, Some(int(1)));
    }

    #[test]
    fn witnesses_really_fail() {
        let g = piecewise(&[("0", "0", "1/2", "0"), ("1", "1/2", "3/2", "-1")]).unwrap();
        let w = check_comparison(&g).witness.unwrap();
        assert!(g.eval(&w).unwrap() >= w);
    }

    #[test]
    fn phi_examples() {
        let r = check_phi_membership(&half_then_plateau());
        assert!(r.verdict, "{r:?}");
        assert_eq!(r.right_witness, Some(ratio(1, 2)));

        let r = check_phi_membership(&dip_after_one());
        assert!(r.is_comparison);
        assert!(r.left_limsup_ok && r.right_limsup_ok);
        assert!(!r.plateau_ok);
        assert_eq!(r.plateau_witness, Some(int(1)));
        assert!(!r.verdict);

        assert!(check_phi_membership(&PiecewiseFn::linear(ratio(1, 2))).verdict);
    }

    #[test]
    fn phi_with_value_on_diagonal_at_one() {
        // law 2−t already on [1,2): f(1) = 1 is not a comparison function
        let f = piecewise(&[
            ("0", "0", "1/2", "0"),
            ("1", "1", "-1", "2"),
            ("2", "1", "1/2", "0"),
        ])
        .unwrap();
        let r = check_phi_membership(&f);
        assert!(!r.is_comparison && !r.plateau_ok && !r.verdict);
    }

    #[test]
    fn left_limit_reaching_diagonal() {
        // t on (0,1) would break comparison; use a jump that hits r from the left
        let f = piecewise(&[("0", "0", "1/2", "0"), ("1", "0", "1/2", "-1/2"), ("3", "1", "0", "1")]).unwrap();
        // left limit at 3 is 1 < 3, fine
        assert!(check_phi_membership(&f).left_limsup_ok);
        let g = piecewise(&[("0", "0", "1", "-1/2"), ("1", "1/4", "1/4", "0")]);
        // law t − 1/2 goes negative near 0: rejected at construction
        assert!(g.is_err());
        let h = piecewise(&[("0", "0", "0", "0"), ("1", "0", "1", "-1"), ("2", "1/2", "1/4", "0")]).unwrap();
        // on (1,2) law t−1 < t, left limit at 2 is 1 < 2
        assert!(check_phi_membership(&h).verdict);
    }

    #[test]
    fn boyd_wong_examples() {
        let r = check_boyd_wong(&half_then_plateau());
        assert!(!r.holds);
        assert_eq!(r.witness, Some(ratio(1, 2)));
        assert!(check_boyd_wong(&PiecewiseFn::linear(ratio(1, 2))).holds);
        let step = piecewise(&[("0", "0", "0", "0"), ("1", "0.5", "0", "0.5")]).unwrap();
        assert!(check_boyd_wong(&step).holds);
    }

    #[test]
    fn pasicki_examples() {
        assert!(check_pasicki(&half_then_plateau()).holds);
        assert!(check_pasicki(&dip_after_one()).holds);
        let shifted = piecewise(&[("0", "0", "1/2", "0"), ("1", "0.7", "1", "-0.3")]).unwrap();
        assert!(check_pasicki(&shifted).holds);
        // right limit 1 at s = 1 followed by a rising law
        let rising = piecewise(&[("0", "0", "1/2", "0"), ("1", "0.5", "1/2", "1/2"), ("2", "1", "0", "1")]).unwrap();
        let r = check_pasicki(&rising);
        assert!(!r.holds);
        assert_eq!(r.witness, Some(int(1)));
    }

    #[test]
    fn matkowski_examples() {
        let lin = check_matkowski(&PiecewiseFn::linear(ratio(1, 2)), &[1.0, 10.0], 64, 1e-9);
        assert!(lin.verdict);
        let ex = check_matkowski(&half_then_plateau(), &[10.0], 64, 1e-9);
        assert!(ex.verdict);
        let dip = check_matkowski(&dip_after_one(), &DEFAULT_PROBES, 64, 1e-9);
        assert!(!dip.monotone && !dip.verdict);
    }

    #[test]
    fn matkowski_undecided_vs_stalled() {
        // monotone, f(t) = 1 + (t−1)/2 above 1: orbits from above stall at 1
        let f = piecewise(&[("0", "0", "1/2", "0"), ("1", "1/2", "1/2", "1/2")]).unwrap();
        let r = check_matkowski(&f, &DEFAULT_PROBES, 10_000, 1e-9);
        assert!(r.monotone && !r.verdict);
        assert!(!r.undecided_iterate, "stall is a definite failure");
        // too small a budget leaves the decaying probe undecided
        let g = PiecewiseFn::linear(ratio(1, 2));
        let r = check_matkowski(&g, &[1e3], 5, 1e-9);
        assert!(r.undecided_iterate && !r.verdict);
    }

    #[test]
    fn monotone_detects_downward_jump() {
        let f = piecewise(&[("0", "0", "1/2", "0"), ("1", "0.1", "0", "0.1")]).unwrap();
        assert_eq!(check_monotone(&f).witness, Some(int(1)));
        assert!(check_monotone(&half_then_plateau()).holds);
    }
}
