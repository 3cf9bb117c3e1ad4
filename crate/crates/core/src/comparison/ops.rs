use num_traits::{Signed, Zero};
use serde::Serialize;

use super::piecewise::{Affine, FnError, PiecewiseFn, Segment};
use crate::real::{int, max_real, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Rounding {
    Nearest,
    Upward,
}

/// Orbit `s, f(s), f²(s), …` of a comparison function.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterateTrace {
    pub values: Vec<f64>,
    pub converged: bool,
    pub steps: usize,
    /// The rounded orbit reached a value it cannot leave while still above
    /// the tolerance.
    pub stalled: bool,
}

pub(crate) fn iterate(f: &PiecewiseFn, s: f64, n_max: usize, tol: f64, rounding: Rounding) -> IterateTrace {
    let mut values = vec![s];
    let mut x = s;
    let mut steps = 0;
    let mut stalled = false;
    while x > tol && steps < n_max {
        let next = match rounding {
            Rounding::Nearest => f.eval_f64(x),
            Rounding::Upward => f.eval_f64_upper(x),
        };
        steps += 1;
        values.push(next);
        if next == x || next.is_nan() {
            stalled = next > tol || next.is_nan();
            x = next;
            break;
        }
        x = next;
    }
    IterateTrace {
        converged: x <= tol,
        values,
        steps,
        stalled,
    }
}

/// Iterates `f` from `s > 0` until the value drops to `tol` or `n_max`
/// applications have been made. Each step evaluates exactly at the current
/// double and rounds to nearest.
pub fn iterate_to_zero(f: &PiecewiseFn, s: f64, n_max: usize, tol: f64) -> Result<IterateTrace, FnError> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(FnError::NonPositivePoint(s.to_string()));
    }
    Ok(iterate(f, s, n_max, tol, Rounding::Nearest))
}

/// Running supremum: `0` at `0`, `sup_{0<u≤t} f(u)` for `t > 0`.
///
/// This is the monotone majorant used to turn a Φ-function into a
/// non-decreasing comparison function that still dominates it.
pub fn monotone_envelope(f: &PiecewiseFn) -> PiecewiseFn {
    let segs = f.segments();
    let mut out: Vec<Segment> = Vec::with_capacity(segs.len() + 2);
    // sup of f over (0, start of current piece)
    let mut running: Option<Real> = None;
    for (i, seg) in segs.iter().enumerate() {
        let end = f.segment_end(i);
        let s = &seg.start;
        let (at, base) = if i == 0 {
            (Real::zero(), None)
        } else {
            let v = max_real(running.as_ref().expect("set after first piece"), &seg.at).clone();
            (v.clone(), Some(v))
        };
        let law_s = seg.law.at(s);
        if !seg.law.slope.is_positive() {
            let c = match &base {
                Some(b) => max_real(b, &law_s).clone(),
                None => law_s,
            };
            out.push(Segment {
                start: s.clone(),
                at,
                law: Affine::constant(c.clone()),
            });
            running = Some(c);
            continue;
        }
        match base {
            Some(b) if b > law_s => {
                let cross = seg.law.solve(&b).expect("positive slope");
                if end.is_some_and(|e| &cross >= e) {
                    out.push(Segment {
                        start: s.clone(),
                        at,
                        law: Affine::constant(b.clone()),
                    });
                    running = Some(b);
                } else {
                    out.push(Segment {
                        start: s.clone(),
                        at,
                        law: Affine::constant(b.clone()),
                    });
                    out.push(Segment {
                        start: cross,
                        at: b,
                        law: seg.law.clone(),
                    });
                    running = end.map(|e| seg.law.at(e));
                }
            }
            _ => {
                out.push(Segment {
                    start: s.clone(),
                    at,
                    law: seg.law.clone(),
                });
                running = end.map(|e| seg.law.at(e));
            }
        }
    }
    PiecewiseFn::new(out).expect("envelope of a valid function is valid")
}

/// Exact pointwise maximum of a nonempty list.
pub fn max_combine(fs: &[PiecewiseFn]) -> Result<PiecewiseFn, FnError> {
    let first = fs.first().ok_or(FnError::EmptyList)?;
    if fs.len() == 1 {
        return Ok(first.clone());
    }
    let mut starts: Vec<Real> = fs.iter().flat_map(|f| f.breakpoints().cloned()).collect();
    starts.sort();
    starts.dedup();

    let mut out = Vec::new();
    for (k, s) in starts.iter().enumerate() {
        let end = starts.get(k + 1);
        let at = fs
            .iter()
            .map(|f| f.eval_unchecked(s))
            .max()
            .expect("nonempty");
        let laws: Vec<&Affine> = fs.iter().map(|f| &f.segments()[f.segment_index(s)].law).collect();

        let mut cuts: Vec<Real> = Vec::new();
        for (i, a) in laws.iter().enumerate() {
            for b in &laws[i + 1..] {
                if a.slope == b.slope {
                    continue;
                }
                let x = (&b.intercept - &a.intercept) / (&a.slope - &b.slope);
                if &x > s && end.is_none_or(|e| &x < e) {
                    cuts.push(x);
                }
            }
        }
        cuts.sort();
        cuts.dedup();

        let mut left = s.clone();
        let mut left_value = at;
        for idx in 0..=cuts.len() {
            let right = cuts.get(idx).or(end);
            let probe = match right {
                Some(r) => (&left + r) / int(2),
                None => &left + int(1),
            };
            let top = laws
                .iter()
                .max_by(|a, b| a.at(&probe).cmp(&b.at(&probe)))
                .expect("nonempty");
            out.push(Segment {
                start: left.clone(),
                at: left_value.clone(),
                law: (*top).clone(),
            });
            if let Some(c) = cuts.get(idx) {
                left = c.clone();
                left_value = laws.iter().map(|l| l.at(c)).max().expect("nonempty");
            }
        }
    }
    PiecewiseFn::new(out)
}
