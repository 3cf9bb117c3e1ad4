use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::real::{format_real, from_f64, int, parse_real, to_f64, Real};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FnError {
    #[error("function argument must be nonnegative, got {0}")]
    NegativeArgument(String),
    #[error("limit point must be positive, got {0}")]
    NonPositivePoint(String),
    #[error("malformed piecewise function: {0}")]
    Malformed(String),
    #[error("function takes a negative value: {0}")]
    Negative(String),
    #[error("empty function list")]
    EmptyList,
}

/// `t ↦ slope·t + intercept`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Affine {
    pub slope: Real,
    pub intercept: Real,
}

impl Affine {
    pub fn new(slope: Real, intercept: Real) -> Self {
        Affine { slope, intercept }
    }

    pub fn constant(c: Real) -> Self {
        Affine::new(Real::zero(), c)
    }

    pub fn at(&self, t: &Real) -> Real {
        &self.slope * t + &self.intercept
    }

    /// The unique `t` with `self(t) = level`, if the slope is nonzero.
    pub fn solve(&self, level: &Real) -> Option<Real> {
        if self.slope.is_zero() {
            None
        } else {
            Some((level - &self.intercept) / &self.slope)
        }
    }

    pub fn minus_identity(&self) -> Affine {
        Affine::new(&self.slope - int(1), self.intercept.clone())
    }
}

/// One piece: the function equals `at` at `start` and follows `law` on the
/// open interval up to the next piece's start (or to infinity for the last).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Segment {
    pub start: Real,
    pub at: Real,
    pub law: Affine,
}

/// A function `[0, ∞) → [0, ∞)` that is affine between finitely many
/// breakpoints and may jump at each of them.
///
/// Pieces are stored in canonical form (removable breakpoints merged), so
/// `==` is equality of functions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PiecewiseFn {
    segments: Vec<Segment>,
}

impl PiecewiseFn {
    /// Validates and canonicalizes a list of pieces.
    ///
    /// Starts must begin at 0 and increase strictly; every value taken on
    /// `[0, ∞)` must be nonnegative, which forces a nonnegative tail slope.
    pub fn new(segments: Vec<Segment>) -> Result<Self, FnError> {
        let first = segments
            .first()
            .ok_or_else(|| FnError::Malformed("no pieces".into()))?;
        if !first.start.is_zero() {
            return Err(FnError::Malformed(format!(
                "first breakpoint must be 0, got {}",
                format_real(&first.start)
            )));
        }
        for w in segments.windows(2) {
            if w[1].start <= w[0].start {
                return Err(FnError::Malformed(format!(
                    "breakpoints must increase strictly ({} then {})",
                    format_real(&w[0].start),
                    format_real(&w[1].start)
                )));
            }
        }
        for (i, seg) in segments.iter().enumerate() {
            if seg.at.is_negative() {
                return Err(FnError::Negative(format!(
                    "value {} at t={}",
                    format_real(&seg.at),
                    format_real(&seg.start)
                )));
            }
            let left = seg.law.at(&seg.start);
            if left.is_negative() {
                return Err(FnError::Negative(format!(
                    "right limit {} at t={}",
                    format_real(&left),
                    format_real(&seg.start)
                )));
            }
            match segments.get(i + 1) {
                Some(next) => {
                    let right = seg.law.at(&next.start);
                    if right.is_negative() {
                        return Err(FnError::Negative(format!(
                            "left limit {} at t={}",
                            format_real(&right),
                            format_real(&next.start)
                        )));
                    }
                }
                None => {
                    if seg.law.slope.is_negative() {
                        return Err(FnError::Negative(format!(
                            "tail slope {} eventually goes below zero",
                            format_real(&seg.law.slope)
                        )));
                    }
                }
            }
        }
        Ok(PiecewiseFn {
            segments: canonicalize(segments),
        })
    }

    /// `t ↦ slope·t`.
    pub fn linear(slope: Real) -> Self {
        PiecewiseFn::new(vec![Segment {
            start: Real::zero(),
            at: Real::zero(),
            law: Affine::new(slope, Real::zero()),
        }])
        .expect("nonnegative slope")
    }

    pub fn zero() -> Self {
        PiecewiseFn::linear(Real::zero())
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn breakpoints(&self) -> impl Iterator<Item = &Real> {
        self.segments.iter().map(|s| &s.start)
    }

    /// End of piece `i`, or `None` for the unbounded last piece.
    pub fn segment_end(&self, i: usize) -> Option<&Real> {
        self.segments.get(i + 1).map(|s| &s.start)
    }

    /// Index of the piece whose half-open interval contains `t ≥ 0`.
    pub fn segment_index(&self, t: &Real) -> usize {
        self.segments.partition_point(|s| &s.start <= t) - 1
    }

    pub fn eval(&self, t: &Real) -> Result<Real, FnError> {
        if t.is_negative() {
            return Err(FnError::NegativeArgument(format_real(t)));
        }
        Ok(self.eval_unchecked(t))
    }

    pub(crate) fn eval_unchecked(&self, t: &Real) -> Real {
        let seg = &self.segments[self.segment_index(t)];
        if &seg.start == t {
            seg.at.clone()
        } else {
            seg.law.at(t)
        }
    }

    /// Exact evaluation at a double, rounded to nearest. Negative and
    /// non-finite arguments evaluate to NaN.
    pub fn eval_f64(&self, t: f64) -> f64 {
        match from_f64(t) {
            Some(x) if !x.is_negative() => to_f64(&self.eval_unchecked(&x)),
            _ => f64::NAN,
        }
    }

    /// Exact evaluation at a double, rounded toward `+∞`.
    pub fn eval_f64_upper(&self, t: f64) -> f64 {
        match from_f64(t) {
            Some(x) if !x.is_negative() => {
                let exact = self.eval_unchecked(&x);
                let approx = to_f64(&exact);
                match from_f64(approx) {
                    Some(a) if a < exact => approx.next_up(),
                    _ => approx,
                }
            }
            _ => f64::NAN,
        }
    }

    /// `(lim_{t→r−} f(t), lim_{t→r+} f(t))`, read off the adjacent affine laws.
    pub fn one_sided_limits(&self, r: &Real) -> Result<(Real, Real), FnError> {
        if !r.is_positive() {
            return Err(FnError::NonPositivePoint(format_real(r)));
        }
        let right = &self.segments[self.segment_index(r)];
        let left_idx = self.segments.partition_point(|s| &s.start < r) - 1;
        let left = &self.segments[left_idx];
        Ok((left.law.at(r), right.law.at(r)))
    }
}

fn canonicalize(segments: Vec<Segment>) -> Vec<Segment> {
    let mut out: Vec<Segment> = Vec::with_capacity(segments.len());
    for seg in segments {
        if let Some(prev) = out.last() {
            if prev.law == seg.law && prev.law.at(&seg.start) == seg.at {
                continue;
            }
        }
        out.push(seg);
    }
    out
}

impl fmt::Display for PiecewiseFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, seg) in self.segments.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            let end = self
                .segment_end(i)
                .map(format_real)
                .unwrap_or_else(|| "inf".into());
            write!(
                f,
                "f({})={}, {}*t+{} on ({}, {})",
                format_real(&seg.start),
                format_real(&seg.at),
                format_real(&seg.law.slope),
                format_real(&seg.law.intercept),
                format_real(&seg.start),
                end
            )?;
        }
        Ok(())
    }
}

/// Wire form:
/// `{"breakpoints":[t0,...,tk], "pieces":[{"at","slope","intercept"}; k],
///   "tail":{"slope","intercept","at"?}}`.
///
/// Piece `i` covers `[t_i, t_{i+1})`; the tail covers `[t_k, ∞)`. The tail's
/// optional `at` gives a value at `t_k` that differs from its affine law.
/// Numbers are decimal strings, `p/q` strings or plain JSON numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PiecewiseFnJson {
    pub breakpoints: Vec<serde_json::Value>,
    pub pieces: Vec<PieceJson>,
    pub tail: TailJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceJson {
    pub at: serde_json::Value,
    pub slope: serde_json::Value,
    pub intercept: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailJson {
    pub slope: serde_json::Value,
    pub intercept: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at: Option<serde_json::Value>,
}

fn num(v: &serde_json::Value, what: &str) -> Result<Real, FnError> {
    crate::real::serde_real::value_to_real(v).map_err(|e| FnError::Malformed(format!("{what}: {e}")))
}

fn text(x: &Real) -> serde_json::Value {
    serde_json::Value::String(format_real(x))
}

impl TryFrom<&PiecewiseFnJson> for PiecewiseFn {
    type Error = FnError;

    fn try_from(j: &PiecewiseFnJson) -> Result<Self, FnError> {
        if j.breakpoints.is_empty() {
            return Err(FnError::Malformed("breakpoints must start with 0".into()));
        }
        if j.pieces.len() + 1 != j.breakpoints.len() {
            return Err(FnError::Malformed(format!(
                "{} breakpoints need {} pieces, found {}",
                j.breakpoints.len(),
                j.breakpoints.len() - 1,
                j.pieces.len()
            )));
        }
        let starts = j
            .breakpoints
            .iter()
            .map(|v| num(v, "breakpoint"))
            .collect::<Result<Vec<_>, _>>()?;
        let mut segments = Vec::with_capacity(starts.len());
        for (start, p) in starts.iter().zip(&j.pieces) {
            segments.push(Segment {
                start: start.clone(),
                at: num(&p.at, "at")?,
                law: Affine::new(num(&p.slope, "slope")?, num(&p.intercept, "intercept")?),
            });
        }
        let last = starts.last().expect("nonempty").clone();
        let law = Affine::new(num(&j.tail.slope, "tail slope")?, num(&j.tail.intercept, "tail intercept")?);
        let at = match &j.tail.at {
            Some(v) => num(v, "tail at")?,
            None => law.at(&last),
        };
        segments.push(Segment { start: last, at, law });
        PiecewiseFn::new(segments)
    }
}

impl From<&PiecewiseFn> for PiecewiseFnJson {
    fn from(f: &PiecewiseFn) -> Self {
        let segs = f.segments();
        let (body, tail) = segs.split_at(segs.len() - 1);
        let tail = &tail[0];
        PiecewiseFnJson {
            breakpoints: segs.iter().map(|s| text(&s.start)).collect(),
            pieces: body
                .iter()
                .map(|s| PieceJson {
                    at: text(&s.at),
                    slope: text(&s.law.slope),
                    intercept: text(&s.law.intercept),
                })
                .collect(),
            tail: TailJson {
                slope: text(&tail.law.slope),
                intercept: text(&tail.law.intercept),
                at: (tail.law.at(&tail.start) != tail.at).then(|| text(&tail.at)),
            },
        }
    }
}

impl Serialize for PiecewiseFn {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PiecewiseFnJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for PiecewiseFn {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = PiecewiseFnJson::deserialize(d)?;
        PiecewiseFn::try_from(&j).map_err(serde::de::Error::custom)
    }
}

/// Convenience constructor from `(start, at, slope, intercept)` text tuples.
pub fn piecewise(parts: &[(&str, &str, &str, &str)]) -> Result<PiecewiseFn, FnError> {
    let p = |s: &str| parse_real(s).map_err(|e| FnError::Malformed(e.to_string()));
    let segments = parts
        .iter()
        .map(|(start, at, slope, intercept)| {
            Ok(Segment {
                start: p(start)?,
                at: p(at)?,
                law: Affine::new(p(slope)?, p(intercept)?),
            })
        })
        .collect::<Result<Vec<_>, FnError>>()?;
    PiecewiseFn::new(segments)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::ratio;

    /// t/2 on [0, 1/2], 1/2 beyond.
    fn half_then_plateau() -> PiecewiseFn {
        piecewise(&[("0", "0", "1/2", "0"), ("1/2", "1/4", "0", "1/2")]).unwrap()
    }

    #[test]
    fn eval_uses_left_endpoint_value() {
        let f = half_then_plateau();
        assert_eq!(f.eval(&ratio(1, 4)).unwrap(), ratio(1, 8));
        assert_eq!(f.eval(&ratio(1, 2)).unwrap(), ratio(1, 4));
        assert_eq!(f.eval(&int(3)).unwrap(), ratio(1, 2));
        assert_eq!(f.eval(&int(0)).unwrap(), int(0));
        assert_eq!(PiecewiseFn::linear(ratio(1, 2)).eval(&int(1)).unwrap(), ratio(1, 2));
    }

    #[test]
    fn eval_rejects_negative() {
        assert!(matches!(
            half_then_plateau().eval(&ratio(-1, 2)),
            Err(FnError::NegativeArgument(_))
        ));
    }

    #[test]
    fn limits_at_jump() {
        let f = half_then_plateau();
        assert_eq!(f.one_sided_limits(&ratio(1, 2)).unwrap(), (ratio(1, 4), ratio(1, 2)));
        let g = PiecewiseFn::linear(ratio(1, 2));
        assert_eq!(g.one_sided_limits(&int(1)).unwrap(), (ratio(1, 2), ratio(1, 2)));
        let h = piecewise(&[
            ("0", "0", "1/2", "0"),
            ("1", "0.9", "-1", "2"),
            ("2", "1", "1/2", "0"),
        ])
        .unwrap();
        assert_eq!(h.one_sided_limits(&int(1)).unwrap(), (ratio(1, 2), int(1)));
        assert!(h.one_sided_limits(&int(0)).is_err());
    }

    #[test]
    fn rejects_malformed() {
        assert!(piecewise(&[("1", "0", "0", "0")]).is_err());
        assert!(piecewise(&[("0", "0", "1", "0"), ("0", "0", "1", "0")]).is_err());
        assert!(matches!(
            piecewise(&[("0", "0", "-1", "0")]),
            Err(FnError::Negative(_))
        ));
        assert!(matches!(
            piecewise(&[("0", "0", "-1", "1"), ("2", "0", "0", "0")]),
            Err(FnError::Negative(_))
        ));
        assert!(matches!(
            piecewise(&[("0", "-1", "0", "0")]),
            Err(FnError::Negative(_))
        ));
    }

    #[test]
    fn removable_breakpoints_merge() {
        let a = piecewise(&[("0", "0", "1/2", "0"), ("1", "1/2", "1/2", "0")]).unwrap();
        assert_eq!(a, PiecewiseFn::linear(ratio(1, 2)));
        assert_eq!(a.segments().len(), 1);
    }

    #[test]
    fn json_wire_form() {
        let f = half_then_plateau();
        let v = serde_json::to_value(&f).unwrap();
        assert_eq!(
            v,
            serde_json::json!({
                "breakpoints": ["0", "0.5"],
                "pieces": [{"at": "0", "slope": "0.5", "intercept": "0"}],
                "tail": {"slope": "0", "intercept": "0.5", "at": "0.25"}
            })
        );
        let back: PiecewiseFn = serde_json::from_value(v).unwrap();
        assert_eq!(back, f);

        // artificial final breakpoint, numbers in mixed notation
        let alt: PiecewiseFn = serde_json::from_value(serde_json::json!({
            "breakpoints": [0, "1/2", 1],
            "pieces": [
                {"at": 0, "slope": 0.5, "intercept": 0},
                {"at": "0.25", "slope": "0", "intercept": "1/2"}
            ],
            "tail": {"slope": 0, "intercept": 0.5}
        }))
        .unwrap();
        assert_eq!(alt, f);
    }

    #[test]
    fn json_piece_count_mismatch() {
        let r: Result<PiecewiseFn, _> = serde_json::from_value(serde_json::json!({
            "breakpoints": [0, 1],
            "pieces": [],
            "tail": {"slope": 0, "intercept": 0}
        }));
        assert!(r.is_err());
    }

    #[test]
    fn upper_rounding_never_undershoots() {
        let f = piecewise(&[("0", "0", "1/3", "0")]).unwrap();
        for t in [0.1, 1.0, 7.0, 1e3] {
            let up = f.eval_f64_upper(t);
            let exact = f.eval(&from_f64(t).unwrap()).unwrap();
            assert!(from_f64(up).unwrap() >= exact);
        }
    }
}
