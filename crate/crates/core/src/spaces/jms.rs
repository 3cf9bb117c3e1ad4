//! Bounded ball diameters and the `(δ, η)` condition
//! `d(x,z) + d(y,z) < δ ⇒ d(x,y) < η`.
//!
//! For a radius `r`, `R = sup_x diam B(x, r)` where the diameter ranges
//! over all ordered pairs of the ball, `a = b` included. The canonical
//! candidate is `(δ, η) = (r/2, R)`: the premise puts `x` and `y` in
//! `B(z, r)`, so it yields `d(x,y) ≤ R`. Equality is possible, in which case
//! the strict conclusion fails and the candidate is reported as violated.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::{check_radius, Coverage, DistanceSpace, FiniteSpace, SamplerConfig, SpaceError};
use crate::real::{int, ExtReal, Real};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JmsWitness {
    #[serde(with = "crate::real::serde_real")]
    pub r: Real,
    #[serde(rename = "R")]
    pub big_r: ExtReal,
    /// Proposed pair before verification: `(r/2, R)`, or `(r/2, smallest
    /// positive distance)` when every ball has diameter zero.
    pub candidate: Option<(String, String)>,
    /// Present only when the candidate passed the triple check.
    pub delta: Option<String>,
    pub eta: Option<String>,
    /// First triple `(x, y, z)` violating the condition, as labels.
    pub violation: Option<[String; 3]>,
    pub coverage: Coverage,
    pub note: Option<String>,
}

impl JmsWitness {
    pub fn verified(&self) -> bool {
        self.delta.is_some()
    }
}

/// `R` for radius `r`.
pub(crate) fn max_ball_diameter(s: &FiniteSpace, r: &Real) -> Real {
    let mut best = Real::zero();
    for x in 0..s.len() {
        let ball = s.ball(x, r);
        for &a in &ball {
            for &b in &ball {
                if s.d(a, b) > &best {
                    best = s.d(a, b).clone();
                }
            }
        }
    }
    best
}

/// First `(x, y, z)` with `d(x,z) + d(y,z) < δ` and `d(x,y) ≥ η`.
pub fn find_jms_violation(s: &FiniteSpace, delta: &Real, eta: &Real) -> Option<[usize; 3]> {
    let n = s.len();
    for x in 0..n {
        for y in 0..n {
            if s.d(x, y) < eta {
                continue;
            }
            for z in 0..n {
                if &(s.d(x, z) + s.d(y, z)) < delta {
                    return Some([x, y, z]);
                }
            }
        }
    }
    None
}

fn to_labels(s: &FiniteSpace, t: [usize; 3]) -> [String; 3] {
    t.map(|i| s.label(i).to_string())
}

/// Exhaustive witness on a finite space. `eta_cap`, when given, is the
/// largest `η` the caller accepts; a larger candidate is not emitted.
pub fn jms_witness_finite(s: &FiniteSpace, r: &Real, eta_cap: Option<&Real>) -> Result<JmsWitness, SpaceError> {
    check_radius(r)?;
    let big_r = max_ball_diameter(s, r);
    let delta = r / int(2);
    let mut note = None;
    let eta = if big_r.is_positive() {
        big_r.clone()
    } else {
        note = Some("every ball has diameter 0; η is the smallest positive distance".to_string());
        s.realized_positive_distances().into_iter().next().unwrap_or_else(Real::one)
    };
    let fmt = crate::real::format_real;
    let mut w = JmsWitness {
        r: r.clone(),
        big_r: ExtReal::Finite(big_r),
        candidate: Some((fmt(&delta), fmt(&eta))),
        delta: None,
        eta: None,
        violation: None,
        coverage: Coverage::Exhaustive,
        note,
    };
    if eta_cap.is_some_and(|cap| &eta > cap) {
        w.note = Some("η exceeds the cap".to_string());
        return Ok(w);
    }
    match find_jms_violation(s, &delta, &eta) {
        Some(t) => w.violation = Some(to_labels(s, t)),
        None => {
            w.delta = Some(fmt(&delta));
            w.eta = Some(fmt(&eta));
        }
    }
    Ok(w)
}

/// Finite spaces exactly; analytic spaces on the seeded sample. On an
/// analytic space a sampled `R` above `eta_cap` is reported as unbounded.
pub fn jms_witness(
    space: &DistanceSpace,
    r: &Real,
    eta_cap: Option<&Real>,
    sampler: &SamplerConfig,
) -> Result<JmsWitness, SpaceError> {
    match space {
        DistanceSpace::Finite(s) => jms_witness_finite(s, r, eta_cap),
        DistanceSpace::Analytic(a) => {
            let pts = sampler.sample_points(a.domain());
            let sample = a.restrict(&pts)?;
            let mut w = jms_witness_finite(&sample, r, eta_cap)?;
            w.coverage = Coverage::Sampled {
                seed: sampler.seed,
                count: pts.len(),
            };
            if let (Some(cap), ExtReal::Finite(v)) = (eta_cap, &w.big_r) {
                if v > cap {
                    w.big_r = ExtReal::Infinity;
                    w.candidate = None;
                    w.note = Some("sampled ball diameters exceed the cap; R treated as unbounded".to_string());
                }
            }
            Ok(w)
        }
    }
}

/// A verified `(δ, η)` pair found by search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JmsSearch {
    #[serde(with = "crate::real::serde_real")]
    pub delta: Real,
    #[serde(with = "crate::real::serde_real")]
    pub eta: Real,
    /// Radius whose ball diameter produced the pair.
    #[serde(with = "crate::real::serde_real")]
    pub r: Real,
    /// `true` when `η` had to be raised above `R`.
    pub raised: bool,
}

/// Tries `(r/2, R)` for every realized positive distance `r` (ascending);
/// if all of them hit the equality case, raises `η` to the next realized
/// distance above `R` (or `R + 1`) for the smallest `r`. Every returned
/// pair has passed the exhaustive triple check.
pub fn jms_search(s: &FiniteSpace) -> Option<JmsSearch> {
    let mut radii = s.realized_positive_distances();
    if radii.is_empty() {
        radii.push(Real::one());
    }
    for r in &radii {
        let big_r = max_ball_diameter(s, r);
        let eta = if big_r.is_positive() {
            big_r
        } else {
            radii[0].clone()
        };
        let delta = r / int(2);
        if find_jms_violation(s, &delta, &eta).is_none() {
            return Some(JmsSearch {
                delta,
                eta,
                r: r.clone(),
                raised: false,
            });
        }
    }
    let r = &radii[0];
    let delta = r / int(2);
    let big_r = max_ball_diameter(s, r);
    let eta = s
        .realized_positive_distances()
        .into_iter()
        .find(|v| v > &big_r)
        .unwrap_or_else(|| &big_r + Real::one());
    find_jms_violation(s, &delta, &eta).is_none().then(|| JmsSearch {
        delta,
        eta,
        r: r.clone(),
        raised: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::ratio;

    fn line(n: usize) -> FiniteSpace {
        FiniteSpace::from_fn((0..n).map(|i| i.to_string()).collect(), |i, j| {
            int((i as i64 - j as i64).abs())
        })
        .unwrap()
    }

    #[test]
    fn singleton_balls() {
        let w = jms_witness_finite(&line(3), &int(1), None).unwrap();
        assert_eq!(w.big_r, ExtReal::Finite(int(0)));
        assert!(w.verified());
        assert_eq!(w.eta.as_deref(), Some("1"));
    }

    #[test]
    fn radius_two() {
        let s = line(3);
        assert_eq!(s.ball(0, &int(2)), vec![0, 1]);
        assert_eq!(s.ball(1, &int(2)), vec![0, 1, 2]);
        let w = jms_witness_finite(&s, &int(2), None).unwrap();
        assert_eq!(w.big_r, ExtReal::Finite(int(2)));
        assert_eq!(w.delta.as_deref(), Some("1"));
        assert_eq!(w.eta.as_deref(), Some("2"));
    }

    /// `d(x,z) = d(y,z)` small, every other off-diagonal distance 5: with
    /// `r = 5` the ball around `z` is `{x, y, z}`, `R = 5 = d(x, y)`, and the
    /// triple `(x, y, z)` satisfies the premise with `d(x,y) = η`.
    #[test]
    fn equality_case_is_reported() {
        let five = int(5);
        let tenth = ratio(1, 10);
        let d = vec![
            vec![int(0), five.clone(), tenth.clone()],
            vec![five.clone(), int(0), tenth.clone()],
            vec![five.clone(), five.clone(), int(0)],
        ];
        let s = FiniteSpace::new(vec!["x".into(), "y".into(), "z".into()], d).unwrap();
        let w = jms_witness_finite(&s, &five, None).unwrap();
        assert!(!w.verified());
        assert_eq!(w.violation, Some(["x".to_string(), "y".to_string(), "z".to_string()]));
        let found = jms_search(&s).unwrap();
        assert!(find_jms_violation(&s, &found.delta, &found.eta).is_none());
    }

    #[test]
    fn cap_suppresses_witness() {
        let w = jms_witness_finite(&line(3), &int(2), Some(&int(1))).unwrap();
        assert!(!w.verified());
        assert!(w.candidate.is_some());
    }
}
