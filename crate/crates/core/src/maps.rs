//! Self-maps and the contraction hypotheses:
//!
//! * Banach: `d(fx, fy) ≤ α·d(x, y)`;
//! * nonlinear: `d(fx, fy) ≤ φ(d(x, y))`;
//! * extended: `d(fx, fy) ≤ max{φ₁(d(x,y)), φ₂(d(x,fx)), φ₃(d(y,fy))}`;
//! * iterated: `d(fⁿ⁺¹x, fⁿ⁺¹y) ≤ φ(max_{0≤i≤n} d(fⁱx, fⁱy))`.
//!
//! Every check computes `lhs − rhs` exactly over all ordered pairs of a
//! finite space, or over seeded sample pairs of an analytic one, and
//! reports the worst margin. A hypothesis holds iff that margin is `≤ 0`.

use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::comparison::{check_phi_membership, PiecewiseFn};
use crate::expr::{EvalError, Expr};
use crate::real::{format_real, from_f64, int, max_real, Real};
use crate::spaces::{AnalyticSpace, Coverage, DistanceSpace, FiniteSpace, SamplerConfig, SpaceError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MapError {
    #[error("image index {index} out of range for {n} points")]
    OutOfRange { index: usize, n: usize },
    #[error("image has {len} entries for {n} points")]
    Length { len: usize, n: usize },
    #[error("power must be at least 1")]
    ZeroPower,
    #[error("α = {0} is outside [0, 1)")]
    Alpha(String),
    #[error("`{name}` is not in Φ: {reason}")]
    NotPhi { name: String, reason: String },
    #[error("a {map} map cannot act on a {space} space")]
    KindMismatch { map: &'static str, space: &'static str },
    #[error("map formula failed at {x}: {source}")]
    Eval { x: String, source: EvalError },
    #[error("f({x}) = {image} leaves the domain")]
    OutsideDomain { x: String, image: String },
    #[error(transparent)]
    Space(#[from] SpaceError),
}

#[derive(Debug, Clone, PartialEq)]
pub enum SelfMap {
    /// `image[i]` is the index of `f(pointᵢ)`.
    Finite(Vec<usize>),
    /// The formula applied `times` times.
    Analytic { expr: Expr, times: usize },
}

impl SelfMap {
    pub fn finite(image: Vec<usize>, n: usize) -> Result<Self, MapError> {
        if image.len() != n {
            return Err(MapError::Length { len: image.len(), n });
        }
        if let Some(&index) = image.iter().find(|&&i| i >= n) {
            return Err(MapError::OutOfRange { index, n });
        }
        Ok(SelfMap::Finite(image))
    }

    pub fn analytic(expr: Expr) -> Self {
        SelfMap::Analytic { expr, times: 1 }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            SelfMap::Finite(_) => "finite",
            SelfMap::Analytic { .. } => "analytic",
        }
    }

    pub fn image(&self) -> Option<&[usize]> {
        match self {
            SelfMap::Finite(v) => Some(v),
            SelfMap::Analytic { .. } => None,
        }
    }

    /// `f^l`.
    pub fn compose_power(&self, l: usize) -> Result<SelfMap, MapError> {
        if l == 0 {
            return Err(MapError::ZeroPower);
        }
        Ok(match self {
            SelfMap::Finite(img) => SelfMap::Finite((0..img.len()).map(|i| power_index(img, i, l)).collect()),
            SelfMap::Analytic { expr, times } => SelfMap::Analytic {
                expr: expr.clone(),
                times: times * l,
            },
        })
    }

    pub fn apply_f64(&self, x: f64) -> Result<f64, MapError> {
        let SelfMap::Analytic { expr, times } = self else {
            return Err(MapError::KindMismatch {
                map: "finite",
                space: "analytic",
            });
        };
        let mut v = x;
        for _ in 0..*times {
            v = expr.eval_f64(&[v]).map_err(|source| MapError::Eval {
                x: format!("{v}"),
                source,
            })?;
        }
        Ok(v)
    }

    pub fn apply_real(&self, x: &Real) -> Result<Real, MapError> {
        let SelfMap::Analytic { expr, times } = self else {
            return Err(MapError::KindMismatch {
                map: "finite",
                space: "analytic",
            });
        };
        let mut v = x.clone();
        for _ in 0..*times {
            v = expr.eval(std::slice::from_ref(&v)).map_err(|source| MapError::Eval {
                x: format_real(&v),
                source,
            })?;
        }
        Ok(v)
    }

    /// Checks that the map fits the space: index range for finite maps,
    /// sampled images inside the domain for analytic ones.
    pub fn validate_on(&self, space: &DistanceSpace, sampler: &SamplerConfig) -> Result<(), MapError> {
        match (self, space) {
            (SelfMap::Finite(img), DistanceSpace::Finite(s)) => SelfMap::finite(img.clone(), s.len()).map(|_| ()),
            (SelfMap::Analytic { .. }, DistanceSpace::Analytic(a)) => {
                for x in sampler.sample_points(a.domain()) {
                    let fx = self.apply_real(&from_f64(x).expect("finite sample"))?;
                    if !a.domain().contains_real(&fx) {
                        return Err(MapError::OutsideDomain {
                            x: format!("{x}"),
                            image: format_real(&fx),
                        });
                    }
                }
                Ok(())
            }
            (m, s) => Err(kind_mismatch(m, s)),
        }
    }
}

pub(crate) fn power_index(img: &[usize], mut i: usize, l: usize) -> usize {
    for _ in 0..l {
        i = img[i];
    }
    i
}

fn kind_mismatch(m: &SelfMap, s: &DistanceSpace) -> MapError {
    MapError::KindMismatch {
        map: m.kind(),
        space: match s {
            DistanceSpace::Finite(_) => "finite",
            DistanceSpace::Analytic(_) => "analytic",
        },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisReport {
    pub holds: bool,
    /// `max (lhs − rhs)` over the checked pairs.
    #[serde(with = "crate::real::serde_real")]
    pub worst_margin: Real,
    /// Pair attaining the worst margin (first one in scan order).
    pub witness: Option<(String, String)>,
    pub coverage: Coverage,
    pub notes: Vec<String>,
}

/// Uniform access to `d` and `f` on the points being checked.
trait Env {
    type P: Clone;
    fn d(&self, a: &Self::P, b: &Self::P) -> Result<Real, MapError>;
    fn f(&self, a: &Self::P) -> Result<Self::P, MapError>;
    fn label(&self, a: &Self::P) -> String;
}

struct FiniteEnv<'a> {
    s: &'a FiniteSpace,
    img: &'a [usize],
}

impl Env for FiniteEnv<'_> {
    type P = usize;
    fn d(&self, a: &usize, b: &usize) -> Result<Real, MapError> {
        Ok(self.s.d(*a, *b).clone())
    }
    fn f(&self, a: &usize) -> Result<usize, MapError> {
        Ok(self.img[*a])
    }
    fn label(&self, a: &usize) -> String {
        self.s.label(*a).to_string()
    }
}

struct AnalyticEnv<'a> {
    s: &'a AnalyticSpace,
    f: &'a SelfMap,
}

impl Env for AnalyticEnv<'_> {
    type P = Real;
    fn d(&self, a: &Real, b: &Real) -> Result<Real, MapError> {
        Ok(self.s.d_real(a, b)?)
    }
    fn f(&self, a: &Real) -> Result<Real, MapError> {
        let v = self.f.apply_real(a)?;
        if !self.s.domain().contains_real(&v) {
            return Err(MapError::OutsideDomain {
                x: format_real(a),
                image: format_real(&v),
            });
        }
        Ok(v)
    }
    fn label(&self, a: &Real) -> String {
        format!("{}", crate::real::to_f64(a))
    }
}

fn scan<E: Env>(
    env: &E,
    pairs: &[(E::P, E::P)],
    margin: impl Fn(&E, &E::P, &E::P) -> Result<Real, MapError>,
) -> Result<(Real, Option<(String, String)>), MapError> {
    let mut worst: Option<(Real, usize)> = None;
    for (k, (x, y)) in pairs.iter().enumerate() {
        let m = margin(env, x, y)?;
        if worst.as_ref().is_none_or(|(w, _)| &m > w) {
            worst = Some((m, k));
        }
    }
    let (m, k) = worst.unwrap_or((Real::zero(), usize::MAX));
    let witness = pairs.get(k).map(|(x, y)| (env.label(x), env.label(y)));
    Ok((m, witness))
}

/// The hypothesis being checked, with its data.
enum Hyp<'a> {
    Banach(&'a Real),
    Nonlinear(&'a PiecewiseFn),
    Extended([&'a PiecewiseFn; 3]),
    Iterated(&'a PiecewiseFn, usize),
}

fn margin<E: Env>(env: &E, x: &E::P, y: &E::P, hyp: &Hyp) -> Result<Real, MapError> {
    match hyp {
        Hyp::Banach(alpha) => {
            let lhs = env.d(&env.f(x)?, &env.f(y)?)?;
            Ok(lhs - *alpha * env.d(x, y)?)
        }
        Hyp::Nonlinear(phi) => {
            let lhs = env.d(&env.f(x)?, &env.f(y)?)?;
            Ok(lhs - phi_at(phi, &env.d(x, y)?))
        }
        Hyp::Extended([p1, p2, p3]) => {
            let (fx, fy) = (env.f(x)?, env.f(y)?);
            let lhs = env.d(&fx, &fy)?;
            let a = phi_at(p1, &env.d(x, y)?);
            let b = phi_at(p2, &env.d(x, &fx)?);
            let c = phi_at(p3, &env.d(y, &fy)?);
            Ok(lhs - max_real(max_real(&a, &b), &c).clone())
        }
        Hyp::Iterated(phi, n) => {
            let (mut u, mut v) = (x.clone(), y.clone());
            let mut inner = env.d(&u, &v)?;
            for _ in 0..*n {
                u = env.f(&u)?;
                v = env.f(&v)?;
                let dv = env.d(&u, &v)?;
                if dv > inner {
                    inner = dv;
                }
            }
            let lhs = env.d(&env.f(&u)?, &env.f(&v)?)?;
            Ok(lhs - phi_at(phi, &inner))
        }
    }
}

fn phi_at(phi: &PiecewiseFn, t: &Real) -> Real {
    phi.eval(t).expect("distances are nonnegative")
}

fn run(space: &DistanceSpace, f: &SelfMap, sampler: &SamplerConfig, hyp: &Hyp, notes: Vec<String>) -> Result<HypothesisReport, MapError> {
    let (worst, witness, coverage) = match (space, f) {
        (DistanceSpace::Finite(s), SelfMap::Finite(img)) => {
            SelfMap::finite(img.clone(), s.len())?;
            let env = FiniteEnv { s, img };
            let n = s.len();
            let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
            let (m, w) = scan(&env, &pairs, |e, x, y| margin(e, x, y, hyp))?;
            (m, w, Coverage::Exhaustive)
        }
        (DistanceSpace::Analytic(a), SelfMap::Analytic { .. }) => {
            let env = AnalyticEnv { s: a, f };
            let pairs: Vec<(Real, Real)> = sampler
                .sample_pairs(a.domain())
                .into_iter()
                .map(|(x, y)| (from_f64(x).expect("finite"), from_f64(y).expect("finite")))
                .collect();
            let count = pairs.len();
            let (m, w) = scan(&env, &pairs, |e, x, y| margin(e, x, y, hyp))?;
            (
                m,
                w,
                Coverage::Sampled {
                    seed: sampler.seed,
                    count,
                },
            )
        }
        (s, m) => return Err(kind_mismatch(m, s)),
    };
    Ok(HypothesisReport {
        holds: !worst.is_positive(),
        worst_margin: worst,
        witness,
        coverage,
        notes,
    })
}

fn require_phi(name: &str, phi: &PiecewiseFn, allow_non_phi: bool, notes: &mut Vec<String>) -> Result<(), MapError> {
    let rep = check_phi_membership(phi);
    if rep.verdict {
        return Ok(());
    }
    let reason = if !rep.is_comparison {
        "not a comparison function"
    } else if !rep.left_limsup_ok {
        "left limit reaches r"
    } else if !rep.right_limsup_ok {
        "right limit exceeds r"
    } else {
        "no plateau where the right limit equals s"
    };
    if allow_non_phi {
        notes.push(format!("`{name}` is not in Φ ({reason}); checked anyway"));
        Ok(())
    } else {
        Err(MapError::NotPhi {
            name: name.to_string(),
            reason: reason.to_string(),
        })
    }
}

pub fn check_banach(space: &DistanceSpace, f: &SelfMap, alpha: &Real, sampler: &SamplerConfig) -> Result<HypothesisReport, MapError> {
    if alpha.is_negative() || alpha >= &int(1) {
        return Err(MapError::Alpha(format_real(alpha)));
    }
    run(space, f, sampler, &Hyp::Banach(alpha), Vec::new())
}

/// `allow_non_phi` turns the Φ-membership precondition into a note.
pub fn check_nonlinear_contraction(
    space: &DistanceSpace,
    f: &SelfMap,
    phi: &PiecewiseFn,
    allow_non_phi: bool,
    sampler: &SamplerConfig,
) -> Result<HypothesisReport, MapError> {
    let mut notes = Vec::new();
    require_phi("phi", phi, allow_non_phi, &mut notes)?;
    run(space, f, sampler, &Hyp::Nonlinear(phi), notes)
}

pub fn check_extended_contraction(
    space: &DistanceSpace,
    f: &SelfMap,
    phis: [&PiecewiseFn; 3],
    allow_non_phi: bool,
    sampler: &SamplerConfig,
) -> Result<HypothesisReport, MapError> {
    let mut notes = Vec::new();
    for (i, p) in phis.iter().enumerate() {
        require_phi(&format!("phi{}", i + 1), p, allow_non_phi, &mut notes)?;
    }
    run(space, f, sampler, &Hyp::Extended(phis), notes)
}

pub fn check_iterated_contraction(
    space: &DistanceSpace,
    f: &SelfMap,
    phi: &PiecewiseFn,
    n: usize,
    allow_non_phi: bool,
    sampler: &SamplerConfig,
) -> Result<HypothesisReport, MapError> {
    let mut notes = Vec::new();
    require_phi("phi", phi, allow_non_phi, &mut notes)?;
    run(space, f, sampler, &Hyp::Iterated(phi, n), notes)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContinuityReport {
    pub holds: bool,
    /// `(a, x)` with `d(a, x) = 0` but `d(f(a), f(x)) > 0`.
    pub witness: Option<(usize, usize)>,
}

/// Sequential d-continuity on a finite space: `d(a, x) = 0` must force
/// `d(f(a), f(x)) = 0`, since a sequence d-converging to `x` is eventually
/// within the zero set of `x` and has a constant subsequence.
pub fn check_d_continuity(space: &FiniteSpace, img: &[usize]) -> ContinuityReport {
    let n = space.len();
    for a in 0..n {
        for x in 0..n {
            if space.d(a, x).is_zero() && !space.d(img[a], img[x]).is_zero() {
                return ContinuityReport {
                    holds: false,
                    witness: Some((a, x)),
                };
            }
        }
    }
    ContinuityReport {
        holds: true,
        witness: None,
    }
}
