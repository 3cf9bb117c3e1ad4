//! Picard iteration with convergence certificates, brute-force fixed-point
//! oracles, and the reduction from `f^l` back to `f`.
//!
//! Finite orbits stop on an exact fixed point (or a revisited point);
//! analytic orbits stop when a windowed left-Cauchy test passes and the
//! fixed-point residual `d(x, f(x))` is below tolerance. The solver first
//! checks the hypotheses of the selected mode and refuses to iterate when
//! they fail, unless forced.

use std::collections::HashSet;
use std::fmt::Write as _;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::comparison::{max_combine, monotone_envelope, PiecewiseFn};
use crate::maps::{
    check_banach, check_d_continuity, check_extended_contraction, check_iterated_contraction,
    check_nonlinear_contraction, HypothesisReport, MapError, SelfMap,
};
use crate::real::{from_f64, to_f64, Real, FLOAT_TOL};
use crate::spaces::{classify_finite, DistanceSpace, FiniteSpace, Point, SamplerConfig, SpaceError, Taxonomy};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("start point {0} does not belong to the space")]
    BadStart(String),
    #[error("{0} must be positive")]
    BadOption(&'static str),
    #[error("limit {limit} disagrees with the brute-force fixed points {oracle:?}")]
    OracleMismatch { limit: String, oracle: Vec<String> },
    #[error("hypotheses verified but the orbit from {start} stopped with {reason:?}")]
    CertifiedOrbitFailed { start: String, reason: StopReason },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrbitOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub window: usize,
}

impl Default for OrbitOptions {
    fn default() -> Self {
        OrbitOptions {
            tol: 1e-9,
            max_iter: 100_000,
            window: 8,
        }
    }
}

impl OrbitOptions {
    fn validate(&self) -> Result<(), SolveError> {
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(SolveError::BadOption("tol"));
        }
        if self.window == 0 {
            return Err(SolveError::BadOption("window"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Tolerance,
    MaxIter,
    ExactFixedPoint,
    /// A finite orbit revisited a point that is not an exact fixed point.
    Cycle,
    /// The analytic orbit overflowed or left the formula's domain.
    NonFinite,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitReport {
    pub orbit: Vec<Point>,
    /// `aₙ = d(xₙ₋₁, xₙ)` for `n = 1..`.
    pub forward_gaps: Vec<f64>,
    /// `cₙ = d(xₙ, xₙ₋₁)`.
    pub backward_gaps: Vec<f64>,
    pub converged: bool,
    pub limit: Option<Point>,
    pub iterations: usize,
    pub stop_reason: StopReason,
    /// `d(limit, f(limit))` and `d(f(limit), limit)` at the last iterate.
    pub forward_residual: Option<f64>,
    pub backward_residual: Option<f64>,
}

impl OrbitReport {
    /// `n, a_n, c_n` rows.
    pub fn gaps_csv(&self) -> String {
        let mut out = String::from("n,a_n,c_n\n");
        for (k, (a, c)) in self.forward_gaps.iter().zip(&self.backward_gaps).enumerate() {
            let _ = writeln!(out, "{},{:e},{:e}", k + 1, a, c);
        }
        out
    }

    pub fn finite_orbit(&self) -> Vec<usize> {
        self.orbit
            .iter()
            .filter_map(|p| match p {
                Point::Index(i) => Some(*i),
                Point::Real(_) => None,
            })
            .collect()
    }
}

fn finite_orbit(s: &FiniteSpace, img: &[usize], x0: usize, opts: &OrbitOptions) -> OrbitReport {
    let mut orbit = vec![x0];
    let mut seen = HashSet::from([x0]);
    let (mut fwd, mut bwd) = (Vec::new(), Vec::new());
    let mut x = x0;
    let stop = loop {
        if img[x] == x {
            break if s.d(x, x).is_zero() {
                StopReason::ExactFixedPoint
            } else {
                StopReason::Cycle
            };
        }
        if orbit.len() > opts.max_iter {
            break StopReason::MaxIter;
        }
        let next = img[x];
        fwd.push(to_f64(s.d(x, next)));
        bwd.push(to_f64(s.d(next, x)));
        orbit.push(next);
        x = next;
        if !seen.insert(next) {
            break StopReason::Cycle;
        }
    };
    let converged = stop == StopReason::ExactFixedPoint;
    OrbitReport {
        iterations: orbit.len() - 1,
        orbit: orbit.into_iter().map(Point::Index).collect(),
        forward_gaps: fwd,
        backward_gaps: bwd,
        converged,
        limit: converged.then_some(Point::Index(x)),
        stop_reason: stop,
        forward_residual: Some(to_f64(s.d(x, img[x]))),
        backward_residual: Some(to_f64(s.d(img[x], x))),
    }
}

fn analytic_orbit(
    space: &crate::spaces::AnalyticSpace,
    f: &SelfMap,
    x0: f64,
    opts: &OrbitOptions,
) -> Result<OrbitReport, SolveError> {
    let d = |a: f64, b: f64| space.d_f64(a, b).ok();
    let mut xs = vec![x0];
    let (mut fwd, mut bwd) = (Vec::new(), Vec::new());
    let mut residuals = (None, None);
    let mut stop = StopReason::MaxIter;
    for n in 1..=opts.max_iter {
        let prev = xs[n - 1];
        let next = match f.apply_f64(prev) {
            Ok(v) if space.domain().contains(v) => v,
            Ok(v) => {
                return Err(SolveError::Map(MapError::OutsideDomain {
                    x: format!("{prev}"),
                    image: format!("{v}"),
                }))
            }
            Err(MapError::Eval { .. }) => {
                stop = StopReason::NonFinite;
                break;
            }
            Err(e) => return Err(e.into()),
        };
        let (Some(a), Some(c)) = (d(prev, next), d(next, prev)) else {
            stop = StopReason::NonFinite;
            break;
        };
        xs.push(next);
        fwd.push(a);
        bwd.push(c);
        if next == prev && a == 0.0 && c == 0.0 {
            residuals = (Some(0.0), Some(0.0));
            stop = StopReason::ExactFixedPoint;
            break;
        }
        if n < opts.window || fwd[n - opts.window..].iter().any(|&g| g > opts.tol) {
            continue;
        }
        let tail = &xs[n - opts.window..];
        let cauchy = tail
            .iter()
            .enumerate()
            .all(|(i, &a)| tail[i + 1..].iter().all(|&b| d(a, b).is_some_and(|v| v <= opts.tol)));
        if !cauchy {
            continue;
        }
        let Ok(fx) = f.apply_f64(next) else { continue };
        let (rf, rb) = (d(next, fx), d(fx, next));
        if rf.is_some_and(|v| v <= opts.tol) {
            residuals = (rf, rb);
            stop = StopReason::Tolerance;
            break;
        }
    }
    let last = *xs.last().expect("nonempty");
    if residuals.0.is_none() {
        if let Ok(fx) = f.apply_f64(last) {
            residuals = (d(last, fx), d(fx, last));
        }
    }
    let converged = matches!(stop, StopReason::Tolerance | StopReason::ExactFixedPoint);
    Ok(OrbitReport {
        iterations: xs.len() - 1,
        orbit: xs.into_iter().map(Point::Real).collect(),
        forward_gaps: fwd,
        backward_gaps: bwd,
        converged,
        limit: converged.then_some(Point::Real(last)),
        stop_reason: stop,
        forward_residual: residuals.0,
        backward_residual: residuals.1,
    })
}

/// Picard iterates of `f` from `x0`.
pub fn picard_orbit(space: &DistanceSpace, f: &SelfMap, x0: &Point, opts: &OrbitOptions) -> Result<OrbitReport, SolveError> {
    opts.validate()?;
    match (space, f, x0) {
        (DistanceSpace::Finite(s), SelfMap::Finite(img), Point::Index(i)) => {
            SelfMap::finite(img.clone(), s.len())?;
            if *i >= s.len() {
                return Err(SolveError::BadStart(i.to_string()));
            }
            Ok(finite_orbit(s, img, *i, opts))
        }
        (DistanceSpace::Analytic(a), SelfMap::Analytic { .. }, Point::Real(x)) => {
            if !a.domain().contains(*x) {
                return Err(SolveError::BadStart(format!("{x}")));
            }
            analytic_orbit(a, f, *x, opts)
        }
        (DistanceSpace::Finite(_), SelfMap::Finite(_), p) | (DistanceSpace::Analytic(_), SelfMap::Analytic { .. }, p) => {
            Err(SolveError::BadStart(format!("{p:?}")))
        }
        (s, m, _) => {
            let space = if s.as_finite().is_some() { "finite" } else { "analytic" };
            Err(MapError::KindMismatch { map: m.kind(), space }.into())
        }
    }
}

/// `{x : f(x) = x}` in index order.
pub fn brute_force_fixed_points(space: &FiniteSpace, img: &[usize]) -> Vec<usize> {
    (0..space.len()).filter(|&i| img[i] == i).collect()
}

/// Which contraction hypothesis to verify and iterate under.
#[derive(Debug, Clone, PartialEq)]
pub enum Mode {
    Banach { alpha: Real },
    Nonlinear { phi: PiecewiseFn },
    Extended { phis: [PiecewiseFn; 3] },
    Iterated { phi: PiecewiseFn, n: usize },
    /// Extended contraction on a quasi-metric space.
    Quasi { psis: [PiecewiseFn; 3] },
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Banach { .. } => "banach",
            Mode::Nonlinear { .. } => "nonlinear",
            Mode::Extended { .. } => "extended",
            Mode::Iterated { .. } => "iterated",
            Mode::Quasi { .. } => "quasi",
        }
    }

    /// The single comparison function bounding successive gaps.
    pub fn governing(&self) -> PiecewiseFn {
        match self {
            Mode::Banach { alpha } => PiecewiseFn::linear(alpha.clone()),
            Mode::Nonlinear { phi } | Mode::Iterated { phi, .. } => phi.clone(),
            Mode::Extended { phis: fs } | Mode::Quasi { psis: fs } => max_combine(fs).expect("three functions"),
        }
    }

    /// Whether `aₙ₊₁ ≤ φ̂(aₙ)` follows from the hypothesis step by step.
    /// The iterated condition only controls every `(n+1)`-th step.
    pub fn bounds_each_gap(&self) -> bool {
        !matches!(self, Mode::Iterated { n, .. } if *n > 0)
    }

    fn check(&self, space: &DistanceSpace, f: &SelfMap, opts: &SolveOptions) -> Result<HypothesisReport, MapError> {
        let (s, allow) = (&opts.sampler, opts.allow_non_phi);
        match self {
            Mode::Banach { alpha } => check_banach(space, f, alpha, s),
            Mode::Nonlinear { phi } => check_nonlinear_contraction(space, f, phi, allow, s),
            Mode::Extended { phis: [a, b, c] } | Mode::Quasi { psis: [a, b, c] } => {
                check_extended_contraction(space, f, [a, b, c], allow, s)
            }
            Mode::Iterated { phi, n } => check_iterated_contraction(space, f, phi, *n, allow, s),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub orbit: OrbitOptions,
    /// Iterate even when a premise fails; the result is then uncertified.
    pub force: bool,
    /// Accept comparison functions outside Φ (noted in the report).
    pub allow_non_phi: bool,
    /// Second start for the two-start agreement test on analytic spaces;
    /// drawn from the sampler's seed when absent.
    pub alt_start: Option<f64>,
    /// Two limits agree when `max(d(l₁,l₂), d(l₂,l₁))` is at most this.
    pub agreement_tol: f64,
    pub sampler: SamplerConfig,
}

impl SolveOptions {
    pub fn new(seed: u64) -> Self {
        SolveOptions {
            orbit: OrbitOptions::default(),
            force: false,
            allow_non_phi: false,
            alt_start: None,
            agreement_tol: 1e-6,
            sampler: SamplerConfig::new(seed),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Uniqueness {
    VerifiedByOracle,
    VerifiedByContractionArgument,
    Unverified,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Premise {
    pub name: &'static str,
    pub holds: bool,
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Converged,
    HypothesisFailed,
    Diverged,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedPointResult {
    pub mode: &'static str,
    pub hypothesis: HypothesisReport,
    pub premises: Vec<Premise>,
    /// All premises held; otherwise the run (if any) was forced.
    pub certified: bool,
    pub outcome: Outcome,
    pub orbit: Option<OrbitReport>,
    /// Orbit from the second start (analytic spaces).
    pub second_orbit: Option<OrbitReport>,
    pub fixed_point: Option<Point>,
    pub oracle: Option<Vec<usize>>,
    pub uniqueness: Uniqueness,
}

fn premises(space: &DistanceSpace, f: &SelfMap, mode: &Mode, hyp: &HypothesisReport) -> Vec<Premise> {
    let mut out = vec![Premise {
        name: "hypothesis",
        holds: hyp.holds,
        detail: hyp.witness.as_ref().filter(|_| !hyp.holds).map(|(x, y)| format!("worst pair ({x}, {y})")),
    }];
    let needs_continuity = matches!(mode, Mode::Extended { .. } | Mode::Quasi { .. } | Mode::Iterated { .. });
    match (space, f) {
        (DistanceSpace::Finite(s), SelfMap::Finite(img)) => {
            let w3 = s.check_w3();
            out.push(Premise {
                name: "w3",
                holds: w3.holds,
                detail: w3.witness.map(|[a, y, z]| {
                    format!("d({0},{1}) = d({0},{2}) = 0", s.label(a), s.label(y), s.label(z))
                }),
            });
            if needs_continuity {
                let c = check_d_continuity(s, img);
                out.push(Premise {
                    name: "d_continuity",
                    holds: c.holds,
                    detail: c.witness.map(|(a, x)| format!("d({}, {}) = 0 but images apart", s.label(a), s.label(x))),
                });
            }
            if matches!(mode, Mode::Quasi { .. }) {
                let t = classify_finite(s).taxonomy;
                out.push(Premise {
                    name: "quasi_metric",
                    holds: matches!(t, Taxonomy::QuasiMetric | Taxonomy::Metric),
                    detail: Some(t.name().to_string()),
                });
            }
        }
        (DistanceSpace::Analytic(a), _) => {
            out.push(Premise {
                name: "complete",
                holds: a.complete(),
                detail: Some("asserted by the instance".into()),
            });
        }
        _ => {}
    }
    out
}

fn alt_start(space: &crate::spaces::AnalyticSpace, x0: f64, opts: &SolveOptions) -> f64 {
    if let Some(x) = opts.alt_start {
        return x;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.sampler.seed);
    rng.set_stream(3);
    let (lo, hi) = match space.domain() {
        crate::spaces::Domain::Line => (-opts.sampler.radius, opts.sampler.radius),
        crate::spaces::Domain::Interval { a, b } => (to_f64(a), to_f64(b)),
    };
    for _ in 0..64 {
        let x = if hi > lo { rng.gen_range(lo..=hi) } else { lo };
        if x != x0 && space.domain().contains(x) {
            return x;
        }
    }
    x0
}

/// Verifies the mode's hypotheses, iterates from `x0`, and cross-checks
/// the limit against the brute-force oracle (finite) or a second start
/// (analytic).
pub fn solve_fixed_point(
    space: &DistanceSpace,
    f: &SelfMap,
    mode: &Mode,
    x0: &Point,
    opts: &SolveOptions,
) -> Result<FixedPointResult, SolveError> {
    opts.orbit.validate()?;
    let hypothesis = mode.check(space, f, opts)?;
    let premises = premises(space, f, mode, &hypothesis);
    let certified = premises.iter().all(|p| p.holds);
    let mut result = FixedPointResult {
        mode: mode.name(),
        hypothesis,
        premises,
        certified,
        outcome: Outcome::HypothesisFailed,
        orbit: None,
        second_orbit: None,
        fixed_point: None,
        oracle: None,
        uniqueness: Uniqueness::Unverified,
    };
    if let (DistanceSpace::Finite(s), SelfMap::Finite(img)) = (space, f) {
        result.oracle = Some(brute_force_fixed_points(s, img));
    }
    if !certified && !opts.force {
        return Ok(result);
    }
    let orbit = picard_orbit(space, f, x0, &opts.orbit)?;
    result.outcome = if orbit.converged {
        Outcome::Converged
    } else {
        Outcome::Diverged
    };
    result.fixed_point = orbit.limit;

    match (space, &result.oracle) {
        (DistanceSpace::Finite(s), Some(oracle)) => {
            if certified {
                let Some(Point::Index(l)) = orbit.limit else {
                    return Err(SolveError::CertifiedOrbitFailed {
                        start: space.point_label(x0),
                        reason: orbit.stop_reason,
                    });
                };
                if oracle != &[l] {
                    return Err(SolveError::OracleMismatch {
                        limit: s.label(l).to_string(),
                        oracle: oracle.iter().map(|&i| s.label(i).to_string()).collect(),
                    });
                }
            }
            if let Some(Point::Index(l)) = orbit.limit {
                if oracle == &[l] {
                    result.uniqueness = Uniqueness::VerifiedByOracle;
                }
            }
        }
        (DistanceSpace::Analytic(a), _) => {
            if let (Some(Point::Real(l1)), true) = (orbit.limit, certified) {
                let y0 = alt_start(a, match x0 {
                    Point::Real(x) => *x,
                    Point::Index(_) => 0.0,
                }, opts);
                let second = picard_orbit(space, f, &Point::Real(y0), &opts.orbit)?;
                if let Some(Point::Real(l2)) = second.limit {
                    let gap = a.d_f64(l1, l2)?.max(a.d_f64(l2, l1)?);
                    if gap <= opts.agreement_tol {
                        result.uniqueness = Uniqueness::VerifiedByContractionArgument;
                    }
                }
                result.second_orbit = Some(second);
            }
        }
        _ => {}
    }
    result.orbit = Some(orbit);
    Ok(result)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Lift {
    Lifted {
        fixed_point: Point,
        forward_residual: f64,
        backward_residual: f64,
        /// Orbit of `f` itself from the same start.
        f_orbit: OrbitReport,
        /// Finite spaces: every `l`-th term of the `f`-orbit matches the
        /// `f^l`-orbit.
        subsample_consistent: Option<bool>,
    },
    LiftFailure {
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerReport {
    pub l: usize,
    /// Fixed points of `f^l` by brute force (finite spaces).
    pub power_oracle: Option<Vec<usize>>,
    pub power_result: Option<FixedPointResult>,
    pub lift: Lift,
}

impl PowerReport {
    pub fn lifted_point(&self) -> Option<Point> {
        match &self.lift {
            Lift::Lifted { fixed_point, .. } => Some(*fixed_point),
            Lift::LiftFailure { .. } => None,
        }
    }
}

/// Solves for `f^l`, then shows the fixed point `u` is fixed by `f` and
/// that the orbit of `f` itself converges to `u`. If `f^l` has several
/// fixed points the uniqueness premise is gone and nothing is lifted.
pub fn power_map_reduction(
    space: &DistanceSpace,
    f: &SelfMap,
    l: usize,
    mode: &Mode,
    x0: &Point,
    opts: &SolveOptions,
) -> Result<PowerReport, SolveError> {
    let fl = f.compose_power(l)?;
    let failure = |reason: String, oracle, result| PowerReport {
        l,
        power_oracle: oracle,
        power_result: result,
        lift: Lift::LiftFailure { reason },
    };
    let power_oracle = match (space, &fl) {
        (DistanceSpace::Finite(s), SelfMap::Finite(img)) => {
            let o = brute_force_fixed_points(s, img);
            if o.len() != 1 {
                return Ok(failure(format!("f^{l} has {} fixed points", o.len()), Some(o), None));
            }
            Some(o)
        }
        _ => None,
    };
    let res = solve_fixed_point(space, &fl, mode, x0, opts)?;
    let Some(u) = res.fixed_point.filter(|_| res.certified) else {
        let why = if res.certified {
            format!("the orbit of f^{l} did not converge")
        } else {
            format!("the {} hypothesis fails for f^{l}", mode.name())
        };
        return Ok(failure(why, power_oracle, Some(res)));
    };

    let (rf, rb, fixed) = match (space, f, u) {
        (DistanceSpace::Finite(s), SelfMap::Finite(img), Point::Index(i)) => {
            (to_f64(s.d(i, img[i])), to_f64(s.d(img[i], i)), img[i] == i)
        }
        (DistanceSpace::Analytic(a), _, Point::Real(x)) => {
            let fx = f.apply_f64(x)?;
            let (rf, rb) = (a.d_f64(x, fx)?, a.d_f64(fx, x)?);
            (rf, rb, rf <= opts.orbit.tol && rb <= opts.orbit.tol)
        }
        _ => unreachable!("kinds checked by the solver"),
    };
    if !fixed {
        return Ok(failure(
            format!("u = {} is not fixed by f (residuals {rf:e}, {rb:e})", space.point_label(&u)),
            power_oracle,
            Some(res),
        ));
    }

    let f_orbit = picard_orbit(space, f, x0, &opts.orbit)?;
    let reaches = match (space, f_orbit.limit, u) {
        (DistanceSpace::Finite(_), Some(Point::Index(a)), Point::Index(b)) => a == b,
        (DistanceSpace::Analytic(a), Some(Point::Real(p)), Point::Real(q)) => {
            a.d_f64(p, q)?.max(a.d_f64(q, p)?) <= opts.agreement_tol
        }
        _ => false,
    };
    if !reaches {
        return Ok(failure(
            format!("the orbit of f stopped with {:?} away from u", f_orbit.stop_reason),
            power_oracle,
            Some(res),
        ));
    }
    let subsample_consistent = match (f, &res.orbit) {
        (SelfMap::Finite(img), Some(po)) => {
            let full = f_orbit.finite_orbit();
            let pw = po.finite_orbit();
            // extend f's orbit far enough to cover every sampled term
            let mut ext = full.clone();
            while ext.len() < (pw.len() - 1) * l + 1 {
                let last = *ext.last().expect("nonempty");
                ext.push(img[last]);
            }
            Some(pw.iter().enumerate().all(|(k, &p)| ext[k * l] == p))
        }
        _ => None,
    };
    Ok(PowerReport {
        l,
        power_oracle,
        power_result: Some(res),
        lift: Lift::Lifted {
            fixed_point: u,
            forward_residual: rf,
            backward_residual: rb,
            f_orbit,
            subsample_consistent,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapViolation {
    pub n: usize,
    pub gap: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapDecayReport {
    pub envelope: PiecewiseFn,
    pub checked: usize,
    pub holds: bool,
    pub violations: Vec<GapViolation>,
}

/// Checks `aₙ ≤ φ̂ⁿ⁻¹(a₁) + 10⁻¹²` along an orbit, where `φ̂` is the
/// monotone envelope of `governing`. Finite spaces use exact distances and
/// exact iterates of `φ̂`; analytic spaces iterate `φ̂` with upward
/// rounding so the bound is never understated.
pub fn gap_decay(space: &DistanceSpace, orbit: &OrbitReport, governing: &PiecewiseFn) -> GapDecayReport {
    let env = monotone_envelope(governing);
    let mut violations = Vec::new();
    let checked = orbit.forward_gaps.len();
    match space {
        DistanceSpace::Finite(s) => {
            let pts = orbit.finite_orbit();
            let tol = from_f64(FLOAT_TOL).expect("finite");
            let mut bound: Option<Real> = None;
            for n in 1..pts.len() {
                let a = s.d(pts[n - 1], pts[n]).clone();
                let b = match bound.take() {
                    None => a.clone(),
                    Some(prev) => env.eval(&prev).expect("nonnegative"),
                };
                if a > &b + &tol {
                    violations.push(GapViolation {
                        n,
                        gap: to_f64(&a),
                        bound: to_f64(&b),
                    });
                }
                bound = Some(b);
            }
        }
        DistanceSpace::Analytic(_) => {
            let mut bound = f64::NAN;
            for (k, &a) in orbit.forward_gaps.iter().enumerate() {
                bound = if k == 0 { a } else { env.eval_f64_upper(bound) };
                if a > bound + FLOAT_TOL {
                    violations.push(GapViolation { n: k + 1, gap: a, bound });
                }
            }
        }
    }
    GapDecayReport {
        envelope: env,
        checked,
        holds: violations.is_empty(),
        violations,
    }
}
