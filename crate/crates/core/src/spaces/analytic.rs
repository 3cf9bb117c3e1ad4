use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::finite::left_cauchy;
use super::{check_radius, CauchyReport, FiniteSpace, SpaceError};
use crate::expr::{EvalError, Expr};
use crate::real::{format_real, from_f64, to_f64, Real};

#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    Interval { a: Real, b: Real },
    Line,
}

impl Domain {
    pub fn interval(a: Real, b: Real) -> Result<Self, SpaceError> {
        if a > b {
            return Err(SpaceError::EmptyDomain {
                a: format_real(&a),
                b: format_real(&b),
            });
        }
        Ok(Domain::Interval { a, b })
    }

    pub fn contains(&self, x: f64) -> bool {
        match self {
            Domain::Line => x.is_finite(),
            Domain::Interval { a, b } => from_f64(x).is_some_and(|v| a <= &v && &v <= b),
        }
    }

    pub fn contains_real(&self, x: &Real) -> bool {
        match self {
            Domain::Line => true,
            Domain::Interval { a, b } => a <= x && x <= b,
        }
    }

    /// Sampling window `[lo, hi]` as doubles.
    fn window(&self, radius: f64) -> (f64, f64) {
        match self {
            Domain::Line => (-radius, radius),
            Domain::Interval { a, b } => (to_f64(a), to_f64(b)),
        }
    }

    /// Landmark points tried before any grid or random point, so that small
    /// witnesses such as `(0, 1)` are found first.
    fn anchors(&self) -> Vec<f64> {
        match self {
            Domain::Line => vec![0.0, 1.0, -1.0, 0.5, 2.0, -2.0, -0.5, 10.0, -10.0],
            Domain::Interval { a, b } => {
                let (a, b) = (to_f64(a), to_f64(b));
                let mut v = vec![a, b, 0.5 * (a + b), a + 0.25 * (b - a), a + 0.75 * (b - a)];
                v.extend([0.0, 1.0, -1.0, 0.5].into_iter().filter(|x| self.contains(*x)));
                v
            }
        }
    }
}

impl Serialize for Domain {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(None)?;
        match self {
            Domain::Line => m.serialize_entry("kind", "line")?,
            Domain::Interval { a, b } => {
                m.serialize_entry("kind", "interval")?;
                m.serialize_entry("a", &format_real(a))?;
                m.serialize_entry("b", &format_real(b))?;
            }
        }
        m.end()
    }
}

/// Deterministic sampling of analytic spaces. The seed is part of every
/// report derived from it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplerConfig {
    pub seed: u64,
    /// Size of the point sample used for axiom and JMS checks (all pairs
    /// and triples of it are examined).
    pub points: usize,
    /// Number of `(x, y)` pairs for hypothesis checks: a regular grid plus
    /// seeded uniform pairs.
    pub pairs: usize,
    /// Half-width of the sampling window on the real line.
    pub radius: f64,
}

impl SamplerConfig {
    pub fn new(seed: u64) -> Self {
        SamplerConfig {
            seed,
            points: 24,
            pairs: 10_000,
            radius: 100.0,
        }
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }

    /// Anchors, then an even grid, then seeded uniform points; distinct.
    pub fn sample_points(&self, domain: &Domain) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::with_capacity(self.points);
        let push = |x: f64, out: &mut Vec<f64>| {
            if out.len() < self.points && domain.contains(x) && !out.contains(&x) {
                out.push(x);
            }
        };
        for x in domain.anchors() {
            push(x, &mut out);
        }
        let (lo, hi) = domain.window(self.radius);
        let grid = self.points / 2;
        for k in 0..grid {
            push(lo + (hi - lo) * (k as f64 + 0.5) / grid as f64, &mut out);
        }
        let mut rng = self.rng(1);
        let mut attempts = 0;
        while out.len() < self.points && attempts < 16 * self.points && hi > lo {
            push(rng.gen_range(lo..=hi), &mut out);
            attempts += 1;
        }
        out
    }

    /// Grid pairs (a quarter of the budget) followed by seeded random pairs.
    pub fn sample_pairs(&self, domain: &Domain) -> Vec<(f64, f64)> {
        let (lo, hi) = domain.window(self.radius);
        let side = ((self.pairs / 4) as f64).sqrt() as usize;
        let grid: Vec<f64> = if side <= 1 {
            vec![lo]
        } else {
            (0..side).map(|k| lo + (hi - lo) * k as f64 / (side - 1) as f64).collect()
        };
        let mut out = Vec::with_capacity(self.pairs);
        for &x in &grid {
            for &y in &grid {
                if out.len() < self.pairs {
                    out.push((x, y));
                }
            }
        }
        let mut rng = self.rng(2);
        while out.len() < self.pairs {
            let (x, y) = if hi > lo {
                (rng.gen_range(lo..=hi), rng.gen_range(lo..=hi))
            } else {
                (lo, lo)
            };
            out.push((x, y));
        }
        out.retain(|&(x, y)| domain.contains(x) && domain.contains(y));
        out
    }
}

/// A distance formula `d(x, y)` over an interval or the real line.
#[derive(Debug, Clone)]
pub struct AnalyticSpace {
    domain: Domain,
    dexpr: Expr,
    /// Caller's assertion that left Cauchy sequences converge; not checked.
    complete: bool,
}

impl AnalyticSpace {
    /// Rejects formulas that are negative or undefined on the sample.
    pub fn new(domain: Domain, dexpr: Expr, complete: bool, sampler: &SamplerConfig) -> Result<Self, SpaceError> {
        let space = AnalyticSpace {
            domain,
            dexpr,
            complete,
        };
        let pts = sampler.sample_points(&space.domain);
        for &x in &pts {
            for &y in &pts {
                let v = space.d_exact(x, y)?;
                if v.is_negative() {
                    return Err(SpaceError::NegativeDistance {
                        from: format!("{x}"),
                        to: format!("{y}"),
                        value: format_real(&v),
                    });
                }
            }
        }
        Ok(space)
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn dexpr(&self) -> &Expr {
        &self.dexpr
    }

    pub fn complete(&self) -> bool {
        self.complete
    }

    fn eval_err(x: f64, y: f64, source: EvalError) -> SpaceError {
        SpaceError::Eval {
            x: format!("{x}"),
            y: format!("{y}"),
            source,
        }
    }

    /// Exact value of the formula at two doubles.
    pub fn d_exact(&self, x: f64, y: f64) -> Result<Real, SpaceError> {
        self.dexpr.eval_exact_at(&[x, y]).map_err(|e| Self::eval_err(x, y, e))
    }

    /// Exact value at rational arguments.
    pub fn d_real(&self, x: &Real, y: &Real) -> Result<Real, SpaceError> {
        self.dexpr.eval(&[x.clone(), y.clone()]).map_err(|e| SpaceError::Eval {
            x: format_real(x),
            y: format_real(y),
            source: e,
        })
    }

    pub fn d_f64(&self, x: f64, y: f64) -> Result<f64, SpaceError> {
        self.dexpr.eval_f64(&[x, y]).map_err(|e| Self::eval_err(x, y, e))
    }

    /// Membership of `y` in `B(x, r)`, decided exactly.
    pub fn in_ball(&self, x: f64, r: &Real, y: f64) -> Result<bool, SpaceError> {
        check_radius(r)?;
        Ok(&self.d_exact(y, x)? < r)
    }

    /// The matrix of the formula on the given points, labelled by their
    /// shortest decimal form.
    pub fn restrict(&self, points: &[f64]) -> Result<FiniteSpace, SpaceError> {
        let mut d = Vec::with_capacity(points.len());
        for &x in points {
            let row = points.iter().map(|&y| self.d_exact(x, y)).collect::<Result<Vec<_>, _>>()?;
            d.push(row);
        }
        FiniteSpace::new(points.iter().map(|x| format!("{x}")).collect(), d)
    }

    pub fn check_left_cauchy(&self, trace: &[f64], tol: f64) -> Result<CauchyReport, SpaceError> {
        let dist = |n: usize, m: usize| self.d_f64(trace[n], trace[m]).unwrap_or(f64::INFINITY);
        left_cauchy(trace.len(), dist, &tol)
    }
}
