//! Acceptance runner plus the independent oracles and instance generators
//! the acceptance criteria are checked against.
//!
//! Oracles here deliberately avoid the library's own checkers: fixed
//! points come from walking the functional graph, the bounded-ball
//! condition from a direct triple scan, gap bounds from exact envelope
//! iterates.

use std::fmt;
use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use dcs_core::comparison::PiecewiseFn;
use dcs_core::real::{int, ratio, Real};
use dcs_core::spaces::FiniteSpace;
use num_traits::Zero;
use rand::Rng;

/// Counts checks and keeps the first few failures for the report.
#[derive(Debug, Default)]
pub struct Tally {
    pub checked: usize,
    pub failed: usize,
    pub examples: Vec<String>,
}

impl Tally {
    pub fn record(&mut self, ok: bool, why: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failed += 1;
            if self.examples.len() < 3 {
                self.examples.push(why());
            }
        }
    }

    pub fn clean(&self) -> bool {
        self.failed == 0
    }

    pub fn summary(&self, what: &str) -> String {
        let mut s = format!("{} {what}, {} violations", self.checked, self.failed);
        for e in &self.examples {
            s.push_str("\n      e.g. ");
            s.push_str(e);
        }
        s
    }
}

pub struct Verdict {
    pub pass: bool,
    pub detail: String,
}

impl Verdict {
    pub fn new(pass: bool, detail: impl Into<String>) -> Self {
        Verdict {
            pass,
            detail: detail.into(),
        }
    }
}

pub struct Outcome {
    pub id: u8,
    pub title: &'static str,
    pub pass: bool,
    pub elapsed: Duration,
    pub detail: String,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = if self.pass { "PASS" } else { "FAIL" };
        write!(
            f,
            "criterion {} {mark} [{:.2} s] {}: {}",
            self.id,
            self.elapsed.as_secs_f64(),
            self.title,
            self.detail
        )
    }
}

/// Runs one criterion; a panic counts as a failure and an overrun budget
/// fails an otherwise clean run.
pub fn run_criterion(id: u8, title: &'static str, budget: Option<Duration>, body: impl FnOnce() -> Verdict) -> Outcome {
    let start = Instant::now();
    let result = panic::catch_unwind(AssertUnwindSafe(body));
    let elapsed = start.elapsed();
    let (mut pass, mut detail) = match result {
        Ok(v) => (v.pass, v.detail),
        Err(e) => {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            (false, format!("panicked: {msg}"))
        }
    };
    if let Some(b) = budget {
        if elapsed > b {
            pass = false;
            detail.push_str(&format!(" (over the {:.0} s budget)", b.as_secs_f64()));
        }
    }
    Outcome {
        id,
        title,
        pass,
        elapsed,
        detail,
    }
}

/// Fixed points of a finite map found by walking each orbit past its
/// transient part.
pub fn fixed_points_by_orbits(img: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = (0..img.len())
        .filter_map(|x0| {
            let mut x = x0;
            for _ in 0..=img.len() {
                x = img[x];
            }
            (img[x] == x).then_some(x)
        })
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// `d(x,z) + d(y,z) < δ ⇒ d(x,y) < η` over all triples; the first
/// counterexample if any.
pub fn triple_violation(s: &FiniteSpace, delta: &Real, eta: &Real) -> Option<[usize; 3]> {
    let n = s.len();
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if &(s.d(x, z) + s.d(y, z)) < delta && s.d(x, y) >= eta {
                    return Some([x, y, z]);
                }
            }
        }
    }
    None
}

/// `sup` of `d(a, b)` over `a, b` in a common ball `B(x, r)`.
pub fn ball_diameter_sup(s: &FiniteSpace, r: &Real) -> Real {
    let n = s.len();
    let mut best = Real::zero();
    for x in 0..n {
        let ball: Vec<usize> = (0..n).filter(|&y| s.d(y, x) < r).collect();
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

/// Exact check of `aₙ ≤ φ̂ⁿ⁻¹(a₁) + 10⁻¹²` for a list of gaps, with the
/// envelope `env` supplied by the caller. Returns the first offending `n`.
pub fn gap_bound_violation(gaps: &[Real], env: &PiecewiseFn) -> Option<usize> {
    let slack = ratio(1, 1_000_000_000_000);
    let mut bound = gaps.first()?.clone();
    for (k, a) in gaps.iter().enumerate() {
        if k > 0 {
            bound = env.eval(&bound).expect("gaps are nonnegative");
        }
        if a > &(&bound + &slack) {
            return Some(k + 1);
        }
    }
    None
}

/// Distances for a funnel map `f` (depths from
/// [`dcs_core::corpus::funnel_map`]) under which `f^l` contracts by a
/// factor below `1/2` while single steps between some levels expand:
/// `d(x, y) = c · 4^⌊L/l⌋ · b(L mod l)` with `L = max(depth)`,
/// `b = (l, l−1, …, 1)` and `c ∈ [1, 7/5]`.
pub fn stepped_depth_space<R: Rng>(rng: &mut R, depth: &[u32], l: usize) -> FiniteSpace {
    let n = depth.len();
    let scales = [ratio(1, 1), ratio(11, 10), ratio(6, 5), ratio(5, 4), ratio(7, 5)];
    FiniteSpace::from_fn((0..n).map(|i| i.to_string()).collect(), |i, j| {
        if i == j {
            return Real::zero();
        }
        let level = depth[i].max(depth[j]) as usize;
        let c = scales[rng.gen_range(0..scales.len())].clone();
        let block = int(4i64.pow((level / l) as u32));
        let b = int((l - level % l) as i64);
        c * block * b
    })
    .expect("square nonnegative matrix")
}
