//! Seeded generators for differential and property testing: piecewise
//! affine functions, finite distance matrices of several shapes, and
//! self-maps. Every generator is deterministic in its RNG.

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::comparison::{Affine, PiecewiseFn, Segment};
use crate::real::{int, ratio, Real};
use crate::spaces::FiniteSpace;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn pick<R: Rng>(rng: &mut R, xs: &[(i64, i64)]) -> Real {
    let &(p, q) = xs.choose(rng).expect("nonempty");
    ratio(p, q)
}

const RATIOS: [(i64, i64); 8] = [(0, 1), (1, 4), (1, 2), (3, 5), (3, 4), (7, 8), (9, 10), (1, 1)];
const STEPS: [(i64, i64); 6] = [(1, 4), (1, 2), (1, 1), (3, 2), (2, 1), (3, 1)];

/// One random piecewise-affine function on `[0, ∞)`, nonnegative by
/// construction. Most pieces stay below the diagonal; some plateau at their
/// start value, touch the diagonal, jump at breakpoints, or start above zero,
/// so the corpus covers every verdict of the checkers.
pub fn random_fn<R: Rng>(rng: &mut R) -> PiecewiseFn {
    let k = rng.gen_range(0..=4);
    let mut starts = vec![Real::zero()];
    for _ in 0..k {
        let last = starts.last().unwrap().clone();
        starts.push(last + pick(rng, &STEPS));
    }
    let mut segs = Vec::with_capacity(starts.len());
    for (i, s) in starts.iter().enumerate() {
        let end = starts.get(i + 1);
        let law = match (rng.gen_range(0..10), end) {
            // value c·t
            (0..=3, _) => Affine::new(pick(rng, &RATIOS[..7]), Real::zero()),
            // plateau at the start value
            (4..=5, _) => Affine::constant(s.clone()),
            // some constant below the start
            (6, _) => Affine::constant(s * pick(rng, &RATIOS[..7])),
            // rises from c·s to reach the diagonal at the end
            (7, Some(e)) => {
                let v0 = s * pick(rng, &RATIOS[..7]);
                let slope = (e - &v0) / (e - s);
                Affine::new(slope.clone(), v0 - slope * s)
            }
            // random values r₀·s and r₁·e at the ends
            (8, Some(e)) => {
                let (v0, v1) = (s * pick(rng, &RATIOS), e * pick(rng, &RATIOS));
                let slope = (&v1 - &v0) / (e - s);
                Affine::new(slope.clone(), v0 - slope * s)
            }
            // tail with a random nonnegative slope
            (_, None) => {
                let v0 = s * pick(rng, &RATIOS);
                let slope = pick(rng, &[(0, 1), (1, 4), (1, 2), (3, 4), (1, 1), (5, 4)]);
                Affine::new(slope.clone(), v0 - slope * s)
            }
            _ => Affine::new(int(1), Real::zero()),
        };
        let continuous = law.at(s);
        let at = match rng.gen_range(0..20) {
            0..=13 => continuous,
            14 if s.is_zero() => ratio(1, 10),
            _ => s * pick(rng, &RATIOS),
        };
        segs.push(Segment {
            start: s.clone(),
            at,
            law,
        });
    }
    PiecewiseFn::new(segs).expect("generator keeps values nonnegative")
}

/// Hand-picked members covering the named classes: linear, plateau, the
/// dip-after-one Φ failure, identity, and a Matkowski-but-slow function.
pub fn landmark_fns() -> Vec<PiecewiseFn> {
    use crate::comparison::piecewise;
    [
        vec![("0", "0", "1/2", "0")],
        vec![("0", "0", "1/2", "0"), ("1/2", "1/4", "0", "1/2")],
        vec![("0", "0", "1/2", "0"), ("1", "0.9", "-1", "2"), ("2", "1", "1/2", "0")],
        vec![("0", "0", "1", "0")],
        vec![("0", "0", "0", "0")],
        vec![("0", "0", "99/100", "0")],
        vec![("0", "0", "1/2", "0"), ("1", "1", "1/2", "0")],
        vec![("0", "0", "1/2", "0"), ("1", "1/2", "1", "-1/10")],
    ]
    .into_iter()
    .map(|p| piecewise(&p).unwrap())
    .collect()
}

/// Landmarks followed by `count` random functions from `seed`.
pub fn function_corpus(seed: u64, count: usize) -> Vec<PiecewiseFn> {
    let mut r = rng(seed);
    let mut out = landmark_fns();
    out.extend((0..count).map(|_| random_fn(&mut r)));
    out
}

fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

const DISTANCES: [(i64, i64); 8] = [(1, 2), (1, 1), (3, 2), (2, 1), (5, 2), (3, 1), (4, 1), (6, 1)];

/// Zero diagonal, positive off-diagonal (A1); symmetric with probability
/// ½, and with probability ½ closed under shortest paths (A3).
#[allow(clippy::needless_range_loop)]
pub fn random_a1_space<R: Rng>(rng: &mut R, n: usize) -> FiniteSpace {
    let symmetric = rng.gen_bool(0.5);
    let mut d = vec![vec![Real::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j || (symmetric && j < i) {
                continue;
            }
            let v = pick(rng, &DISTANCES);
            if symmetric {
                d[j][i] = v.clone();
            }
            d[i][j] = v;
        }
    }
    if rng.gen_bool(0.5) {
        shortest_paths(&mut d);
    }
    FiniteSpace::new(labels(n), d).unwrap()
}

/// Floyd–Warshall closure; keeps A1 and forces the triangle inequality.
pub fn shortest_paths(d: &mut [Vec<Real>]) {
    let n = d.len();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = &d[i][k] + &d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
}

/// Any nonnegative matrix: zeros off the diagonal and positive self
/// distances both occur.
pub fn random_general_space<R: Rng>(rng: &mut R, n: usize) -> FiniteSpace {
    let d = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let zero = if i == j { 0.6 } else { 0.15 };
                    if rng.gen_bool(zero) {
                        Real::zero()
                    } else {
                        pick(rng, &DISTANCES)
                    }
                })
                .collect()
        })
        .collect();
    FiniteSpace::new(labels(n), d).unwrap()
}

pub fn random_map<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    (0..n).map(|_| rng.gen_range(0..n)).collect()
}

/// A map whose functional graph is a tree into a single fixed root, with
/// each point's depth.
pub fn funnel_map<R: Rng>(rng: &mut R, n: usize) -> (Vec<usize>, Vec<u32>) {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut img = vec![0; n];
    let mut depth = vec![0; n];
    img[order[0]] = order[0];
    for k in 1..n {
        let parent = order[rng.gen_range(0..k)];
        img[order[k]] = parent;
        depth[order[k]] = depth[parent] + 1;
    }
    (img, depth)
}

/// `d(x, y) = c_xy · 2^max(depth)` off the diagonal with `c_xy ∈ [1, 7/5]`:
/// every funnel map is then a Banach contraction with constant `7/10`.
pub fn depth_space<R: Rng>(rng: &mut R, depth: &[u32]) -> FiniteSpace {
    let n = depth.len();
    FiniteSpace::from_fn(labels(n), |i, j| {
        if i == j {
            return Real::zero();
        }
        let scale = pick(rng, &[(1, 1), (11, 10), (6, 5), (5, 4), (7, 5)]);
        scale * int(1i64 << depth[i].max(depth[j]))
    })
    .unwrap()
}

/// `n` in `2..=max` with small sizes more likely.
pub fn small_size<R: Rng>(rng: &mut R, max: usize) -> usize {
    let a = rng.gen_range(2..=max);
    let b = rng.gen_range(2..=max);
    a.min(b)
}
