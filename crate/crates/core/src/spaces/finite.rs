use std::collections::HashSet;

use num_traits::{Signed, Zero};
use serde::Serialize;

use super::SpaceError;
use crate::real::{format_real, ExtReal, Real};

/// Default largest space for which subset families are enumerated.
pub const ENUMERATION_BOUND: usize = 16;

/// A distance given by its full matrix. No axioms are assumed.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteSpace {
    labels: Vec<String>,
    d: Vec<Vec<Real>>,
}

impl FiniteSpace {
    /// Every problem with the input, not just the first.
    pub fn validate(labels: &[String], d: &[Vec<Real>]) -> Vec<SpaceError> {
        let mut errs = Vec::new();
        let n = labels.len();
        if n == 0 {
            errs.push(SpaceError::Empty);
        }
        let mut seen = HashSet::new();
        for l in labels {
            if !seen.insert(l.as_str()) {
                errs.push(SpaceError::DuplicateLabel(l.clone()));
            }
        }
        let width = d.iter().map(Vec::len).find(|&w| w != n).unwrap_or(n);
        if d.len() != n || d.iter().any(|row| row.len() != n) {
            errs.push(SpaceError::Shape {
                points: n,
                rows: d.len(),
                cols: width,
            });
        }
        for (i, row) in d.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if v.is_negative() {
                    errs.push(SpaceError::NegativeDistance {
                        from: labels.get(i).cloned().unwrap_or_else(|| i.to_string()),
                        to: labels.get(j).cloned().unwrap_or_else(|| j.to_string()),
                        value: format_real(v),
                    });
                }
            }
        }
        errs
    }

    pub fn new(labels: Vec<String>, d: Vec<Vec<Real>>) -> Result<Self, SpaceError> {
        match Self::validate(&labels, &d).into_iter().next() {
            Some(e) => Err(e),
            None => Ok(FiniteSpace { labels, d }),
        }
    }

    /// Points labelled `0..n`.
    pub fn from_matrix(d: Vec<Vec<Real>>) -> Result<Self, SpaceError> {
        let labels = (0..d.len()).map(|i| i.to_string()).collect();
        Self::new(labels, d)
    }

    /// Builds the matrix from a distance function on indices.
    pub fn from_fn(labels: Vec<String>, mut dist: impl FnMut(usize, usize) -> Real) -> Result<Self, SpaceError> {
        let n = labels.len();
        let d = (0..n).map(|i| (0..n).map(|j| dist(i, j)).collect()).collect();
        Self::new(labels, d)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize, SpaceError> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| SpaceError::UnknownPoint(label.to_string()))
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> &Real {
        &self.d[i][j]
    }

    pub fn matrix(&self) -> &[Vec<Real>] {
        &self.d
    }

    /// Distinct positive entries in increasing order.
    pub fn realized_positive_distances(&self) -> Vec<Real> {
        let mut v: Vec<Real> = self.d.iter().flatten().filter(|x| x.is_positive()).cloned().collect();
        v.sort();
        v.dedup();
        v
    }

    /// `B(x, r) = { y : d(y, x) < r }`.
    pub fn ball(&self, x: usize, r: &Real) -> Vec<usize> {
        (0..self.len()).filter(|&y| self.d(y, x) < r).collect()
    }

    /// `d(A, x) = inf_{a ∈ A} d(a, x)`, `+∞` for empty `A`.
    pub fn set_distance(&self, set: &[usize], x: usize) -> ExtReal {
        set.iter()
            .map(|&a| self.d(a, x))
            .min()
            .map_or(ExtReal::Infinity, |v| ExtReal::Finite(v.clone()))
    }

    fn check_bound(&self, bound: usize) -> Result<(), SpaceError> {
        // masks are u64
        if self.len() > bound.min(63) {
            Err(SpaceError::EnumerationBound {
                points: self.len(),
                bound: bound.min(63),
            })
        } else {
            Ok(())
        }
    }

    /// For each `a`, the bitmask of points `x` with `d(a, x) = 0`.
    fn zero_targets(&self) -> Vec<u64> {
        (0..self.len())
            .map(|a| {
                (0..self.len())
                    .filter(|&x| self.d(a, x).is_zero())
                    .fold(0u64, |m, x| m | (1 << x))
            })
            .collect()
    }

    fn mask_closed(zero: &[u64], mask: u64) -> bool {
        let reach = zero
            .iter()
            .enumerate()
            .filter(|(a, _)| mask >> a & 1 == 1)
            .fold(0u64, |m, (_, z)| m | z);
        reach & !mask == 0
    }

    /// `A` is closed iff every point at zero set-distance from `A` lies in `A`.
    pub fn is_closed(&self, set: &[usize], bound: usize) -> Result<bool, SpaceError> {
        self.check_bound(bound)?;
        Ok(Self::mask_closed(&self.zero_targets(), to_mask(set)))
    }

    pub fn is_open(&self, set: &[usize], bound: usize) -> Result<bool, SpaceError> {
        self.check_bound(bound)?;
        let full = (1u64 << self.len()) - 1;
        Ok(Self::mask_closed(&self.zero_targets(), full & !to_mask(set)))
    }

    /// All closed sets, in increasing bitmask order (so `∅` first).
    pub fn closed_sets(&self, bound: usize) -> Result<Vec<Vec<usize>>, SpaceError> {
        self.check_bound(bound)?;
        let zero = self.zero_targets();
        Ok((0u64..1 << self.len())
            .filter(|&m| Self::mask_closed(&zero, m))
            .map(|m| from_mask(m, self.len()))
            .collect())
    }

    /// Limits are unique iff no point has zero distance to two distinct
    /// points: a d-convergent sequence in a finite set is eventually inside
    /// the zero set of its limit, and has a constant subsequence.
    pub fn check_w3(&self) -> W3Report {
        let n = self.len();
        for a in 0..n {
            let zeros: Vec<usize> = (0..n).filter(|&x| self.d(a, x).is_zero()).collect();
            if zeros.len() >= 2 {
                return W3Report {
                    holds: false,
                    witness: Some([a, zeros[0], zeros[1]]),
                };
            }
        }
        W3Report {
            holds: true,
            witness: None,
        }
    }

    /// Smallest `N ≤ len − 2` such that `d(x_n, x_m) ≤ tol` for all
    /// recorded `m > n ≥ N`.
    pub fn check_left_cauchy(&self, trace: &[usize], tol: &Real) -> Result<CauchyReport, SpaceError> {
        left_cauchy(trace.len(), |n, m| self.d(trace[n], trace[m]).clone(), tol)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct W3Report {
    pub holds: bool,
    /// `(a, y, z)` with `d(a, y) = d(a, z) = 0` and `y ≠ z`.
    pub witness: Option<[usize; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CauchyReport {
    /// `None`: not observed within the trace.
    pub tail_index: Option<usize>,
    /// `max_{m>n≥0} d(x_n, x_m)` restricted to each tail start, as doubles.
    pub tail_sup: Vec<f64>,
}

pub(crate) fn left_cauchy<T: PartialOrd + Clone + Into<ToF64>>(
    len: usize,
    dist: impl Fn(usize, usize) -> T,
    tol: &T,
) -> Result<CauchyReport, SpaceError> {
    if len == 0 {
        return Err(SpaceError::EmptyTrace);
    }
    if len == 1 {
        return Ok(CauchyReport {
            tail_index: None,
            tail_sup: Vec::new(),
        });
    }
    // suffix[N] = max over m > n ≥ N
    let mut suffix: Vec<Option<T>> = vec![None; len];
    for n in (0..len - 1).rev() {
        let mut best = suffix[n + 1].clone();
        for m in n + 1..len {
            let v = dist(n, m);
            if best.as_ref().is_none_or(|b| v > *b) {
                best = Some(v);
            }
        }
        suffix[n] = best;
    }
    let tails: Vec<T> = suffix[..len - 1].iter().map(|v| v.clone().expect("set")).collect();
    let tail_index = tails.iter().position(|v| v <= tol);
    Ok(CauchyReport {
        tail_index,
        tail_sup: tails.into_iter().map(|v| v.into().0).collect(),
    })
}

/// Lossy conversion used only for diagnostics.
pub(crate) struct ToF64(pub f64);

impl From<Real> for ToF64 {
    fn from(r: Real) -> Self {
        ToF64(crate::real::to_f64(&r))
    }
}

impl From<f64> for ToF64 {
    fn from(x: f64) -> Self {
        ToF64(x)
    }
}

pub(crate) fn to_mask(set: &[usize]) -> u64 {
    set.iter().fold(0u64, |m, &i| m | (1 << i))
}

pub(crate) fn from_mask(mask: u64, n: usize) -> Vec<usize> {
    (0..n).filter(|i| mask >> i & 1 == 1).collect()
}

/// Wire form shared by base and derived finite spaces.
#[derive(Debug, Clone, Serialize)]
pub struct FiniteSpaceJson {
    #[serde(rename = "type")]
    pub kind: &'static str,
    pub points: Vec<String>,
    pub d: Vec<Vec<String>>,
}

impl From<&FiniteSpace> for FiniteSpaceJson {
    fn from(s: &FiniteSpace) -> Self {
        FiniteSpaceJson {
            kind: "finite",
            points: s.labels.clone(),
            d: s.d.iter().map(|row| row.iter().map(format_real).collect()).collect(),
        }
    }
}

impl Serialize for FiniteSpace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        FiniteSpaceJson::from(self).serialize(s)
    }
}
