use num_traits::Zero;
use serde::Serialize;

use super::{Coverage, DistanceSpace, FiniteSpace, SamplerConfig, SpaceError};

/// One axiom's verdict and the first (lexicographically smallest)
/// counterexample, as point labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomCheck {
    pub holds: bool,
    pub witness: Option<Vec<String>>,
}

impl AxiomCheck {
    fn from_witness(w: Option<Vec<usize>>, space: &FiniteSpace) -> Self {
        AxiomCheck {
            holds: w.is_none(),
            witness: w.map(|idx| idx.into_iter().map(|i| space.label(i).to_string()).collect()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Taxonomy {
    #[serde(rename = "metric")]
    Metric,
    #[serde(rename = "pseudo-metric")]
    PseudoMetric,
    #[serde(rename = "quasi-metric")]
    QuasiMetric,
    #[serde(rename = "symmetric")]
    Symmetric,
    #[serde(rename = "pseudo quasi-metric")]
    PseudoQuasiMetric,
    #[serde(rename = "none")]
    None,
}

impl Taxonomy {
    /// The most specific class the axiom flags admit. Since A1 implies A0 a
    /// metric is also a pseudo-metric; the narrower name wins.
    pub fn from_flags(a0: bool, a1: bool, a2: bool, a3: bool) -> Self {
        if a1 && a2 && a3 {
            Taxonomy::Metric
        } else if a0 && a2 && a3 {
            Taxonomy::PseudoMetric
        } else if a1 && a3 {
            Taxonomy::QuasiMetric
        } else if a1 && a2 {
            Taxonomy::Symmetric
        } else if a0 && a3 {
            Taxonomy::PseudoQuasiMetric
        } else {
            Taxonomy::None
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Taxonomy::Metric => "metric",
            Taxonomy::PseudoMetric => "pseudo-metric",
            Taxonomy::QuasiMetric => "quasi-metric",
            Taxonomy::Symmetric => "symmetric",
            Taxonomy::PseudoQuasiMetric => "pseudo quasi-metric",
            Taxonomy::None => "none",
        }
    }
}

/// Flags for
/// A0: `d(x,y) = 0 ⇒ x = y`;
/// A1: `d(x,y) = 0 ⇔ x = y`;
/// A2: `d(x,y) = d(y,x)`;
/// A3: `d(x,y) ≤ d(x,z) + d(z,y)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub a0: AxiomCheck,
    pub a1: AxiomCheck,
    pub a2: AxiomCheck,
    pub a3: AxiomCheck,
    pub taxonomy: Taxonomy,
    pub coverage: Coverage,
}

fn first_pair(n: usize, mut bad: impl FnMut(usize, usize) -> bool) -> Option<Vec<usize>> {
    (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).find(|&(i, j)| bad(i, j)).map(|(i, j)| vec![i, j])
}

/// Exhaustive check over all pairs and triples.
pub fn classify_finite(s: &FiniteSpace) -> AxiomReport {
    let n = s.len();
    let a0 = first_pair(n, |i, j| i != j && s.d(i, j).is_zero());
    let a1 = first_pair(n, |i, j| (i == j) != s.d(i, j).is_zero());
    let a2 = first_pair(n, |i, j| i < j && s.d(i, j) != s.d(j, i));
    let mut a3 = None;
    'outer: for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if s.d(x, y) > &(s.d(x, z) + s.d(z, y)) {
                    a3 = Some(vec![x, y, z]);
                    break 'outer;
                }
            }
        }
    }
    let taxonomy = Taxonomy::from_flags(a0.is_none(), a1.is_none(), a2.is_none(), a3.is_none());
    AxiomReport {
        a0: AxiomCheck::from_witness(a0, s),
        a1: AxiomCheck::from_witness(a1, s),
        a2: AxiomCheck::from_witness(a2, s),
        a3: AxiomCheck::from_witness(a3, s),
        taxonomy,
        coverage: Coverage::Exhaustive,
    }
}

/// Finite spaces exhaustively; analytic spaces on the seeded point sample
/// (exact arithmetic at every sampled pair and triple).
pub fn classify_axioms(space: &DistanceSpace, sampler: &SamplerConfig) -> Result<AxiomReport, SpaceError> {
    match space {
        DistanceSpace::Finite(s) => Ok(classify_finite(s)),
        DistanceSpace::Analytic(a) => {
            let pts = sampler.sample_points(a.domain());
            let mut report = classify_finite(&a.restrict(&pts)?);
            report.coverage = Coverage::Sampled {
                seed: sampler.seed,
                count: pts.len(),
            };
            Ok(report)
        }
    }
}
