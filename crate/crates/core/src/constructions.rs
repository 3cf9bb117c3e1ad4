//! Derived distances that majorize `d` by folding in orbit displacements:
//!
//! * `d*(x, y) = max{d(x,y), d(x,fx), d(y,fy)}` for `x ≠ y`;
//! * `d_*(x, y) = max_{0≤k≤n} d(fᵏx, gᵏy)` for `x ≠ y` (`g` defaults to `f`).
//!
//! Both vanish on the diagonal. [`verify_inheritance`] re-runs the space
//! checkers on the derived matrix to confirm what the derived space
//! inherits from its base.

use num_traits::Zero;
use serde::Serialize;

use crate::maps::{power_index, MapError, SelfMap};
use crate::real::{max_real, Real};
use crate::spaces::{jms_search, FiniteSpace, FiniteSpaceJson, JmsSearch};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DerivedKind {
    Star,
    OrbitMax { n: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DerivedSpace {
    pub base: FiniteSpace,
    pub f: Vec<usize>,
    pub g: Vec<usize>,
    pub kind: DerivedKind,
    pub space: FiniteSpace,
}

fn checked_map(base: &FiniteSpace, img: &[usize]) -> Result<Vec<usize>, MapError> {
    SelfMap::finite(img.to_vec(), base.len()).map(|_| img.to_vec())
}

pub fn star_space(base: &FiniteSpace, f: &[usize]) -> Result<DerivedSpace, MapError> {
    let f = checked_map(base, f)?;
    let space = FiniteSpace::from_fn(base.labels().to_vec(), |x, y| {
        if x == y {
            return Real::zero();
        }
        max_real(max_real(base.d(x, y), base.d(x, f[x])), base.d(y, f[y])).clone()
    })?;
    Ok(DerivedSpace {
        base: base.clone(),
        g: f.clone(),
        f,
        kind: DerivedKind::Star,
        space,
    })
}

pub fn orbit_max_space(base: &FiniteSpace, f: &[usize], g: Option<&[usize]>, n: usize) -> Result<DerivedSpace, MapError> {
    if n == 0 {
        return Err(MapError::ZeroPower);
    }
    let f = checked_map(base, f)?;
    let g = checked_map(base, g.unwrap_or(&f))?;
    let space = FiniteSpace::from_fn(base.labels().to_vec(), |x, y| {
        if x == y {
            return Real::zero();
        }
        (0..=n)
            .map(|k| base.d(power_index(&f, x, k), power_index(&g, y, k)))
            .max()
            .expect("k = 0 present")
            .clone()
    })?;
    Ok(DerivedSpace {
        base: base.clone(),
        f,
        g,
        kind: DerivedKind::OrbitMax { n },
        space,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DerivedFrom {
    #[serde(flatten)]
    pub kind: DerivedKind,
    pub base: FiniteSpaceJson,
    pub map: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<Vec<usize>>,
}

/// Finite-instance JSON plus a `derived_from` block.
#[derive(Debug, Clone, Serialize)]
pub struct DerivedSpaceJson {
    #[serde(flatten)]
    pub space: FiniteSpaceJson,
    pub derived_from: DerivedFrom,
}

impl From<&DerivedSpace> for DerivedSpaceJson {
    fn from(d: &DerivedSpace) -> Self {
        DerivedSpaceJson {
            space: (&d.space).into(),
            derived_from: DerivedFrom {
                kind: d.kind,
                base: (&d.base).into(),
                map: d.f.clone(),
                g: (d.g != d.f).then(|| d.g.clone()),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Clause {
    pub holds: bool,
    pub counterexample: Option<String>,
}

impl Clause {
    fn ok() -> Self {
        Clause {
            holds: true,
            counterexample: None,
        }
    }

    fn fail(msg: String) -> Self {
        Clause {
            holds: false,
            counterexample: Some(msg),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InheritanceReport {
    /// `d ≤ d_derived` off the diagonal.
    pub domination: Clause,
    /// W3 of the base carries over.
    pub w3_transfer: Clause,
    /// Some verified `(δ, η)` exists for the derived distance.
    pub jms: Clause,
    pub jms_pair: Option<JmsSearch>,
    /// Orbit traces that are left Cauchy for the derived distance are left
    /// Cauchy for the base distance.
    pub cauchy_transfer: Clause,
    pub traces_checked: usize,
    pub all_hold: bool,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("derived space fails to inherit: {0}")]
pub struct InheritanceViolation(pub String);

impl InheritanceReport {
    /// The first failing clause as an error.
    pub fn into_result(self) -> Result<Self, InheritanceViolation> {
        let clauses = [
            ("domination", &self.domination),
            ("w3_transfer", &self.w3_transfer),
            ("jms", &self.jms),
            ("cauchy_transfer", &self.cauchy_transfer),
        ];
        if let Some((name, c)) = clauses.iter().find(|(_, c)| !c.holds) {
            return Err(InheritanceViolation(format!(
                "{name}: {}",
                c.counterexample.as_deref().unwrap_or("?")
            )));
        }
        Ok(self)
    }
}

/// Orbit of `img` from `x0` long enough to repeat its cycle twice.
fn orbit_trace(img: &[usize], x0: usize) -> Vec<usize> {
    let len = 2 * img.len() + 2;
    let mut v = Vec::with_capacity(len);
    let mut x = x0;
    for _ in 0..len {
        v.push(x);
        x = img[x];
    }
    v
}

/// Left Cauchy at zero tolerance: on a finite trace covering the periodic
/// part twice, a positive tolerance below the smallest positive distance is
/// equivalent to tolerance zero.
fn is_left_cauchy(s: &FiniteSpace, trace: &[usize]) -> bool {
    s.check_left_cauchy(trace, &Real::zero())
        .map(|r| r.tail_index.is_some())
        .unwrap_or(false)
}

pub fn verify_inheritance(derived: &DerivedSpace) -> InheritanceReport {
    let (base, ds) = (&derived.base, &derived.space);
    let n = base.len();
    let label = |i: usize| base.label(i);

    let mut domination = Clause::ok();
    'dom: for x in 0..n {
        for y in 0..n {
            if x != y && base.d(x, y) > ds.d(x, y) {
                domination = Clause::fail(format!(
                    "d({0},{1}) = {2} > derived d({0},{1}) = {3}",
                    label(x),
                    label(y),
                    crate::real::format_real(base.d(x, y)),
                    crate::real::format_real(ds.d(x, y))
                ));
                break 'dom;
            }
        }
    }

    let w3_transfer = match (base.check_w3().holds, ds.check_w3().witness) {
        (true, Some([a, y, z])) => Clause::fail(format!(
            "base has W3 but derived d({0},{1}) = d({0},{2}) = 0",
            label(a),
            label(y),
            label(z)
        )),
        _ => Clause::ok(),
    };

    let jms_pair = jms_search(ds);
    let jms = if jms_pair.is_some() {
        Clause::ok()
    } else {
        Clause::fail("no (δ, η) passes the triple check".into())
    };

    let mut cauchy_transfer = Clause::ok();
    let mut traces_checked = 0;
    'traces: for img in [&derived.f, &derived.g] {
        for x0 in 0..n {
            let t = orbit_trace(img, x0);
            traces_checked += 1;
            if is_left_cauchy(ds, &t) && !is_left_cauchy(base, &t) {
                let names: Vec<&str> = t.iter().map(|&i| label(i)).collect();
                cauchy_transfer = Clause::fail(format!("trace [{}] is left Cauchy only for the derived distance", names.join(", ")));
                break 'traces;
            }
        }
        if derived.g == derived.f {
            break;
        }
    }

    let all_hold = domination.holds && w3_transfer.holds && jms.holds && cauchy_transfer.holds;
    InheritanceReport {
        domination,
        w3_transfer,
        jms,
        jms_pair,
        cauchy_transfer,
        traces_checked,
        all_hold,
    }
}
