//! JSON instance files: a space, optionally a self-map, named comparison
//! functions, a mode block and solver options.
//!
//! ```json
//! {
//!   "space": {"type": "analytic", "domain": {"kind": "line"},
//!             "d": "abs(y-x)+(y-x)/2", "complete": true},
//!   "map": {"type": "analytic", "f": "x/2"},
//!   "functions": {"psi": {"breakpoints": ["0"], "pieces": [],
//!                         "tail": {"slope": "1/2", "intercept": "0"}}},
//!   "mode": {"kind": "quasi", "psi1": "psi", "psi2": "psi", "psi3": "psi"},
//!   "options": {"tol": 1e-9, "seed": 7}
//! }
//! ```
//!
//! A bare space document (`{"type": "finite", ...}`) is also accepted, with
//! `map`, `functions`, `mode` and `options` allowed beside the space fields.
//! Loading never stops at the first problem: every issue found is reported.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::comparison::PiecewiseFn;
use crate::expr::{parse_expression, DISTANCE_VARS, MAP_VARS};
use crate::maps::SelfMap;
use crate::real::serde_real::value_to_real;
use crate::real::{format_real, Real};
use crate::solver::{Mode, OrbitOptions, SolveOptions};
use crate::spaces::{AnalyticSpace, DistanceSpace, Domain, FiniteSpace, FiniteSpaceJson, SamplerConfig};

pub const DEFAULT_SEED: u64 = 0;

/// One validation problem, located by a JSON path such as `space.d[2]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Issue {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("cannot read {path}: {reason}")]
    Io { path: String, reason: String },
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("{}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<Issue>),
}

impl InstanceError {
    pub fn issues(&self) -> &[Issue] {
        match self {
            InstanceError::Invalid(v) => v,
            _ => &[],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModeKind {
    Banach,
    Nonlinear,
    Extended,
    Iterated,
    Quasi,
}

impl ModeKind {
    pub fn name(self) -> &'static str {
        match self {
            ModeKind::Banach => "banach",
            ModeKind::Nonlinear => "nonlinear",
            ModeKind::Extended => "extended",
            ModeKind::Iterated => "iterated",
            ModeKind::Quasi => "quasi",
        }
    }

    /// Function roles the mode needs, each defaulting to a function of the
    /// same name.
    pub fn roles(self) -> &'static [&'static str] {
        match self {
            ModeKind::Banach => &[],
            ModeKind::Nonlinear | ModeKind::Iterated => &["phi"],
            ModeKind::Extended => &["phi1", "phi2", "phi3"],
            ModeKind::Quasi => &["psi1", "psi2", "psi3"],
        }
    }
}

impl FromStr for ModeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "banach" => ModeKind::Banach,
            "nonlinear" => ModeKind::Nonlinear,
            "extended" => ModeKind::Extended,
            "iterated" => ModeKind::Iterated,
            "quasi" => ModeKind::Quasi,
            _ => return Err(format!("unknown mode `{s}` (banach, nonlinear, extended, iterated, quasi)")),
        })
    }
}

impl fmt::Display for ModeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The `mode` block as written: parameters and role → function-name bindings.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeBlock {
    pub kind: ModeKind,
    pub alpha: Option<Real>,
    pub n: Option<usize>,
    pub bindings: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct InstanceOptions {
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub window: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub space: DistanceSpace,
    pub map: Option<SelfMap>,
    pub functions: BTreeMap<String, PiecewiseFn>,
    pub mode: Option<ModeBlock>,
    pub options: InstanceOptions,
    /// Seed the analytic sample was validated with.
    pub seed: u64,
}

/// Collects issues while walking the document.
struct Walker {
    issues: Vec<Issue>,
}

impl Walker {
    fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.issues.push(Issue {
            path: path.into(),
            message: message.into(),
        });
    }

    fn real(&mut self, path: &str, v: &Value) -> Option<Real> {
        value_to_real(v).map_err(|e| self.push(path, e)).ok()
    }

    fn string<'v>(&mut self, path: &str, v: Option<&'v Value>) -> Option<&'v str> {
        match v {
            Some(Value::String(s)) => Some(s),
            Some(_) => {
                self.push(path, "expected a string");
                None
            }
            None => {
                self.push(path, "missing");
                None
            }
        }
    }

    fn uint(&mut self, path: &str, v: &Value) -> Option<u64> {
        let r = v.as_u64();
        if r.is_none() {
            self.push(path, "expected a nonnegative integer");
        }
        r
    }

    fn space(&mut self, v: &Value, sampler: &SamplerConfig) -> Option<DistanceSpace> {
        let Some(obj) = v.as_object() else {
            self.push("space", "expected an object");
            return None;
        };
        match self.string("space.type", obj.get("type"))? {
            "finite" => self.finite_space(obj).map(DistanceSpace::Finite),
            "analytic" => self.analytic_space(obj, sampler).map(DistanceSpace::Analytic),
            other => {
                self.push("space.type", format!("unknown space type `{other}` (finite, analytic)"));
                None
            }
        }
    }

    fn finite_space(&mut self, obj: &Map<String, Value>) -> Option<FiniteSpace> {
        let before = self.issues.len();
        let rows: Vec<Vec<Real>> = match obj.get("d") {
            Some(Value::Array(rows)) => rows
                .iter()
                .enumerate()
                .map(|(i, row)| match row {
                    Value::Array(cells) => cells
                        .iter()
                        .enumerate()
                        .filter_map(|(j, c)| self.real(&format!("space.d[{i}][{j}]"), c))
                        .collect(),
                    _ => {
                        self.push(format!("space.d[{i}]"), "expected an array");
                        Vec::new()
                    }
                })
                .collect(),
            Some(_) => {
                self.push("space.d", "expected a matrix");
                return None;
            }
            None => {
                self.push("space.d", "missing");
                return None;
            }
        };
        let labels: Vec<String> = match obj.get("points") {
            None => (0..rows.len()).map(|i| i.to_string()).collect(),
            Some(Value::Array(ps)) => ps
                .iter()
                .map(|p| match p {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                })
                .collect(),
            Some(_) => {
                self.push("space.points", "expected an array of labels");
                return None;
            }
        };
        for e in FiniteSpace::validate(&labels, &rows) {
            self.push("space", e.to_string());
        }
        if self.issues.len() > before {
            return None;
        }
        FiniteSpace::new(labels, rows).ok()
    }

    fn analytic_space(&mut self, obj: &Map<String, Value>, sampler: &SamplerConfig) -> Option<AnalyticSpace> {
        let domain = self.domain(obj.get("domain"));
        let dexpr = self.string("space.d", obj.get("d")).and_then(|text| {
            parse_expression(text, &DISTANCE_VARS)
                .map_err(|e| self.push("space.d", format!("{e} in `{text}`")))
                .ok()
        });
        let complete = match obj.get("complete") {
            None => false,
            Some(Value::Bool(b)) => *b,
            Some(_) => {
                self.push("space.complete", "expected a boolean");
                false
            }
        };
        AnalyticSpace::new(domain?, dexpr?, complete, sampler)
            .map_err(|e| self.push("space", e.to_string()))
            .ok()
    }

    fn domain(&mut self, v: Option<&Value>) -> Option<Domain> {
        let Some(obj) = v.and_then(Value::as_object) else {
            self.push("space.domain", "expected {\"kind\": \"interval\" | \"line\", ...}");
            return None;
        };
        match self.string("space.domain.kind", obj.get("kind"))? {
            "line" => Some(Domain::Line),
            "interval" => {
                let mut end = |k: &str| match obj.get(k) {
                    Some(v) => self.real(&format!("space.domain.{k}"), v),
                    None => {
                        self.push(format!("space.domain.{k}"), "missing");
                        None
                    }
                };
                let (a, b) = (end("a"), end("b"));
                Domain::interval(a?, b?).map_err(|e| self.push("space.domain", e.to_string())).ok()
            }
            other => {
                self.push("space.domain.kind", format!("unknown domain kind `{other}` (interval, line)"));
                None
            }
        }
    }

    fn map(&mut self, v: &Value, space: Option<&DistanceSpace>, sampler: &SamplerConfig) -> Option<SelfMap> {
        let Some(obj) = v.as_object() else {
            self.push("map", "expected an object");
            return None;
        };
        let map = match self.string("map.type", obj.get("type"))? {
            "finite" => {
                let Some(Value::Array(img)) = obj.get("image") else {
                    self.push("map.image", "expected an array");
                    return None;
                };
                let fin = space?.as_finite();
                let Some(fin) = fin else {
                    self.push("map", "finite map on an analytic space");
                    return None;
                };
                let mut out = Vec::with_capacity(img.len());
                for (i, p) in img.iter().enumerate() {
                    let idx = match p {
                        Value::Number(n) => n.as_u64().map(|k| k as usize).filter(|&k| k < fin.len()),
                        Value::String(s) => fin.index_of(s).ok(),
                        _ => None,
                    };
                    match idx {
                        Some(k) => out.push(k),
                        None => self.push(format!("map.image[{i}]"), format!("`{p}` is not a point index or label")),
                    }
                }
                if out.len() != img.len() {
                    return None;
                }
                SelfMap::finite(out, fin.len()).map_err(|e| self.push("map", e.to_string())).ok()?
            }
            "analytic" => {
                let text = self.string("map.f", obj.get("f"))?;
                let expr = parse_expression(text, &MAP_VARS)
                    .map_err(|e| self.push("map.f", format!("{e} in `{text}`")))
                    .ok()?;
                SelfMap::analytic(expr)
            }
            other => {
                self.push("map.type", format!("unknown map type `{other}` (finite, analytic)"));
                return None;
            }
        };
        if let Some(space) = space {
            if let Err(e) = map.validate_on(space, sampler) {
                self.push("map", e.to_string());
                return None;
            }
        }
        Some(map)
    }

    fn functions(&mut self, v: &Value) -> BTreeMap<String, PiecewiseFn> {
        let mut out = BTreeMap::new();
        let Some(obj) = v.as_object() else {
            self.push("functions", "expected an object of named functions");
            return out;
        };
        for (name, f) in obj {
            match serde_json::from_value::<PiecewiseFn>(f.clone()) {
                Ok(f) => {
                    out.insert(name.clone(), f);
                }
                Err(e) => self.push(format!("functions.{name}"), e.to_string()),
            }
        }
        out
    }

    fn mode(&mut self, v: &Value) -> Option<ModeBlock> {
        let Some(obj) = v.as_object() else {
            self.push("mode", "expected an object");
            return None;
        };
        let kind = self
            .string("mode.kind", obj.get("kind"))
            .and_then(|k| k.parse::<ModeKind>().map_err(|e| self.push("mode.kind", e)).ok())?;
        let alpha = obj.get("alpha").and_then(|v| self.real("mode.alpha", v));
        let n = obj.get("n").and_then(|v| self.uint("mode.n", v)).map(|n| n as usize);
        let mut bindings = BTreeMap::new();
        for (k, v) in obj {
            if matches!(k.as_str(), "kind" | "alpha" | "n") {
                continue;
            }
            if !kind.roles().contains(&k.as_str()) {
                self.push(format!("mode.{k}"), format!("not a parameter of mode {kind}"));
                continue;
            }
            if let Some(name) = self.string(&format!("mode.{k}"), Some(v)) {
                bindings.insert(k.clone(), name.to_string());
            }
        }
        Some(ModeBlock { kind, alpha, n, bindings })
    }

    fn options(&mut self, v: &Value) -> InstanceOptions {
        let mut o = InstanceOptions::default();
        let Some(obj) = v.as_object() else {
            self.push("options", "expected an object");
            return o;
        };
        for (k, v) in obj {
            let path = format!("options.{k}");
            match k.as_str() {
                "tol" => match v.as_f64() {
                    Some(t) if t > 0.0 => o.tol = Some(t),
                    _ => self.push(path, "expected a positive number"),
                },
                "max_iter" => o.max_iter = self.uint(&path, v).map(|n| n as usize),
                "window" => o.window = self.uint(&path, v).map(|n| n as usize),
                "seed" => o.seed = self.uint(&path, v),
                _ => self.push(path, "unknown option"),
            }
        }
        o
    }
}

const INSTANCE_KEYS: [&str; 5] = ["space", "map", "functions", "mode", "options"];
const SPACE_KEYS: [&str; 5] = ["type", "points", "d", "domain", "complete"];

/// Parses and validates an instance document. `seed`, when given, takes
/// precedence over `options.seed` for the analytic validation sample.
pub fn parse_instance(text: &str, seed: Option<u64>) -> Result<Instance, InstanceError> {
    let doc: Value = serde_json::from_str(text).map_err(|e| InstanceError::Json(e.to_string()))?;
    let Some(top) = doc.as_object() else {
        return Err(InstanceError::Invalid(vec![Issue {
            path: String::new(),
            message: "expected a JSON object".into(),
        }]));
    };
    let mut w = Walker { issues: Vec::new() };

    let bare = top.contains_key("type");
    for k in top.keys() {
        let known = INSTANCE_KEYS.contains(&k.as_str())
            || (bare && (SPACE_KEYS.contains(&k.as_str()) || k == "derived_from"));
        if !known {
            w.push(k.clone(), "unknown field");
        }
    }

    let options = top.get("options").map(|v| w.options(v)).unwrap_or_default();
    let seed = seed.or(options.seed).unwrap_or(DEFAULT_SEED);
    let sampler = SamplerConfig::new(seed);

    let space = if bare {
        w.space(&doc, &sampler)
    } else if let Some(v) = top.get("space") {
        w.space(v, &sampler)
    } else {
        w.push("space", "missing");
        None
    };
    let map = top.get("map").and_then(|v| w.map(v, space.as_ref(), &sampler));
    let functions = top.get("functions").map(|v| w.functions(v)).unwrap_or_default();
    let mode = top.get("mode").and_then(|v| w.mode(v));

    // Names in the mode block must resolve even before anything is solved.
    if let Some(m) = &mode {
        for role in m.kind.roles() {
            let name = m.bindings.get(*role).map(String::as_str).unwrap_or(role);
            if !functions.contains_key(name) && (m.bindings.contains_key(*role) || top.contains_key("functions")) {
                w.push(format!("mode.{role}"), format!("unresolved function name `{name}`"));
            }
        }
    }

    match space {
        Some(space) if w.issues.is_empty() => Ok(Instance {
            space,
            map,
            functions,
            mode,
            options,
            seed,
        }),
        _ => {
            if w.issues.is_empty() {
                w.push("space", "invalid");
            }
            Err(InstanceError::Invalid(w.issues))
        }
    }
}

/// Reads `source` as inline JSON when it starts with `{`, otherwise as a
/// file path.
pub fn load_instance(source: &str, seed: Option<u64>) -> Result<Instance, InstanceError> {
    parse_instance(&read_source(source)?, seed)
}

pub fn read_source(source: &str) -> Result<String, InstanceError> {
    if source.trim_start().starts_with('{') {
        return Ok(source.to_string());
    }
    std::fs::read_to_string(source).map_err(|e| InstanceError::Io {
        path: source.to_string(),
        reason: e.to_string(),
    })
}

/// Function documents for `check-fn`, `envelope` and `combine`: either one
/// bare function or `{"functions": {name: fn, ...}}` (names in order).
pub fn parse_functions(text: &str) -> Result<Vec<(String, PiecewiseFn)>, InstanceError> {
    let doc: Value = serde_json::from_str(text).map_err(|e| InstanceError::Json(e.to_string()))?;
    let mut w = Walker { issues: Vec::new() };
    let out: Vec<_> = match doc.get("functions") {
        Some(v) => w.functions(v).into_iter().collect(),
        None => match serde_json::from_value::<PiecewiseFn>(doc) {
            Ok(f) => vec![("fn".to_string(), f)],
            Err(e) => {
                w.push("", e.to_string());
                Vec::new()
            }
        },
    };
    if !w.issues.is_empty() {
        return Err(InstanceError::Invalid(w.issues));
    }
    if out.is_empty() {
        return Err(InstanceError::Invalid(vec![Issue {
            path: "functions".into(),
            message: "no functions".into(),
        }]));
    }
    Ok(out)
}

/// Overrides for [`Instance::resolve_mode`]; `None` falls back to the mode
/// block.
#[derive(Debug, Clone, Default)]
pub struct ModeOverrides {
    pub kind: Option<ModeKind>,
    pub alpha: Option<Real>,
    pub n: Option<usize>,
}

impl Instance {
    pub fn sampler(&self) -> SamplerConfig {
        SamplerConfig::new(self.seed)
    }

    fn function(&self, role: &str, block: Option<&ModeBlock>) -> Result<PiecewiseFn, Issue> {
        let name = block.and_then(|b| b.bindings.get(role)).map(String::as_str).unwrap_or(role);
        self.functions.get(name).cloned().ok_or_else(|| Issue {
            path: format!("mode.{role}"),
            message: format!("unresolved function name `{name}`"),
        })
    }

    /// Builds the solver mode from the mode block and any overrides.
    pub fn resolve_mode(&self, o: &ModeOverrides) -> Result<Mode, InstanceError> {
        let kind = match (o.kind, &self.mode) {
            (Some(k), _) => k,
            (None, Some(b)) => b.kind,
            (None, None) => {
                return Err(InstanceError::Invalid(vec![Issue {
                    path: "mode".into(),
                    message: "no mode given".into(),
                }]))
            }
        };
        let block = self.mode.as_ref().filter(|b| b.kind == kind);
        let one = |m: Result<Mode, Issue>| m.map_err(|i| InstanceError::Invalid(vec![i]));
        let three = |prefix: &str| -> Result<[PiecewiseFn; 3], InstanceError> {
            let mut issues = Vec::new();
            let fs: Vec<_> = (1..=3)
                .filter_map(|i| self.function(&format!("{prefix}{i}"), block).map_err(|e| issues.push(e)).ok())
                .collect();
            match <[PiecewiseFn; 3]>::try_from(fs) {
                Ok(a) if issues.is_empty() => Ok(a),
                _ => Err(InstanceError::Invalid(issues)),
            }
        };
        match kind {
            ModeKind::Banach => {
                let alpha = o.alpha.clone().or_else(|| block.and_then(|b| b.alpha.clone()));
                one(alpha.map(|alpha| Mode::Banach { alpha }).ok_or(Issue {
                    path: "mode.alpha".into(),
                    message: "banach mode needs alpha".into(),
                }))
            }
            ModeKind::Nonlinear => one(self.function("phi", block).map(|phi| Mode::Nonlinear { phi })),
            ModeKind::Iterated => {
                let n = o.n.or_else(|| block.and_then(|b| b.n)).unwrap_or(0);
                one(self.function("phi", block).map(|phi| Mode::Iterated { phi, n }))
            }
            ModeKind::Extended => three("phi").map(|phis| Mode::Extended { phis }),
            ModeKind::Quasi => three("psi").map(|psis| Mode::Quasi { psis }),
        }
    }

    /// Solver options from the instance, before command-line overrides.
    pub fn solve_options(&self) -> SolveOptions {
        let mut s = SolveOptions::new(self.seed);
        let d = OrbitOptions::default();
        s.orbit = OrbitOptions {
            tol: self.options.tol.unwrap_or(d.tol),
            max_iter: self.options.max_iter.unwrap_or(d.max_iter),
            window: self.options.window.unwrap_or(d.window),
        };
        s
    }

    /// Canonical JSON form; parsing it gives back an equivalent instance.
    pub fn to_json(&self) -> Value {
        let space = match &self.space {
            DistanceSpace::Finite(s) => serde_json::to_value(FiniteSpaceJson::from(s)).expect("serializable"),
            DistanceSpace::Analytic(a) => json!({
                "type": "analytic",
                "domain": a.domain(),
                "d": a.dexpr().to_string(),
                "complete": a.complete(),
            }),
        };
        let mut doc = Map::new();
        doc.insert("space".into(), space);
        if let Some(m) = &self.map {
            let v = match m {
                SelfMap::Finite(img) => json!({"type": "finite", "image": img}),
                SelfMap::Analytic { expr, .. } => json!({"type": "analytic", "f": expr.to_string()}),
            };
            doc.insert("map".into(), v);
        }
        if !self.functions.is_empty() {
            doc.insert("functions".into(), serde_json::to_value(&self.functions).expect("serializable"));
        }
        if let Some(b) = &self.mode {
            let mut m = Map::new();
            m.insert("kind".into(), b.kind.name().into());
            if let Some(a) = &b.alpha {
                m.insert("alpha".into(), format_real(a).into());
            }
            if let Some(n) = b.n {
                m.insert("n".into(), n.into());
            }
            for (k, v) in &b.bindings {
                m.insert(k.clone(), v.clone().into());
            }
            doc.insert("mode".into(), Value::Object(m));
        }
        let o = &self.options;
        let mut opts = Map::new();
        if let Some(t) = o.tol {
            opts.insert("tol".into(), t.into());
        }
        if let Some(n) = o.max_iter {
            opts.insert("max_iter".into(), n.into());
        }
        if let Some(n) = o.window {
            opts.insert("window".into(), n.into());
        }
        if let Some(s) = o.seed {
            opts.insert("seed".into(), s.into());
        }
        if !opts.is_empty() {
            doc.insert("options".into(), Value::Object(opts));
        }
        Value::Object(doc)
    }
}
