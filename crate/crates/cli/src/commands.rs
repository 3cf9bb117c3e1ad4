use std::fmt::Write as _;

use anyhow::{anyhow, bail, Context, Result};
use serde_json::{json, Value};

use dcs_core::comparison::{
    check_boyd_wong, check_comparison, check_matkowski, check_monotone, check_pasicki, check_phi_membership,
    max_combine, monotone_envelope, PiecewiseFn, DEFAULT_PROBES,
};
use dcs_core::constructions::{orbit_max_space, star_space, verify_inheritance, DerivedSpaceJson};
use dcs_core::instance::{parse_functions, parse_instance, read_source, Instance, ModeKind, ModeOverrides};
use dcs_core::maps::SelfMap;
use dcs_core::real::{format_real, parse_real, to_f64, ExtReal, Real};
use dcs_core::solver::{
    brute_force_fixed_points, gap_decay, power_map_reduction, solve_fixed_point, FixedPointResult, Lift, Mode,
    OrbitReport, SolveOptions,
};
use dcs_core::spaces::{jms_search, jms_witness, Coverage, DistanceSpace, FiniteSpace, Point};

use crate::report::{render, sha256_hex, Reply};
use crate::{Cli, Command, DeriveKind, RunArgs};

pub struct Rendered {
    pub affirmative: bool,
    pub text: String,
}

struct Loaded {
    inst: Instance,
    sha: String,
}

fn load(source: &str, seed: Option<u64>) -> Result<Loaded> {
    let text = read_source(source)?;
    let inst = parse_instance(&text, seed).with_context(|| format!("invalid instance {source}"))?;
    Ok(Loaded {
        inst,
        sha: sha256_hex(text.as_bytes()),
    })
}

fn load_functions(source: &str) -> Result<(Vec<(String, PiecewiseFn)>, String)> {
    let text = read_source(source)?;
    let fs = parse_functions(&text).with_context(|| format!("invalid function file {source}"))?;
    Ok((fs, sha256_hex(text.as_bytes())))
}

pub fn dispatch(cli: &Cli) -> Result<Rendered> {
    let (name, inputs, seed, reply) = match &cli.command {
        Command::Classify { instance, radius } => {
            let l = load(instance, cli.seed)?;
            let reply = classify(&l.inst, radius.as_deref())?;
            ("classify", vec![l.sha], Some(l.inst.seed), reply)
        }
        Command::CheckFn { file } => {
            let (fs, sha) = load_functions(file)?;
            ("check-fn", vec![sha], None, check_fn(&fs))
        }
        Command::Envelope { file } => {
            let (fs, sha) = load_functions(file)?;
            let out: Vec<_> = fs.iter().map(|(n, f)| (n.clone(), monotone_envelope(f))).collect();
            ("envelope", vec![sha], None, functions_reply(&out))
        }
        Command::Combine { files } => {
            let mut all = Vec::new();
            let mut shas = Vec::new();
            for f in files {
                let (fs, sha) = load_functions(f)?;
                all.extend(fs.into_iter().map(|(_, f)| f));
                shas.push(sha);
            }
            let combined = max_combine(&all)?;
            ("combine", shas, None, functions_reply(&[("max".into(), combined)]))
        }
        Command::Solve { instance, run, gaps_csv } => {
            let l = load(instance, cli.seed)?;
            let reply = solve(&l.inst, run, gaps_csv.as_deref())?;
            ("solve", vec![l.sha], Some(l.inst.seed), reply)
        }
        Command::Oracle { instance } => {
            let l = load(instance, cli.seed)?;
            ("oracle", vec![l.sha], None, oracle(&l.inst)?)
        }
        Command::Derive { instance, kind, n } => {
            let l = load(instance, cli.seed)?;
            ("derive", vec![l.sha], None, derive(&l.inst, *kind, *n)?)
        }
        Command::Power { instance, l: lp, run } => {
            let l = load(instance, cli.seed)?;
            let reply = power(&l.inst, *lp, run)?;
            ("power", vec![l.sha], Some(l.inst.seed), reply)
        }
    };
    Ok(Rendered {
        affirmative: reply.affirmative,
        text: render(cli.format, name, &inputs, seed, &reply),
    })
}

/// The serialized (snake_case) name of a unit enum value.
fn tag<T: serde::Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(Value::String(s)) => s,
        _ => String::new(),
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "holds"
    } else {
        "fails"
    }
}

fn coverage_text(c: &Coverage) -> String {
    match c {
        Coverage::Exhaustive => "exhaustive".into(),
        Coverage::Sampled { seed, count } => format!("sampled, seed {seed}, {count} samples"),
    }
}

/// Points of an analytic space's sample, or the finite space itself.
fn checked_points(inst: &Instance) -> Result<(FiniteSpace, Coverage)> {
    Ok(match &inst.space {
        DistanceSpace::Finite(s) => (s.clone(), Coverage::Exhaustive),
        DistanceSpace::Analytic(a) => {
            let sampler = inst.sampler();
            let pts = sampler.sample_points(a.domain());
            let cov = Coverage::Sampled {
                seed: sampler.seed,
                count: pts.len(),
            };
            (a.restrict(&pts)?, cov)
        }
    })
}

fn classify(inst: &Instance, radius: Option<&str>) -> Result<Reply> {
    let sampler = inst.sampler();
    let axioms = inst.space.classify(&sampler)?;
    let (pts, cov) = checked_points(inst)?;
    let w3 = pts.check_w3();
    let w3_witness = w3.witness.map(|t| t.map(|i| pts.label(i).to_string()));
    let radii: Vec<Real> = match (radius, &inst.space) {
        (Some(r), _) => vec![parse_real(r)?],
        (None, DistanceSpace::Finite(s)) => s.realized_positive_distances(),
        (None, DistanceSpace::Analytic(_)) => vec![Real::from_integer(1.into())],
    };
    let jms = radii
        .iter()
        .map(|r| jms_witness(&inst.space, r, None, &sampler))
        .collect::<Result<Vec<_>, _>>()?;
    // a pair that passes even where (r/2, R) hits the equality case
    let pair = jms_search(&pts);

    let mut text = format!("taxonomy: {} ({})\n", axioms.taxonomy.name(), coverage_text(&axioms.coverage));
    for (name, a) in [("A0", &axioms.a0), ("A1", &axioms.a1), ("A2", &axioms.a2), ("A3", &axioms.a3)] {
        let _ = write!(text, "{name} {}", yes_no(a.holds));
        if let Some(w) = &a.witness {
            let _ = write!(text, " at ({})", w.join(", "));
        }
        text.push('\n');
    }
    let _ = write!(text, "W3 {}", yes_no(w3.holds));
    if let Some(w) = &w3_witness {
        let _ = write!(text, ": d({0},{1}) = d({0},{2}) = 0", w[0], w[1], w[2]);
    }
    text.push('\n');
    for w in &jms {
        let big_r = match &w.big_r {
            ExtReal::Finite(v) => format_real(v),
            ExtReal::Infinity => "inf".into(),
        };
        let _ = write!(text, "JMS r={} R={big_r}: ", format_real(&w.r));
        match (&w.delta, &w.eta, &w.violation) {
            (Some(d), Some(e), _) => {
                let _ = writeln!(text, "δ={d} η={e} verified");
            }
            (_, _, Some(v)) => {
                let _ = writeln!(text, "candidate violated by ({})", v.join(", "));
            }
            _ => {
                let _ = writeln!(text, "{}", w.note.as_deref().unwrap_or("no candidate"));
            }
        }
    }
    match &pair {
        Some(p) => {
            let raised = if p.raised { " (η raised above R)" } else { "" };
            let _ = writeln!(text, "JMS pair δ={} η={}{raised}", format_real(&p.delta), format_real(&p.eta));
        }
        None => text.push_str("JMS pair: none found\n"),
    }

    let body = json!({
        "taxonomy": axioms.taxonomy,
        "axioms": axioms,
        "w3": {"holds": w3.holds, "witness": w3_witness, "coverage": cov},
        "jms": jms,
        "jms_pair": {"pair": pair, "coverage": cov},
    });
    Ok(Reply {
        affirmative: axioms.taxonomy != dcs_core::spaces::Taxonomy::None,
        body,
        text,
    })
}

fn check_fn(fs: &[(String, PiecewiseFn)]) -> Reply {
    let mut all = true;
    let mut text = String::new();
    let mut reports = Vec::new();
    for (name, f) in fs {
        let phi = check_phi_membership(f);
        let bw = check_boyd_wong(f);
        let pas = check_pasicki(f);
        let mat = check_matkowski(f, &DEFAULT_PROBES, 10_000, 1e-9);
        all &= phi.verdict;
        let at = |w: &Option<Real>| w.as_ref().map(|v| format!(" (s={})", format_real(v))).unwrap_or_default();
        let _ = writeln!(
            text,
            "{name}: Φ {}, Boyd–Wong {}{}, Pasicki {}{}, Matkowski {}",
            phi.verdict,
            bw.holds,
            if bw.holds { String::new() } else { at(&bw.witness) },
            pas.holds,
            if pas.holds { String::new() } else { at(&pas.witness) },
            mat.verdict
        );
        reports.push(json!({
            "name": name,
            "comparison": check_comparison(f),
            "phi": phi,
            "boyd_wong": bw,
            "pasicki": pas,
            "monotone": check_monotone(f),
            "matkowski": mat,
        }));
    }
    Reply {
        affirmative: all,
        body: json!({ "functions": reports }),
        text,
    }
}

fn functions_reply(fs: &[(String, PiecewiseFn)]) -> Reply {
    let mut text = String::new();
    for (name, f) in fs {
        let _ = writeln!(text, "{name}:");
        let segs = f.segments();
        for (i, s) in segs.iter().enumerate() {
            let end = segs.get(i + 1).map(|n| format_real(&n.start)).unwrap_or_else(|| "inf".into());
            let _ = writeln!(
                text,
                "  [{}, {end}): value {} at start, then {}·t + {}",
                format_real(&s.start),
                format_real(&s.at),
                format_real(&s.law.slope),
                format_real(&s.law.intercept)
            );
        }
    }
    let body = if fs.len() == 1 {
        serde_json::to_value(&fs[0].1).expect("serializable")
    } else {
        json!({ "functions": fs.iter().map(|(n, f)| (n.clone(), f)).collect::<std::collections::BTreeMap<_, _>>() })
    };
    Reply {
        affirmative: true,
        body,
        text,
    }
}

fn need_map(inst: &Instance) -> Result<&SelfMap> {
    inst.map.as_ref().ok_or_else(|| anyhow!("instance has no map"))
}

fn parse_point(space: &DistanceSpace, text: Option<&str>) -> Result<Point> {
    match (space, text) {
        (DistanceSpace::Finite(_), None) => Ok(Point::Index(0)),
        (DistanceSpace::Analytic(_), None) => Ok(Point::Real(0.0)),
        (DistanceSpace::Finite(s), Some(t)) => match s.index_of(t) {
            Ok(i) => Ok(Point::Index(i)),
            Err(_) => match t.parse::<usize>() {
                Ok(i) if i < s.len() => Ok(Point::Index(i)),
                _ => bail!("start `{t}` is neither a point label nor an index"),
            },
        },
        (DistanceSpace::Analytic(_), Some(t)) => {
            let x: f64 = t.parse().with_context(|| format!("start `{t}` is not a number"))?;
            if !x.is_finite() {
                bail!("start must be finite");
            }
            Ok(Point::Real(x))
        }
    }
}

fn point_json(space: &DistanceSpace, p: &Point) -> Value {
    match p {
        Point::Index(_) => Value::String(space.point_label(p)),
        Point::Real(x) => json!(x),
    }
}

fn mode_and_options(inst: &Instance, run: &RunArgs) -> Result<(Mode, SolveOptions)> {
    let overrides = ModeOverrides {
        kind: run.mode.as_deref().map(str::parse::<ModeKind>).transpose().map_err(|e| anyhow!(e))?,
        alpha: run.alpha.as_deref().map(parse_real).transpose()?,
        n: run.n,
    };
    let mode = inst.resolve_mode(&overrides)?;
    let mut opts = inst.solve_options();
    if let Some(t) = run.tol {
        opts.orbit.tol = t;
    }
    if let Some(m) = run.max_iter {
        opts.orbit.max_iter = m;
    }
    if let Some(w) = run.window {
        opts.orbit.window = w;
    }
    opts.force = run.force;
    opts.allow_non_phi = run.allow_non_phi;
    Ok((mode, opts))
}

fn orbit_json(space: &DistanceSpace, o: &OrbitReport) -> Value {
    json!({
        "start": o.orbit.first().map(|p| point_json(space, p)),
        "limit": o.limit.as_ref().map(|p| point_json(space, p)),
        "iterations": o.iterations,
        "stop_reason": o.stop_reason,
        "converged": o.converged,
        "forward_residual": o.forward_residual,
        "backward_residual": o.backward_residual,
    })
}

fn result_json(space: &DistanceSpace, mode: &Mode, r: &FixedPointResult) -> Value {
    let orbit = r.orbit.as_ref();
    let decay = orbit
        .filter(|_| r.certified && mode.bounds_each_gap())
        .map(|o| gap_decay(space, o, &mode.governing()));
    json!({
        "mode": r.mode,
        "fixed_point": r.fixed_point.as_ref().map(|p| point_json(space, p)),
        "iterations": orbit.map(|o| o.iterations),
        "stop_reason": orbit.map(|o| o.stop_reason),
        "forward_residual": orbit.and_then(|o| o.forward_residual),
        "backward_residual": orbit.and_then(|o| o.backward_residual),
        "outcome": r.outcome,
        "certified": r.certified,
        "hypothesis": r.hypothesis,
        "premises": r.premises,
        "uniqueness": r.uniqueness,
        "oracle": r.oracle.as_ref().map(|o| o.iter().map(|&i| space.point_label(&Point::Index(i))).collect::<Vec<_>>()),
        "second_orbit": r.second_orbit.as_ref().map(|o| orbit_json(space, o)),
        "gap_decay": decay.map(|d| json!({"holds": d.holds, "checked": d.checked, "violations": d.violations})),
    })
}

fn result_text(space: &DistanceSpace, r: &FixedPointResult) -> String {
    let mut t = format!(
        "mode {}: hypothesis {} (worst margin {}, {})\n",
        r.mode,
        yes_no(r.hypothesis.holds),
        to_f64(&r.hypothesis.worst_margin),
        coverage_text(&r.hypothesis.coverage)
    );
    for note in &r.hypothesis.notes {
        let _ = writeln!(t, "  note: {note}");
    }
    for p in &r.premises {
        let _ = write!(t, "premise {} {}", p.name, yes_no(p.holds));
        if let Some(d) = &p.detail {
            let _ = write!(t, ": {d}");
        }
        t.push('\n');
    }
    let _ = writeln!(t, "outcome: {}, certified: {}", tag(&r.outcome), r.certified);
    if let Some(o) = &r.orbit {
        let _ = writeln!(t, "iterations: {}, stop: {}", o.iterations, tag(&o.stop_reason));
        if let Some(res) = o.forward_residual {
            let _ = writeln!(t, "forward residual: {res:e}");
        }
    }
    match &r.fixed_point {
        Some(p) => {
            let _ = writeln!(t, "fixed point: {}", space.point_label(p));
        }
        None => t.push_str("fixed point: none\n"),
    }
    let uniqueness = serde_json::to_value(r.uniqueness).expect("enum");
    let _ = writeln!(t, "uniqueness: {}", uniqueness.as_str().unwrap_or_default());
    t
}

fn solve(inst: &Instance, run: &RunArgs, gaps_csv: Option<&str>) -> Result<Reply> {
    let f = need_map(inst)?;
    let (mode, opts) = mode_and_options(inst, run)?;
    let x0 = parse_point(&inst.space, run.from.as_deref())?;
    let r = solve_fixed_point(&inst.space, f, &mode, &x0, &opts)?;
    if let Some(path) = gaps_csv {
        let csv = r.orbit.as_ref().map(OrbitReport::gaps_csv).unwrap_or_else(|| "n,a_n,c_n\n".into());
        std::fs::write(path, csv).with_context(|| format!("cannot write {path}"))?;
    }
    Ok(Reply {
        affirmative: r.outcome == dcs_core::solver::Outcome::Converged,
        body: result_json(&inst.space, &mode, &r),
        text: result_text(&inst.space, &r),
    })
}

fn oracle(inst: &Instance) -> Result<Reply> {
    let s = inst.space.as_finite().ok_or_else(|| anyhow!("the oracle needs a finite space"))?;
    let img = need_map(inst)?.image().ok_or_else(|| anyhow!("the oracle needs a finite map"))?;
    let fixed: Vec<String> = brute_force_fixed_points(s, img).into_iter().map(|i| s.label(i).to_string()).collect();
    let text = format!("fixed points: {{{}}}\n", fixed.join(", "));
    Ok(Reply {
        affirmative: fixed.len() == 1,
        body: json!({ "fixed_points": fixed, "unique": fixed.len() == 1 }),
        text,
    })
}

fn derive(inst: &Instance, kind: DeriveKind, n: usize) -> Result<Reply> {
    let s = inst.space.as_finite().ok_or_else(|| anyhow!("derived spaces are built on finite spaces"))?;
    let img = need_map(inst)?.image().ok_or_else(|| anyhow!("derived spaces need a finite map"))?;
    let derived = match kind {
        DeriveKind::Star => star_space(s, img)?,
        DeriveKind::OrbitMax => orbit_max_space(s, img, None, n)?,
    };
    let rep = verify_inheritance(&derived);
    let mut text = String::from("derived distance:\n");
    for (i, row) in derived.space.matrix().iter().enumerate() {
        let cells: Vec<String> = row.iter().map(format_real).collect();
        let _ = writeln!(text, "  {}: [{}]", derived.space.label(i), cells.join(", "));
    }
    for (name, c) in [
        ("domination", &rep.domination),
        ("w3 transfer", &rep.w3_transfer),
        ("jms", &rep.jms),
        ("cauchy transfer", &rep.cauchy_transfer),
    ] {
        let _ = write!(text, "{name} {}", yes_no(c.holds));
        if let Some(ce) = &c.counterexample {
            let _ = write!(text, ": {ce}");
        }
        text.push('\n');
    }
    Ok(Reply {
        affirmative: rep.all_hold,
        body: json!({ "derived": DerivedSpaceJson::from(&derived), "inheritance": rep }),
        text,
    })
}

fn power(inst: &Instance, l: usize, run: &RunArgs) -> Result<Reply> {
    let f = need_map(inst)?;
    let (mode, opts) = mode_and_options(inst, run)?;
    let x0 = parse_point(&inst.space, run.from.as_deref())?;
    let rep = power_map_reduction(&inst.space, f, l, &mode, &x0, &opts)?;
    let space = &inst.space;
    let labels = |v: &Vec<usize>| v.iter().map(|&i| space.point_label(&Point::Index(i))).collect::<Vec<_>>();
    let (lift, text) = match &rep.lift {
        Lift::Lifted {
            fixed_point,
            forward_residual,
            backward_residual,
            f_orbit,
            subsample_consistent,
        } => (
            json!({
                "status": "lifted",
                "fixed_point": point_json(space, fixed_point),
                "forward_residual": forward_residual,
                "backward_residual": backward_residual,
                "f_orbit": orbit_json(space, f_orbit),
                "subsample_consistent": subsample_consistent,
            }),
            format!(
                "f^{l} fixed point lifted: {} (residual {forward_residual:e}); f-orbit stopped by {} after {} iterations\n",
                space.point_label(fixed_point),
                tag(&f_orbit.stop_reason),
                f_orbit.iterations
            ),
        ),
        Lift::LiftFailure { reason } => (
            json!({ "status": "lift_failure", "reason": reason }),
            format!("lift failure: {reason}\n"),
        ),
    };
    let body = json!({
        "l": rep.l,
        "power_oracle": rep.power_oracle.as_ref().map(labels),
        "power_result": rep.power_result.as_ref().map(|r| result_json(space, &mode, r)),
        "lift": lift,
    });
    Ok(Reply {
        affirmative: rep.lifted_point().is_some(),
        body,
        text,
    })
}
