use std::fmt::Write;

use serde_json::{json, Map, Value};

use loopnt::demo3::{BoundInfo, BoundaryReport, BoundarySimulation, Poly3, TauAudit};
use loopnt::exact::render_rational;
use loopnt::ntcore::Membership;
use loopnt::oracle::{Outcome, Violation};
use loopnt::{
    AnalysisReport, FuzzConfig, FuzzReport, LoopAnalysis, NtSet, QuadNum, Rational, SimResult, Vec2,
};

use crate::Ctx;

fn pair(v: &Vec2<QuadNum>) -> Value {
    json!([v.x1.to_string(), v.x2.to_string()])
}

fn rationals(x: &[Rational]) -> Value {
    Value::Array(
        x.iter()
            .map(|r| Value::String(render_rational(r)))
            .collect(),
    )
}

fn set_fields(nt: &NtSet, obj: &mut Map<String, Value>) {
    obj.insert("kind".into(), json!(nt.kind()));
    match nt {
        NtSet::Empty => {}
        NtSet::Ray { dir } => {
            obj.insert("dir".into(), pair(dir));
        }
        NtSet::Sector {
            right,
            left,
            right_closed,
            left_closed,
        } => {
            obj.insert("right".into(), pair(right));
            obj.insert("left".into(), pair(left));
            obj.insert("right_closed".into(), json!(right_closed));
            obj.insert("left_closed".into(), json!(left_closed));
        }
    }
}

fn report_json(r: &AnalysisReport) -> Value {
    let mut obj = Map::new();
    set_fields(&r.nt, &mut obj);
    obj.insert("case".into(), json!(r.case_tag.name()));
    let eigen = r
        .eigen
        .as_ref()
        .and_then(|e| e.eigenvalues.as_ref())
        .map(|(l1, l2)| json!([l1.to_string(), l2.to_string()]))
        .unwrap_or(Value::Null);
    obj.insert("eigenvalues".into(), eigen);
    let witnesses: Map<String, Value> = r
        .witnesses
        .iter()
        .map(|(name, v)| (name.clone(), pair(v)))
        .collect();
    obj.insert("witnesses".into(), Value::Object(witnesses));
    Value::Object(obj)
}

/// Single-row loops print the row report itself; conjunctions add the
/// intersected set on top, with case `Intersection` and the per-row reports.
pub fn analysis_json(a: &LoopAnalysis) -> Value {
    if a.rows.len() == 1 {
        return report_json(&a.rows[0]);
    }
    let mut obj = Map::new();
    set_fields(&a.nt, &mut obj);
    obj.insert("case".into(), json!("Intersection"));
    obj.insert("eigenvalues".into(), Value::Null);
    obj.insert("witnesses".into(), json!({}));
    obj.insert(
        "rows".into(),
        Value::Array(a.rows.iter().map(report_json).collect()),
    );
    Value::Object(obj)
}

fn report_text(out: &mut String, r: &AnalysisReport, indent: &str) {
    let _ = writeln!(out, "{indent}case: {}", r.case_tag);
    match r.eigen.as_ref().and_then(|e| e.eigenvalues.as_ref()) {
        Some((l1, l2)) => {
            let _ = writeln!(out, "{indent}eigenvalues: {l1}, {l2}");
        }
        None if r.eigen.is_some() => {
            let _ = writeln!(out, "{indent}eigenvalues: complex pair");
        }
        None => {}
    }
    for (name, v) in &r.witnesses {
        let _ = writeln!(out, "{indent}{name} = {v}");
    }
    let _ = writeln!(out, "{indent}NT: {}", r.nt);
}

pub fn analysis(ctx: &Ctx, a: &LoopAnalysis) -> String {
    if ctx.json {
        return format!("{}\n", analysis_json(a));
    }
    let mut out = String::new();
    if a.rows.len() == 1 {
        report_text(&mut out, &a.rows[0], "");
    } else {
        for (i, r) in a.rows.iter().enumerate() {
            let _ = writeln!(out, "guard row {}:", i + 1);
            report_text(&mut out, r, "  ");
        }
        let _ = writeln!(out, "NT (intersection): {}", a.nt);
    }
    out
}

pub fn membership(ctx: &Ctx, p: &Vec2<QuadNum>, m: &Membership) -> String {
    if ctx.json {
        let tests: Vec<Value> = m
            .tests
            .iter()
            .map(|t| {
                json!({
                    "normal": pair(&t.constraint.normal),
                    "strict": t.constraint.strict,
                    "value": t.value.to_string(),
                    "sign": t.sign.as_i8(),
                    "satisfied": t.satisfied,
                })
            })
            .collect();
        return format!(
            "{}\n",
            json!({ "point": pair(p), "member": m.member, "origin": m.is_origin, "tests": tests })
        );
    }
    let mut out = format!("{}\n", ctx.paint(&m.member.to_string(), m.member));
    if m.is_origin {
        out.push_str("  the origin is never in the set\n");
    }
    for t in &m.tests {
        let rel = if t.constraint.strict { ">" } else { ">=" };
        let _ = writeln!(
            out,
            "  {} . x = {} {} 0: {}",
            t.constraint.normal,
            t.value,
            rel,
            if t.satisfied { "holds" } else { "fails" }
        );
    }
    out
}

pub fn simulation(
    ctx: &Ctx,
    r: &SimResult,
    trace: Option<&(usize, Option<Vec<QuadNum>>)>,
) -> String {
    if ctx.json {
        let mut obj = json!({
            "outcome": match r.outcome {
                Outcome::Terminated => "terminated",
                Outcome::Survived => "survived",
            },
            "steps": r.steps,
            "conclusive": r.terminated(),
        });
        if let Some((len, last)) = trace {
            obj["trace_length"] = json!(len);
            obj["final_state"] = last
                .as_ref()
                .map(|s| Value::Array(s.iter().map(|x| Value::String(x.to_string())).collect()))
                .unwrap_or(Value::Null);
        }
        return format!("{obj}\n");
    }
    let mut out = format!("{}\n", ctx.paint(&r.to_string(), true));
    if let Some((len, Some(last))) = trace {
        let state: Vec<String> = last.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(out, "trace length: {len}");
        let _ = writeln!(out, "final state: ({})", state.join(", "));
    }
    out
}

fn violation_json(v: &Violation) -> Value {
    json!({
        "trial": v.trial,
        "loop": v.loop_text,
        "point": pair(&v.point),
        "check": format!("{:?}", v.check),
        "claimed_member": v.claim,
        "simulation": v.sim.map(|s| s.to_string()),
        "detail": v.detail,
    })
}

pub fn fuzz(ctx: &Ctx, cfg: &FuzzConfig, r: &FuzzReport) -> String {
    if ctx.json {
        return format!(
            "{}\n",
            json!({
                "trials": r.trials,
                "coeff_bound": cfg.coeff_bound,
                "points_per_loop": cfg.points_per_loop,
                "max_steps": cfg.max_steps,
                "seed": r.seed,
                "loops_generated": r.loops_generated,
                "points_checked": r.points_checked,
                "points_in_nt": r.points_in_nt,
                "points_terminated": r.points_terminated,
                "cases": r.cases,
                "violations": r.violations.iter().map(violation_json).collect::<Vec<_>>(),
            })
        );
    }
    let mut out = String::new();
    let _ = writeln!(
        out,
        "trials {} (seed {}, coefficients in [-{b}, {b}], {} points, {} steps)",
        r.trials,
        r.seed,
        cfg.points_per_loop,
        cfg.max_steps,
        b = cfg.coeff_bound
    );
    let _ = writeln!(
        out,
        "points checked {}: {} claimed in NT, {} terminated",
        r.points_checked, r.points_in_nt, r.points_terminated
    );
    for (case, n) in &r.cases {
        let _ = writeln!(out, "  {case}: {n}");
    }
    for v in r.violations.iter().take(20) {
        let _ = writeln!(
            out,
            "  violation {:?} trial {} point {} in `{}` {}",
            v.check, v.trial, v.point, v.loop_text, v.detail
        );
    }
    let verdict = format!("violations {}", r.violations.len());
    let _ = writeln!(out, "{}", ctx.paint(&verdict, r.passed()));
    out
}

pub fn p3_boundary(ctx: &Ctx, g: &BoundaryReport, s: &BoundarySimulation) -> String {
    let k = g.values.len();
    if ctx.json {
        return format!(
            "{}\n",
            json!({
                "guard_at_p0": render_rational(&g.guard_at_p0),
                "k_max": k,
                "all_positive": g.first_failure.is_none(),
                "first_failure": g.first_failure,
                "first_values": g.values.iter().take(10).map(|v| v.to_string()).collect::<Vec<_>>(),
                "simulated_points": s.checked,
                "simulation_steps": s.steps,
                "simulation_failures": s.failures.iter().map(|(n, r)| json!([n, r.to_string()])).collect::<Vec<_>>(),
            })
        );
    }
    let mut out = String::new();
    let _ = writeln!(
        out,
        "B . p0 = {} for p0 = (1, -1, 1)",
        render_rational(&g.guard_at_p0)
    );
    let first: Vec<String> = g.values.iter().take(5).map(|v| v.to_string()).collect();
    let ok = g.first_failure.is_none();
    let _ = writeln!(
        out,
        "2^k - 2*3^k + 5^k for k = 1..{k}: {} (first values {}, ...)",
        ctx.paint(
            if ok {
                "all positive"
            } else {
                "NOT all positive"
            },
            ok
        ),
        first.join(", ")
    );
    let _ = writeln!(
        out,
        "simulated p_n = (2^-n, -3^-n, 5^-n) for n = 0..{}: {} of {} survived {} steps",
        s.checked - 1,
        s.checked as usize - s.failures.len(),
        s.checked,
        s.steps
    );
    out.push_str(
        "checked: the guard stays >= 0 along every orbit above, exactly. \
         Not checked: that the points lie on the boundary of the non-termination \
         set, which has no finite description to test against.\n",
    );
    out
}

pub fn p3_poly(ctx: &Ctx, f: &Poly3, info: &BoundInfo, zeros: &[u32]) -> String {
    if ctx.json {
        return format!(
            "{}\n",
            json!({
                "poly": f.to_string(),
                "effective": info.effective.iter().map(|(c, t)| json!({"c": render_rational(c), "t": render_rational(t)})).collect::<Vec<_>>(),
                "bound": info.n,
                "audit_window": [info.n, info.n + 200],
                "zeros_in_window": zeros,
            })
        );
    }
    let mut out = String::new();
    let _ = writeln!(out, "f = {f}");
    for (c, t) in &info.effective {
        let _ = writeln!(
            out,
            "  c = {}, t = {}",
            render_rational(c),
            render_rational(t)
        );
    }
    let _ = writeln!(out, "N = {}", info.n);
    let ok = zeros.is_empty();
    let _ = writeln!(
        out,
        "f(p_n) for n = {}..{}: {}",
        info.n,
        info.n + 200,
        ctx.paint(
            if ok {
                "nonzero everywhere (exact)"
            } else {
                "ZERO FOUND"
            },
            ok
        )
    );
    if !ok {
        let _ = writeln!(out, "  zeros at n = {zeros:?}");
    }
    out
}

pub fn p3_tau(ctx: &Ctx, a: &TauAudit, steps: u64) -> String {
    if ctx.json {
        return format!(
            "{}\n",
            json!({
                "samples": a.samples,
                "steps": steps,
                "not_invariant": a.not_invariant.iter().map(|x| rationals(x)).collect::<Vec<_>>(),
                "terminated": a.terminated.iter().map(|x| rationals(x)).collect::<Vec<_>>(),
            })
        );
    }
    let ok = a.not_invariant.is_empty() && a.terminated.is_empty();
    format!(
        "tau = {{9(x1^2 + x2^2) < x3^2, x3 > 0}}: {} samples, {} not invariant, {} terminated within {} steps: {}\n",
        a.samples,
        a.not_invariant.len(),
        a.terminated.len(),
        steps,
        ctx.paint(if ok { "ok" } else { "FAILED" }, ok)
    )
}
