use pluripot_core::capacity::{
    carleson_totik_set, gamma_density_set, interval_capacity, log_capacity, verify_example5, DensityIndexReport,
    DiskSetSlicer, Example5Config, PlanarCompact, DENSITY_NODES,
};
use pluripot_core::geometry::{appendix_set, DomainSpec, IntervalUnionSet, APPENDIX_TERMS};
use pluripot_core::report::{fmt_g17, num, Report, Table};
use serde_json::{json, Value};

use crate::io::{usage, value, CliResult, Ctx, Outcome};
use crate::parse::{complex, domain};

pub enum SetInput {
    Intervals(IntervalUnionSet),
    Compact(PlanarCompact),
}

impl SetInput {
    fn compact(&self) -> PlanarCompact {
        match self {
            SetInput::Intervals(s) => PlanarCompact::from(s),
            SetInput::Compact(c) => c.clone(),
        }
    }
}

/// `{"intervals": [[l, r], ...], "points": [...]}` or `{"components": [...]}`.
pub fn load_set(ctx: &Ctx, arg: &str) -> CliResult<SetInput> {
    let v: Value = ctx.load_json("set", arg)?;
    if v.get("components").is_some() {
        let c: PlanarCompact = serde_json::from_value(v).map_err(|e| usage(format!("malformed set: {e}")))?;
        Ok(SetInput::Compact(c))
    } else {
        let s: IntervalUnionSet = serde_json::from_value(v).map_err(|e| usage(format!("malformed set: {e}")))?;
        Ok(SetInput::Intervals(IntervalUnionSet::new(s.intervals, s.points)?))
    }
}

pub fn eval(ctx: &Ctx, set: &str, nodes: usize) -> CliResult<Outcome> {
    let set = load_set(ctx, set)?;
    if nodes < 16 {
        return Err(usage("--nodes must be at least 16"));
    }
    if ctx.dry_run {
        return Ok(Outcome::dry("capacity eval", json!({"nodes": nodes})));
    }
    let sol = log_capacity(&set.compact(), nodes)?;
    let mut table = Table::new(&["k", "re", "im", "weight"]);
    for (k, (z, w)) in sol.nodes.iter().zip(&sol.weights).enumerate() {
        table.push(vec![k.to_string(), fmt_g17(z.re), fmt_g17(z.im), fmt_g17(*w)]);
    }
    let mut j = value(&sol);
    j["energy"] = num(sol.energy);
    j["nodes"] = json!(nodes);
    if let SetInput::Intervals(s) = &set {
        if s.intervals.len() == 1 && s.points.is_empty() {
            let (l, r) = s.intervals[0];
            j["interval_closed_form"] = num(interval_capacity(r - l)?);
        }
    }
    Ok(Outcome::info(Report::with_table(j, table)))
}

pub fn density_table(rep: &DensityIndexReport) -> Table {
    let mut t = Table::new(&["n", "slice_capacity", "threshold", "member"]);
    for r in &rep.rows {
        t.push(vec![r.n.to_string(), fmt_g17(r.slice_capacity), fmt_g17(r.threshold), r.member.to_string()]);
    }
    t
}

#[allow(clippy::too_many_arguments)]
pub fn density(
    ctx: &Ctx,
    def: &str,
    a: &str,
    eps: f64,
    lambda: f64,
    gamma: f64,
    n_max: u32,
    set: Option<&str>,
    dom: Option<&str>,
    nodes: Option<usize>,
) -> CliResult<Outcome> {
    let a = complex(a)?;
    let nodes = nodes.unwrap_or(DENSITY_NODES);
    let rep = match def {
        "carleson" => {
            if a.im != 0.0 {
                return Err(usage("the Carleson-Totik index set needs a real point"));
            }
            let e = match set {
                Some(s) => match load_set(ctx, s)? {
                    SetInput::Intervals(e) => e,
                    SetInput::Compact(_) => return Err(usage("the Carleson-Totik index set needs an interval set")),
                },
                None => appendix_set(APPENDIX_TERMS),
            };
            if ctx.dry_run {
                return Ok(Outcome::dry("capacity density", json!({"def": def, "nmax": n_max})));
            }
            carleson_totik_set(&e, a.re, eps, n_max, nodes)?
        }
        "gamma" => {
            let spec = match dom {
                Some(d) => domain(ctx, d)?,
                None => DomainSpec::appendix_domain(APPENDIX_TERMS),
            };
            let slicer = DiskSetSlicer::from_spec(&spec)?;
            if ctx.dry_run {
                return Ok(Outcome::dry("capacity density", json!({"def": def, "nmax": n_max})));
            }
            gamma_density_set(&slicer, a, eps, lambda, gamma, n_max, nodes)?
        }
        other => return Err(usage(format!("unknown density definition '{other}', use carleson or gamma"))),
    };
    let table = density_table(&rep);
    Ok(Outcome::info(Report::with_table(value(&rep), table)))
}

pub fn example5(ctx: &Ctx, n_max: u32, samples: usize, nodes: Option<usize>) -> CliResult<Outcome> {
    let cfg = Example5Config { n_max, samples, nodes: nodes.unwrap_or(DENSITY_NODES), ..Default::default() };
    if n_max < 10 || samples < 3 {
        return Err(usage("need --nmax >= 10 and --samples >= 3"));
    }
    if ctx.dry_run {
        return Ok(Outcome::dry("verify example5", json!({"nmax": n_max, "samples": samples})));
    }
    let rep = verify_example5(&cfg)?;
    let mut t = Table::new(&["a_re", "a_im", "kind", "n", "slice_capacity", "threshold", "member"]);
    for s in &rep.samples {
        let kind = value(&s.kind)["kind"].as_str().unwrap_or("").to_string();
        for r in &s.density.rows {
            t.push(vec![
                fmt_g17(s.a.re),
                fmt_g17(s.a.im),
                kind.clone(),
                r.n.to_string(),
                fmt_g17(r.slice_capacity),
                fmt_g17(r.threshold),
                r.member.to_string(),
            ]);
        }
    }
    let pass = rep.pass;
    Ok(Outcome::checked(Report::with_table(value(&rep), t), pass).tol("bound_fraction", 0.95))
}
