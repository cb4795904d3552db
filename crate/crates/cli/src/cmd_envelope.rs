use std::sync::Arc;

use pluripot_core::envelopes::{
    check_blocki_bounds, check_lemma21, check_lemma22, fit_index_certificate, green_function, random_close_pairs,
    relative_extremal, Ball, GridFunction, IndexCertificate, SolverOptions,
};
use pluripot_core::geometry::{DomainSpec, PlanarGridDomain};
use pluripot_core::report::{num, Report};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::io::{usage, value, CliResult, Ctx, Outcome};
use crate::parse::{complex, domain};

fn grid(spec: &DomainSpec, h: f64) -> CliResult<Arc<PlanarGridDomain>> {
    if !(h > 0.0) {
        return Err(usage("--h must be positive"));
    }
    Ok(Arc::new(PlanarGridDomain::rasterize(spec, h)?))
}

fn opts(tol: f64) -> SolverOptions {
    SolverOptions { tol, ..Default::default() }
}

fn summary(f: &GridFunction) -> Value {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut count = 0usize;
    for (_, v) in f.inside_values() {
        if v.is_finite() {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        count += 1;
    }
    json!({
        "kind": value(&f.kind),
        "h": num(f.domain.spacing),
        "inside_nodes": count,
        "min": num(lo),
        "max": num(hi),
        "sweeps": f.sweeps,
        "residual": num(f.tolerance),
    })
}

pub fn extremal(ctx: &Ctx, dom: &str, ball: &str, h: f64, tol: f64) -> CliResult<Outcome> {
    let spec = domain(ctx, dom)?;
    let ball = Ball::parse(ball)?;
    if ctx.dry_run {
        return Ok(Outcome::dry("envelope extremal", json!({"domain": value(&spec), "ball": value(&ball), "h": h})));
    }
    let d = grid(&spec, h)?;
    let rho = relative_extremal(&d, ball, &opts(tol))?;
    let table = rho.to_table();
    Ok(Outcome::info(Report::with_table(summary(&rho), table)).tol("solver_residual", tol))
}

pub fn green(ctx: &Ctx, dom: &str, pole: &str, h: f64, tol: f64) -> CliResult<Outcome> {
    let spec = domain(ctx, dom)?;
    let w = complex(pole)?;
    if ctx.dry_run {
        return Ok(Outcome::dry("envelope green", json!({"domain": value(&spec), "pole": [w.re, w.im], "h": h})));
    }
    let d = grid(&spec, h)?;
    let g = green_function(&d, w, &opts(tol))?;
    let table = g.to_table();
    Ok(Outcome::info(Report::with_table(summary(&g), table)).tol("solver_residual", tol))
}

/// Parameters of `envelope check`, all optional.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CheckParams {
    #[serde(default)]
    domain: Option<Value>,
    #[serde(default = "default_h")]
    h: f64,
    #[serde(default = "default_ball")]
    ball: String,
    #[serde(default = "default_w")]
    w: String,
    #[serde(default = "default_eps")]
    eps: f64,
    #[serde(default)]
    diameter: Option<f64>,
    #[serde(default = "default_r")]
    r: f64,
    #[serde(default = "default_pairs")]
    pairs: usize,
    #[serde(default = "default_max_dist")]
    max_dist: f64,
    #[serde(default)]
    certificate: Option<IndexCertificate>,
    #[serde(default = "default_alpha")]
    alpha: f64,
    #[serde(default)]
    levels: Vec<f64>,
    #[serde(default = "default_tol")]
    tol: f64,
    #[serde(default = "default_solver_tol")]
    solver_tol: f64,
}

fn default_h() -> f64 {
    0.01
}
fn default_ball() -> String {
    "0,0.5".into()
}
fn default_w() -> String {
    "0".into()
}
fn default_eps() -> f64 {
    0.1
}
fn default_r() -> f64 {
    1.5
}
fn default_pairs() -> usize {
    200
}
fn default_max_dist() -> f64 {
    1.0 / 64.0
}
fn default_alpha() -> f64 {
    1.0
}
fn default_tol() -> f64 {
    1e-3
}
fn default_solver_tol() -> f64 {
    1e-8
}

fn check_domain(ctx: &Ctx, v: &Option<Value>) -> CliResult<DomainSpec> {
    match v {
        None => Ok(DomainSpec::unit_disk()),
        Some(Value::String(s)) => domain(ctx, s),
        Some(obj) => {
            let spec: DomainSpec =
                serde_json::from_value(obj.clone()).map_err(|e| usage(format!("malformed domain: {e}")))?;
            spec.validate()?;
            Ok(spec)
        }
    }
}

pub fn check(ctx: &Ctx, lemma: &str, params: Option<&str>) -> CliResult<Outcome> {
    let p: CheckParams = match params {
        Some(s) => ctx.load_json("params", s)?,
        None => serde_json::from_value(json!({})).expect("defaults"),
    };
    let spec = check_domain(ctx, &p.domain)?;
    if !["2.1", "2.2", "blocki"].contains(&lemma) {
        return Err(usage(format!("unknown check '{lemma}', use 2.1, 2.2 or blocki")));
    }
    let ball = Ball::parse(&p.ball)?;
    let w = complex(&p.w)?;
    if ctx.dry_run {
        return Ok(Outcome::dry("envelope check", json!({"lemma": lemma, "domain": value(&spec), "h": p.h})));
    }
    let d = grid(&spec, p.h)?;
    let o = opts(p.solver_tol);
    let echo = json!({"h": p.h, "tol": p.tol, "seed": ctx.seed});
    let (mut j, pass) = match lemma {
        "2.1" => {
            let rho = relative_extremal(&d, ball, &o)?;
            let cert = match p.certificate {
                Some(c) => c,
                None => fit_index_certificate(&rho)?,
            };
            let pairs = random_close_pairs(&d, p.pairs, p.max_dist, ctx.seed);
            let rep = check_lemma21(&rho, p.r, &pairs, Some(cert), p.tol)?;
            let pass = rep.violations == 0;
            let mut j = value(&rep);
            j["params"] = json!({"ball": value(&ball), "r": p.r, "pairs": p.pairs, "max_dist": p.max_dist});
            (j, pass)
        }
        "2.2" => {
            let rho = relative_extremal(&d, ball, &o)?;
            let g = green_function(&d, w, &o)?;
            let rep = check_lemma22(&rho, &g, p.alpha, &p.levels)?;
            let pass = rep.constant.is_finite();
            let mut j = value(&rep);
            j["max_violation"] = num(if pass { 0.0 } else { f64::INFINITY });
            j["params"] = json!({"ball": value(&ball), "alpha": p.alpha, "levels": p.levels});
            (j, pass)
        }
        _ => {
            let rep = check_blocki_bounds(&d, w, p.eps, p.diameter, &o)?;
            let pass = rep.max_violation <= p.tol;
            let mut j = value(&rep);
            j["params"] = json!({"eps": p.eps, "diameter": p.diameter});
            (j, pass)
        }
    };
    j["lemma"] = json!(lemma);
    j["settings"] = echo;
    j["pass"] = json!(pass);
    Ok(Outcome::checked(Report::new(j), pass).tol("violation", p.tol).tol("solver_residual", p.solver_tol))
}
