use std::sync::Arc;

use pluripot_core::geometry::HartogsProfileDomain;
use pluripot_core::orlicz_bergman::{
    annulus_exhaustion, annulus_samples, default_scan_levels, disk_kernel_closed, disk_obstacle_rho, disk_samples,
    dyadic_orlicz_certifier, hartogs_samples, lemma41_integrals, luxemburg_norm, sublevel_integral_scan,
    FunctionSpec, HartogsSampling, KernelApprox, KernelDomain, OrliczParams, ReciprocalOnHartogs, SampledFunction,
};
use pluripot_core::report::{fmt_g17, num, Report, Table};
use pluripot_core::Error;
use serde_json::json;

use crate::io::{usage, value, CliResult, Ctx, Outcome};
use crate::parse::{complex, complex_pair, reals};

/// Sampling domain for `orlicz norm`.
enum NormDomain {
    Planar { inner: f64 },
    Hartogs(HartogsProfileDomain),
}

fn norm_domain(s: &str) -> CliResult<NormDomain> {
    if s == "disk" {
        return Ok(NormDomain::Planar { inner: 0.0 });
    }
    if let Some(r) = s.strip_prefix("annulus:") {
        let inner: f64 = r.parse().map_err(|_| usage(format!("bad annulus radius '{r}'")))?;
        if !(inner > 0.0 && inner < 1.0) {
            return Err(usage("annulus radius must lie in (0, 1)"));
        }
        return Ok(NormDomain::Planar { inner });
    }
    if let Some(t) = s.strip_prefix("hartogs:") {
        let s: f64 = t.parse().map_err(|_| usage(format!("bad cusp exponent '{t}'")))?;
        return Ok(NormDomain::Hartogs(HartogsProfileDomain::with_default_eps(s)?));
    }
    Err(usage(format!("unknown domain '{s}', use disk, annulus:R or hartogs:S")))
}

/// Rejects functions whose singularity at a point of the closed disk makes
/// `|f|^p` non-integrable.
fn planar_membership(f: &FunctionSpec, inner: f64, p: f64) -> Result<(), Error> {
    let bad = |m: String| Err(Error::NotInOrlicz(m));
    if inner == 0.0 {
        if let Some(l) = f.laurent() {
            if let Some(m) = l.min_power() {
                if p * (m as f64) <= -2.0 {
                    return bad(format!("z^{m} is not in L^{p} near 0"));
                }
            }
        }
    }
    if let FunctionSpec::PolePower { center, a } = f {
        let r = center.norm();
        if r >= inner && r <= 1.0 && p * a >= 2.0 {
            return bad(format!("(center - z)^-{a} is not in L^{p} near the pole"));
        }
    }
    Ok(())
}

pub fn norm(ctx: &Ctx, f: &str, p: f64, q: f64, dom: &str, n_r: usize, n_phi: usize) -> CliResult<Outcome> {
    let spec: FunctionSpec = ctx.load_json("function", f)?;
    let params = OrliczParams::new(p, q)?;
    let d = norm_domain(dom)?;
    if n_r == 0 || n_phi == 0 {
        return Err(usage("--nr and --nphi must be positive"));
    }
    if ctx.dry_run {
        return Ok(Outcome::dry("orlicz norm", json!({"function": value(&spec), "p": p, "q": q, "domain": dom})));
    }
    let mut j = json!({"function": value(&spec), "p": num(p), "q": num(q), "domain": dom});
    let result = match &d {
        NormDomain::Hartogs(h) => match (&spec, p == 2.0) {
            (FunctionSpec::ReciprocalZ { coeff }, true) => {
                let r = ReciprocalOnHartogs { domain: h.clone() };
                j["method"] = json!("fiber-quadrature");
                luxemburg_norm(&r, &params).map(|n| n * coeff.norm())
            }
            _ => {
                let grid = Arc::new(hartogs_samples(h, &HartogsSampling::default())?);
                j["method"] = json!("hartogs-samples");
                j["samples"] = json!(grid.len());
                let sf = SampledFunction::from_z(&grid, |z| spec.eval(z));
                luxemburg_norm(&sf, &params)
            }
        },
        NormDomain::Planar { inner } => {
            let grid = Arc::new(if *inner == 0.0 {
                disk_samples(1.0, n_r, n_phi)?
            } else {
                annulus_samples(*inner, 1.0, n_r, n_phi)?
            });
            j["method"] = json!("polar-product-rule");
            j["samples"] = json!(grid.len());
            planar_membership(&spec, *inner, p).and_then(|_| {
                let sf = SampledFunction::from_z(&grid, |z| spec.eval(z));
                j["sup"] = num(sf.sup());
                luxemburg_norm(&sf, &params)
            })
        }
    };
    match result {
        Ok(n) => {
            j["norm"] = num(n);
            j["in_class"] = json!(true);
        }
        Err(Error::NotInOrlicz(reason)) => {
            j["norm"] = num(f64::INFINITY);
            j["in_class"] = json!(false);
            j["reason"] = json!(reason);
        }
        Err(e) => return Err(e.into()),
    }
    Ok(Outcome::info(Report::new(j)))
}

pub fn lemma41(ctx: &Ctx, s: f64, q: f64, eps: &str) -> CliResult<Outcome> {
    let eps = reals(eps)?;
    let dom = HartogsProfileDomain::with_default_eps(s)?;
    if ctx.dry_run {
        return Ok(Outcome::dry("orlicz lemma41", json!({"s": s, "q": q, "eps": eps})));
    }
    let rep = lemma41_integrals(&dom, q, &eps)?;
    let mut t = Table::new(&["eps", "j", "j_collar", "j_majorant", "l", "l_minorant"]);
    for r in &rep.rows {
        t.push([r.eps, r.j, r.j_collar, r.j_majorant, r.l, r.l_minorant].iter().map(|x| fmt_g17(*x)).collect());
    }
    let pass = rep.pass;
    Ok(Outcome::checked(Report::with_table(value(&rep), t), pass).tol("exponent", 0.05).tol("j_variation", 0.01))
}

fn kernel_for(dom: KernelDomain, order: Option<usize>) -> CliResult<KernelApprox> {
    Ok(match order {
        Some(m) => KernelApprox::new(dom, m)?,
        None => KernelApprox::with_default_order(dom),
    })
}

pub fn kernel(ctx: &Ctx, dom: &str, order: Option<usize>, probe: &str, auto: bool) -> CliResult<Outcome> {
    let d = KernelDomain::parse(dom)?;
    let (z, w) = complex_pair(probe)?;
    if ctx.dry_run {
        return Ok(Outcome::dry("bergman kernel", json!({"domain": value(&d), "order": order, "auto": auto})));
    }
    let (k, auto_rep) = if auto {
        let (k, a) = KernelApprox::auto(d, &[(z, w)])?;
        (k, Some(a))
    } else {
        (kernel_for(d, order)?, None)
    };
    let v = k.eval(z, w)?;
    let mut j = json!({
        "domain": value(&d),
        "order": k.order,
        "z": [num(z.re), num(z.im)],
        "w": [num(w.re), num(w.im)],
        "value": [num(v.value.re), num(v.value.im)],
        "tail": num(v.tail),
        "slow_convergence": v.slow_convergence,
    });
    if let Some(a) = auto_rep {
        j["auto"] = value(&a);
    }
    if d == KernelDomain::Disk {
        let c = disk_kernel_closed(z, w);
        j["closed_form"] = json!([num(c.re), num(c.im)]);
        j["closed_form_error"] = num((c - v.value).norm());
    }
    Ok(Outcome::info(Report::new(j)))
}

pub fn scan(
    ctx: &Ctx,
    dom: &str,
    pole: &str,
    obstacle: f64,
    eps: Option<&str>,
    order: Option<usize>,
    r_fit: bool,
) -> CliResult<Outcome> {
    let d = KernelDomain::parse(dom)?;
    let w = complex(pole)?;
    let eps = match eps {
        Some(s) => reals(s)?,
        None => default_scan_levels(),
    };
    if d == KernelDomain::Disk && !(obstacle > 0.0 && obstacle < 1.0) {
        return Err(usage("--obstacle must lie in (0, 1)"));
    }
    if ctx.dry_run {
        return Ok(Outcome::dry("bergman scan", json!({"domain": value(&d), "eps": eps})));
    }
    let k = kernel_for(d, order)?;
    let rep = match d {
        KernelDomain::Disk => sublevel_integral_scan(&k, &disk_obstacle_rho(obstacle), w, &eps)?,
        KernelDomain::Annulus { inner } => sublevel_integral_scan(&k, &annulus_exhaustion(inner), w, &eps)?,
    };
    let mut t = Table::new(&["eps", "integral", "usable"]);
    for r in &rep.rows {
        t.push(vec![fmt_g17(r.eps), fmt_g17(r.integral), r.usable.to_string()]);
    }
    let mut j = value(&rep);
    j["rho"] = match d {
        KernelDomain::Disk => json!({"kind": "disk_obstacle", "radius": num(obstacle)}),
        KernelDomain::Annulus { .. } => json!({"kind": "annulus_exhaustion"}),
    };
    if !r_fit {
        let m = j.as_object_mut().expect("object");
        m.remove("r_fit");
        m.remove("c_fit");
    }
    Ok(Outcome::info(Report::with_table(j, t)))
}

pub fn dyadic(ctx: &Ctx, c: f64, alpha: f64, r: f64, q: f64, k0: i64, k_max: i64) -> CliResult<Outcome> {
    if ctx.dry_run {
        return Ok(Outcome::dry("bergman dyadic", json!({"C": c, "alpha": alpha, "r": r, "q": q})));
    }
    let rep = dyadic_orlicz_certifier((c, alpha, r), q, k0, k_max)?;
    let mut t = Table::new(&["k", "partial_sum"]);
    for (i, s) in rep.partial_sums.iter().enumerate() {
        t.push(vec![(k0 + i as i64).to_string(), fmt_g17(*s)]);
    }
    Ok(Outcome::info(Report::with_table(value(&rep), t)))
}
