use pluripot_core::chain::{admissibility, chain_length, ChainParams, IndexLink};
use pluripot_core::envelopes::IndexCertificate;
use pluripot_core::report::{fmt_g17, num, Report, Table};
use serde_json::json;

use crate::io::{value, CliResult, Ctx, Outcome};

const CLOSED_FORM_TOL: f64 = 1e-10;

pub fn admissible(_ctx: &Ctx, n: u32, alpha: f64) -> CliResult<Outcome> {
    let a = admissibility(n, alpha)?;
    Ok(Outcome::info(Report::new(value(&a))))
}

pub struct RunArgs<'a> {
    pub n: u32,
    pub alpha: f64,
    pub beta: f64,
    pub c: f64,
    pub c1: f64,
    pub lambda: f64,
    pub l0: f64,
    pub c_alpha: Option<f64>,
    pub link_alpha: Option<f64>,
    pub certificate: Option<&'a str>,
    pub keep: usize,
}

pub fn run(ctx: &Ctx, a: &RunArgs) -> CliResult<Outcome> {
    let p = ChainParams::new(a.n, a.alpha, a.beta, a.c, a.c1)?;
    let mut link = p.default_link();
    if let Some(path) = a.certificate {
        let cert: IndexCertificate = ctx.load_json("certificate", path)?;
        link = IndexLink { c_alpha: cert.c_alpha, alpha: cert.alpha };
    }
    if let Some(c) = a.c_alpha {
        link.c_alpha = c;
    }
    if let Some(al) = a.link_alpha {
        link.alpha = al;
    }
    if ctx.dry_run {
        return Ok(Outcome::dry("chain run", json!({"params": value(&p), "link": value(&link)})));
    }
    let t = chain_length(a.l0, a.lambda, &p, &link)?;
    let mut table = Table::new(&["k", "L_k"]);
    for (k, l) in t.l_values.iter().enumerate() {
        table.push(vec![k.to_string(), fmt_g17(*l)]);
    }
    let decreasing = t.l_values.windows(2).all(|w| w[1] < w[0]);
    let pass = decreasing && t.closed_form_residual <= CLOSED_FORM_TOL;
    let n = t.l_values.len();
    let shown: Vec<f64> = if n > 2 * a.keep {
        t.l_values[..a.keep].iter().chain(&t.l_values[n - a.keep..]).copied().collect()
    } else {
        t.l_values.clone()
    };
    let mut j = value(&t);
    j["L_values"] = json!(shown.iter().map(|&x| num(x)).collect::<Vec<_>>());
    j["L_values_truncated"] = json!(n > 2 * a.keep);
    j["slope"] = num(t.slope);
    j["params"] = value(&p);
    j["gamma"] = num(p.gamma());
    j["expansion_factor"] = num(p.expansion_factor());
    j["link"] = value(&link);
    j["lambda_target"] = num(a.lambda);
    j["L0"] = num(a.l0);
    j["pass"] = json!(pass);
    Ok(Outcome::checked(Report::with_table(j, table), pass).tol("closed_form_relative", CLOSED_FORM_TOL))
}
