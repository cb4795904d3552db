use std::f64::consts::E;

use serde::{Deserialize, Serialize};

use super::samples::SampledFunction;
use crate::quad::integrate;
use crate::{Error, Result, C64};

const BISECTION_STEPS: usize = 60;
const BRACKET_STEPS: usize = 2000;

/// Exponents of `Phi(t) = t^p (log+ t)^q`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrliczParams {
    pub p: f64,
    pub q: f64,
}

impl OrliczParams {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !(p >= 1.0 && p.is_finite()) || !(q >= 0.0 && q.is_finite()) {
            return Err(Error::InvalidInput(format!("need p >= 1 and q >= 0, got p = {p}, q = {q}")));
        }
        Ok(OrliczParams { p, q })
    }

    /// `Phi(t) = t^p (log+ t)^q`, with `(log+ t)^0 = 1`.
    pub fn phi(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if self.q == 0.0 {
            return t.powf(self.p);
        }
        if t <= 1.0 {
            return 0.0;
        }
        t.powf(self.p) * t.ln().powf(self.q)
    }

    /// Whether `Phi` is convex on `[0, inf)`, so that the Luxemburg gauge is
    /// a norm.
    pub fn is_convex(&self) -> bool {
        self.q == 0.0 || self.q >= 1.0
    }

    /// `t0` for the convex minorant `h`: one past the largest inflection
    /// point of `Phi`, or 2 when there is none beyond `t = 1`.
    pub fn young_t0(&self) -> f64 {
        young_t0(self.p, self.q)
    }

    /// `h(t) = max(0, Phi(t) - Phi(t0))`.
    pub fn young_h(&self, t: f64) -> f64 {
        (self.phi(t) - self.phi(self.young_t0())).max(0.0)
    }
}

/// Largest `t > 1` where `(t^p (ln t)^q)'' = 0`, plus one.
///
/// With `L = ln t` the second derivative is
/// `t^(p-2) L^(q-2) [p(p-1) L^2 + q(2p-1) L + q(q-1)]`.
pub fn young_t0(p: f64, q: f64) -> f64 {
    let a = p * (p - 1.0);
    let b = q * (2.0 * p - 1.0);
    let c = q * (q - 1.0);
    let mut roots = Vec::new();
    if a.abs() < 1e-300 {
        if b != 0.0 {
            roots.push(-c / b);
        }
    } else {
        let disc = b * b - 4.0 * a * c;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            roots.push((-b + sq) / (2.0 * a));
            roots.push((-b - sq) / (2.0 * a));
        }
    }
    let inflection = roots.into_iter().filter(|&l| l > 0.0).map(f64::exp).fold(1.0, f64::max);
    inflection + 1.0
}

/// Anything whose Orlicz modular `int Phi(|f| / s)` can be evaluated.
pub trait Modular {
    fn modular(&self, scale: f64, params: &OrliczParams) -> Result<f64>;
    /// `true` when the function vanishes almost everywhere.
    fn is_zero(&self) -> bool;
}

impl Modular for SampledFunction {
    fn modular(&self, scale: f64, params: &OrliczParams) -> Result<f64> {
        let v = self.integrate_abs(|t| params.phi(t / scale));
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NotInOrlicz(format!("modular is infinite at scale {scale}")))
        }
    }

    fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == C64::new(0.0, 0.0))
    }
}

/// Luxemburg gauge `inf { s > 0 : int Phi(|f| / s) <= 1 }`.
///
/// Brackets by doubling and halving, then bisects 60 times; the returned
/// scale always satisfies the constraint.
pub fn luxemburg_norm<M: Modular + ?Sized>(f: &M, params: &OrliczParams) -> Result<f64> {
    if f.is_zero() {
        return Ok(0.0);
    }
    let ok = |s: f64| -> Result<bool> { Ok(f.modular(s, params)? <= 1.0) };
    let mut hi = 1.0;
    let mut steps = 0;
    while !ok(hi)? {
        hi *= 2.0;
        steps += 1;
        if steps > BRACKET_STEPS || !hi.is_finite() {
            return Err(Error::NotInOrlicz("modular exceeds 1 at every scale".into()));
        }
    }
    let mut lo = hi;
    steps = 0;
    loop {
        let next = lo * 0.5;
        if !ok(next)? {
            lo = next;
            break;
        }
        hi = next;
        lo = next;
        steps += 1;
        if steps > BRACKET_STEPS || next == 0.0 {
            return Ok(0.0);
        }
    }
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if ok(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[derive(Clone, Debug, Serialize)]
pub struct OrliczPropsReport {
    pub params: OrliczParams,
    pub norm_f: f64,
    pub norm_g: f64,
    /// Modular of `c f` and the bound `|Omega| Phi(|c|^2) + 2^q |c|^p int Phi(|f|)`.
    pub scalar_modular: f64,
    pub scalar_bound: f64,
    /// Modular of `(f + g) / 2` and `int Phi(|f|) + int Phi(|g|)`.
    pub midpoint_modular: f64,
    pub midpoint_bound: f64,
    pub closure_ok: bool,
    pub lp_norm: f64,
    /// `(|Omega| e^p + 1)^(1/p)`.
    pub domination_constant: f64,
    pub domination_ok: bool,
    pub norm_cf: f64,
    pub homogeneity_error: f64,
    pub homogeneity_ok: bool,
    /// `None` when `Phi` is not convex.
    pub norm_sum: Option<f64>,
    pub triangle_ok: Option<bool>,
    pub pass: bool,
}

const PROPS_TOL: f64 = 1e-6;

/// Spot checks of the linear-space, domination, homogeneity and triangle
/// properties on two sampled functions.
pub fn orlicz_props_check(
    f: &SampledFunction,
    g: &SampledFunction,
    c: C64,
    params: &OrliczParams,
) -> Result<OrliczPropsReport> {
    let area = f.grid.area;
    let mod_f = f.modular(1.0, params)?;
    let mod_g = g.modular(1.0, params)?;
    let cf = f.scale(c);
    let scalar_modular = cf.modular(1.0, params)?;
    let ca = c.norm();
    let scalar_bound = area * params.phi(ca * ca) + 2f64.powf(params.q) * ca.powf(params.p) * mod_f;
    let mid = f.zip(g, |a, b| 0.5 * (a + b))?;
    let midpoint_modular = mid.modular(1.0, params)?;
    let midpoint_bound = mod_f + mod_g;
    let slack = |b: f64| b * (1.0 + 1e-12) + 1e-300;
    let closure_ok = scalar_modular.is_finite()
        && midpoint_modular.is_finite()
        && scalar_modular <= slack(scalar_bound)
        && midpoint_modular <= slack(midpoint_bound);

    let norm_f = luxemburg_norm(f, params)?;
    let norm_g = luxemburg_norm(g, params)?;
    let lp_norm = f.lp_norm(params.p);
    let domination_constant = (area * E.powf(params.p) + 1.0).powf(1.0 / params.p);
    let domination_ok = lp_norm <= domination_constant * norm_f * (1.0 + 1e-12);

    let norm_cf = luxemburg_norm(&cf, params)?;
    let want = ca * norm_f;
    let homogeneity_error = if want > 0.0 { (norm_cf - want).abs() / want } else { norm_cf };
    let homogeneity_ok = homogeneity_error <= PROPS_TOL;

    let (norm_sum, triangle_ok) = if params.is_convex() {
        let sum = f.zip(g, |a, b| a + b)?;
        let n = luxemburg_norm(&sum, params)?;
        let bound = norm_f + norm_g;
        (Some(n), Some(n <= bound * (1.0 + PROPS_TOL)))
    } else {
        (None, None)
    };
    let pass = closure_ok && domination_ok && homogeneity_ok && triangle_ok.unwrap_or(true);
    Ok(OrliczPropsReport {
        params: *params,
        norm_f,
        norm_g,
        scalar_modular,
        scalar_bound,
        midpoint_modular,
        midpoint_bound,
        closure_ok,
        lp_norm,
        domination_constant,
        domination_ok,
        norm_cf,
        homogeneity_error,
        homogeneity_ok,
        norm_sum,
        triangle_ok,
        pass,
    })
}

/// Finiteness verdict for one integral under shrinking cutoffs.
#[derive(Clone, Debug, Serialize)]
pub struct CutoffSeries {
    /// Integral over `|1 - z| > eta_k` for each cutoff.
    pub values: Vec<f64>,
    pub increments: Vec<f64>,
    pub finite: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct InclusionRow {
    /// Exponent in `f = (1 - z)^-a`.
    pub a: f64,
    pub lp: CutoffSeries,
    pub orlicz: CutoffSeries,
    pub l2: CutoffSeries,
    /// `lp.finite => orlicz.finite => l2.finite`.
    pub chain_ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct InclusionReport {
    pub p: f64,
    pub q: f64,
    pub cutoffs: Vec<f64>,
    pub rows: Vec<InclusionRow>,
    pub pass: bool,
}

const INCLUSION_LEVELS: usize = 6;
const INCLUSION_RATIO: f64 = 0.75;

fn cutoff_series(integrand: impl Fn(f64) -> f64, cutoffs: &[f64]) -> CutoffSeries {
    // I(eta) = int_eta^2 G(r) r 2 arccos(r/2) dr, in u = ln r
    let radial = |u: f64| {
        let r = u.exp();
        integrand(r) * r * r * 2.0 * (0.5 * r).min(1.0).acos()
    };
    let mut values = Vec::new();
    let mut acc = integrate(radial, cutoffs[0].ln(), 2f64.ln(), 0.0, 1e-12, 2000).value;
    values.push(acc);
    let mut increments = Vec::new();
    for w in cutoffs.windows(2) {
        let d = integrate(radial, w[1].ln(), w[0].ln(), 0.0, 1e-12, 2000).value;
        acc += d;
        values.push(acc);
        increments.push(d);
    }
    let n = increments.len();
    let decreasing = increments.windows(2).all(|w| w[1] < w[0]);
    let finite = decreasing && increments[n - 1] / increments[n - 2] < INCLUSION_RATIO;
    CutoffSeries { values, increments, finite }
}

/// Checks `A^p finite => A^2(log A)^q finite => A^2 finite` for
/// `f = (1 - z)^-a` on the unit disk, judging finiteness from the
/// increments under cutoffs `|1 - z| > 2^(-8k)`.
pub fn inclusion_chain(p: f64, q: f64, exponents: &[f64]) -> Result<InclusionReport> {
    if !(p > 2.0) || q < 0.0 {
        return Err(Error::InvalidInput("need p > 2 and q >= 0".into()));
    }
    let params = OrliczParams::new(2.0, q)?;
    let cutoffs: Vec<f64> = (1..=INCLUSION_LEVELS).map(|k| (-8.0 * k as f64).exp2()).collect();
    let rows = exponents
        .iter()
        .map(|&a| {
            let lp = cutoff_series(|r| r.powf(-a * p), &cutoffs);
            let orlicz = cutoff_series(|r| params.phi(r.powf(-a)), &cutoffs);
            let l2 = cutoff_series(|r| r.powf(-2.0 * a), &cutoffs);
            let chain_ok = (!lp.finite || orlicz.finite) && (!orlicz.finite || l2.finite);
            InclusionRow { a, lp, orlicz, l2, chain_ok }
        })
        .collect::<Vec<_>>();
    let pass = rows.iter().all(|r| r.chain_ok);
    Ok(InclusionReport { p, q, cutoffs, rows, pass })
}
