use std::cell::Cell;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use super::orlicz::{Modular, OrliczParams};
use crate::geometry::{Cusp, Fiber, HartogsProfileDomain, Profile};
use crate::quad::{integrate, QuadResult};
use crate::{Error, Result};

const REL_TOL: f64 = 1e-10;
const MAX_PIECES: usize = 4000;
/// Beyond this many units of `ln|z|` above `ln gap` the hole looks like a
/// half-plane.
const NEAR_SPAN: f64 = 40.0;
/// Sum of `t` over the four half-collars `3 +/- tau`, `4 +/- tau`.
const COLLAR_T_SUM: f64 = 14.0;

/// Weight in `x = ln|z|` for fiber integrals of `1/|z|^2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FiberWeight {
    /// `int 1/|z|^2`.
    Plain,
    /// `int 1/|z|^2 (a - ln|z|)_+^q`.
    LogPlus { a: f64, q: f64 },
}

impl FiberWeight {
    fn normalized(self) -> Self {
        match self {
            FiberWeight::LogPlus { q, .. } if q == 0.0 => FiberWeight::Plain,
            w => w,
        }
    }

    /// Weight at `x = lo + y`, written so that a huge `|lo|` does not swamp `y`.
    fn at_offset(self, lo: f64, y: f64) -> f64 {
        match self {
            FiberWeight::Plain => 1.0,
            FiberWeight::LogPlus { a, q } => {
                let d = (a - lo) - y;
                if d > 0.0 {
                    d.powf(q)
                } else {
                    0.0
                }
            }
        }
    }

    fn at(self, x: f64) -> f64 {
        self.at_offset(0.0, x)
    }

    fn primitive(self, lo: f64, hi: f64) -> f64 {
        match self {
            FiberWeight::Plain => hi - lo,
            FiberWeight::LogPlus { a, q } => {
                let p = |x: f64| (a - x).max(0.0).powf(q + 1.0);
                (p(lo) - p(hi)) / (q + 1.0)
            }
        }
    }

    fn kink(self) -> Option<f64> {
        match self {
            FiberWeight::Plain => None,
            FiberWeight::LogPlus { a, .. } => Some(a),
        }
    }

    /// Growth order of the fiber integral in `tau^-s` near a cusp.
    fn order(self) -> f64 {
        match self {
            FiberWeight::Plain => 1.0,
            FiberWeight::LogPlus { q, .. } => q + 1.0,
        }
    }
}

/// Cosine of the half-angle of the arc of `|z| = e^(lo + y)` covered by the
/// hole `D(c, r1)`, `|c| > 0`, measured from the hole's side. Values below -1
/// mean the circle lies in the hole, above 1 that it misses it.
pub(crate) fn hole_cosine_offset(y: f64, lo: f64, abs_c: f64, r1: f64) -> f64 {
    let rho_term = (lo + y).exp() / (2.0 * abs_c);
    rho_term - (-y).exp() * (abs_c + r1) / (2.0 * abs_c)
}

pub(crate) fn hole_cosine(x: f64, abs_c: f64, r1: f64, ln_gap: f64) -> f64 {
    hole_cosine_offset(x - ln_gap, ln_gap, abs_c, r1)
}

/// Angular measure of `{phi : e^x e^{i phi}` in the fiber`}`.
pub fn free_angle(f: &Fiber, x: f64) -> f64 {
    if x >= f.r2.ln() {
        return 0.0;
    }
    if f.c == 0.0 {
        return if x > f.ln_gap { 2.0 * PI } else { 0.0 };
    }
    let k = hole_cosine(x, f.c.abs(), f.r1, f.ln_gap).clamp(-1.0, 1.0);
    2.0 * PI - 2.0 * k.acos()
}

/// `int_fiber |z|^-2 w(ln|z|) dlambda(z)`.
///
/// In `x = ln|z|` the integrand is `Theta(x) w(x)` with `Theta` the free
/// angle. The part `pi w` is integrated exactly; the remainder
/// `2 asin(K) w` is bounded and handled adaptively, near the hole in the
/// offset `y = x - ln gap` so that cusp fibers with `ln gap ~ -1e15` keep
/// full precision.
pub fn fiber_integral(f: &Fiber, weight: FiberWeight) -> Result<f64> {
    let weight = weight.normalized();
    let lo = f.ln_gap;
    let hi = f.r2.ln();
    if f.c == 0.0 {
        return Ok(2.0 * PI * weight.primitive(lo, hi));
    }
    let main = PI * weight.primitive(lo, hi);
    let abs_c = f.c.abs();
    let mut marks = vec![f.hole_far().ln()];
    marks.extend(weight.kink());
    let corr_y = |y: f64| 2.0 * hole_cosine_offset(y, lo, abs_c, f.r1).clamp(-1.0, 1.0).asin() * weight.at_offset(lo, y);
    let corr_x = |x: f64| 2.0 * hole_cosine(x, abs_c, f.r1, lo).clamp(-1.0, 1.0).asin() * weight.at(x);
    let split = (lo + NEAR_SPAN).min(hi);
    let mut total = QuadResult { value: 0.0, error: 0.0, intervals: 0, converged: true };
    let mut add = |r: QuadResult| {
        total.value += r.value;
        total.error += r.error;
        total.converged &= r.converged;
    };
    let abs_tol = 1e-14 * main.abs().max(1.0);
    let mut ybreaks = vec![0.0, split - lo];
    ybreaks.extend(marks.iter().map(|m| m - lo).filter(|&y| y > 0.0 && y < split - lo));
    ybreaks.sort_by(f64::total_cmp);
    for w in ybreaks.windows(2) {
        if w[1] > w[0] {
            add(integrate(corr_y, w[0], w[1], abs_tol, REL_TOL, MAX_PIECES));
        }
    }
    if split < hi {
        let mut xbreaks = vec![split, hi, -NEAR_SPAN];
        xbreaks.extend(marks.iter().copied());
        xbreaks.retain(|&x| x >= split && x <= hi);
        xbreaks.sort_by(f64::total_cmp);
        for w in xbreaks.windows(2) {
            if w[1] > w[0] {
                add(integrate(corr_x, w[0], w[1], abs_tol, REL_TOL, MAX_PIECES));
            }
        }
    }
    if !total.converged {
        return Err(Error::CuspQuadrature(total.error));
    }
    Ok(main + total.value)
}

/// `sum t F(t)` over the four fibers at distance `tau` from the cusps.
fn four_sided(dom: &HartogsProfileDomain, tau: f64, weight: FiberWeight) -> Result<f64> {
    if tau <= dom.transition_eps {
        let f = dom.cusp_fiber(Cusp::Three, tau)?;
        return Ok(COLLAR_T_SUM * fiber_integral(&f, weight)?);
    }
    let mut sum = 0.0;
    for t in [3.0 - tau, 3.0 + tau, 4.0 - tau, 4.0 + tau] {
        sum += t * fiber_integral(&dom.fiber(t)?, weight)?;
    }
    Ok(sum)
}

fn first_error<T>(slot: &Cell<Option<Error>>, r: Result<T>, fallback: T) -> T {
    match r {
        Ok(v) => v,
        Err(e) => {
            let prev = slot.take();
            slot.set(prev.or(Some(e)));
            fallback
        }
    }
}

/// `2 pi int_a^b sum_four t F dtau`, integrated in `ln tau`.
fn collar_band(dom: &HartogsProfileDomain, a: f64, b: f64, weight: FiberWeight) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    let mut breaks = vec![a.ln(), b.ln()];
    let e0 = dom.transition_eps;
    if a < e0 && e0 < b {
        breaks.insert(1, e0.ln());
    }
    let err = Cell::new(None);
    let mut value = 0.0;
    for w in breaks.windows(2) {
        let r = integrate(
            |u: f64| {
                let tau = u.exp();
                first_error(&err, four_sided(dom, tau, weight), 0.0) * tau
            },
            w[0],
            w[1],
            0.0,
            REL_TOL,
            MAX_PIECES,
        );
        if let Some(e) = err.take() {
            return Err(e);
        }
        if !r.converged {
            return Err(Error::CuspQuadrature(r.error));
        }
        value += r.value;
    }
    Ok(2.0 * PI * value)
}

/// `2 pi int_0^b sum_four t F dtau`: the collar integral down to the cusp,
/// truncated where the remainder is below `e^-35` of the leading term and
/// closed with the leading-order tail.
fn collar_from_cusp(dom: &HartogsProfileDomain, b: f64, weight: FiberWeight) -> Result<f64> {
    let weight = weight.normalized();
    let s = dom.s;
    let kappa = s * weight.order();
    if kappa >= 1.0 {
        return Err(Error::NotInOrlicz(format!(
            "collar integral diverges: s (q + 1) = {kappa} >= 1"
        )));
    }
    let u_min = (-35.0 / (1.0 - kappa)).max(-100.0 * std::f64::consts::LN_10 / s).min(b.ln() - 1.0);
    let tau_m = u_min.exp();
    let body = collar_band(dom, tau_m, b, weight)?;
    let order = weight.order();
    let tail = 2.0 * PI * COLLAR_T_SUM * PI * 2f64.powf(order) * tau_m.powf(1.0 - kappa) / (order * (1.0 - kappa));
    Ok(body + tail)
}

/// `2 pi int t F(t) dt` over `[1, 6]` with the two `transition_eps`
/// collars removed.
fn outside_collars(dom: &HartogsProfileDomain, weight: FiberWeight) -> Result<f64> {
    let e = dom.transition_eps;
    let mut pieces: Vec<(f64, f64)> = Vec::new();
    for w in dom.breakpoints().windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        if (mid - 3.0).abs() < e || (mid - 4.0).abs() < e {
            continue;
        }
        pieces.push((w[0], w[1]));
    }
    let parts: Vec<Result<f64>> = pieces
        .par_iter()
        .map(|&(a, b)| {
            let err = Cell::new(None);
            let r = integrate(
                |t: f64| first_error(&err, dom.fiber(t).and_then(|f| fiber_integral(&f, weight)), 0.0) * t,
                a,
                b,
                0.0,
                REL_TOL,
                MAX_PIECES,
            );
            if let Some(e) = err.take() {
                return Err(e);
            }
            if !r.converged {
                return Err(Error::CuspQuadrature(r.error));
            }
            Ok(2.0 * PI * r.value)
        })
        .collect();
    parts.into_iter().sum()
}

/// Volume of the Hartogs domain.
pub fn hartogs_volume(dom: &HartogsProfileDomain) -> f64 {
    let mut total = 0.0;
    for w in dom.breakpoints().windows(2) {
        let r = integrate(
            |t: f64| {
                let r1 = dom.profile_eval(Profile::R1, t).unwrap_or(0.0);
                let r2 = dom.profile_eval(Profile::R2, t).unwrap_or(0.0);
                2.0 * PI * t * PI * (r2 * r2 - r1 * r1)
            },
            w[0],
            w[1],
            0.0,
            1e-13,
            1000,
        );
        total += r.value;
    }
    total
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Growth {
    PowerDivergent,
    LogDivergent,
    Bounded,
}

impl Growth {
    /// Regime of a fitted increment exponent `kappa`, where
    /// `dL/d ln(1/eps) ~ eps^kappa`.
    pub fn classify(kappa: f64) -> Self {
        if kappa < -0.05 {
            Growth::PowerDivergent
        } else if kappa <= 0.05 {
            Growth::LogDivergent
        } else {
            Growth::Bounded
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Lemma41Row {
    pub eps: f64,
    /// `int 1/|z|^2` with the `eps` collars split off.
    pub j: f64,
    pub j_outside: f64,
    pub j_collar: f64,
    /// `8 pi^2 int_{-eps}^{eps} (4 + t)(ln 8 + 2|t|^-s) dt`.
    pub j_majorant: f64,
    /// `int 1/|z|^2 (log+ 1/|z|)^q` over `eps < |t - a| < transition_eps`.
    pub l: f64,
    /// `(8 pi^2 / (q + 1)) int_eps^{transition_eps} tau^{-s(q+1)} dtau`.
    pub l_minorant: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Lemma41Report {
    pub s: f64,
    pub q: f64,
    pub transition_eps: f64,
    pub rows: Vec<Lemma41Row>,
    /// `1 - s (q + 1)`.
    pub expected_exponent: f64,
    pub fitted_exponent: f64,
    pub expected: Growth,
    pub classification: Growth,
    /// Relative change of `J` over the last two `eps`.
    pub j_variation: f64,
    pub j_bounded: bool,
    pub majorant_ok: bool,
    pub minorant_ok: bool,
    pub pass: bool,
}

fn power_integral(kappa: f64, a: f64, b: f64) -> f64 {
    if (kappa - 1.0).abs() < 1e-14 {
        (b / a).ln()
    } else {
        (b.powf(1.0 - kappa) - a.powf(1.0 - kappa)) / (1.0 - kappa)
    }
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Splits `int_Omega |z|^-2` and `int_Omega |z|^-2 (log+ 1/|z|)^q` at the
/// cusps and tracks both as the collar width shrinks.
///
/// The exponent of `L` is fitted from increments: with
/// `g_k = (L(eps_{k+1}) - L(eps_k)) / ln(eps_k / eps_{k+1})`, the slope of
/// `ln g` against `ln eps` over the four smallest `eps` estimates `kappa` in
/// `dL/d ln(1/eps) ~ eps^kappa`.
pub fn lemma41_integrals(dom: &HartogsProfileDomain, q: f64, eps_list: &[f64]) -> Result<Lemma41Report> {
    if q < 0.0 {
        return Err(Error::InvalidInput(format!("q = {q} must be nonnegative")));
    }
    if eps_list.len() < 3 {
        return Err(Error::InvalidInput("need at least three eps values".into()));
    }
    let e0 = dom.transition_eps;
    let mut eps = eps_list.to_vec();
    eps.sort_by(|a, b| b.total_cmp(a));
    eps.dedup();
    if eps.iter().any(|&e| !(e > 0.0 && e < e0)) {
        return Err(Error::InvalidInput(format!("eps must lie in (0, {e0})")));
    }
    let s = dom.s;
    let plain = FiberWeight::Plain;
    let logw = FiberWeight::LogPlus { a: 0.0, q };
    let kappa_q = s * (q + 1.0);

    let fixed_out = outside_collars(dom, plain)?;
    let bands: Vec<(f64, f64)> = std::iter::once((eps[0], e0)).chain(eps.windows(2).map(|w| (w[1], w[0]))).collect();
    let band_j: Vec<f64> = bands.par_iter().map(|&(a, b)| collar_band(dom, a, b, plain)).collect::<Result<_>>()?;
    let band_l: Vec<f64> = bands.par_iter().map(|&(a, b)| collar_band(dom, a, b, logw)).collect::<Result<_>>()?;
    let inner_j = collar_from_cusp(dom, *eps.last().unwrap(), plain)?;

    let mut rows = Vec::with_capacity(eps.len());
    let mut j_between = 0.0;
    let mut l = 0.0;
    let tail_j: Vec<f64> = {
        // collar part below each eps: inner piece plus the bands beneath it
        let mut acc = vec![0.0; eps.len()];
        let mut run = inner_j;
        for k in (0..eps.len()).rev() {
            acc[k] = run;
            run += band_j[k];
        }
        acc
    };
    for (k, &e) in eps.iter().enumerate() {
        j_between += band_j[k];
        l += band_l[k];
        let j_outside = fixed_out + j_between;
        let j_collar = tail_j[k];
        let j_majorant = 8.0 * PI * PI * (8.0 * e * 8f64.ln() + 16.0 * e.powf(1.0 - s) / (1.0 - s));
        let l_minorant = 8.0 * PI * PI / (q + 1.0) * power_integral(kappa_q, e, e0);
        rows.push(Lemma41Row { eps: e, j: j_outside + j_collar, j_outside, j_collar, j_majorant, l, l_minorant });
    }

    let tail = &rows[rows.len().saturating_sub(4)..];
    let mut xs = Vec::new();
    let mut gs = Vec::new();
    for w in tail.windows(2) {
        let span = (w[0].eps / w[1].eps).ln();
        let g = (w[1].l - w[0].l) / span;
        xs.push(0.5 * (w[0].eps.ln() + w[1].eps.ln()));
        gs.push(g.abs().ln());
    }
    let fitted_exponent = fit_slope(&xs, &gs);
    let expected_exponent = 1.0 - kappa_q;
    let expected = if kappa_q > 1.0 + 1e-12 {
        Growth::PowerDivergent
    } else if kappa_q >= 1.0 - 1e-12 {
        Growth::LogDivergent
    } else {
        Growth::Bounded
    };
    let classification = Growth::classify(fitted_exponent);
    let n = rows.len();
    let j_variation = (rows[n - 1].j - rows[n - 2].j).abs() / rows[n - 1].j.abs();
    let j_bounded = j_variation < 0.01;
    let majorant_ok = rows.iter().all(|r| r.j_collar <= r.j_majorant);
    let minorant_ok = rows.iter().all(|r| r.l >= r.l_minorant);
    let pass = j_bounded
        && majorant_ok
        && minorant_ok
        && classification == expected
        && (fitted_exponent - expected_exponent).abs() <= 0.05;
    Ok(Lemma41Report {
        s,
        q,
        transition_eps: e0,
        rows,
        expected_exponent,
        fitted_exponent,
        expected,
        classification,
        j_variation,
        j_bounded,
        majorant_ok,
        minorant_ok,
        pass,
    })
}

/// `1/z` on the Hartogs domain, with its modular computed by fiber
/// quadrature rather than samples. Only `p = 2` is supported.
#[derive(Clone, Debug)]
pub struct ReciprocalOnHartogs {
    pub domain: HartogsProfileDomain,
}

impl ReciprocalOnHartogs {
    /// `int_Omega |z|^-2`.
    pub fn l2_norm_sqr(&self) -> Result<f64> {
        let d = &self.domain;
        Ok(outside_collars(d, FiberWeight::Plain)? + collar_from_cusp(d, d.transition_eps, FiberWeight::Plain)?)
    }
}

impl Modular for ReciprocalOnHartogs {
    fn modular(&self, scale: f64, params: &OrliczParams) -> Result<f64> {
        if params.p != 2.0 {
            return Err(Error::InvalidInput("1/z on the Hartogs domain supports p = 2 only".into()));
        }
        let w = FiberWeight::LogPlus { a: -scale.ln(), q: params.q };
        let d = &self.domain;
        let total = outside_collars(d, w)? + collar_from_cusp(d, d.transition_eps, w)?;
        Ok(total / (scale * scale))
    }

    fn is_zero(&self) -> bool {
        false
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LaurentFilterRow {
    pub eps: f64,
    /// `ln int_eps^{eps0} T_m(tau) dtau`.
    pub ln_integral: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LaurentFilterReport {
    pub m: i32,
    pub s: f64,
    pub eps0: f64,
    pub rows: Vec<LaurentFilterRow>,
    pub increments: Vec<f64>,
    pub diverges: bool,
}

/// `ln T_m(tau)` where `T_m = (4^(2m+2) - e^{-(2m+2) tau^-s}) / (2m+2)` and
/// `T_{-1} = ln 4 + tau^-s`: the radial integral of `|z|^{2m}` over
/// `e^{-tau^-s} < |z| < 4`, per unit angle.
fn ln_radial_mass(m: i32, s: f64, tau: f64) -> f64 {
    let v = tau.powf(-s);
    let j = 2.0 * m as f64 + 2.0;
    if m == -1 {
        return (4f64.ln() + v).ln();
    }
    if j > 0.0 {
        let a = j * 4f64.ln();
        // ln(e^a - e^{-j v}) - ln j
        a + (-(-j * v - a).exp()).ln_1p() - j.ln()
    } else {
        let k = -j;
        // ln(e^{k v} - 4^{-k}) - ln k
        k * v + (-(-k * 4f64.ln() - k * v).exp()).ln_1p() - k.ln()
    }
}

/// Tracks `int_eps^{eps0} T_m(tau) dtau` as `eps` shrinks. The integral is
/// evaluated as `phi(eps) + ln int e^{phi - phi(eps)}` so that terms like
/// `e^{2 tau^-s}` never overflow. Divergent when the last increment of the
/// logarithm exceeds 1.
pub fn laurent_filter(m: i32, s: f64, eps0: f64, eps_list: &[f64]) -> Result<LaurentFilterReport> {
    if !(s > 0.0 && s < 1.0) || eps0 <= 0.0 {
        return Err(Error::InvalidInput("need s in (0, 1) and eps0 > 0".into()));
    }
    let mut eps = eps_list.to_vec();
    eps.sort_by(|a, b| b.total_cmp(a));
    eps.dedup();
    if eps.len() < 2 || eps.iter().any(|&e| !(e > 0.0 && e < eps0)) {
        return Err(Error::InvalidInput(format!("need at least two eps in (0, {eps0})")));
    }
    let mut rows = Vec::new();
    for &e in &eps {
        let phi0 = ln_radial_mass(m, s, e);
        let r = integrate(
            |u: f64| {
                let tau = u.exp();
                (ln_radial_mass(m, s, tau) - phi0 + u).exp()
            },
            e.ln(),
            eps0.ln(),
            0.0,
            1e-10,
            MAX_PIECES,
        );
        if !r.converged {
            return Err(Error::CuspQuadrature(r.error));
        }
        rows.push(LaurentFilterRow { eps: e, ln_integral: phi0 + r.value.ln() });
    }
    let increments: Vec<f64> = rows.windows(2).map(|w| w[1].ln_integral - w[0].ln_integral).collect();
    let diverges = *increments.last().unwrap() > 1.0;
    Ok(LaurentFilterReport { m, s, eps0, rows, increments, diverges })
}
