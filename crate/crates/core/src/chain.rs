//! Admissibility thresholds, the exponent calculus behind the comparison
//! `C^-1 mu(z_k) = C nu(z_{k+1})`, and the step-count recursion that gives
//! triple-log lower bounds for the Bergman distance.
//!
//! Everything is carried in log form, `L = ln(-rho)` and
//! `Lambda = ln|ln delta|`, since the interesting scales underflow
//! immediately in floating point.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Outcome of the admissibility test for `(n, alpha)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Admissibility {
    pub n: u32,
    pub alpha: f64,
    /// `(n - 1 + sqrt((n - 1)(n + 3))) / 2`.
    pub threshold: f64,
    pub admissible: bool,
    /// Open interval `(n - 1, alpha^2 / (alpha + 1))` for `beta`.
    pub beta_range: (f64, f64),
    pub beta_range_nonempty: bool,
}

pub fn threshold(n: u32) -> f64 {
    let m = n as f64 - 1.0;
    (m + (m * (m + 4.0)).sqrt()) / 2.0
}

pub fn admissibility(n: u32, alpha: f64) -> Result<Admissibility> {
    if n == 0 || !(alpha > 0.0) {
        return Err(Error::InvalidInput(format!("need n >= 1 and alpha > 0, got n = {n}, alpha = {alpha}")));
    }
    let threshold = threshold(n);
    let admissible = alpha > threshold;
    let beta_range = (n as f64 - 1.0, alpha * alpha / (alpha + 1.0));
    let beta_range_nonempty = beta_range.1 > beta_range.0;
    debug_assert!(!admissible || beta_range_nonempty);
    Ok(Admissibility { n, alpha, threshold, admissible, beta_range, beta_range_nonempty })
}

/// `(n, alpha, beta, C, c1)` for the chain recursion.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainParams {
    pub n: u32,
    pub alpha: f64,
    pub beta: f64,
    #[serde(rename = "C")]
    pub c: f64,
    /// Bergman distance per step; a report-time multiplier only.
    #[serde(default = "default_c1")]
    pub c1: f64,
}

fn default_c1() -> f64 {
    1.0
}

impl ChainParams {
    /// Validates the hypotheses; failures are `Inadmissible`.
    pub fn new(n: u32, alpha: f64, beta: f64, c: f64, c1: f64) -> Result<Self> {
        let p = ChainParams { n, alpha, beta, c, c1 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let adm = admissibility(self.n, self.alpha)?;
        let bad = |m: String| Err(Error::Inadmissible(m));
        if !adm.admissible {
            return bad(format!("alpha = {} does not exceed the threshold {}", self.alpha, adm.threshold));
        }
        let (lo, hi) = adm.beta_range;
        if !(self.beta > lo && self.beta < hi) {
            return bad(format!("beta = {} outside ({lo}, {hi})", self.beta));
        }
        if !(self.c > 1.0) {
            return bad(format!("C = {} must exceed 1", self.c));
        }
        if !(self.c1 > 0.0) {
            return bad(format!("c1 = {} must be positive", self.c1));
        }
        let g = self.gamma();
        if !(g > 0.0 && g < 1.0) {
            return bad(format!("gamma = {g} outside (0, 1)"));
        }
        Ok(())
    }

    /// `gamma = (1/n - (1/beta)(1 - 1/n)) n alpha / (1 + alpha)`.
    pub fn gamma(&self) -> f64 {
        let n = self.n as f64;
        (1.0 / n - (1.0 - 1.0 / n) / self.beta) * n * self.alpha / (1.0 + self.alpha)
    }

    /// `(1 + 1/alpha) / gamma`.
    pub fn expansion_factor(&self) -> f64 {
        (1.0 + 1.0 / self.alpha) / self.gamma()
    }

    /// Exponent of `mu(w) = (-rho(w))^{1 + 1/alpha}`.
    pub fn mu_exponent(&self) -> f64 {
        1.0 + 1.0 / self.alpha
    }

    /// Exponent of `nu`, equal to `gamma`.
    pub fn nu_exponent(&self) -> f64 {
        self.gamma()
    }

    /// The repelling fixed point `2 ln C / ((1 + 1/alpha) - gamma)` of [`step_map`].
    pub fn fixed_point(&self) -> f64 {
        2.0 * self.c.ln() / (self.mu_exponent() - self.gamma())
    }

    /// `-ln|L0 - L*| / ln(factor)`, so that
    /// `m = ln|L_m - L*| / ln(factor) + shift` holds exactly.
    pub fn step_shift(&self, l0: f64) -> f64 {
        -(l0 - self.fixed_point()).abs().ln() / self.expansion_factor().ln()
    }

    /// Index link with `C_alpha = 1` and this `alpha`.
    pub fn default_link(&self) -> IndexLink {
        IndexLink { c_alpha: 1.0, alpha: self.alpha }
    }
}

/// `L' = ((1 + 1/alpha) L - 2 ln C) / gamma`, without validation.
pub fn step_with(l: f64, alpha: f64, gamma: f64, c: f64) -> f64 {
    ((1.0 + 1.0 / alpha) * l - 2.0 * c.ln()) / gamma
}

/// One step of the chain: solves `(-rho_{k+1})^gamma = C^-2 (-rho_k)^{1 + 1/alpha}`
/// for `L_{k+1}`.
pub fn step_map(l: f64, p: &ChainParams) -> f64 {
    step_with(l, p.alpha, p.gamma(), p.c)
}

/// `[L_0, ..., L_m]` by plain iteration.
pub fn iterate(l0: f64, m: usize, p: &ChainParams) -> Vec<f64> {
    std::iter::successors(Some(l0), |&l| Some(step_map(l, p))).take(m + 1).collect()
}

/// Recovers `L_0` from `L_m` by the closed form
/// `L_0 = r^m L_m + (1 - r^m)/(1 - r) (2 alpha / (alpha + 1)) ln C`,
/// `r = gamma alpha / (1 + alpha)`.
pub fn closed_form_l0(l_m: f64, m: usize, p: &ChainParams) -> f64 {
    let r = p.gamma() * p.alpha / (1.0 + p.alpha);
    let rm = r.powi(m as i32);
    rm * l_m + (1.0 - rm) / (1.0 - r) * (2.0 * p.alpha / (p.alpha + 1.0)) * p.c.ln()
}

/// Link `-rho <= C_alpha (-ln delta)^-alpha` turning `Lambda = ln|ln delta|`
/// into a target for `L`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexLink {
    pub c_alpha: f64,
    pub alpha: f64,
}

impl IndexLink {
    pub fn target(&self, lambda: f64) -> f64 {
        self.c_alpha.ln() - self.alpha * lambda
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainTrace {
    /// `L_k = ln(-rho(z_k))`.
    #[serde(rename = "L_values")]
    pub l_values: Vec<f64>,
    pub m: usize,
    pub target: f64,
    /// Relative error of the closed form in recovering `L_0`.
    pub closed_form_residual: f64,
    /// Least-squares slope of `k` against `ln|L_k|` over `k >= 1`.
    pub slope: f64,
    /// `c1 max(0, m - 1)`.
    pub d_b_lower_bound: f64,
    /// Whether a Bergman geodesic realizes the chain is not checked.
    pub geodesic_verified: bool,
}

const MAX_STEPS: usize = 100_000;

/// Iterates [`step_map`] from `l0` until `L_m <= target(lambda)`.
pub fn chain_length(l0: f64, lambda: f64, p: &ChainParams, link: &IndexLink) -> Result<ChainTrace> {
    p.validate()?;
    if !(l0 < 0.0) || !l0.is_finite() {
        return Err(Error::InvalidInput(format!("L0 = {l0} must be negative")));
    }
    if !(link.c_alpha > 0.0 && link.alpha > 0.0) {
        return Err(Error::InvalidInput("link needs C_alpha > 0 and alpha > 0".into()));
    }
    let target = link.target(lambda);
    let mut l_values = vec![l0];
    let mut l = l0;
    while l > target {
        l = step_map(l, p);
        l_values.push(l);
        if l_values.len() > MAX_STEPS || !l.is_finite() {
            return Err(Error::NoConvergence { iterations: l_values.len(), last_change: l, last_iterate: Vec::new() });
        }
    }
    let m = l_values.len() - 1;
    let back = closed_form_l0(l, m, p);
    let closed_form_residual = (back - l0).abs() / l0.abs();
    let slope = if m >= 2 {
        let xs: Vec<f64> = l_values[1..].iter().map(|v| v.abs().ln()).collect();
        let ks: Vec<f64> = (1..=m).map(|k| k as f64).collect();
        crate::orlicz_bergman::fit_slope(&xs, &ks)
    } else {
        f64::NAN
    };
    Ok(ChainTrace {
        l_values,
        m,
        target,
        closed_form_residual,
        slope,
        d_b_lower_bound: p.c1 * (m.saturating_sub(1)) as f64,
        geodesic_verified: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> ChainParams {
        ChainParams::new(2, 2.0, 1.2, 10.0, 1.0).unwrap()
    }

    #[test]
    fn thresholds() {
        assert_eq!(threshold(1), 0.0);
        assert!((threshold(2) - (1.0 + 5f64.sqrt()) / 2.0).abs() <= f64::EPSILON);
        let a = admissibility(2, threshold(2)).unwrap();
        assert!(!a.admissible);
        assert!((a.beta_range.1 - a.beta_range.0).abs() < 1e-15);
        assert!(!admissibility(2, 1.0).unwrap().admissible);
        let one = admissibility(1, 0.3).unwrap();
        assert!(one.admissible && one.beta_range.0 == 0.0);
    }

    #[test]
    fn gamma_example() {
        let p = example();
        let g = (0.5 - (1.0 / 1.2) * 0.5) * (4.0 / 3.0);
        assert!((p.gamma() - g).abs() < 1e-15);
        assert!((p.gamma() - 1.0 / 9.0).abs() < 1e-15);
        assert!((p.expansion_factor() - 13.5).abs() < 1e-12);
    }

    #[test]
    fn identity_step() {
        let alpha = 3.0;
        let l = -7.25;
        assert_eq!(step_with(l, alpha, 1.0 + 1.0 / alpha, 1.0), l);
    }

    #[test]
    fn inadmissible_rejected() {
        let e = ChainParams::new(2, 1.5, 1.2, 10.0, 1.0).unwrap_err();
        assert_eq!(e.code(), "inadmissible");
        assert!(ChainParams::new(2, 2.0, 1.4, 10.0, 1.0).is_err());
        assert!(ChainParams::new(2, 2.0, 1.2, 1.0, 1.0).is_err());
    }

    #[test]
    fn closed_form_round_trip() {
        let p = example();
        for l0 in [-1.0, -1e-3, -37.5] {
            let ls = iterate(l0, 200, &p);
            for (m, &lm) in ls.iter().enumerate() {
                if !lm.is_finite() {
                    break;
                }
                let back = closed_form_l0(lm, m, &p);
                assert!((back - l0).abs() <= 1e-10 * l0.abs(), "m = {m}: {back} vs {l0}");
            }
        }
    }

    #[test]
    fn expansion_factor_numeric() {
        let p = example();
        let (a, b) = (-3.0, -5.0);
        let ratio = (step_map(a, &p) - step_map(b, &p)) / (a - b);
        assert!((ratio - p.expansion_factor()).abs() <= 1e-12 * p.expansion_factor());
        let fp = p.fixed_point();
        assert!((step_map(fp, &p) - fp).abs() < 1e-12 * fp);
    }

    #[test]
    fn lambda_690_step_count() {
        let p = example();
        let t = chain_length(-1.0, 690.0, &p, &p.default_link()).unwrap();
        let lm = *t.l_values.last().unwrap();
        let pred = (lm.abs().ln() / p.expansion_factor().ln() + p.step_shift(-1.0)).round();
        assert!((t.m as f64 - pred).abs() <= 1.0, "{} vs {pred}", t.m);
        assert!(t.l_values.windows(2).all(|w| w[1] < w[0]));
        assert!(t.closed_form_residual < 1e-10);
        assert_eq!(t.d_b_lower_bound, (t.m - 1) as f64);
    }

    #[test]
    fn steps_grow_like_log_lambda() {
        let p = example();
        let link = p.default_link();
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for j in 4..=60 {
            let lam = (j as f64).exp2();
            xs.push(lam.ln());
            ys.push(chain_length(-1.0, lam, &p, &link).unwrap().m as f64);
        }
        let slope = crate::orlicz_bergman::fit_slope(&xs, &ys);
        let want = 1.0 / p.expansion_factor().ln();
        assert!((0.9 * want..=1.1 * want).contains(&slope), "{slope} vs {want}");
    }

    #[test]
    fn already_past_target() {
        let link = IndexLink { c_alpha: 1.0, alpha: 2.0 };
        let t = chain_length(-1e3, 1.0, &example(), &link).unwrap();
        assert_eq!(t.m, 0);
        assert_eq!(t.d_b_lower_bound, 0.0);
    }
}
