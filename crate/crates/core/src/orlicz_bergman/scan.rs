use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use super::collar::fit_slope;
use super::kernel::KernelApprox;
use crate::envelopes::Field;
use crate::geometry::cpx;
use crate::quad::gauss_legendre_on;
use crate::{Error, Result, C64};

const RAYS: usize = 256;
const RAY_SAMPLES: usize = 400;
const GL_NODES: usize = 16;
const BISECT_STEPS: usize = 60;

/// `max(-1, ln|z| / ln(1/a))`: the relative extremal function of the closed
/// disk `|z| <= a` in the unit disk.
pub fn disk_obstacle_rho(a: f64) -> impl Fn(C64) -> f64 + Sync {
    let scale = (1.0 / a).ln();
    move |z: C64| (z.norm().ln() / scale).max(-1.0)
}

/// `4 ln|z| ln(|z|/r) / (ln r)^2`, a negative subharmonic exhaustion of
/// `r < |z| < 1` with minimum -1 on `|z| = sqrt(r)`.
pub fn annulus_exhaustion(r: f64) -> impl Fn(C64) -> f64 + Sync {
    let lr = r.ln();
    move |z: C64| {
        let t = z.norm().ln();
        4.0 * t * (t - lr) / (lr * lr)
    }
}

/// Dyadic levels `2^-3, ..., 2^-8`.
pub fn default_scan_levels() -> Vec<f64> {
    (3..=8).map(|k| (-(k as f64)).exp2()).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanRow {
    pub eps: f64,
    /// `int_{-rho <= eps} |K(., w)|^2`.
    pub integral: f64,
    pub usable: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanReport {
    #[serde(with = "cpx")]
    pub w: C64,
    pub order: usize,
    pub rows: Vec<ScanRow>,
    /// Fitted `r` in `I(eps) ~ C eps^r`.
    pub r_fit: f64,
    pub c_fit: f64,
}

/// Integrates `|K(., w)|^2` over `{-rho <= eps}` along `RAYS` rays from the
/// origin. Each ray is sampled, sign changes of `rho + eps` are refined by
/// bisection and every sub-interval gets a Gauss-Legendre rule.
pub fn sublevel_integral_scan(k: &KernelApprox, rho: &dyn Field, w: C64, eps_list: &[f64]) -> Result<ScanReport> {
    if !k.domain.contains(w) {
        return Err(Error::InvalidInput(format!("pole {w} outside the domain")));
    }
    let r0 = k.domain.inner();
    let r_lo = if r0 == 0.0 { 1e-12 } else { r0 * (1.0 + 1e-12) };
    let r_hi = 1.0 - 1e-12;
    let dphi = 2.0 * PI / RAYS as f64;
    let rows: Vec<ScanRow> = eps_list
        .iter()
        .map(|&eps| -> Result<ScanRow> {
            let total: f64 = (0..RAYS)
                .into_par_iter()
                .map(|j| {
                    let dir = C64::from_polar(1.0, (j as f64 + 0.5) * dphi);
                    let g = |r: f64| rho.at(dir * r) + eps;
                    let mut sum = 0.0;
                    let h = (r_hi - r_lo) / RAY_SAMPLES as f64;
                    let mut start: Option<f64> = None;
                    let mut prev_r = r_lo;
                    let mut prev_in = g(r_lo) >= 0.0;
                    if prev_in {
                        start = Some(r_lo);
                    }
                    let flush = |a: f64, b: f64, sum: &mut f64| {
                        let (xs, ws) = gauss_legendre_on(GL_NODES, a, b);
                        for (r, wt) in xs.into_iter().zip(ws) {
                            let kv = k.eval(dir * r, w).map(|v| v.value.norm_sqr()).unwrap_or(0.0);
                            *sum += wt * kv * r;
                        }
                    };
                    for i in 1..=RAY_SAMPLES {
                        let r = r_lo + i as f64 * h;
                        let inside = g(r) >= 0.0;
                        if inside != prev_in {
                            let (mut a, mut b) = (prev_r, r);
                            for _ in 0..BISECT_STEPS {
                                let m = 0.5 * (a + b);
                                if (g(m) >= 0.0) == prev_in {
                                    a = m;
                                } else {
                                    b = m;
                                }
                            }
                            let cross = 0.5 * (a + b);
                            if inside {
                                start = Some(cross);
                            } else if let Some(s) = start.take() {
                                flush(s, cross, &mut sum);
                            }
                        }
                        prev_in = inside;
                        prev_r = r;
                    }
                    if let Some(s) = start {
                        flush(s, r_hi, &mut sum);
                    }
                    sum * dphi
                })
                .collect::<Vec<f64>>()
                .iter()
                .sum();
            Ok(ScanRow { eps, integral: total, usable: eps < 1.0 && total > 0.0 })
        })
        .collect::<Result<_>>()?;
    let used: Vec<&ScanRow> = rows.iter().filter(|r| r.usable).collect();
    if used.len() < 4 {
        return Err(Error::ScanRange(used.len()));
    }
    let xs: Vec<f64> = used.iter().map(|r| r.eps.ln()).collect();
    let ys: Vec<f64> = used.iter().map(|r| r.integral.ln()).collect();
    let r_fit = fit_slope(&xs, &ys);
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let c_fit = (my - r_fit * mx).exp();
    Ok(ScanReport { w, order: k.order, rows, r_fit, c_fit })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DyadicVerdict {
    Converges,
    Diverges,
}

#[derive(Clone, Debug, Serialize)]
pub struct DyadicReport {
    pub c: f64,
    pub alpha: f64,
    pub r: f64,
    pub q: f64,
    /// `q / alpha - r`.
    pub exponent: f64,
    /// `C sum_{k0}^{K} 2^{exponent k}` for each `K` from `k0` to `k_max`.
    pub partial_sums: Vec<f64>,
    /// `C 2^{e (k_max + 1)} / (1 - 2^e)` when `e < 0`.
    pub tail_bound: Option<f64>,
    pub verdict: DyadicVerdict,
}

/// Shell-by-shell bound for the Orlicz modular of the kernel: shell `k`
/// contributes at most `C 2^{(q/alpha - r) k}`. Converges exactly when the
/// exponent is negative.
pub fn dyadic_orlicz_certifier(bound: (f64, f64, f64), q: f64, k0: i64, k_max: i64) -> Result<DyadicReport> {
    let (c, alpha, r) = bound;
    if !(q > 0.0 && alpha > 0.0 && r > 0.0 && c > 0.0) || k_max < k0 {
        return Err(Error::InvalidInput("need C, q, alpha, r > 0 and k_max >= k0".into()));
    }
    let exponent = q / alpha - r;
    let mut acc = 0.0;
    let partial_sums = (k0..=k_max)
        .map(|k| {
            acc += c * (exponent * k as f64).exp2();
            acc
        })
        .collect();
    let (verdict, tail_bound) = if exponent < 0.0 {
        let e2 = exponent.exp2();
        (DyadicVerdict::Converges, Some(c * (exponent * (k_max + 1) as f64).exp2() / (1.0 - e2)))
    } else {
        (DyadicVerdict::Diverges, None)
    };
    Ok(DyadicReport { c, alpha, r, q, exponent, partial_sums, tail_bound, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orlicz_bergman::kernel::KernelDomain;

    #[test]
    fn disk_scan_closed_form() {
        let k = KernelApprox::new(KernelDomain::Disk, 60).unwrap();
        let rho = disk_obstacle_rho(0.5);
        let eps = default_scan_levels();
        let rep = sublevel_integral_scan(&k, &rho, C64::new(0.0, 0.0), &eps).unwrap();
        for row in &rep.rows {
            // |K(., 0)|^2 = 1/pi^2 on {|z| >= 2^-eps}
            let want = (1.0 - (-2.0 * row.eps).exp2()) / PI;
            assert!((row.integral - want).abs() < 1e-9 * want, "{} {}", row.integral, want);
        }
        assert!((0.9..=1.1).contains(&rep.r_fit), "{}", rep.r_fit);
    }

    #[test]
    fn saturation_and_range() {
        let k = KernelApprox::new(KernelDomain::Disk, 20).unwrap();
        let rho = disk_obstacle_rho(0.5);
        let err = sublevel_integral_scan(&k, &rho, C64::new(0.0, 0.0), &[1.0, 2.0, 0.5]).unwrap_err();
        assert_eq!(err.code(), "scan-range");
        let big: Vec<f64> = [1.0, 1.5, 2.0, 0.5, 0.25, 0.125, 0.0625].to_vec();
        let rep = sublevel_integral_scan(&k, &rho, C64::new(0.0, 0.0), &big).unwrap();
        assert!((rep.rows[0].integral - rep.rows[2].integral).abs() < 1e-9);
    }

    #[test]
    fn dyadic_examples() {
        let r = dyadic_orlicz_certifier((1.0, 1.0, 0.9), 0.5, 1, 40).unwrap();
        assert_eq!(r.verdict, DyadicVerdict::Converges);
        assert!((r.exponent + 0.4).abs() < 1e-15);
        assert!(r.tail_bound.unwrap() < (-0.4f64 * 40.0).exp2() / (1.0 - (-0.4f64).exp2()));
        let edge = dyadic_orlicz_certifier((1.0, 2.0, 0.5), 1.0, 1, 30).unwrap();
        assert_eq!(edge.verdict, DyadicVerdict::Diverges);
        assert!((edge.partial_sums[29] - 30.0).abs() < 1e-12);
        let up = dyadic_orlicz_certifier((1.0, 2.0, 0.5), 1.5, 1, 30).unwrap();
        assert_eq!(up.verdict, DyadicVerdict::Diverges);
        assert!((up.exponent - 0.25).abs() < 1e-15);
    }
}
