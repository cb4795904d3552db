use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use super::density::{
    annulus_complement_slice, carleson_totik_set, gamma_density_set, DensityIndexReport, DiskSetSlicer,
    DENSITY_NODES,
};
use super::equilibrium::interval_capacity;
use crate::geometry::{appendix_set, cpx, IntervalUnionSet, APPENDIX_TERMS};
use crate::{Error, Result, C64};

const EPS_GAMMA: f64 = 1.0 / 16.0;
const LAMBDA: f64 = 0.5;
const GAMMA: f64 = 2.0;
const BOUND_FRACTION: f64 = 0.95;
const OUTER_RADIUS: f64 = 3.0;

/// Configuration of the two-sided check on `D(0, 3) - E`.
#[derive(Clone, Debug)]
pub struct Example5Config {
    pub n_max: u32,
    pub samples: usize,
    /// Replacement for the slit set; `None` uses the standard one.
    pub set: Option<IntervalUnionSet>,
    pub nodes: usize,
    pub ct_eps: Vec<f64>,
}

impl Default for Example5Config {
    fn default() -> Self {
        Example5Config { n_max: 20, samples: 16, set: None, nodes: DENSITY_NODES, ct_eps: vec![0.25, 0.0625, 0.015625] }
    }
}

/// Kind of boundary sample, with the slit index for slit points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SampleKind {
    Origin,
    Slit { n0: u32 },
    Circle,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundRow {
    pub n: u32,
    pub case: &'static str,
    pub bound: f64,
    pub numeric: f64,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SampleOutcome {
    #[serde(with = "cpx")]
    pub a: C64,
    pub kind: SampleKind,
    pub density: DensityIndexReport,
    pub all_members: bool,
    /// Analytic lower bounds, present for the standard slit set only.
    pub bounds: Option<Vec<BoundRow>>,
    /// For slit samples, whether `E_r(0)` is contained in `E_r(a)` for every
    /// scale `r = 2^-n` with `n <= n0 - 1`.
    pub inclusion_ok: Option<bool>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CtOutcome {
    pub eps: f64,
    pub report: DensityIndexReport,
    pub finite: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Example5Report {
    pub n_max: u32,
    pub samples: Vec<SampleOutcome>,
    pub part_i_pass: bool,
    pub carleson_totik: Vec<CtOutcome>,
    pub part_ii_pass: bool,
    pub pass: bool,
    pub standard_set: bool,
}

fn pick_samples(e: &IntervalUnionSet, count: usize, standard: bool) -> Vec<(C64, SampleKind)> {
    let mut out = vec![(C64::new(0.0, 0.0), SampleKind::Origin)];
    let circle = (count / 3).max(1);
    let slit_budget = count.saturating_sub(1 + circle);
    let mut slit = Vec::new();
    if standard {
        let order = [0u32, 2, 5, 1, 3, 4, 6, 7, 8, 9];
        'outer: for &n0 in order.iter().cycle().take(3 * order.len()) {
            let l = (-(n0 as f64)).exp2();
            let r = l + l * l;
            for x in [l, 0.5 * (l + r), r] {
                if slit.len() >= slit_budget {
                    break 'outer;
                }
                if !slit.iter().any(|(p, _): &(C64, SampleKind)| p.re == x) {
                    slit.push((C64::new(x, 0.0), SampleKind::Slit { n0 }));
                }
            }
        }
    } else {
        for &(l, r) in &e.intervals {
            for x in [l, 0.5 * (l + r), r] {
                if slit.len() < slit_budget && x != 0.0 {
                    slit.push((C64::new(x, 0.0), SampleKind::Slit { n0: 0 }));
                }
            }
        }
    }
    let circle = count - 1 - slit.len();
    out.extend(slit);
    for k in 0..circle {
        let phi = 2.0 * PI * k as f64 / circle as f64 + 0.5;
        out.push((C64::from_polar(OUTER_RADIUS, phi), SampleKind::Circle));
    }
    out
}

/// Lower bound for `C(E_{2^-n}(a))` from the case analysis, with its label.
fn analytic_bound(kind: SampleKind, n: u32) -> (&'static str, f64) {
    let p = |k: f64| k.exp2();
    let n = n as f64;
    match kind {
        SampleKind::Origin => ("origin", interval_capacity(p(-2.0 * (n + 1.0))).unwrap()),
        SampleKind::Circle => ("circle", interval_capacity(p(-n + 1.0)).unwrap()),
        SampleKind::Slit { n0 } => {
            let n0 = n0 as f64;
            if n <= n0 - 1.0 {
                ("slit-i", interval_capacity(p(-2.0 * (n + 1.0))).unwrap())
            } else if n <= 2.0 * n0 {
                ("slit-ii", interval_capacity(p(-2.0 * n0)).unwrap())
            } else {
                ("slit-iii", interval_capacity(p(-n)).unwrap())
            }
        }
    }
}

/// Checks both directions on `D(0, 3) - E`: full gamma-density membership
/// at sampled boundary points, and finiteness of the annular index set at 0.
pub fn verify_example5(cfg: &Example5Config) -> Result<Example5Report> {
    if cfg.n_max < 10 {
        return Err(Error::InvalidInput("n_max must be at least 10".into()));
    }
    if cfg.samples < 3 {
        return Err(Error::InvalidInput("need at least 3 boundary samples".into()));
    }
    let standard = cfg.set.is_none();
    let e = cfg.set.clone().unwrap_or_else(|| appendix_set(APPENDIX_TERMS));
    let slicer = DiskSetSlicer { center: C64::new(0.0, 0.0), radius: OUTER_RADIUS, set: e.clone() };
    let samples = pick_samples(&e, cfg.samples, standard);
    let outcomes: Vec<SampleOutcome> = samples
        .par_iter()
        .map(|&(a, kind)| {
            let density = gamma_density_set(&slicer, a, EPS_GAMMA, LAMBDA, GAMMA, cfg.n_max, cfg.nodes)?;
            let all_members = density.all_members();
            let bounds = standard.then(|| {
                density
                    .rows
                    .iter()
                    .map(|row| {
                        let (case, bound) = analytic_bound(kind, row.n);
                        BoundRow {
                            n: row.n,
                            case,
                            bound,
                            numeric: row.slice_capacity,
                            ok: row.slice_capacity >= BOUND_FRACTION * bound && bound >= row.threshold,
                        }
                    })
                    .collect::<Vec<_>>()
            });
            let inclusion_ok = match kind {
                SampleKind::Slit { n0 } if standard => Some((1..n0).all(|n| {
                    let r = (-(n as f64)).exp2();
                    let at_zero = slicer.real_part(C64::new(0.0, 0.0), r);
                    let at_a = slicer.real_part(a, r);
                    at_zero.is_subset_of(&at_a)
                })),
                _ => None,
            };
            let bounds_ok = bounds.as_ref().is_none_or(|b| b.iter().all(|r| r.ok));
            let pass = all_members && bounds_ok && inclusion_ok.unwrap_or(true);
            Ok(SampleOutcome { a, kind, density, all_members, bounds, inclusion_ok, pass })
        })
        .collect::<Result<_>>()?;
    let part_i_pass = outcomes.iter().all(|o| o.pass);
    let carleson_totik: Vec<CtOutcome> = cfg
        .ct_eps
        .iter()
        .map(|&eps| {
            let report = carleson_totik_set(&e, 0.0, eps, cfg.n_max, cfg.nodes)?;
            let finite = report.finite_in_window();
            Ok(CtOutcome { eps, report, finite })
        })
        .collect::<Result<_>>()?;
    let part_ii_pass = carleson_totik.iter().all(|c| c.finite);
    Ok(Example5Report {
        n_max: cfg.n_max,
        samples: outcomes,
        part_i_pass,
        carleson_totik,
        part_ii_pass,
        pass: part_i_pass && part_ii_pass,
        standard_set: standard,
    })
}

/// Closed-form capacity of the annular slice at 0 of the standard set.
pub fn standard_slice_capacity(n: u32) -> f64 {
    interval_capacity((-2.0 * (n as f64 + 1.0)).exp2()).unwrap()
}

/// The slice at 0, for direct inspection.
pub fn standard_slice(n: u32) -> IntervalUnionSet {
    annulus_complement_slice(&appendix_set(APPENDIX_TERMS), 0.0, n)
}
