use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{green_function, relative_extremal, Ball, Field, FieldKind, GridFunction, SolverOptions};
use crate::geometry::{cpx, PlanarGridDomain};
use crate::{Error, Result, C64};

fn xy(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

/// Nodes where a field is at most `-c`, with counts over a ladder of levels.
#[derive(Clone, Debug, Serialize)]
pub struct SublevelSet {
    pub field: FieldKind,
    pub c: f64,
    #[serde(skip)]
    pub nodes: Vec<usize>,
    pub count: usize,
    /// `(c', count)` for `c' = c 2^k`, `k = -3..=3`.
    pub levels: Vec<(f64, usize)>,
    pub nested: bool,
}

pub fn sublevel(f: &GridFunction, c: f64) -> Result<SublevelSet> {
    if !(c > 0.0) {
        return Err(Error::InvalidInput(format!("level {c} must be positive")));
    }
    let below = |c: f64| f.inside_values().filter(|&(_, v)| v <= -c).map(|(k, _)| k).collect::<Vec<_>>();
    let nodes = below(c);
    let levels: Vec<(f64, usize)> = (-3..=3).map(|k| (c * f64::powi(2.0, k), below(c * f64::powi(2.0, k)).len())).collect();
    let nested = levels.windows(2).all(|w| w[1].1 <= w[0].1);
    Ok(SublevelSet { field: f.kind, c, count: nodes.len(), nodes, levels, nested })
}

/// One side of the two-sided comparison between `g(., w)` and the scaled
/// relative extremal function of `B(w, eps)`.
#[derive(Clone, Debug, Serialize)]
pub struct BoundSide {
    /// Multiplier of the extremal function.
    pub factor: f64,
    /// Largest excess of the bound over the other side; negative when the
    /// inequality holds everywhere.
    pub max_violation: f64,
    /// Largest `|lhs - rhs|` off `B(w, eps)`.
    pub max_gap: f64,
    pub witness: Option<[f64; 2]>,
    pub nodes: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockiReport {
    #[serde(with = "cpx")]
    pub w: C64,
    pub eps: f64,
    pub diameter: f64,
    pub delta_w: f64,
    /// `g >= log(R/eps) rho` on the domain minus `B(w, eps)`.
    pub lower: BoundSide,
    /// `g <= log(delta(w)/eps) rho` on the domain.
    pub upper: BoundSide,
    pub max_violation: f64,
}

fn side(
    dom: &PlanarGridDomain,
    nodes: impl Iterator<Item = usize>,
    factor: f64,
    excess: impl Fn(usize) -> f64,
    off_ball: impl Fn(usize) -> bool,
) -> BoundSide {
    let mut out = BoundSide { factor, max_violation: f64::NEG_INFINITY, max_gap: 0.0, witness: None, nodes: 0 };
    for k in nodes {
        let e = excess(k);
        if !e.is_finite() {
            continue;
        }
        out.nodes += 1;
        if off_ball(k) {
            out.max_gap = out.max_gap.max(e.abs());
        }
        if e > out.max_violation {
            out.max_violation = e;
            out.witness = Some(xy(dom.point(k)));
        }
    }
    out
}

/// Compares `g(., w)` with `rho` of `B(w, eps)` in both directions at
/// every node. `diameter` overrides the domain diameter `R`.
pub fn check_blocki_bounds(
    dom: &Arc<PlanarGridDomain>,
    w: C64,
    eps: f64,
    diameter: Option<f64>,
    opts: &SolverOptions,
) -> Result<BlockiReport> {
    if !(eps > 0.0) {
        return Err(Error::InvalidInput(format!("eps = {eps} must be positive")));
    }
    let rho = relative_extremal(dom, Ball::new(w, eps), opts)?;
    let g = green_function(dom, w, opts)?;
    let big_r = diameter.unwrap_or_else(|| dom.diameter());
    let delta_w = dom.spec.boundary_distance(w);
    let f_lower = (big_r / eps).ln();
    let f_upper = (delta_w / eps).ln();
    let off_ball = |k: usize| (dom.point(k) - w).norm() >= eps;
    let lower = side(dom, dom.inside_nodes().filter(|&k| off_ball(k)), f_lower, |k| {
        f_lower * rho.values[k] - g.values[k]
    }, off_ball);
    let upper = side(dom, dom.inside_nodes(), f_upper, |k| g.values[k] - f_upper * rho.values[k], off_ball);
    Ok(BlockiReport {
        w,
        eps,
        diameter: big_r,
        delta_w,
        max_violation: lower.max_violation.max(upper.max_violation),
        lower,
        upper,
    })
}

/// A pair `(C, alpha)` with `-rho <= C (-log delta)^-alpha` near the
/// boundary, obtained by a log-log fit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct IndexCertificate {
    pub c_alpha: f64,
    pub alpha: f64,
}

/// Multiplier applied to the fitted constant.
pub const CERTIFICATE_INFLATION: f64 = 1.5;
/// Nodes closer than this to the boundary enter the fit.
pub const CERTIFICATE_BAND: f64 = 0.1;

/// Least-squares fit of `log(-rho)` against `log(-log delta)` over nodes
/// with `delta < 0.1`; the constant is inflated by 1.5.
pub fn fit_index_certificate(rho: &GridFunction) -> Result<IndexCertificate> {
    let dom = &*rho.domain;
    let (mut sx, mut sy, mut sxx, mut sxy, mut n) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (k, v) in rho.inside_values() {
        let d = dom.delta[k];
        if d < CERTIFICATE_BAND && v < 0.0 && v > -1.0 {
            let x = (-d.ln()).ln();
            let y = (-v).ln();
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            n += 1.0;
        }
    }
    if n < 10.0 {
        return Err(Error::NoIndexCertificate);
    }
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    let alpha = -slope;
    if !(alpha > 0.0) || !intercept.is_finite() {
        return Err(Error::NoIndexCertificate);
    }
    Ok(IndexCertificate { c_alpha: CERTIFICATE_INFLATION * intercept.exp(), alpha })
}

#[derive(Clone, Debug, Serialize)]
pub struct PairRow {
    pub z1: [f64; 2],
    pub z2: [f64; 2],
    pub dist: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub violated: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Lemma21Report {
    pub r: f64,
    pub certificate: IndexCertificate,
    pub pairs: usize,
    pub violations: usize,
    /// Largest `rhs - lhs` over all pairs.
    pub max_violation: f64,
    pub witness: Option<(f64, f64, f64, f64)>,
    /// Largest dyadic `eps` such that no pair within distance `eps` fails.
    pub eps_r: Option<f64>,
    pub rows: Vec<PairRow>,
}

/// Evaluates `rho(z2) >= r rho(z1) - C (-log|z1 - z2|)^-alpha` on each pair.
pub fn check_lemma21(
    rho: &dyn Field,
    r: f64,
    pairs: &[(C64, C64)],
    cert: Option<IndexCertificate>,
    tol: f64,
) -> Result<Lemma21Report> {
    let cert = cert.ok_or(Error::NoIndexCertificate)?;
    if !(r > 1.0) {
        return Err(Error::InvalidInput(format!("r = {r} must exceed 1")));
    }
    let penalty = |d: f64| {
        if d == 0.0 {
            0.0
        } else if d < 1.0 {
            cert.c_alpha * (-d.ln()).powf(-cert.alpha)
        } else {
            f64::INFINITY
        }
    };
    let rows: Vec<PairRow> = pairs
        .iter()
        .map(|&(z1, z2)| {
            let dist = (z1 - z2).norm();
            let lhs = rho.at(z2);
            let rhs = r * rho.at(z1) - penalty(dist);
            PairRow { z1: xy(z1), z2: xy(z2), dist, lhs, rhs, violated: lhs < rhs - tol }
        })
        .collect();
    let violations = rows.iter().filter(|p| p.violated).count();
    let mut max_violation = f64::NEG_INFINITY;
    let mut witness = None;
    for p in &rows {
        if p.rhs - p.lhs > max_violation {
            max_violation = p.rhs - p.lhs;
            witness = Some((p.z1[0], p.z1[1], p.z2[0], p.z2[1]));
        }
    }
    let eps_r = (1..=60)
        .map(|k| f64::powi(2.0, -k))
        .find(|&eps| !rows.iter().any(|p| p.violated && p.dist <= eps));
    Ok(Lemma21Report { r, certificate: cert, pairs: rows.len(), violations, max_violation, witness, eps_r, rows })
}

/// Random pairs `(z1, z2)` inside the domain with `|z1 - z2| <= max_dist`.
pub fn random_close_pairs(dom: &PlanarGridDomain, count: usize, max_dist: f64, seed: u64) -> Vec<(C64, C64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = dom.spec.bbox();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let z1 = C64::new(rng.gen_range(lo.re..hi.re), rng.gen_range(lo.im..hi.im));
        if !dom.spec.contains(z1) {
            continue;
        }
        let z2 = z1 + C64::from_polar(max_dist * rng.gen::<f64>(), rng.gen_range(0.0..std::f64::consts::TAU));
        if dom.spec.contains(z2) {
            out.push((z1, z2));
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct Lemma22Row {
    pub c: f64,
    /// Smallest `C >= 1` with `A(w, -c)` inside `{rho < -mu / C}`.
    pub constant: f64,
    pub witness: Option<[f64; 2]>,
    pub count: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Lemma22Report {
    #[serde(with = "cpx")]
    pub w: C64,
    pub alpha: f64,
    pub rho_w: f64,
    pub mu: f64,
    pub constant: f64,
    pub witness: Option<[f64; 2]>,
    pub rows: Vec<Lemma22Row>,
    /// Whether the constant is nonincreasing in `c`.
    pub monotone: bool,
}

/// Finds the smallest `C >= 1` with `{g(., w) <= -c}` contained in
/// `{rho < -C^-1 (-rho(w))^(1 + 1/alpha)}`, for `c = 1` and each extra level.
pub fn check_lemma22(rho: &GridFunction, g: &GridFunction, alpha: f64, levels: &[f64]) -> Result<Lemma22Report> {
    let (a, b) = (&*rho.domain, &*g.domain);
    if !Arc::ptr_eq(&rho.domain, &g.domain)
        && (a.nx != b.nx || a.ny != b.ny || a.origin != b.origin || a.spacing != b.spacing)
    {
        return Err(Error::GridMismatch("extremal and Green functions live on different grids".into()));
    }
    let w = g.pole().ok_or_else(|| Error::InvalidInput("second field must be a Green function".into()))?;
    if rho.pole().is_some() {
        return Err(Error::InvalidInput("first field must be a relative extremal function".into()));
    }
    if !(alpha > 0.0) {
        return Err(Error::InvalidInput(format!("alpha = {alpha} must be positive")));
    }
    let rho_w = rho.eval(w);
    if !(rho_w < 0.0) {
        return Err(Error::InvalidInput("rho(w) must be negative".into()));
    }
    let mu = (-rho_w).powf(1.0 + 1.0 / alpha);
    let row = |c: f64| {
        let mut best: Option<(f64, usize)> = None;
        let mut count = 0;
        for (k, gv) in g.inside_values() {
            if gv <= -c {
                count += 1;
                let v = rho.values[k];
                if best.is_none_or(|(m, _)| v > m) {
                    best = Some((v, k));
                }
            }
        }
        match best {
            None => Lemma22Row { c, constant: 1.0, witness: None, count },
            Some((m, k)) => {
                let constant = if m < 0.0 { (mu / -m).max(1.0) } else { f64::INFINITY };
                Lemma22Row { c, constant, witness: Some(xy(a.point(k))), count }
            }
        }
    };
    let head = row(1.0);
    let mut ls: Vec<f64> = levels.iter().copied().filter(|&c| c > 0.0).collect();
    ls.sort_by(f64::total_cmp);
    let rows: Vec<Lemma22Row> = ls.into_iter().map(row).collect();
    let monotone = rows.windows(2).all(|p| p[1].constant <= p[0].constant);
    Ok(Lemma22Report { w, alpha, rho_w, mu, constant: head.constant, witness: head.witness, rows, monotone })
}
