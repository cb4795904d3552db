//! Relative extremal functions and Green functions of planar grid domains,
//! their sublevel sets, and checks of the comparison inequalities between
//! them.

mod checks;
mod solver;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use checks::{
    check_blocki_bounds, check_lemma21, check_lemma22, fit_index_certificate, random_close_pairs, sublevel,
    BlockiReport, IndexCertificate, Lemma21Report, Lemma22Report, Lemma22Row, PairRow, SublevelSet,
};
pub use solver::SolverOptions;

use crate::geometry::{circle_enter, cpx, parse_complex, PlanarGridDomain, DIRECTIONS};
use crate::report::{fmt_g17, Table};
use crate::{Error, Result, C64};
use solver::{wall_point, ArmEnd, System};

/// Closed disk `|z - center| <= radius`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    #[serde(with = "cpx")]
    pub center: C64,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: C64, radius: f64) -> Self {
        Ball { center, radius }
    }

    /// Parses `"center,radius"`, e.g. `"2i,0.2"`.
    pub fn parse(s: &str) -> Result<Self> {
        let (c, r) = s
            .rsplit_once(',')
            .ok_or_else(|| Error::InvalidInput(format!("ball '{s}' is not of the form center,radius")))?;
        let radius: f64 =
            r.trim().parse().map_err(|_| Error::InvalidInput(format!("bad ball radius '{r}'")))?;
        if !(radius > 0.0) {
            return Err(Error::InvalidInput(format!("ball radius {radius} must be positive")));
        }
        Ok(Ball { center: parse_complex(c)?, radius })
    }

    pub fn contains(&self, z: C64) -> bool {
        (z - self.center).norm() <= self.radius
    }

    pub fn is_subset_of(&self, other: &Ball) -> bool {
        (self.center - other.center).norm() + self.radius <= other.radius
    }
}

/// What a grid function represents.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldKind {
    RelativeExtremal { ball: Ball },
    Green {
        #[serde(with = "cpx")]
        pole: C64,
    },
}

/// Anything that can be evaluated at a point of the plane.
pub trait Field: Sync {
    fn at(&self, z: C64) -> f64;
}

impl<F: Fn(C64) -> f64 + Sync> Field for F {
    fn at(&self, z: C64) -> f64 {
        self(z)
    }
}

/// A solved field on a grid. `values` holds the field at every node, with 0
/// at exterior nodes; for a Green function the pole node, if any, holds
/// `-inf`.
#[derive(Clone, Debug)]
pub struct GridFunction {
    pub domain: Arc<PlanarGridDomain>,
    pub kind: FieldKind,
    pub values: Vec<f64>,
    /// Residual reached by the solver.
    pub tolerance: f64,
    pub sweeps: usize,
    /// Pole-free part, extended past the boundary for interpolation.
    smooth: Vec<f64>,
}

impl GridFunction {
    pub fn pole(&self) -> Option<C64> {
        match self.kind {
            FieldKind::Green { pole } => Some(pole),
            FieldKind::RelativeExtremal { .. } => None,
        }
    }

    fn singular(&self, z: C64) -> f64 {
        self.pole().map_or(0.0, |w| (z - w).norm().ln())
    }

    /// Bilinear interpolation of the pole-free part plus the exact pole.
    /// Points outside the domain get 0.
    pub fn eval(&self, z: C64) -> f64 {
        let dom = &*self.domain;
        if !dom.spec.contains(z) {
            return 0.0;
        }
        let u = (z - dom.origin) / dom.spacing;
        let i = (u.re.floor().max(0.0) as usize).min(dom.nx - 2);
        let j = (u.im.floor().max(0.0) as usize).min(dom.ny - 2);
        let fx = u.re - i as f64;
        let fy = u.im - j as f64;
        let s = |a: usize, b: usize| self.smooth[dom.index(a, b)];
        let v = (1.0 - fx) * (1.0 - fy) * s(i, j)
            + fx * (1.0 - fy) * s(i + 1, j)
            + (1.0 - fx) * fy * s(i, j + 1)
            + fx * fy * s(i + 1, j + 1);
        v + self.singular(z)
    }

    /// Node table with columns `x, y, mask, value`.
    pub fn to_table(&self) -> Table {
        let dom = &*self.domain;
        let mut t = Table::new(&["x", "y", "mask", "value"]);
        for k in 0..dom.len() {
            let p = dom.point(k);
            t.push(vec![
                fmt_g17(p.re),
                fmt_g17(p.im),
                dom.mask[k].code().to_string(),
                fmt_g17(self.values[k]),
            ]);
        }
        t
    }

    /// Inside nodes with their values.
    pub fn inside_values(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.domain.inside_nodes().map(move |k| (k, self.values[k]))
    }
}

impl Field for GridFunction {
    fn at(&self, z: C64) -> f64 {
        self.eval(z)
    }
}

/// Extends `smooth` to exterior nodes by linear extrapolation along cut arms
/// of inside neighbours; nodes without a usable arm take `outside(k)`.
fn fill_ghosts(
    dom: &PlanarGridDomain,
    smooth: &mut [f64],
    wall: impl Fn(usize, usize) -> Option<(f64, f64)>,
    outside: impl Fn(usize) -> f64,
) {
    let n = dom.len();
    let mut acc = vec![(0.0, 0u32); n];
    for k in dom.inside_nodes() {
        for d in 0..4 {
            let Some(q) = dom.neighbor(k, d) else { continue };
            if dom.is_inside(q) {
                continue;
            }
            if let Some((theta, b)) = wall(k, d) {
                if theta >= 0.25 {
                    let uk = smooth[k];
                    acc[q].0 += uk + (b - uk) / theta;
                    acc[q].1 += 1;
                }
            }
        }
    }
    for k in 0..n {
        if !dom.is_inside(k) {
            smooth[k] = if acc[k].1 > 0 { acc[k].0 / acc[k].1 as f64 } else { outside(k) };
        }
    }
}

/// Relative extremal function of a closed ball: the solution of the
/// discrete obstacle problem with value -1 on the ball and 0 on the
/// boundary, harmonic in between.
pub fn relative_extremal(dom: &Arc<PlanarGridDomain>, ball: Ball, opts: &SolverOptions) -> Result<GridFunction> {
    let spec = &dom.spec;
    if !spec.contains(ball.center) || spec.boundary_distance(ball.center) <= ball.radius {
        return Err(Error::ObstacleOutside);
    }
    let in_ball: Vec<bool> = (0..dom.len()).map(|k| dom.is_inside(k) && ball.contains(dom.point(k))).collect();
    if !in_ball.iter().any(|&b| b) {
        return Err(Error::Resolution("no grid node lies inside the obstacle".into()));
    }
    let h = dom.spacing;
    let wall = |k: usize, d: usize| -> Option<(f64, f64)> {
        let p = dom.point(k);
        let (di, dj) = DIRECTIONS[d];
        let step = C64::new(di as f64 * h, dj as f64 * h);
        let outer = dom.arm_cut(k, d).then(|| (dom.arms[k][d], 0.0));
        let inner = circle_enter(p, step, ball.center, ball.radius).map(|t| (t, -1.0));
        match (outer, inner) {
            (Some(a), Some(b)) => Some(if b.0 <= a.0 { b } else { a }),
            (a, b) => a.or(b),
        }
    };
    let sys = System::build(
        dom,
        |k| dom.is_inside(k) && !in_ball[k],
        |k, d| match wall(k, d) {
            Some((theta, value)) => ArmEnd::Wall { theta, value },
            None => ArmEnd::Open,
        },
        |k| in_ball[k].then_some(-1.0),
    )?;
    let mut u = vec![0.0; sys.len()];
    let (sweeps, res) = sys.relax(&mut u, dom, Some((-1.0, 0.0)), opts)?;
    let mut values = vec![0.0; dom.len()];
    for (i, &k) in sys.nodes.iter().enumerate() {
        values[k] = u[i];
    }
    for k in 0..dom.len() {
        if in_ball[k] {
            values[k] = -1.0;
        }
    }
    let mut smooth = values.clone();
    fill_ghosts(dom, &mut smooth, |k, d| if in_ball[k] { None } else { wall(k, d) }, |_| 0.0);
    Ok(GridFunction {
        domain: Arc::clone(dom),
        kind: FieldKind::RelativeExtremal { ball },
        values,
        tolerance: res,
        sweeps,
        smooth,
    })
}

/// Green function with pole `w`, computed as `log|z - w| + u` where `u` is
/// the discrete harmonic extension of `-log|z - w|` from the boundary.
pub fn green_function(dom: &Arc<PlanarGridDomain>, w: C64, opts: &SolverOptions) -> Result<GridFunction> {
    let delta = dom.spec.boundary_distance(w);
    let need = 4.0 * dom.spacing;
    if delta <= need {
        return Err(Error::PoleNearBoundary { delta, need });
    }
    let data = |z: C64| -(z - w).norm().ln();
    let wall = |k: usize, d: usize| -> Option<(f64, f64)> {
        dom.arm_cut(k, d).then(|| {
            let theta = dom.arms[k][d];
            (theta, data(wall_point(dom, k, d, theta)))
        })
    };
    let sys = System::build(
        dom,
        |k| dom.is_inside(k),
        |k, d| match wall(k, d) {
            Some((theta, value)) => ArmEnd::Wall { theta, value },
            None => ArmEnd::Open,
        },
        |k| Some(data(dom.point(k))),
    )?;
    let mut u = vec![0.0; sys.len()];
    let (sweeps, res) = sys.relax(&mut u, dom, None, opts)?;
    let mut smooth = vec![0.0; dom.len()];
    for (i, &k) in sys.nodes.iter().enumerate() {
        smooth[k] = u[i];
    }
    let values: Vec<f64> = (0..dom.len())
        .map(|k| if dom.is_inside(k) { smooth[k] + (dom.point(k) - w).norm().ln() } else { 0.0 })
        .collect();
    fill_ghosts(dom, &mut smooth, wall, |k| data(dom.point(k)));
    Ok(GridFunction { domain: Arc::clone(dom), kind: FieldKind::Green { pole: w }, values, tolerance: res, sweeps, smooth })
}
