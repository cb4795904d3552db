use std::f64::consts::PI;

use rayon::prelude::*;

use crate::geometry::{PlanarGridDomain, DIRECTIONS};
use crate::{Error, Result, C64};

const NONE: u32 = u32::MAX;
const MIN_THETA: f64 = 1e-9;
const PAR_CHUNK: usize = 4096;

/// Stopping rule for the relaxation.
#[derive(Clone, Copy, Debug)]
pub struct SolverOptions {
    /// Bound on the max-norm of the discrete Laplacian residual.
    pub tol: f64,
    pub max_sweeps: usize,
    /// Over-relaxation factor; `None` picks the optimal value for a
    /// rectangle of the grid's size.
    pub omega: Option<f64>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tol: 1e-8, max_sweeps: 100_000, omega: None }
    }
}

/// How an arm of an unknown node ends.
#[derive(Clone, Copy, Debug)]
pub(crate) enum ArmEnd {
    /// Reaches the neighbour node.
    Open,
    /// Meets boundary data `value` after `theta` grid steps.
    Wall { theta: f64, value: f64 },
}

/// Shortley–Weller discretization of the Dirichlet problem on the unknown
/// nodes of a grid.
pub(crate) struct System {
    /// Grid node of each unknown.
    pub nodes: Vec<usize>,
    nb: Vec<[u32; 4]>,
    coef: Vec<[f64; 4]>,
    rhs: Vec<f64>,
    diag: Vec<f64>,
    colors: [Vec<u32>; 2],
    unit: f64,
}

impl System {
    /// `unknown(k)` selects the unknown nodes; `arm(k, d)` describes the
    /// arm of unknown `k` in direction `d`. An open arm must lead to another
    /// unknown or to a node with a value given by `fixed`.
    pub fn build(
        dom: &PlanarGridDomain,
        unknown: impl Fn(usize) -> bool + Sync,
        arm: impl Fn(usize, usize) -> ArmEnd + Sync,
        fixed: impl Fn(usize) -> Option<f64> + Sync,
    ) -> Result<Self> {
        let h = dom.spacing;
        let n = dom.len();
        let mut slot = vec![NONE; n];
        let mut nodes = Vec::new();
        for k in 0..n {
            if unknown(k) {
                slot[k] = nodes.len() as u32;
                nodes.push(k);
            }
        }
        if nodes.is_empty() {
            return Err(Error::Resolution("no unknown nodes".into()));
        }
        let rows: Vec<([u32; 4], [f64; 4], f64, f64)> = nodes
            .par_iter()
            .map(|&k| {
                let mut len = [h; 4];
                let mut nb = [NONE; 4];
                let mut wall = [0.0; 4];
                let mut is_wall = [false; 4];
                for d in 0..4 {
                    match arm(k, d) {
                        ArmEnd::Wall { theta, value } => {
                            len[d] = theta.max(MIN_THETA) * h;
                            wall[d] = value;
                            is_wall[d] = true;
                        }
                        ArmEnd::Open => {
                            let q = dom.neighbor(k, d).expect("inside nodes have four neighbours");
                            if slot[q] != NONE {
                                nb[d] = slot[q];
                            } else {
                                wall[d] = fixed(q).unwrap_or(0.0);
                                is_wall[d] = true;
                            }
                        }
                    }
                }
                let mut c = [0.0; 4];
                for d in 0..4 {
                    let span = len[d] + len[d ^ 1];
                    c[d] = 2.0 / (len[d] * span);
                }
                let diag: f64 = c.iter().sum();
                let rhs: f64 = (0..4).filter(|&d| is_wall[d]).map(|d| c[d] * wall[d]).sum();
                for d in 0..4 {
                    if is_wall[d] {
                        c[d] = 0.0;
                    }
                }
                (nb, c, rhs, diag)
            })
            .collect();
        let mut colors = [Vec::new(), Vec::new()];
        for (i, &k) in nodes.iter().enumerate() {
            let (a, b) = dom.coords(k);
            colors[(a + b) % 2].push(i as u32);
        }
        Ok(System {
            nodes,
            nb: rows.iter().map(|r| r.0).collect(),
            coef: rows.iter().map(|r| r.1).collect(),
            rhs: rows.iter().map(|r| r.2).collect(),
            diag: rows.iter().map(|r| r.3).collect(),
            colors,
            unit: 4.0 / (h * h),
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    fn local_sum(&self, i: usize, u: &[f64]) -> f64 {
        let mut s = self.rhs[i];
        for d in 0..4 {
            let j = self.nb[i][d];
            if j != NONE {
                s += self.coef[i][d] * u[j as usize];
            }
        }
        s
    }

    /// Max-norm of the residual, scaled to the regular five-point stencil.
    pub fn residual(&self, u: &[f64]) -> f64 {
        (0..self.len())
            .into_par_iter()
            .with_min_len(PAR_CHUNK)
            .map(|i| ((self.local_sum(i, u) - self.diag[i] * u[i]) / self.diag[i] * self.unit).abs())
            .reduce(|| 0.0, f64::max)
    }

    /// Red-black successive over-relaxation, optionally clamping each update
    /// to `[lo, hi]`. Returns the sweep count and final residual.
    pub fn relax(
        &self,
        u: &mut [f64],
        dom: &PlanarGridDomain,
        clamp: Option<(f64, f64)>,
        opts: &SolverOptions,
    ) -> Result<(usize, f64)> {
        let omega = opts.omega.unwrap_or_else(|| {
            let rho = 0.5 * ((PI / dom.nx as f64).cos() + (PI / dom.ny as f64).cos());
            2.0 / (1.0 + (1.0 - rho * rho).sqrt())
        });
        let mut res = self.residual(u);
        if res < opts.tol {
            return Ok((0, res));
        }
        let mut buf = Vec::new();
        for sweep in 1..=opts.max_sweeps {
            for color in &self.colors {
                buf.clear();
                color
                    .par_iter()
                    .with_min_len(PAR_CHUNK)
                    .map(|&i| {
                        let i = i as usize;
                        let gs = self.local_sum(i, u) / self.diag[i];
                        let v = u[i] + omega * (gs - u[i]);
                        match clamp {
                            Some((lo, hi)) => v.clamp(lo, hi),
                            None => v,
                        }
                    })
                    .collect_into_vec(&mut buf);
                for (&i, &v) in color.iter().zip(&buf) {
                    u[i as usize] = v;
                }
            }
            if sweep % 10 == 0 || sweep == opts.max_sweeps {
                res = self.residual(u);
                if !res.is_finite() {
                    break;
                }
                if res < opts.tol {
                    return Ok((sweep, res));
                }
            }
        }
        Err(Error::NoConvergence { iterations: opts.max_sweeps, last_change: res, last_iterate: Vec::new() })
    }
}

/// Point where arm `d` of node `k` meets its wall.
pub(crate) fn wall_point(dom: &PlanarGridDomain, k: usize, d: usize, theta: f64) -> C64 {
    let (di, dj) = DIRECTIONS[d];
    dom.point(k) + C64::new(di as f64, dj as f64) * (theta * dom.spacing)
}
