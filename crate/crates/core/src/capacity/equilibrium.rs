use serde::Serialize;

use super::compact::{discretize, scale_of, Nodes, PlanarCompact};
use crate::geometry::IntervalUnionSet;
use crate::{Error, Result, C64};

/// Self-interaction scale: a cell of length `s` contributes `log(1/(KAPPA s))`.
pub const KAPPA: f64 = 0.25;
pub const MAX_ITERATIONS: usize = 10_000;
pub const ENERGY_TOL: f64 = 1e-10;

/// Discrete equilibrium measure of a compact set.
#[derive(Clone, Debug, Serialize)]
pub struct EquilibriumSolution {
    #[serde(skip)]
    pub nodes: Vec<C64>,
    pub weights: Vec<f64>,
    pub energy: f64,
    pub capacity: f64,
    /// Set has zero capacity (points only or empty).
    pub polar: bool,
    pub iterations: usize,
    pub last_decrease: f64,
}

impl EquilibriumSolution {
    fn polar() -> Self {
        EquilibriumSolution {
            nodes: Vec::new(),
            weights: Vec::new(),
            energy: f64::INFINITY,
            capacity: 0.0,
            polar: true,
            iterations: 0,
            last_decrease: 0.0,
        }
    }
}

/// Capacity of a segment of the given length.
pub fn interval_capacity(length: f64) -> Result<f64> {
    if length < 0.0 || length.is_nan() {
        return Err(Error::NegativeLength(length));
    }
    Ok(length / 4.0)
}

/// Energy matrix in units of `scale`, row-major.
fn energy_matrix(nodes: &Nodes, scale: f64) -> Vec<f64> {
    let n = nodes.len();
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        a[i * n + i] = -(KAPPA * nodes.cell[i] / scale).ln();
        for j in 0..i {
            let floor = 0.5 * KAPPA * (nodes.cell[i] + nodes.cell[j]);
            let d = nodes.distance(i, j).max(floor);
            let v = -(d / scale).ln();
            a[i * n + j] = v;
            a[j * n + i] = v;
        }
    }
    a
}

fn matvec(a: &[f64], x: &[f64], out: &mut [f64]) {
    let n = x.len();
    for i in 0..n {
        let row = &a[i * n..(i + 1) * n];
        out[i] = row.iter().zip(x).map(|(r, v)| r * v).sum();
    }
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Euclidean projection onto the probability simplex.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut css = 0.0;
    let mut theta = 0.0;
    for (k, &x) in u.iter().enumerate() {
        css += x;
        let t = (css - 1.0) / (k as f64 + 1.0);
        if x - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}

/// Largest eigenvalue of `A` on the sum-zero subspace, by power iteration.
fn tangent_lipschitz(a: &[f64], n: usize) -> f64 {
    let center = |x: &mut Vec<f64>| {
        let m = x.iter().sum::<f64>() / n as f64;
        x.iter_mut().for_each(|v| *v -= m);
    };
    let mut x: Vec<f64> = (0..n).map(|i| ((i * 7919 % 104_729) as f64 / 104_729.0) - 0.5).collect();
    center(&mut x);
    let mut y = vec![0.0; n];
    let mut lam = 0.0;
    for _ in 0..200 {
        let norm = dot(&x, &x).sqrt();
        if norm == 0.0 {
            break;
        }
        x.iter_mut().for_each(|v| *v /= norm);
        matvec(a, &x, &mut y);
        center(&mut y);
        let next = dot(&x, &y);
        std::mem::swap(&mut x, &mut y);
        if (next - lam).abs() <= 1e-6 * next.abs() {
            lam = next;
            break;
        }
        lam = next;
    }
    lam.max(1e-12)
}

/// Minimizes `w^T A w` over the simplex by projected gradient steps of
/// length `1/L`, halving the step whenever the quadratic upper bound fails.
fn minimize(a: &[f64], n: usize) -> Result<(Vec<f64>, f64, usize, f64)> {
    let lip = 2.0 * tangent_lipschitz(a, n);
    let mut w = vec![1.0 / n as f64; n];
    let mut aw = vec![0.0; n];
    matvec(a, &w, &mut aw);
    let mut f = dot(&w, &aw);
    let mut step = 1.0 / lip;
    let mut last = f64::INFINITY;
    let mut trial_aw = vec![0.0; n];
    for it in 1..=MAX_ITERATIONS {
        let g: Vec<f64> = aw.iter().map(|v| 2.0 * v).collect();
        let (w_new, f_new) = loop {
            let trial: Vec<f64> = w.iter().zip(&g).map(|(x, gx)| x - step * gx).collect();
            let p = project_simplex(&trial);
            matvec(a, &p, &mut trial_aw);
            let fp = dot(&p, &trial_aw);
            let diff: Vec<f64> = p.iter().zip(&w).map(|(x, y)| x - y).collect();
            let bound = f + dot(&g, &diff) + dot(&diff, &diff) / (2.0 * step);
            if fp <= bound + 1e-15 * f.abs().max(1.0) || step < 1e-12 / lip {
                break (p, fp);
            }
            step *= 0.5;
        };
        let decrease = f - f_new;
        if decrease >= 0.0 {
            w = w_new;
            f = f_new;
            std::mem::swap(&mut aw, &mut trial_aw);
        }
        last = decrease;
        if decrease < ENERGY_TOL {
            return Ok((w, f, it, decrease.max(0.0)));
        }
    }
    Err(Error::NoConvergence { iterations: MAX_ITERATIONS, last_change: last, last_iterate: w })
}

/// Logarithmic capacity of a planar compact set.
///
/// Nodes are Chebyshev-clustered on segments and arcs and uniform on
/// circles; the discrete energy is minimized over probability weights.
/// Sets without a component of positive length are reported as polar.
pub fn log_capacity(set: &PlanarCompact, n_nodes: usize) -> Result<EquilibriumSolution> {
    if n_nodes < 16 {
        return Err(Error::InvalidInput(format!("n_nodes = {n_nodes} must be at least 16")));
    }
    if set.is_empty() || set.is_polar() {
        return Ok(EquilibriumSolution::polar());
    }
    let nodes = discretize(set, n_nodes);
    let scale = scale_of(set);
    let n = nodes.len();
    let a = energy_matrix(&nodes, scale);
    let (weights, e_unit, iterations, last_decrease) = minimize(&a, n)?;
    let energy = e_unit - scale.ln();
    Ok(EquilibriumSolution {
        nodes: (0..n).map(|i| nodes.point(i)).collect(),
        weights,
        energy,
        capacity: scale * (-e_unit).exp(),
        polar: false,
        iterations,
        last_decrease,
    })
}

/// Capacity of a real-line compact set.
pub fn log_capacity_intervals(set: &IntervalUnionSet, n_nodes: usize) -> Result<EquilibriumSolution> {
    log_capacity(&PlanarCompact::from(set), n_nodes)
}

/// Discrete energy of fixed weights on the solver's own nodes.
pub fn energy_with_weights(set: &PlanarCompact, n_nodes: usize, weights: &[f64]) -> Result<f64> {
    let nodes = discretize(set, n_nodes);
    if weights.len() != nodes.len() {
        return Err(Error::InvalidInput("weight count does not match node count".into()));
    }
    let scale = scale_of(set);
    let a = energy_matrix(&nodes, scale);
    let mut aw = vec![0.0; weights.len()];
    matvec(&a, weights, &mut aw);
    Ok(dot(weights, &aw) - scale.ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::Component;
    use std::f64::consts::PI;

    #[test]
    fn simplex_projection() {
        let p = project_simplex(&[0.5, 0.5, 0.5]);
        assert!(p.iter().all(|x| (x - 1.0 / 3.0).abs() < 1e-15));
        let p = project_simplex(&[2.0, 0.0, -1.0]);
        assert_eq!(p, vec![1.0, 0.0, 0.0]);
        let s: f64 = project_simplex(&[0.3, -0.2, 0.9, 0.1]).iter().sum();
        assert!((s - 1.0).abs() < 1e-15);
    }

    #[test]
    fn interval_closed_form() {
        assert_eq!(interval_capacity((-8.0f64).exp2()).unwrap(), (-10.0f64).exp2());
        assert_eq!(interval_capacity(0.0).unwrap(), 0.0);
        assert_eq!(interval_capacity(2.0).unwrap(), 0.5);
        assert!(matches!(interval_capacity(-1.0), Err(Error::NegativeLength(_))));
    }

    #[test]
    fn unit_interval_solver() {
        let sol = log_capacity_intervals(&IntervalUnionSet::interval(-1.0, 1.0), 512).unwrap();
        assert!((0.495..=0.505).contains(&sol.capacity), "{}", sol.capacity);
        let s: f64 = sol.weights.iter().sum();
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn circle_uniform_weights() {
        let r = 0.3;
        let set = PlanarCompact { components: vec![Component::Circle { center: C64::new(0.0, 0.0), radius: r }] };
        let m = 512;
        let e = energy_with_weights(&set, m, &vec![1.0 / m as f64; m]).unwrap();
        // closed form for m equally spaced points with cell 2 pi r / m
        let want = -r.ln() + (4.0 / (2.0 * PI)).ln() / m as f64;
        assert!((e - want).abs() < 1e-10, "{e} vs {want}");
        let sol = log_capacity(&set, m).unwrap();
        assert!((sol.capacity - r).abs() < 0.01 * r);
    }

    #[test]
    fn point_is_polar() {
        let sol = log_capacity_intervals(&IntervalUnionSet::point(0.0), 64).unwrap();
        assert!(sol.polar);
        assert_eq!(sol.capacity, 0.0);
    }

    #[test]
    fn too_few_nodes() {
        assert!(log_capacity_intervals(&IntervalUnionSet::interval(0.0, 1.0), 8).is_err());
    }

    #[test]
    fn arcsine_profile() {
        let sol = log_capacity_intervals(&IntervalUnionSet::interval(0.0, 1.0), 200).unwrap();
        let weight_in = |lo: f64, hi: f64| -> f64 {
            sol.nodes.iter().zip(&sol.weights).filter(|(z, _)| lo <= z.re && z.re <= hi).map(|(_, w)| w).sum()
        };
        let outer = weight_in(0.0, 0.05) + weight_in(0.95, 1.0);
        let middle = weight_in(0.45, 0.55);
        assert!(outer > middle);
    }
}
