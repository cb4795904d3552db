use std::collections::VecDeque;

use rayon::prelude::*;
use serde::Serialize;

use super::domain::DomainSpec;
use crate::report::{fmt_g17, Table};
use crate::{Error, Result, C64};

/// Unit steps in grid order: east, west, north, south.
pub const DIRECTIONS: [(i64, i64); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Interior,
    BoundaryAdjacent,
    Exterior,
}

impl NodeKind {
    pub fn is_inside(self) -> bool {
        self != NodeKind::Exterior
    }

    pub fn code(self) -> u8 {
        match self {
            NodeKind::Interior => 0,
            NodeKind::BoundaryAdjacent => 1,
            NodeKind::Exterior => 2,
        }
    }
}

/// A rectangular grid laid over a domain.
///
/// For every inside node the four arms carry the fraction of a grid step
/// after which the arm meets the complement (1 when the neighbour is reached
/// without crossing).
#[derive(Clone, Debug)]
pub struct PlanarGridDomain {
    pub spec: DomainSpec,
    pub origin: C64,
    pub spacing: f64,
    pub nx: usize,
    pub ny: usize,
    pub mask: Vec<NodeKind>,
    pub delta: Vec<f64>,
    pub arms: Vec<[f64; 4]>,
    cut: Vec<u8>,
}

const MAX_NODES: usize = 60_000_000;

impl PlanarGridDomain {
    /// Lays a grid of step `h` over `spec`, with the spec's anchor on a node.
    pub fn rasterize(spec: &DomainSpec, h: f64) -> Result<Self> {
        spec.validate()?;
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidInput(format!("grid step {h} must be positive")));
        }
        let (lo, hi) = spec.bbox();
        let a = spec.anchor();
        let i0 = ((lo.re - a.re) / h).floor() as i64 - 1;
        let i1 = ((hi.re - a.re) / h).ceil() as i64 + 1;
        let j0 = ((lo.im - a.im) / h).floor() as i64 - 1;
        let j1 = ((hi.im - a.im) / h).ceil() as i64 + 1;
        let nx = (i1 - i0 + 1) as usize;
        let ny = (j1 - j0 + 1) as usize;
        if nx.saturating_mul(ny) > MAX_NODES {
            return Err(Error::InvalidInput(format!("grid of {nx}x{ny} nodes is too large")));
        }
        let origin = a + C64::new(i0 as f64 * h, j0 as f64 * h);
        let point = |k: usize| origin + C64::new((k % nx) as f64 * h, (k / nx) as f64 * h);
        let n = nx * ny;
        // nodes within rounding distance of the boundary count as outside
        let near = 1e-9 * h;
        let delta: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|k| {
                let d = spec.boundary_distance(point(k));
                if d > near {
                    d
                } else {
                    0.0
                }
            })
            .collect();
        let inside: Vec<bool> = delta.iter().map(|&d| d > 0.0).collect();
        let local: Vec<([f64; 4], u8)> = (0..n)
            .into_par_iter()
            .map(|k| {
                let mut out = [0.0; 4];
                let mut bits = 0u8;
                if !inside[k] {
                    return (out, bits);
                }
                let (i, j) = ((k % nx) as i64, (k / nx) as i64);
                let p = point(k);
                for (d, &(di, dj)) in DIRECTIONS.iter().enumerate() {
                    let nb = (j + dj) as usize * nx + (i + di) as usize;
                    let q = p + C64::new(di as f64 * h, dj as f64 * h);
                    match spec.first_hit(p, q) {
                        Some(t) => {
                            out[d] = t;
                            bits |= 1 << d;
                        }
                        None => {
                            out[d] = 1.0;
                            if !inside[nb] {
                                bits |= 1 << d;
                            }
                        }
                    }
                }
                (out, bits)
            })
            .collect();
        let arms: Vec<[f64; 4]> = local.iter().map(|l| l.0).collect();
        let cut: Vec<u8> = local.iter().map(|l| l.1).collect();
        let mask: Vec<NodeKind> = (0..n)
            .map(|k| match (inside[k], cut[k]) {
                (false, _) => NodeKind::Exterior,
                (true, 0) => NodeKind::Interior,
                (true, _) => NodeKind::BoundaryAdjacent,
            })
            .collect();
        let grid = PlanarGridDomain { spec: spec.clone(), origin, spacing: h, nx, ny, mask, delta, arms, cut };
        let count = grid.inside_count();
        if count == 0 {
            return Err(Error::EmptyDomain);
        }
        if count < 100 {
            return Err(Error::Resolution(format!("only {count} interior nodes, need at least 100")));
        }
        let comps = grid.components();
        if comps > 1 {
            return Err(Error::Resolution(format!("interior nodes split into {comps} components")));
        }
        Ok(grid)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn coords(&self, k: usize) -> (usize, usize) {
        (k % self.nx, k / self.nx)
    }

    pub fn point(&self, k: usize) -> C64 {
        let (i, j) = self.coords(k);
        self.origin + C64::new(i as f64 * self.spacing, j as f64 * self.spacing)
    }

    pub fn is_inside(&self, k: usize) -> bool {
        self.mask[k].is_inside()
    }

    /// Whether arm `d` of inside node `k` meets the complement before the
    /// neighbour.
    pub fn arm_cut(&self, k: usize, d: usize) -> bool {
        self.cut[k] & (1 << d) != 0
    }

    /// Neighbour index in direction `d`, if on the grid.
    pub fn neighbor(&self, k: usize, d: usize) -> Option<usize> {
        let (i, j) = self.coords(k);
        let (di, dj) = DIRECTIONS[d];
        let ii = i as i64 + di;
        let jj = j as i64 + dj;
        if ii < 0 || jj < 0 || ii as usize >= self.nx || jj as usize >= self.ny {
            None
        } else {
            Some(self.index(ii as usize, jj as usize))
        }
    }

    pub fn inside_count(&self) -> usize {
        self.mask.iter().filter(|m| m.is_inside()).count()
    }

    pub fn inside_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&k| self.is_inside(k))
    }

    /// Number of 4-connected components of inside nodes; two neighbours are
    /// joined when the arm between them is uncut from at least one side.
    pub fn components(&self) -> usize {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut comps = 0;
        let mut queue = VecDeque::new();
        for start in 0..n {
            if seen[start] || !self.is_inside(start) {
                continue;
            }
            comps += 1;
            seen[start] = true;
            queue.push_back(start);
            while let Some(k) = queue.pop_front() {
                for d in 0..4 {
                    let Some(nb) = self.neighbor(k, d) else { continue };
                    if self.arm_cut(k, d) && (!self.is_inside(nb) || self.arm_cut(nb, d ^ 1)) {
                        continue;
                    }
                    {
                        if !seen[nb] && self.is_inside(nb) {
                            seen[nb] = true;
                            queue.push_back(nb);
                        }
                    }
                }
            }
        }
        comps
    }

    /// Nearest grid node to `z`.
    pub fn nearest(&self, z: C64) -> Option<usize> {
        let u = (z - self.origin) / self.spacing;
        let i = u.re.round();
        let j = u.im.round();
        if i < 0.0 || j < 0.0 || i as usize >= self.nx || j as usize >= self.ny {
            return None;
        }
        Some(self.index(i as usize, j as usize))
    }

    pub fn diameter(&self) -> f64 {
        self.spec.diameter()
    }

    /// Node table with columns `x, y, mask, delta`.
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&["x", "y", "mask", "delta"]);
        for k in 0..self.len() {
            let p = self.point(k);
            t.push(vec![fmt_g17(p.re), fmt_g17(p.im), self.mask[k].code().to_string(), fmt_g17(self.delta[k])]);
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::appendix_set;

    #[test]
    fn unit_disk_center_distance() {
        let g = PlanarGridDomain::rasterize(&DomainSpec::unit_disk(), 0.01).unwrap();
        let k = g.nearest(C64::new(0.0, 0.0)).unwrap();
        assert_eq!(g.point(k), C64::new(0.0, 0.0));
        assert_eq!(g.delta[k], 1.0);
        let n = g.inside_count() as f64;
        assert!((n * 1e-4 - std::f64::consts::PI).abs() < 0.01);
    }

    #[test]
    fn appendix_domain_values() {
        let spec = DomainSpec::DiskMinusSet { center: C64::new(0.0, 0.0), radius: 3.0, set: appendix_set(40) };
        let g = PlanarGridDomain::rasterize(&spec, 0.005).unwrap();
        let k = g.nearest(C64::new(-1.0, 0.0)).unwrap();
        assert!((g.point(k).re + 1.0).abs() < 1e-12);
        // the isolated point 0 belongs to the removed set
        assert!((g.delta[k] - 1.0).abs() < 1e-12);
        let k0 = g.nearest(C64::new(0.0, 0.0)).unwrap();
        assert_eq!(g.mask[k0], NodeKind::Exterior);
        let k3 = g.nearest(C64::new(-2.0, 0.0)).unwrap();
        assert!((g.delta[k3] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn annulus_midpoint() {
        let g = PlanarGridDomain::rasterize(&DomainSpec::annulus(0.5, 1.0), 0.01).unwrap();
        let k = g.nearest(C64::new(0.75, 0.0)).unwrap();
        assert!((g.delta[k] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            PlanarGridDomain::rasterize(&DomainSpec::unit_disk(), 0.5),
            Err(Error::Resolution(_))
        ));
        assert!(matches!(
            PlanarGridDomain::rasterize(&DomainSpec::disk(C64::new(0.0, 0.0), -1.0), 0.1),
            Err(Error::EmptyDomain)
        ));
    }

    #[test]
    fn exterior_iff_zero_delta() {
        let g = PlanarGridDomain::rasterize(&DomainSpec::annulus(0.3, 1.0), 0.02).unwrap();
        for k in 0..g.len() {
            assert_eq!(g.mask[k] == NodeKind::Exterior, g.delta[k] == 0.0);
        }
    }

    #[test]
    fn slit_arms_cut() {
        let spec = DomainSpec::DiskMinusSet {
            center: C64::new(0.0, 0.0),
            radius: 1.0,
            set: crate::geometry::IntervalUnionSet::interval(-0.5, 0.5),
        };
        let g = PlanarGridDomain::rasterize(&spec, 0.05).unwrap();
        let k = g.nearest(C64::new(0.0, 0.05)).unwrap();
        assert_eq!(g.mask[k], NodeKind::BoundaryAdjacent);
        assert!(g.arm_cut(k, 3));
        assert!((g.arms[k][3] - 1.0).abs() < 1e-12);
        assert_eq!(g.components(), 1);
    }
}
