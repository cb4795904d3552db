use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::geometry::{cpx, IntervalUnionSet};
use crate::C64;

/// One piece of a planar compact set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Component {
    Segment {
        #[serde(with = "cpx")]
        a: C64,
        #[serde(with = "cpx")]
        b: C64,
    },
    /// Arc of the circle `|z - center| = radius` from angle `start` through
    /// `sweep` radians counterclockwise.
    Arc {
        #[serde(with = "cpx")]
        center: C64,
        radius: f64,
        start: f64,
        sweep: f64,
    },
    Circle {
        #[serde(with = "cpx")]
        center: C64,
        radius: f64,
    },
    /// Closed disk; its capacity equals that of the bounding circle.
    Disk {
        #[serde(with = "cpx")]
        center: C64,
        radius: f64,
    },
    Point {
        #[serde(with = "cpx")]
        at: C64,
    },
}

impl Component {
    /// Components of zero capacity.
    pub fn is_polar(&self) -> bool {
        match self {
            Component::Segment { a, b } => a == b,
            Component::Arc { radius, sweep, .. } => *radius <= 0.0 || *sweep <= 0.0,
            Component::Circle { radius, .. } | Component::Disk { radius, .. } => *radius <= 0.0,
            Component::Point { .. } => true,
        }
    }

    /// A representative point and a length scale.
    fn extent_points(&self) -> Vec<C64> {
        match self {
            Component::Segment { a, b } => vec![*a, *b],
            Component::Arc { center, radius, start, sweep } => {
                let n = 16;
                (0..=n)
                    .map(|k| center + C64::from_polar(*radius, start + sweep * k as f64 / n as f64))
                    .collect()
            }
            Component::Circle { center, radius } | Component::Disk { center, radius } => {
                vec![center - radius, center + radius, center + C64::new(0.0, *radius), center - C64::new(0.0, *radius)]
            }
            Component::Point { at } => vec![*at],
        }
    }
}

/// Finite union of segments, arcs, circles, disks and points.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PlanarCompact {
    pub components: Vec<Component>,
}

impl From<&IntervalUnionSet> for PlanarCompact {
    fn from(set: &IntervalUnionSet) -> Self {
        let mut components: Vec<Component> = set
            .intervals
            .iter()
            .map(|&(l, r)| Component::Segment { a: C64::new(l, 0.0), b: C64::new(r, 0.0) })
            .collect();
        components.extend(set.points.iter().map(|&p| Component::Point { at: C64::new(p, 0.0) }));
        PlanarCompact { components }
    }
}

impl PlanarCompact {
    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn is_polar(&self) -> bool {
        self.components.iter().all(Component::is_polar)
    }

    pub fn push(&mut self, c: Component) {
        self.components.push(c);
    }
}

/// Discretization of a compact set: node `i` sits at `anchor[i] + offset[i]`
/// and represents a cell of length `cell[i]`. Offsets are small relative to
/// anchors on tiny components, which keeps close distances accurate.
#[derive(Clone, Debug, Default)]
pub(crate) struct Nodes {
    pub group: Vec<usize>,
    pub anchor: Vec<C64>,
    pub offset: Vec<C64>,
    pub cell: Vec<f64>,
}

impl Nodes {
    pub fn len(&self) -> usize {
        self.cell.len()
    }

    pub fn point(&self, i: usize) -> C64 {
        self.anchor[i] + self.offset[i]
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        if self.group[i] == self.group[j] {
            (self.offset[i] - self.offset[j]).norm()
        } else {
            ((self.anchor[i] - self.anchor[j]) + (self.offset[i] - self.offset[j])).norm()
        }
    }

    fn push(&mut self, g: usize, a: C64, o: C64, s: f64) {
        self.group.push(g);
        self.anchor.push(a);
        self.offset.push(o);
        self.cell.push(s);
    }
}

/// Chebyshev points `cos((2i - 1) pi / 2m)` and the lengths of the cells
/// bounded by `cos(i pi / m)`, both on `[-1, 1]`.
fn chebyshev(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mf = m as f64;
    let u = (1..=m).map(|i| ((2 * i - 1) as f64 * PI / (2.0 * mf)).cos()).collect();
    let w = (1..=m)
        .map(|i| ((i - 1) as f64 * PI / mf).cos() - (i as f64 * PI / mf).cos())
        .collect();
    (u, w)
}

pub(crate) const MIN_NODES_PER_COMPONENT: usize = 8;

/// Places about `n_nodes` nodes on the non-polar components, at least
/// [`MIN_NODES_PER_COMPONENT`] on each.
pub(crate) fn discretize(set: &PlanarCompact, n_nodes: usize) -> Nodes {
    let live: Vec<&Component> = set.components.iter().filter(|c| !c.is_polar()).collect();
    let mut nodes = Nodes::default();
    if live.is_empty() {
        return nodes;
    }
    let k = live.len();
    let base = (n_nodes / k).max(MIN_NODES_PER_COMPONENT);
    let extra = if base * k < n_nodes { n_nodes - base * k } else { 0 };
    for (g, c) in live.iter().enumerate() {
        let m = base + usize::from(g < extra);
        match c {
            Component::Segment { a, b } => {
                let mid = 0.5 * (a + b);
                let half = 0.5 * (b - a);
                let (u, w) = chebyshev(m);
                let len = half.norm();
                for i in 0..m {
                    nodes.push(g, mid, half * u[i], len * w[i]);
                }
            }
            Component::Arc { center, radius, start, sweep } if *sweep < 2.0 * PI => {
                let phi_m = start + 0.5 * sweep;
                let anchor = center + C64::from_polar(*radius, phi_m);
                let (u, w) = chebyshev(m);
                for i in 0..m {
                    let psi = 0.5 * sweep * u[i];
                    // R (e^{i phi} - e^{i phi_m}) written without cancellation
                    let off = C64::from_polar(*radius, phi_m)
                        * C64::new(0.0, 2.0 * (0.5 * psi).sin())
                        * C64::from_polar(1.0, 0.5 * psi);
                    nodes.push(g, anchor, off, radius * 0.5 * sweep * w[i]);
                }
            }
            Component::Arc { center, radius, .. }
            | Component::Circle { center, radius }
            | Component::Disk { center, radius } => {
                let s = 2.0 * PI * radius / m as f64;
                for i in 0..m {
                    let phi = 2.0 * PI * (i as f64 + 0.5) / m as f64;
                    nodes.push(g, *center, C64::from_polar(*radius, phi), s);
                }
            }
            Component::Point { .. } => {}
        }
    }
    nodes
}

/// Bounding-box diagonal of the non-polar part, used as the length unit.
pub(crate) fn scale_of(set: &PlanarCompact) -> f64 {
    let pts: Vec<C64> = set.components.iter().filter(|c| !c.is_polar()).flat_map(|c| c.extent_points()).collect();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in &pts {
        x0 = x0.min(p.re);
        x1 = x1.max(p.re);
        y0 = y0.min(p.im);
        y1 = y1.max(p.im);
    }
    C64::new(x1 - x0, y1 - y0).norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chebyshev_cells_cover_interval() {
        let (u, w) = chebyshev(17);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
        assert!(u.iter().all(|x| x.abs() < 1.0));
    }

    #[test]
    fn arc_offsets_lie_on_circle() {
        let set = PlanarCompact {
            components: vec![Component::Arc { center: C64::new(1.0, 2.0), radius: 3.0, start: 0.3, sweep: 1e-6 }],
        };
        let nodes = discretize(&set, 32);
        for i in 0..nodes.len() {
            let r = (nodes.point(i) - C64::new(1.0, 2.0)).norm();
            assert!((r - 3.0).abs() < 1e-13);
        }
        let total: f64 = nodes.cell.iter().sum();
        assert!((total - 3e-6).abs() < 1e-18);
    }

    #[test]
    fn allocation_minimum() {
        let set = PlanarCompact::from(&crate::geometry::appendix_set(30));
        let nodes = discretize(&set, 64);
        assert_eq!(nodes.len(), 31 * MIN_NODES_PER_COMPONENT);
    }
}
