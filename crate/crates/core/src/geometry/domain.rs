use serde::{Deserialize, Serialize};

use super::cpx;
use super::intervals::IntervalUnionSet;
use crate::{Error, Result, C64};

fn origin() -> C64 {
    C64::new(0.0, 0.0)
}

/// Analytic description of a bounded planar domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainSpec {
    Disk {
        #[serde(with = "cpx", default = "origin")]
        center: C64,
        radius: f64,
    },
    /// `inner < |z - center| < outer`.
    Annulus {
        #[serde(with = "cpx", default = "origin")]
        center: C64,
        inner: f64,
        outer: f64,
    },
    /// `{|z| < outer_radius}` minus the closed disk `D(hole_center, hole_radius)`.
    DiskMinusDisk {
        outer_radius: f64,
        #[serde(with = "cpx")]
        hole_center: C64,
        hole_radius: f64,
    },
    /// An open disk with a compact subset of the real axis removed. The set is
    /// given in absolute coordinates.
    DiskMinusSet {
        #[serde(with = "cpx", default = "origin")]
        center: C64,
        radius: f64,
        set: IntervalUnionSet,
    },
    /// Simple polygon, vertices in order.
    Polygon { vertices: Vec<[f64; 2]> },
}

fn circle_roots(p: C64, d: C64, c: C64, r: f64) -> Option<(f64, f64)> {
    let e = p - c;
    let a = d.norm_sqr();
    let b = 2.0 * (e.re * d.re + e.im * d.im);
    let cc = e.norm_sqr() - r * r;
    let disc = b * b - 4.0 * a * cc;
    if a == 0.0 || disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    let q = -0.5 * (b + b.signum() * sq);
    let (t1, t2) = if q == 0.0 { (0.0, 0.0) } else { (q / a, cc / q) };
    Some((t1.min(t2), t1.max(t2)))
}

/// First `t` in `(0, 1]` where `p + t d` leaves the open disk.
fn circle_exit(p: C64, d: C64, c: C64, r: f64) -> Option<f64> {
    let (_, t) = circle_roots(p, d, c, r)?;
    (t > 0.0 && t <= 1.0 + 1e-12).then(|| t.min(1.0))
}

/// First `t` in `(0, 1]` where `p + t d` enters the closed disk.
pub(crate) fn circle_enter(p: C64, d: C64, c: C64, r: f64) -> Option<f64> {
    let (t, _) = circle_roots(p, d, c, r)?;
    (t > 0.0 && t <= 1.0 + 1e-12).then(|| t.min(1.0))
}

fn set_hit(set: &IntervalUnionSet, p: C64, d: C64) -> Option<f64> {
    if d.im != 0.0 {
        let t = -p.im / d.im;
        if t > 0.0 && t <= 1.0 + 1e-12 {
            let x = p.re + t * d.re;
            let tol = 1e-12 * (1.0 + x.abs());
            let hit = set.intervals.iter().any(|&(l, r)| l - tol <= x && x <= r + tol)
                || set.points.iter().any(|&q| (q - x).abs() <= tol);
            if hit {
                return Some(t.min(1.0));
            }
        }
        return None;
    }
    if p.im != 0.0 || d.re == 0.0 {
        return None;
    }
    // moving along the axis itself
    let x0 = p.re;
    let mut best = f64::INFINITY;
    let mut consider = |x: f64| {
        let t = (x - x0) / d.re;
        if t > 0.0 && t < best {
            best = t;
        }
    };
    for &(l, r) in &set.intervals {
        consider(if d.re > 0.0 { l } else { r });
    }
    for &q in &set.points {
        consider(q);
    }
    (best <= 1.0 + 1e-12).then(|| best.min(1.0))
}

fn cross(a: C64, b: C64) -> f64 {
    a.re * b.im - a.im * b.re
}

fn segment_distance(z: C64, a: C64, b: C64) -> f64 {
    let e = b - a;
    let t = (((z - a) * e.conj()).re / e.norm_sqr()).clamp(0.0, 1.0);
    (z - a - e * t).norm()
}

fn min_opt(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl DomainSpec {
    pub fn disk(center: C64, radius: f64) -> Self {
        DomainSpec::Disk { center, radius }
    }

    pub fn unit_disk() -> Self {
        Self::disk(origin(), 1.0)
    }

    pub fn annulus(inner: f64, outer: f64) -> Self {
        DomainSpec::Annulus { center: origin(), inner, outer }
    }

    /// `D(0, 3)` minus the standard slit set.
    pub fn appendix_domain(terms: usize) -> Self {
        DomainSpec::DiskMinusSet { center: origin(), radius: 3.0, set: super::appendix_set(terms) }
    }

    fn vertices(&self) -> Vec<C64> {
        match self {
            DomainSpec::Polygon { vertices } => vertices.iter().map(|v| C64::new(v[0], v[1])).collect(),
            _ => Vec::new(),
        }
    }

    /// Rejects parameter combinations with empty interior.
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            DomainSpec::Disk { radius, .. } => *radius > 0.0,
            DomainSpec::Annulus { inner, outer, .. } => *inner >= 0.0 && inner < outer,
            DomainSpec::DiskMinusDisk { outer_radius, hole_center, hole_radius } => {
                *outer_radius > 0.0 && *hole_radius >= 0.0 && hole_center.norm() - hole_radius > -outer_radius
                    && !(hole_center.norm() + outer_radius <= *hole_radius)
            }
            DomainSpec::DiskMinusSet { radius, .. } => *radius > 0.0,
            DomainSpec::Polygon { .. } => {
                let v = self.vertices();
                let area: f64 = (0..v.len()).map(|i| cross(v[i], v[(i + 1) % v.len()])).sum();
                v.len() >= 3 && area.abs() > 0.0
            }
        };
        let finite = match self {
            DomainSpec::Disk { center, radius } => center.is_finite() && radius.is_finite(),
            DomainSpec::Annulus { center, inner, outer } => center.is_finite() && inner.is_finite() && outer.is_finite(),
            DomainSpec::DiskMinusDisk { outer_radius, hole_center, hole_radius } => {
                outer_radius.is_finite() && hole_center.is_finite() && hole_radius.is_finite()
            }
            DomainSpec::DiskMinusSet { center, radius, .. } => center.is_finite() && radius.is_finite(),
            DomainSpec::Polygon { vertices } => vertices.iter().all(|v| v[0].is_finite() && v[1].is_finite()),
        };
        if ok && finite {
            Ok(())
        } else {
            Err(Error::EmptyDomain)
        }
    }

    /// Membership in the open domain.
    pub fn contains(&self, z: C64) -> bool {
        match self {
            DomainSpec::Disk { center, radius } => (z - center).norm() < *radius,
            DomainSpec::Annulus { center, inner, outer } => {
                let r = (z - center).norm();
                *inner < r && r < *outer
            }
            DomainSpec::DiskMinusDisk { outer_radius, hole_center, hole_radius } => {
                z.norm() < *outer_radius && (z - hole_center).norm() > *hole_radius
            }
            DomainSpec::DiskMinusSet { center, radius, set } => {
                (z - center).norm() < *radius && !(z.im == 0.0 && set.contains(z.re))
            }
            DomainSpec::Polygon { .. } => {
                let v = self.vertices();
                let mut inside = false;
                let mut j = v.len() - 1;
                for i in 0..v.len() {
                    let (a, b) = (v[i], v[j]);
                    if (a.im > z.im) != (b.im > z.im) {
                        let x = a.re + (z.im - a.im) * (b.re - a.re) / (b.im - a.im);
                        if z.re < x {
                            inside = !inside;
                        }
                    }
                    j = i;
                }
                inside && self.boundary_distance_raw(z) > 0.0
            }
        }
    }

    fn boundary_distance_raw(&self, z: C64) -> f64 {
        match self {
            DomainSpec::Disk { center, radius } => radius - (z - center).norm(),
            DomainSpec::Annulus { center, inner, outer } => {
                let r = (z - center).norm();
                (outer - r).min(r - inner)
            }
            DomainSpec::DiskMinusDisk { outer_radius, hole_center, hole_radius } => {
                (outer_radius - z.norm()).min((z - hole_center).norm() - hole_radius)
            }
            DomainSpec::DiskMinusSet { center, radius, set } => {
                let to_circle = radius - (z - center).norm();
                let to_set = set
                    .intervals
                    .iter()
                    .map(|&(l, r)| {
                        let x = z.re.clamp(l, r);
                        C64::new(z.re - x, z.im).norm()
                    })
                    .chain(set.points.iter().map(|&p| C64::new(z.re - p, z.im).norm()))
                    .fold(f64::INFINITY, f64::min);
                to_circle.min(to_set)
            }
            DomainSpec::Polygon { .. } => {
                let v = self.vertices();
                (0..v.len())
                    .map(|i| segment_distance(z, v[i], v[(i + 1) % v.len()]))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// Euclidean distance to the complement; zero outside the domain.
    pub fn boundary_distance(&self, z: C64) -> f64 {
        if self.contains(z) {
            self.boundary_distance_raw(z).max(0.0)
        } else {
            0.0
        }
    }

    /// For `p` inside, the first fraction `t` in `(0, 1]` at which the segment
    /// from `p` to `q` meets the complement.
    pub fn first_hit(&self, p: C64, q: C64) -> Option<f64> {
        let d = q - p;
        match self {
            DomainSpec::Disk { center, radius } => circle_exit(p, d, *center, *radius),
            DomainSpec::Annulus { center, inner, outer } => {
                min_opt(circle_exit(p, d, *center, *outer), circle_enter(p, d, *center, *inner))
            }
            DomainSpec::DiskMinusDisk { outer_radius, hole_center, hole_radius } => min_opt(
                circle_exit(p, d, origin(), *outer_radius),
                circle_enter(p, d, *hole_center, *hole_radius),
            ),
            DomainSpec::DiskMinusSet { center, radius, set } => {
                min_opt(circle_exit(p, d, *center, *radius), set_hit(set, p, d))
            }
            DomainSpec::Polygon { .. } => {
                let v = self.vertices();
                let mut best: Option<f64> = None;
                for i in 0..v.len() {
                    let a = v[i];
                    let e = v[(i + 1) % v.len()] - a;
                    let den = cross(d, e);
                    if den.abs() < 1e-300 {
                        continue;
                    }
                    let t = cross(a - p, e) / den;
                    let u = cross(a - p, d) / den;
                    if t > 0.0 && t <= 1.0 + 1e-12 && (-1e-12..=1.0 + 1e-12).contains(&u) {
                        best = min_opt(best, Some(t.min(1.0)));
                    }
                }
                best
            }
        }
    }

    /// Axis-aligned bounding box `(lower-left, upper-right)`.
    pub fn bbox(&self) -> (C64, C64) {
        let sq = |c: C64, r: f64| (c - C64::new(r, r), c + C64::new(r, r));
        match self {
            DomainSpec::Disk { center, radius } => sq(*center, *radius),
            DomainSpec::Annulus { center, outer, .. } => sq(*center, *outer),
            DomainSpec::DiskMinusDisk { outer_radius, .. } => sq(origin(), *outer_radius),
            DomainSpec::DiskMinusSet { center, radius, .. } => sq(*center, *radius),
            DomainSpec::Polygon { .. } => {
                let v = self.vertices();
                let lo = v.iter().fold(C64::new(f64::INFINITY, f64::INFINITY), |m, z| {
                    C64::new(m.re.min(z.re), m.im.min(z.im))
                });
                let hi = v.iter().fold(C64::new(f64::NEG_INFINITY, f64::NEG_INFINITY), |m, z| {
                    C64::new(m.re.max(z.re), m.im.max(z.im))
                });
                (lo, hi)
            }
        }
    }

    /// Grid anchor: a point that should coincide with a grid node.
    pub fn anchor(&self) -> C64 {
        match self {
            DomainSpec::Disk { center, .. }
            | DomainSpec::Annulus { center, .. }
            | DomainSpec::DiskMinusSet { center, .. } => *center,
            _ => origin(),
        }
    }

    /// Diameter of the domain.
    pub fn diameter(&self) -> f64 {
        match self {
            DomainSpec::Disk { radius, .. } => 2.0 * radius,
            DomainSpec::Annulus { outer, .. } => 2.0 * outer,
            DomainSpec::DiskMinusDisk { outer_radius, .. } => 2.0 * outer_radius,
            DomainSpec::DiskMinusSet { radius, .. } => 2.0 * radius,
            DomainSpec::Polygon { .. } => {
                let v = self.vertices();
                let mut d: f64 = 0.0;
                for a in &v {
                    for b in &v {
                        d = d.max((a - b).norm());
                    }
                }
                d
            }
        }
    }

    /// Lebesgue measure of the domain.
    pub fn area(&self) -> f64 {
        use std::f64::consts::PI;
        match self {
            DomainSpec::Disk { radius, .. } | DomainSpec::DiskMinusSet { radius, .. } => PI * radius * radius,
            DomainSpec::Annulus { inner, outer, .. } => PI * (outer * outer - inner * inner),
            DomainSpec::DiskMinusDisk { outer_radius, hole_radius, .. } => {
                PI * (outer_radius * outer_radius - hole_radius * hole_radius)
            }
            DomainSpec::Polygon { .. } => {
                let v = self.vertices();
                0.5 * (0..v.len()).map(|i| cross(v[i], v[(i + 1) % v.len()])).sum::<f64>().abs()
            }
        }
    }
}
