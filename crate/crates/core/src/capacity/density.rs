use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use super::compact::{Component, PlanarCompact};
use super::equilibrium::log_capacity;
use crate::geometry::{cpx, DomainSpec, IntervalUnionSet};
use crate::{Error, Result, C64};

/// Default node budget for the many small solves in a density scan.
pub const DENSITY_NODES: usize = 256;

/// `E ∩ {x : 2^-(n+1) < |x - a| <= 2^-n}`, closed up.
pub fn annulus_complement_slice(e: &IntervalUnionSet, a: f64, n: u32) -> IntervalUnionSet {
    let outer = (-(n as f64)).exp2();
    let inner = 0.5 * outer;
    let left = e.intersect_range(a - outer, a - inner, true, false);
    let right = e.intersect_range(a + inner, a + outer, false, true);
    left.union(&right)
}

/// Which index set a report describes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "definition", rename_all = "snake_case")]
pub enum DensityParams {
    /// `C(E_{2^-n}(a) - D(a, 2^-(n+1))) >= eps 2^-n`.
    CarlesonTotik { eps: f64 },
    /// `C(E_{lambda^n}(a)) >= eps lambda^(gamma n)`.
    Gamma { eps: f64, lambda: f64, gamma: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityRow {
    pub n: u32,
    pub slice_capacity: f64,
    pub threshold: f64,
    pub member: bool,
}

/// Index set up to `n_max` with its finite-range density statistic.
#[derive(Clone, Debug, Serialize)]
pub struct DensityIndexReport {
    #[serde(with = "cpx")]
    pub a: C64,
    pub params: DensityParams,
    pub members: Vec<u32>,
    pub density_value: f64,
    pub n_max: u32,
    /// Range of `N` over which the statistic is taken.
    pub window: (u32, u32),
    pub rows: Vec<DensityRow>,
    pub note: &'static str,
}

impl DensityIndexReport {
    /// True when no index falls in the trailing window.
    pub fn finite_in_window(&self) -> bool {
        !self.members.iter().any(|&n| n >= self.window.0)
    }

    pub fn all_members(&self) -> bool {
        self.members.len() == self.n_max as usize
    }
}

const CT_NOTE: &str = "lower density estimated by the minimum over the trailing window; the true liminf is not certified";
const GAMMA_NOTE: &str = "partial harmonic sum over 1..n_max divided by log n_max; the liminf is not certified";

fn capacity_or_zero(set: &PlanarCompact, nodes: usize) -> Result<f64> {
    Ok(log_capacity(set, nodes)?.capacity)
}

/// Index set of scales where the annular slice of `E` around `a` carries
/// capacity at least `eps 2^-n`.
pub fn carleson_totik_set(
    e: &IntervalUnionSet,
    a: f64,
    eps: f64,
    n_max: u32,
    nodes: usize,
) -> Result<DensityIndexReport> {
    if !(eps > 0.0) || n_max < 1 {
        return Err(Error::InvalidInput("need eps > 0 and n_max >= 1".into()));
    }
    let rows: Vec<DensityRow> = (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let slice = annulus_complement_slice(e, a, n);
            let cap = capacity_or_zero(&PlanarCompact::from(&slice), nodes)?;
            let threshold = eps * (-(n as f64)).exp2();
            Ok(DensityRow { n, slice_capacity: cap, threshold, member: cap >= threshold })
        })
        .collect::<Result<_>>()?;
    let members: Vec<u32> = rows.iter().filter(|r| r.member).map(|r| r.n).collect();
    let w0 = (n_max / 2).max(1);
    let density_value = (w0..=n_max)
        .map(|big_n| members.iter().filter(|&&m| m <= big_n).count() as f64 / (big_n as f64 + 1.0))
        .fold(f64::INFINITY, f64::min);
    Ok(DensityIndexReport {
        a: C64::new(a, 0.0),
        params: DensityParams::CarlesonTotik { eps },
        members,
        density_value,
        n_max,
        window: (w0, n_max),
        rows,
        note: CT_NOTE,
    })
}

/// Produces `D(a, r) - Omega` (or a subset of it) for a domain.
pub trait ComplementSlicer: Sync {
    fn slice(&self, a: C64, r: f64) -> PlanarCompact;
}

/// Slicer for a disk with a real-line compact set removed. The part of the
/// complement outside the disk is represented by the arc of the boundary
/// circle inside `D(a, r)`, which has the same capacity bound used in
/// practice and is a subset of the true complement.
#[derive(Clone, Debug)]
pub struct DiskSetSlicer {
    pub center: C64,
    pub radius: f64,
    pub set: IntervalUnionSet,
}

impl DiskSetSlicer {
    pub fn from_spec(spec: &DomainSpec) -> Result<Self> {
        match spec {
            DomainSpec::Disk { center, radius } => {
                Ok(DiskSetSlicer { center: *center, radius: *radius, set: IntervalUnionSet::empty() })
            }
            DomainSpec::DiskMinusSet { center, radius, set } => {
                Ok(DiskSetSlicer { center: *center, radius: *radius, set: set.clone() })
            }
            _ => Err(Error::InvalidInput("slicing needs a disk or a disk minus a set".into())),
        }
    }

    /// Arc of the boundary circle within `D(a, r)`, as (start, sweep).
    pub fn boundary_arc(&self, a: C64, r: f64) -> Option<(f64, f64)> {
        let rel = a - self.center;
        let d = rel.norm();
        let big = self.radius;
        if d + big <= r {
            return Some((0.0, 2.0 * PI));
        }
        if d == 0.0 {
            return None;
        }
        let k = (d * d + big * big - r * r) / (2.0 * big * d);
        if k >= 1.0 {
            return None;
        }
        if k <= -1.0 {
            return Some((0.0, 2.0 * PI));
        }
        let half = k.acos();
        Some((rel.arg() - half, 2.0 * half))
    }

    pub fn real_part(&self, a: C64, r: f64) -> IntervalUnionSet {
        if a.im.abs() > r {
            return IntervalUnionSet::empty();
        }
        let w = (r * r - a.im * a.im).sqrt();
        self.set.clip(a.re - w, a.re + w)
    }
}

impl ComplementSlicer for DiskSetSlicer {
    fn slice(&self, a: C64, r: f64) -> PlanarCompact {
        let mut out = PlanarCompact::from(&self.real_part(a, r));
        if let Some((start, sweep)) = self.boundary_arc(a, r) {
            if sweep >= 2.0 * PI {
                out.push(Component::Circle { center: self.center, radius: self.radius });
            } else {
                out.push(Component::Arc { center: self.center, radius: self.radius, start, sweep });
            }
        }
        out
    }
}

/// Index set `{n : C(E_{lambda^n}(a)) >= eps lambda^(gamma n)}` and the
/// normalized partial harmonic sum over it.
pub fn gamma_density_set(
    slicer: &dyn ComplementSlicer,
    a: C64,
    eps: f64,
    lambda: f64,
    gamma: f64,
    n_max: u32,
    nodes: usize,
) -> Result<DensityIndexReport> {
    if !(eps > 0.0) || !(lambda > 0.0 && lambda < 1.0) || !(gamma > 1.0) || n_max < 2 {
        return Err(Error::InvalidInput("need eps > 0, 0 < lambda < 1, gamma > 1, n_max >= 2".into()));
    }
    let rows: Vec<DensityRow> = (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let r = lambda.powi(n as i32);
            let cap = capacity_or_zero(&slicer.slice(a, r), nodes)?;
            let threshold = eps * lambda.powf(gamma * n as f64);
            Ok(DensityRow { n, slice_capacity: cap, threshold, member: cap >= threshold })
        })
        .collect::<Result<_>>()?;
    let members: Vec<u32> = rows.iter().filter(|r| r.member).map(|r| r.n).collect();
    let harmonic: f64 = members.iter().map(|&k| 1.0 / k as f64).sum();
    Ok(DensityIndexReport {
        a,
        params: DensityParams::Gamma { eps, lambda, gamma },
        members,
        density_value: harmonic / (n_max as f64).ln(),
        n_max,
        window: (1, n_max),
        rows,
        note: GAMMA_NOTE,
    })
}

/// Harmonic number `H_n`.
pub fn harmonic(n: u32) -> f64 {
    (1..=n).map(|k| 1.0 / k as f64).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::appendix_set;

    #[test]
    fn appendix_slice_n2() {
        let s = annulus_complement_slice(&appendix_set(40), 0.0, 2);
        assert_eq!(s.intervals, vec![(0.125, 0.125 + 1.0 / 64.0)]);
        // the left end of the next interval sits on the outer circle
        assert_eq!(s.points, vec![0.25]);
    }

    #[test]
    fn full_interval_slice() {
        let s = annulus_complement_slice(&IntervalUnionSet::interval(0.0, 1.0), 0.0, 1);
        assert_eq!(s.intervals, vec![(0.25, 0.5)]);
    }

    #[test]
    fn point_slices_empty() {
        for n in 0..10 {
            assert!(annulus_complement_slice(&IntervalUnionSet::point(0.0), 0.0, n).is_empty());
        }
    }

    #[test]
    fn arc_capacity_closed_form() {
        // an arc of radius R and half-angle b has capacity R sin(b / 2)
        let sl = DiskSetSlicer { center: C64::new(0.0, 0.0), radius: 3.0, set: IntervalUnionSet::empty() };
        let a = C64::from_polar(3.0, 0.7);
        let r = 0.25;
        let (_, sweep) = sl.boundary_arc(a, r).unwrap();
        let want = 3.0 * (sweep / 4.0).sin();
        assert!((want - r / 2.0).abs() < 1e-14);
        let cap = log_capacity(&sl.slice(a, r), 512).unwrap().capacity;
        assert!((cap - want).abs() < 0.01 * want, "{cap} vs {want}");
    }

    #[test]
    fn ct_full_interval_all_members() {
        let rep = carleson_totik_set(&IntervalUnionSet::interval(-1.0, 1.0), 0.0, 1.0 / 16.0, 12, 128).unwrap();
        assert_eq!(rep.members, (1..=12).collect::<Vec<_>>());
    }

    #[test]
    fn ct_polar_empty() {
        let rep = carleson_totik_set(&IntervalUnionSet::point(0.0), 0.0, 0.1, 8, 64).unwrap();
        assert!(rep.members.is_empty());
        assert_eq!(rep.density_value, 0.0);
    }

    #[test]
    fn gamma_full_disk_empty() {
        let sl = DiskSetSlicer::from_spec(&DomainSpec::unit_disk()).unwrap();
        let rep = gamma_density_set(&sl, C64::new(0.0, 0.0), 1.0 / 16.0, 0.5, 2.0, 10, 64).unwrap();
        assert!(rep.members.is_empty());
        assert_eq!(rep.density_value, 0.0);
    }
}
