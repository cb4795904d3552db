use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Number of slit intervals kept when truncating the standard slit set.
pub const APPENDIX_TERMS: usize = 40;

/// A compact subset of the real line: finitely many closed intervals plus
/// isolated points.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IntervalUnionSet {
    #[serde(default)]
    pub intervals: Vec<(f64, f64)>,
    #[serde(default)]
    pub points: Vec<f64>,
}

impl IntervalUnionSet {
    /// Builds and normalizes a set. Fails on reversed or non-finite intervals.
    pub fn new(intervals: Vec<(f64, f64)>, points: Vec<f64>) -> Result<Self> {
        for &(l, r) in &intervals {
            if !(l.is_finite() && r.is_finite()) || l > r {
                return Err(Error::InvalidInput(format!("bad interval [{l}, {r}]")));
            }
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidInput("non-finite point".into()));
        }
        Ok(IntervalUnionSet { intervals, points }.normalized())
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn interval(l: f64, r: f64) -> Self {
        Self::new(vec![(l, r)], vec![]).expect("valid interval")
    }

    pub fn point(x: f64) -> Self {
        IntervalUnionSet { intervals: vec![], points: vec![x] }
    }

    /// Sorts, merges overlapping intervals, turns degenerate intervals into
    /// points and drops points covered by an interval.
    pub fn normalized(&self) -> Self {
        let mut pts: Vec<f64> = self.points.clone();
        let mut iv: Vec<(f64, f64)> = Vec::new();
        for &(l, r) in &self.intervals {
            if l == r {
                pts.push(l);
            } else {
                iv.push((l, r));
            }
        }
        iv.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(iv.len());
        for (l, r) in iv {
            match merged.last_mut() {
                Some(last) if l <= last.1 => last.1 = last.1.max(r),
                _ => merged.push((l, r)),
            }
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts.retain(|&x| !merged.iter().any(|&(l, r)| l <= x && x <= r));
        IntervalUnionSet { intervals: merged, points: pts }
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty() && self.points.is_empty()
    }

    /// True when the set has no interval of positive length.
    pub fn is_polar(&self) -> bool {
        self.intervals.iter().all(|&(l, r)| r <= l)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|&(l, r)| l <= x && x <= r) || self.points.iter().any(|&p| p == x)
    }

    pub fn total_length(&self) -> f64 {
        self.intervals.iter().map(|&(l, r)| r - l).sum()
    }

    /// Smallest and largest element, if any.
    pub fn extent(&self) -> Option<(f64, f64)> {
        let lo = self
            .intervals
            .iter()
            .map(|i| i.0)
            .chain(self.points.iter().copied())
            .min_by(f64::total_cmp)?;
        let hi = self
            .intervals
            .iter()
            .map(|i| i.1)
            .chain(self.points.iter().copied())
            .max_by(f64::total_cmp)?;
        Some((lo, hi))
    }

    /// Distance from `x` to the set.
    pub fn distance(&self, x: f64) -> f64 {
        let a = self
            .intervals
            .iter()
            .map(|&(l, r)| if x < l { l - x } else if x > r { x - r } else { 0.0 });
        let b = self.points.iter().map(|&p| (x - p).abs());
        a.chain(b).fold(f64::INFINITY, f64::min)
    }

    /// Closure of the intersection with the range between `lo` and `hi`,
    /// each end open or closed.
    pub fn intersect_range(&self, lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> Self {
        let admit = |x: f64| {
            (x > lo || (lo_closed && x == lo)) && (x < hi || (hi_closed && x == hi))
        };
        let mut intervals = Vec::new();
        let mut points = Vec::new();
        for &(l, r) in &self.intervals {
            let a = l.max(lo);
            let b = r.min(hi);
            if a < b {
                intervals.push((a, b));
            } else if a == b && admit(a) {
                points.push(a);
            }
        }
        for &p in &self.points {
            if admit(p) {
                points.push(p);
            }
        }
        IntervalUnionSet { intervals, points }.normalized()
    }

    /// Intersection with the closed interval `[lo, hi]`.
    pub fn clip(&self, lo: f64, hi: f64) -> Self {
        self.intersect_range(lo, hi, true, true)
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut intervals = self.intervals.clone();
        intervals.extend_from_slice(&other.intervals);
        let mut points = self.points.clone();
        points.extend_from_slice(&other.points);
        IntervalUnionSet { intervals, points }.normalized()
    }

    /// Set inclusion, exact in floating point.
    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.intervals
            .iter()
            .all(|&(l, r)| other.intervals.iter().any(|&(a, b)| a <= l && r <= b))
            && self.points.iter().all(|&p| other.contains(p))
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        let f = |x: f64| x * lambda;
        self.map(f)
    }

    pub fn translated(&self, t: f64) -> Self {
        self.map(|x| x + t)
    }

    fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        let intervals = self
            .intervals
            .iter()
            .map(|&(l, r)| {
                let (a, b) = (f(l), f(r));
                (a.min(b), a.max(b))
            })
            .collect();
        IntervalUnionSet { intervals, points: self.points.iter().map(|&p| f(p)).collect() }.normalized()
    }
}

/// `{0}` together with `[2^-k, 2^-k + 2^-2k]` for `k = 0..=terms`.
pub fn appendix_set(terms: usize) -> IntervalUnionSet {
    let intervals = (0..=terms)
        .map(|k| {
            let a = (-(k as f64)).exp2();
            (a, a + a * a)
        })
        .collect();
    IntervalUnionSet { intervals, points: vec![0.0] }.normalized()
}
