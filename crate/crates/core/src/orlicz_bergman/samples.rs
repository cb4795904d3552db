use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{cpx, HartogsProfileDomain};
use crate::quad::gauss_legendre_on;
use crate::{Error, Result, C64};

/// A quadrature node `(z, w)` with its weight. Planar samples have `w = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub z: C64,
    pub w: C64,
    pub weight: f64,
}

/// Quadrature nodes over a domain or a fiber family.
#[derive(Clone, Debug)]
pub struct SampleGrid {
    pub points: Vec<Sample>,
    /// Exact measure of the domain the nodes discretize.
    pub area: f64,
    /// When set, the points come in blocks of this many consecutive samples
    /// sharing `z` and `|w|`, with `arg w` uniform over the circle.
    pub n_theta: Option<usize>,
}

impl SampleGrid {
    pub fn total_weight(&self) -> f64 {
        self.points.iter().map(|p| p.weight).sum()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Complex values attached to the nodes of a [`SampleGrid`].
#[derive(Clone, Debug)]
pub struct SampledFunction {
    pub grid: Arc<SampleGrid>,
    pub values: Vec<C64>,
}

impl SampledFunction {
    pub fn from_fn(grid: &Arc<SampleGrid>, f: impl Fn(C64, C64) -> C64 + Sync) -> Self {
        let values = grid.points.par_iter().map(|p| f(p.z, p.w)).collect();
        SampledFunction { grid: grid.clone(), values }
    }

    /// Function of `z` alone.
    pub fn from_z(grid: &Arc<SampleGrid>, f: impl Fn(C64) -> C64 + Sync) -> Self {
        Self::from_fn(grid, |z, _| f(z))
    }

    pub fn constant(grid: &Arc<SampleGrid>, c: C64) -> Self {
        SampledFunction { grid: grid.clone(), values: vec![c; grid.len()] }
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        SampledFunction { grid: self.grid.clone(), values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn scale(&self, c: C64) -> Self {
        self.map(|v| c * v)
    }

    /// Pointwise combination with a function on the same grid.
    pub fn zip(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        if !Arc::ptr_eq(&self.grid, &other.grid) && self.grid.len() != other.grid.len() {
            return Err(Error::GridMismatch("functions live on different grids".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(SampledFunction { grid: self.grid.clone(), values })
    }

    /// `sum w_i G(|f_i|)`.
    pub fn integrate_abs(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.grid.points.iter().zip(&self.values).map(|(p, v)| p.weight * g(v.norm())).sum()
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        self.integrate_abs(|t| t.powf(p)).powf(1.0 / p)
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Finite Laurent polynomial `sum a_m z^m`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Laurent {
    pub terms: Vec<LaurentTerm>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaurentTerm {
    pub m: i32,
    #[serde(with = "cpx")]
    pub a: C64,
}

impl Laurent {
    pub fn monomial(m: i32, a: C64) -> Self {
        Laurent { terms: vec![LaurentTerm { m, a }] }
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.terms.iter().map(|t| t.a * z.powi(t.m)).sum()
    }

    pub fn coefficient(&self, m: i32) -> C64 {
        self.terms.iter().filter(|t| t.m == m).map(|t| t.a).sum()
    }

    pub fn min_power(&self) -> Option<i32> {
        self.terms.iter().map(|t| t.m).min()
    }

    pub fn max_power(&self) -> Option<i32> {
        self.terms.iter().map(|t| t.m).max()
    }
}

/// Test functions of `z`, as read from JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionSpec {
    /// `coeff / z`.
    ReciprocalZ {
        #[serde(with = "cpx", default = "one")]
        coeff: C64,
    },
    /// `coeff z^m`.
    Monomial {
        m: i32,
        #[serde(with = "cpx", default = "one")]
        coeff: C64,
    },
    Laurent { coeffs: Vec<LaurentTerm> },
    Constant {
        #[serde(with = "cpx")]
        value: C64,
    },
    /// `(center - z)^-a`, principal branch.
    PolePower {
        #[serde(with = "cpx", default = "one")]
        center: C64,
        a: f64,
    },
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

impl FunctionSpec {
    pub fn eval(&self, z: C64) -> C64 {
        match self {
            FunctionSpec::ReciprocalZ { coeff } => coeff / z,
            FunctionSpec::Monomial { m, coeff } => coeff * z.powi(*m),
            FunctionSpec::Laurent { coeffs } => coeffs.iter().map(|t| t.a * z.powi(t.m)).sum(),
            FunctionSpec::Constant { value } => *value,
            FunctionSpec::PolePower { center, a } => (center - z).powf(-a),
        }
    }

    /// The Laurent expansion at 0 when it is finite.
    pub fn laurent(&self) -> Option<Laurent> {
        match self {
            FunctionSpec::ReciprocalZ { coeff } => Some(Laurent::monomial(-1, *coeff)),
            FunctionSpec::Monomial { m, coeff } => Some(Laurent::monomial(*m, *coeff)),
            FunctionSpec::Laurent { coeffs } => Some(Laurent { terms: coeffs.clone() }),
            FunctionSpec::Constant { value } => Some(Laurent::monomial(0, *value)),
            FunctionSpec::PolePower { .. } => None,
        }
    }
}

/// Polar product rule on `inner < |z| < outer`: Gauss-Legendre in the
/// radius, uniform in the angle.
pub fn annulus_samples(inner: f64, outer: f64, n_r: usize, n_phi: usize) -> Result<SampleGrid> {
    if !(inner >= 0.0 && outer > inner) || n_r == 0 || n_phi == 0 {
        return Err(Error::InvalidInput(format!("bad annulus sampling ({inner}, {outer}, {n_r}, {n_phi})")));
    }
    let (rs, ws) = gauss_legendre_on(n_r, inner, outer);
    let dphi = 2.0 * PI / n_phi as f64;
    let mut points = Vec::with_capacity(n_r * n_phi);
    for (r, wr) in rs.iter().zip(&ws) {
        for k in 0..n_phi {
            let phi = (k as f64 + 0.5) * dphi;
            points.push(Sample { z: C64::from_polar(*r, phi), w: C64::new(0.0, 0.0), weight: wr * r * dphi });
        }
    }
    Ok(SampleGrid { points, area: PI * (outer * outer - inner * inner), n_theta: None })
}

pub fn disk_samples(radius: f64, n_r: usize, n_phi: usize) -> Result<SampleGrid> {
    annulus_samples(0.0, radius, n_r, n_phi)
}

/// Node counts for [`hartogs_samples`].
#[derive(Clone, Copy, Debug)]
pub struct HartogsSampling {
    /// Gauss-Legendre nodes in `t = |w|` per profile piece.
    pub n_t: usize,
    /// Gauss-Legendre nodes in `ln |z|` per piece of the fiber.
    pub n_x: usize,
    /// Midpoint nodes on the arc of `arg z` outside the hole.
    pub n_phi: usize,
    /// Uniform nodes in `arg w`.
    pub n_theta: usize,
    /// Points with `|z| <= z_cut` are left out.
    pub z_cut: f64,
}

impl Default for HartogsSampling {
    fn default() -> Self {
        HartogsSampling { n_t: 6, n_x: 16, n_phi: 12, n_theta: 8, z_cut: 0.0 }
    }
}

/// Half-width of the arc of `|z| = e^x` lying outside the hole `D(c, r1)`,
/// centred on the side away from the hole. `None` when the circle lies in
/// the hole.
pub(crate) fn free_half_width(x: f64, c: f64, r1: f64, ln_gap: f64) -> Option<f64> {
    if c == 0.0 {
        return (x > ln_gap).then_some(PI);
    }
    let k = super::collar::hole_cosine(x, c.abs(), r1, ln_gap);
    (k > -1.0).then(|| PI - k.min(1.0).acos())
}

/// Samples on the Hartogs domain, `(z, w)` with `w = t e^{i theta}`. The
/// points come in rotation orbits of `n_theta` consecutive samples.
pub fn hartogs_samples(dom: &HartogsProfileDomain, cfg: &HartogsSampling) -> Result<SampleGrid> {
    if cfg.n_t == 0 || cfg.n_x == 0 || cfg.n_phi == 0 || cfg.n_theta == 0 {
        return Err(Error::InvalidInput("node counts must be positive".into()));
    }
    let mut ts = Vec::new();
    for w in dom.breakpoints().windows(2) {
        let (x, wx) = gauss_legendre_on(cfg.n_t, w[0], w[1]);
        ts.extend(x.into_iter().zip(wx));
    }
    let dtheta = 2.0 * PI / cfg.n_theta as f64;
    let blocks: Vec<Vec<Sample>> = ts
        .par_iter()
        .map(|&(t, wt)| -> Result<Vec<Sample>> {
            let f = dom.fiber(t)?;
            let lo = if cfg.z_cut > 0.0 { f.ln_gap.max(cfg.z_cut.ln()) } else { f.ln_gap };
            let hi = f.r2.ln();
            let mut cuts = vec![lo, f.hole_far().ln().min(hi), hi];
            cuts.retain(|&x| x >= lo && x <= hi);
            cuts.dedup();
            let centre = if f.c < 0.0 { 0.0 } else { PI };
            let mut out = Vec::new();
            for seg in cuts.windows(2) {
                if seg[1] <= seg[0] {
                    continue;
                }
                let (xs, wxs) = gauss_legendre_on(cfg.n_x, seg[0], seg[1]);
                for (x, wx) in xs.into_iter().zip(wxs) {
                    let Some(a) = free_half_width(x, f.c, f.r1, f.ln_gap) else { continue };
                    let rho = x.exp();
                    let dphi = 2.0 * a / cfg.n_phi as f64;
                    let weight = t * wt * rho * rho * wx * dphi * dtheta;
                    for j in 0..cfg.n_phi {
                        let phi = centre - a + (j as f64 + 0.5) * dphi;
                        let z = C64::from_polar(rho, phi);
                        for k in 0..cfg.n_theta {
                            let w = C64::from_polar(t, k as f64 * dtheta);
                            out.push(Sample { z, w, weight });
                        }
                    }
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let points = blocks.into_iter().flatten().collect();
    Ok(SampleGrid { points, area: super::collar::hartogs_volume(dom), n_theta: Some(cfg.n_theta) })
}
