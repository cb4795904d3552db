use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::samples::{annulus_samples, Laurent};
use crate::geometry::cpx;
use crate::quad::integrate;
use crate::{Error, Result, C64};

pub const DEFAULT_DISK_ORDER: usize = 60;
pub const DEFAULT_ANNULUS_ORDER: usize = 120;
const MAX_ORDER: usize = 8192;
const AUTO_TOL: f64 = 1e-8;
const SLOW_TOL: f64 = 1e-8;
const SVD_CUTOFF: f64 = 1e-12;

/// Model domains with monomial orthogonal bases.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelDomain {
    /// The unit disk.
    Disk,
    /// `inner < |z| < 1`.
    Annulus { inner: f64 },
}

impl KernelDomain {
    /// Parses `disk` or `annulus:R`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "disk" {
            return Ok(KernelDomain::Disk);
        }
        if let Some(r) = s.strip_prefix("annulus:") {
            let inner: f64 = r.parse().map_err(|_| Error::InvalidInput(format!("bad annulus radius {r:?}")))?;
            return KernelDomain::annulus(inner);
        }
        Err(Error::InvalidInput(format!("unknown kernel domain {s:?}; use disk or annulus:R")))
    }

    pub fn annulus(inner: f64) -> Result<Self> {
        if !(inner > 0.0 && inner < 1.0) {
            return Err(Error::InvalidInput(format!("annulus inner radius {inner} must lie in (0, 1)")));
        }
        Ok(KernelDomain::Annulus { inner })
    }

    pub fn inner(&self) -> f64 {
        match self {
            KernelDomain::Disk => 0.0,
            KernelDomain::Annulus { inner } => *inner,
        }
    }

    pub fn contains(&self, z: C64) -> bool {
        let r = z.norm();
        r < 1.0 && r > self.inner() || (r == 0.0 && *self == KernelDomain::Disk)
    }

    pub fn area(&self) -> f64 {
        PI * (1.0 - self.inner().powi(2))
    }

    pub fn default_order(&self) -> usize {
        match self {
            KernelDomain::Disk => DEFAULT_DISK_ORDER,
            KernelDomain::Annulus { .. } => DEFAULT_ANNULUS_ORDER,
        }
    }

    /// Powers `m` with `z^m` square integrable, cut at `|m| <= order`.
    pub fn powers(&self, order: usize) -> std::ops::RangeInclusive<i32> {
        let m = order as i32;
        match self {
            KernelDomain::Disk => 0..=m,
            KernelDomain::Annulus { .. } => -m..=m,
        }
    }

    /// Probe radii for the reproducing check.
    pub fn probe_radii(&self) -> &'static [f64] {
        match self {
            KernelDomain::Disk => &[0.0, 0.3, 0.6, 0.9, 0.95],
            KernelDomain::Annulus { .. } => &[0.55, 0.7, 0.85, 0.95],
        }
    }
}

/// `c_m = int |z|^{2m} dlambda` in closed form; `None` when `z^m` is not
/// square integrable.
pub fn closed_coefficient(domain: KernelDomain, m: i32) -> Option<f64> {
    match domain {
        KernelDomain::Disk => (m >= 0).then(|| PI / (m as f64 + 1.0)),
        KernelDomain::Annulus { inner } => {
            if m == -1 {
                Some(2.0 * PI * (1.0 / inner).ln())
            } else {
                let j = 2.0 * m as f64 + 2.0;
                Some(2.0 * PI * (1.0 - inner.powf(j)) / j)
            }
        }
    }
}

/// `r^{2k} c_{-k}` on the annulus `r < |z| < 1`.
fn scaled_negative(r: f64, k: usize) -> f64 {
    if k == 1 {
        return r * r * 2.0 * PI * (1.0 / r).ln();
    }
    let j = 2.0 * k as f64 - 2.0;
    2.0 * PI * (r * r - r.powf(2.0 * k as f64)) / j
}

/// `c_m` by adaptive radial quadrature of `2 pi r^{2m+1}`.
pub fn numeric_coefficient(domain: KernelDomain, m: i32) -> f64 {
    let r0 = domain.inner();
    let r = integrate(|r: f64| 2.0 * PI * r.powi(2 * m + 1), r0, 1.0, 0.0, 1e-15, 4000);
    r.value
}

/// Bergman kernel truncated to `|m| <= order`.
#[derive(Clone, Debug, Serialize)]
pub struct KernelApprox {
    pub domain: KernelDomain,
    pub order: usize,
    /// `c_m` for the powers in `domain.powers(order)`, in order.
    pub coefficients: Vec<f64>,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct KernelValue {
    #[serde(with = "cpx")]
    pub value: C64,
    /// Bound on the omitted terms.
    pub tail: f64,
    pub slow_convergence: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AutoOrder {
    pub order: usize,
    /// Largest `|K_M - K_{3M/2}|` over the probes at the final order.
    pub difference: f64,
    pub converged: bool,
}

impl KernelApprox {
    pub fn new(domain: KernelDomain, order: usize) -> Result<Self> {
        if order == 0 || order > MAX_ORDER {
            return Err(Error::InvalidInput(format!("truncation order {order} outside 1..={MAX_ORDER}")));
        }
        let coefficients = domain.powers(order).map(|m| closed_coefficient(domain, m).unwrap()).collect();
        Ok(KernelApprox { domain, order, coefficients })
    }

    pub fn with_default_order(domain: KernelDomain) -> Self {
        Self::new(domain, domain.default_order()).expect("default order is valid")
    }

    /// Starts from the default order and doubles it until the values at
    /// `order` and `3 order / 2` agree to `1e-8` at every probe pair.
    pub fn auto(domain: KernelDomain, probes: &[(C64, C64)]) -> Result<(Self, AutoOrder)> {
        let mut order = domain.default_order();
        loop {
            let k = Self::new(domain, order)?;
            let k15 = Self::new(domain, order + order / 2)?;
            let mut difference: f64 = 0.0;
            for &(z, w) in probes {
                difference = difference.max((k.raw(z, w) - k15.raw(z, w)).norm());
            }
            if difference <= AUTO_TOL || 2 * order + order > MAX_ORDER {
                let converged = difference <= AUTO_TOL;
                return Ok((k, AutoOrder { order, difference, converged }));
            }
            order *= 2;
        }
    }

    pub fn min_power(&self) -> i32 {
        *self.domain.powers(self.order).start()
    }

    pub fn coefficient(&self, m: i32) -> Option<f64> {
        let i = m - self.min_power();
        (i >= 0).then(|| self.coefficients.get(i as usize).copied()).flatten()
    }

    fn raw(&self, z: C64, w: C64) -> C64 {
        let x = z * w.conj();
        let mut sum = C64::new(0.0, 0.0);
        let mut pw = C64::new(1.0, 0.0);
        let m0 = self.min_power();
        for m in 0..=self.order as i32 {
            sum += pw / self.coefficients[(m - m0) as usize];
            pw *= x;
        }
        if let KernelDomain::Annulus { inner } = self.domain {
            // x^-k / c_{-k} = (r^2 / x)^k / (r^{2k} c_{-k}), both factors bounded
            let y = inner * inner / x;
            let mut pw = y;
            for k in 1..=self.order {
                sum += pw / scaled_negative(inner, k);
                pw *= y;
            }
        }
        sum
    }

    fn tail(&self, z: C64, w: C64) -> f64 {
        let x = (z * w.conj()).norm();
        let next = self.order + 1;
        let geometric = |ratio: f64, term: f64| if ratio < 1.0 { term / (1.0 - ratio) } else { f64::INFINITY };
        let mut t = geometric(x, x.powi(next as i32) / closed_coefficient(self.domain, next as i32).unwrap());
        if let KernelDomain::Annulus { inner } = self.domain {
            let y = if x > 0.0 { inner * inner / x } else { f64::INFINITY };
            t += geometric(y, y.powi(next as i32) / scaled_negative(inner, next));
        }
        t
    }

    /// `sum z^m conj(w)^m / c_m`. Points outside the domain are rejected.
    pub fn eval(&self, z: C64, w: C64) -> Result<KernelValue> {
        if !self.domain.contains(z) || !self.domain.contains(w) {
            return Err(Error::InvalidInput(format!("kernel arguments {z}, {w} outside the domain")));
        }
        let value = self.raw(z, w);
        let tail = self.tail(z, w);
        Ok(KernelValue { value, tail, slow_convergence: !(tail <= SLOW_TOL * value.norm().max(1e-300)) })
    }
}

pub fn kernel_eval(k: &KernelApprox, z: C64, w: C64) -> Result<KernelValue> {
    k.eval(z, w)
}

/// `1 / (pi (1 - z conj(w))^2)`.
pub fn disk_kernel_closed(z: C64, w: C64) -> C64 {
    let d = C64::new(1.0, 0.0) - z * w.conj();
    (PI * d * d).inv()
}

#[derive(Clone, Debug, Serialize)]
pub struct ReproducingRow {
    #[serde(with = "cpx")]
    pub w: C64,
    #[serde(with = "cpx")]
    pub f: C64,
    #[serde(with = "cpx")]
    pub pairing: C64,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReproducingReport {
    pub order: usize,
    /// Whether every power of `f` lies in the truncated span.
    pub in_span: bool,
    pub rows: Vec<ReproducingRow>,
    pub residual: f64,
}

/// `max_w |f(w) - <f, K(., w)>|` over the probe points, with the pairing
/// computed by polar quadrature: Gauss-Legendre in the radius, `4M + 8`
/// uniform angles.
pub fn reproducing_check(k: &KernelApprox, f: &Laurent) -> Result<ReproducingReport> {
    let (lo, hi) = match (f.min_power(), f.max_power()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::InvalidInput("empty Laurent polynomial".into())),
    };
    let span = k.domain.powers(k.order);
    let in_span = span.contains(&lo) && span.contains(&hi);
    if k.domain == KernelDomain::Disk && lo < 0 {
        return Err(Error::InvalidInput("negative powers are not in A^2 of the disk".into()));
    }
    let top = hi.unsigned_abs().max(lo.unsigned_abs()) as usize;
    let order = k.order.max(top);
    let n_r = 64.max(order + 2);
    let n_phi = 4 * order + 8;
    let grid = annulus_samples(k.domain.inner(), 1.0, n_r, n_phi)?;
    let powers: Vec<i32> = span.collect();
    // moments mu_m = int f conj(z)^m
    let moments: Vec<C64> = grid
        .points
        .par_chunks(n_phi)
        .map(|chunk| {
            let mut acc = vec![C64::new(0.0, 0.0); powers.len()];
            for p in chunk {
                let fz = f.eval(p.z) * p.weight;
                let zc = p.z.conj();
                let mut pw = zc.powi(powers[0]);
                for a in acc.iter_mut() {
                    *a += fz * pw;
                    pw *= zc;
                }
            }
            acc
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(vec![C64::new(0.0, 0.0); powers.len()], |mut a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
            a
        });
    let mut rows = Vec::new();
    for &r in k.domain.probe_radii() {
        let w = C64::from_polar(r, 0.7);
        let mut pairing = C64::new(0.0, 0.0);
        for (i, &m) in powers.iter().enumerate() {
            pairing += w.powi(m) * moments[i] / k.coefficients[i];
        }
        let fw = f.eval(w);
        rows.push(ReproducingRow { w, f: fw, pairing, residual: (fw - pairing).norm() });
    }
    let residual = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    Ok(ReproducingReport { order: k.order, in_span, rows, residual })
}

#[derive(Clone, Debug, Serialize)]
pub struct SpanRow {
    pub poles: usize,
    /// `L^2` distance from `f` to the span of `K(., w_i)`.
    pub residual: f64,
    /// The same distance from `||f||^2 - Re sum a_i conj(f(w_i))`.
    pub gram_residual: f64,
    pub rank: usize,
    /// Singular values below `1e-12` of the largest were dropped.
    pub regularized: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpanReport {
    pub f_norm: f64,
    pub rows: Vec<SpanRow>,
    pub monotone: bool,
    pub final_residual: f64,
}

/// Nested pole sets: the 5th, 10th and 20th roots of unity scaled by 1/2.
pub fn default_pole_sets() -> Vec<Vec<C64>> {
    [5usize, 10, 20]
        .iter()
        .map(|&n| (0..n).map(|k| C64::from_polar(0.5, 2.0 * PI * k as f64 / n as f64)).collect())
        .collect()
}

/// Least-squares projection of `f` onto `span{K(., w_i)}` for each pole set.
/// The normal equations `G a = (f(w_j))`, `G_ji = K(w_j, w_i)`, are solved
/// by a truncated SVD.
pub fn span_density_test(k: &KernelApprox, f: &Laurent, pole_sets: &[Vec<C64>]) -> Result<SpanReport> {
    let powers: Vec<i32> = k.domain.powers(k.order).collect();
    for t in &f.terms {
        if k.coefficient(t.m).is_none() {
            return Err(Error::InvalidInput(format!("power {} is outside the truncated span", t.m)));
        }
    }
    let fc: Vec<C64> = powers.iter().map(|&m| f.coefficient(m)).collect();
    let f_norm2: f64 = fc.iter().zip(&k.coefficients).map(|(a, c)| a.norm_sqr() * c).sum();
    let mut rows = Vec::new();
    for poles in pole_sets {
        let n = poles.len();
        if n == 0 {
            return Err(Error::InvalidInput("empty pole set".into()));
        }
        let mut g = DMatrix::<C64>::zeros(n, n);
        for j in 0..n {
            for i in 0..n {
                g[(j, i)] = k.eval(poles[j], poles[i])?.value;
            }
        }
        let b = DVector::<C64>::from_iterator(n, poles.iter().map(|&w| f.eval(w)));
        let svd = g.svd(true, true);
        let smax = svd.singular_values.max();
        let cut = SVD_CUTOFF * smax;
        let rank = svd.singular_values.iter().filter(|&&s| s > cut).count();
        let a = svd.solve(&b, cut).map_err(|e| Error::InvalidInput(e.to_string()))?;
        // coefficients of the projection on z^m
        let mut r2 = 0.0;
        for (idx, &m) in powers.iter().enumerate() {
            let c = k.coefficients[idx];
            let mut pm = C64::new(0.0, 0.0);
            for i in 0..n {
                pm += a[i] * poles[i].conj().powi(m);
            }
            r2 += c * (fc[idx] - pm / c).norm_sqr();
        }
        let pair: C64 = (0..n).map(|i| a[i] * b[i].conj()).sum();
        let gram_residual = (f_norm2 - pair.re).max(0.0).sqrt();
        rows.push(SpanRow { poles: n, residual: r2.sqrt(), gram_residual, rank, regularized: rank < n });
    }
    let scale = f_norm2.sqrt().max(1.0);
    let monotone = rows.windows(2).all(|w| w[1].residual <= w[0].residual + 1e-10 * scale);
    let final_residual = rows.last().map(|r| r.residual).unwrap_or(f64::NAN);
    Ok(SpanReport { f_norm: f_norm2.sqrt(), rows, monotone, final_residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_origin() {
        let k = KernelApprox::with_default_order(KernelDomain::Disk);
        let v = k.eval(C64::new(0.0, 0.0), C64::new(0.0, 0.0)).unwrap();
        assert!((v.value.re - 1.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn disk_closed_form() {
        let k = KernelApprox::new(KernelDomain::Disk, 60).unwrap();
        let (z, w) = (C64::new(0.5, 0.0), C64::new(0.3, 0.0));
        let v = k.eval(z, w).unwrap();
        let want = 1.0 / (PI * 0.7225);
        assert!((v.value - want).norm() < 1e-8);
        assert!(!v.slow_convergence);
        let near = C64::new(0.999, 0.0);
        assert!(k.eval(near, near).unwrap().slow_convergence);
    }

    #[test]
    fn annulus_coefficients_match_quadrature() {
        let d = KernelDomain::annulus(0.5).unwrap();
        for m in [-40, -7, -2, -1, 0, 1, 5, 40] {
            let a = closed_coefficient(d, m).unwrap();
            let b = numeric_coefficient(d, m);
            assert!(((a - b) / a).abs() < 1e-10, "m={m} {a} {b}");
        }
    }

    #[test]
    fn annulus_truncation_stable() {
        let d = KernelDomain::annulus(0.5).unwrap();
        let z = C64::new(0.7, 0.0);
        let a = KernelApprox::new(d, 80).unwrap().eval(z, z).unwrap().value;
        let b = KernelApprox::new(d, 120).unwrap().eval(z, z).unwrap().value;
        assert!((a - b).norm() < 1e-8);
    }

    #[test]
    fn reproduces_in_span_and_fails_outside() {
        let k = KernelApprox::new(KernelDomain::Disk, 60).unwrap();
        let one = Laurent::monomial(0, C64::new(1.0, 0.0));
        assert!(reproducing_check(&k, &one).unwrap().residual < 1e-8);
        let far = Laurent::monomial(65, C64::new(1.0, 0.0));
        let r = reproducing_check(&k, &far).unwrap();
        assert!(!r.in_span && r.residual > 1e-2);
        let a = KernelApprox::new(KernelDomain::annulus(0.5).unwrap(), 40).unwrap();
        let z3 = Laurent::monomial(3, C64::new(1.0, 0.0));
        assert!(reproducing_check(&a, &z3).unwrap().residual < 1e-6);
        let inv = Laurent::monomial(-2, C64::new(0.0, 1.0));
        assert!(reproducing_check(&a, &inv).unwrap().residual < 1e-6);
    }

    #[test]
    fn span_decreases_and_matches_gram() {
        let k = KernelApprox::new(KernelDomain::Disk, 60).unwrap();
        let f = Laurent::monomial(1, C64::new(1.0, 0.0));
        let r = span_density_test(&k, &f, &default_pole_sets()).unwrap();
        assert!(r.monotone);
        assert!(r.final_residual < 1e-3);
        let first = &r.rows[0];
        assert!((first.residual - first.gram_residual).abs() < 1e-6);
    }

    #[test]
    fn kernel_element_has_zero_residual() {
        let k = KernelApprox::new(KernelDomain::Disk, 30).unwrap();
        let w0 = C64::new(0.3, 0.2);
        // K(., w0) as a Laurent polynomial
        let f = Laurent {
            terms: (0..=30)
                .map(|m| super::super::samples::LaurentTerm { m, a: w0.conj().powi(m) / k.coefficient(m).unwrap() })
                .collect(),
        };
        let r = span_density_test(&k, &f, &[vec![w0, C64::new(-0.4, 0.1)]]).unwrap();
        assert!(r.final_residual < 1e-8 * r.f_norm);
    }

    #[test]
    fn auto_order_grows_near_boundary() {
        let d = KernelDomain::Disk;
        let (_, a) = KernelApprox::auto(d, &[(C64::new(0.5, 0.0), C64::new(0.3, 0.0))]).unwrap();
        assert_eq!(a.order, 60);
        let (_, b) = KernelApprox::auto(d, &[(C64::new(0.95, 0.0), C64::new(0.95, 0.0))]).unwrap();
        assert!(b.order > 60 && b.converged);
    }
}
