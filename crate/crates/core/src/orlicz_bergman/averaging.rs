use std::f64::consts::PI;

use serde::Serialize;

use super::orlicz::OrliczParams;
use super::samples::SampledFunction;
use crate::{Error, Result, C64};

const ORBIT_TOL: f64 = 1e-12;

#[derive(Clone, Debug, Serialize)]
pub struct AverageReport {
    /// `int h(|f|)` and `int h(|avg f|)` with `h = max(0, Phi - Phi(t0))`.
    pub jensen_before: f64,
    pub jensen_after: f64,
    pub jensen_ok: bool,
    pub l2_before: f64,
    pub l2_after: f64,
    pub l2_ok: bool,
    /// Largest change when averaging the average again.
    pub idempotence_error: f64,
}

fn check_orbits(f: &SampledFunction) -> Result<usize> {
    let n = f
        .grid
        .n_theta
        .ok_or_else(|| Error::GridMismatch("grid has no rotation orbits".into()))?;
    let pts = &f.grid.points;
    if n == 0 || pts.len() % n != 0 {
        return Err(Error::GridMismatch(format!("{} samples do not split into orbits of {n}", pts.len())));
    }
    for block in pts.chunks(n) {
        let z = block[0].z;
        let t = block[0].w.norm();
        let arg0 = block[0].w.arg();
        for (k, p) in block.iter().enumerate() {
            let want = arg0 + 2.0 * PI * k as f64 / n as f64;
            let d = (p.w.arg() - want).rem_euclid(2.0 * PI);
            let d = d.min(2.0 * PI - d);
            if p.z != z || (p.w.norm() - t).abs() > ORBIT_TOL * t.max(1.0) || d > 1e-9 || p.weight != block[0].weight {
                return Err(Error::GridMismatch("samples within a block are not a uniform rotation orbit".into()));
            }
        }
    }
    Ok(n)
}

fn average_values(values: &[C64], n: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(values.len());
    for block in values.chunks(n) {
        let m = block.iter().sum::<C64>() / n as f64;
        out.extend(std::iter::repeat(m).take(n));
    }
    out
}

/// `(1/2pi) int f(z, e^{i theta} w) dtheta` on each rotation orbit, by the
/// trapezoidal rule, plus the Jensen and `L^2` contraction checks.
pub fn rotational_average(f: &SampledFunction, params: &OrliczParams) -> Result<(SampledFunction, AverageReport)> {
    let n = check_orbits(f)?;
    let avg = SampledFunction { grid: f.grid.clone(), values: average_values(&f.values, n) };
    let again = average_values(&avg.values, n);
    let idempotence_error = again.iter().zip(&avg.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let jensen_before = f.integrate_abs(|t| params.young_h(t));
    let jensen_after = avg.integrate_abs(|t| params.young_h(t));
    let l2_before = f.integrate_abs(|t| t * t);
    let l2_after = avg.integrate_abs(|t| t * t);
    let slack = |x: f64| x * (1.0 + 1e-12) + 1e-300;
    let report = AverageReport {
        jensen_before,
        jensen_after,
        jensen_ok: jensen_after <= slack(jensen_before),
        l2_before,
        l2_after,
        l2_ok: l2_after <= slack(l2_before),
        idempotence_error,
    };
    Ok((avg, report))
}

/// Points `radius e^{2 pi i k / n}`, `k = 0..n`.
pub fn circle_points(radius: f64, n: usize) -> Vec<C64> {
    (0..n).map(|k| C64::from_polar(radius, 2.0 * PI * k as f64 / n as f64)).collect()
}

/// Laurent coefficient `a_m = (1/2 pi i) oint f z^{-m-1} dz` from values at
/// `circle_points(radius, n)`, by the trapezoidal rule.
pub fn contour_coefficient(values: &[C64], radius: f64, m: i32) -> Result<C64> {
    let n = values.len();
    if n < 64 {
        return Err(Error::InvalidInput(format!("need at least 64 samples on the circle, got {n}")));
    }
    let pts = circle_points(radius, n);
    let s: C64 = values.iter().zip(&pts).map(|(v, z)| v * z.powi(-m)).sum();
    Ok(s / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::HartogsProfileDomain;
    use crate::orlicz_bergman::samples::{disk_samples, hartogs_samples, HartogsSampling};
    use std::sync::Arc;

    fn grid() -> Arc<crate::orlicz_bergman::samples::SampleGrid> {
        let dom = HartogsProfileDomain::with_default_eps(0.5).unwrap();
        let cfg = HartogsSampling { n_t: 3, n_x: 8, n_phi: 6, n_theta: 8, z_cut: 1e-6 };
        Arc::new(hartogs_samples(&dom, &cfg).unwrap())
    }

    #[test]
    fn averages() {
        let g = grid();
        let p = OrliczParams::new(2.0, 1.0).unwrap();
        let f = SampledFunction::from_z(&g, |z| z.inv());
        let (a, r) = rotational_average(&f, &p).unwrap();
        let d = a.values.iter().zip(&f.values).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(d < 1e-12 * f.sup());
        assert!(r.idempotence_error < 1e-12 * f.sup());

        let wf = SampledFunction::from_fn(&g, |_, w| w);
        let (a, _) = rotational_average(&wf, &p).unwrap();
        assert!(a.sup() < 1e-12);

        let mixed = SampledFunction::from_fn(&g, |z, w| z.inv() + w * w);
        let (_, r) = rotational_average(&mixed, &p).unwrap();
        assert!(r.jensen_ok && r.l2_ok);
        assert!(r.jensen_after < r.jensen_before);
    }

    #[test]
    fn rejects_planar_grid() {
        let g = Arc::new(disk_samples(1.0, 4, 8).unwrap());
        let f = SampledFunction::constant(&g, C64::new(1.0, 0.0));
        let e = rotational_average(&f, &OrliczParams::new(2.0, 1.0).unwrap()).unwrap_err();
        assert_eq!(e.code(), "grid-mismatch");
    }

    #[test]
    fn contour_examples() {
        let pts = circle_points(3.0, 256);
        let inv: Vec<C64> = pts.iter().map(|z| z.inv()).collect();
        assert!((contour_coefficient(&inv, 3.0, -1).unwrap() - 1.0).norm() < 1e-12);
        let sq: Vec<C64> = pts.iter().map(|z| z * z).collect();
        assert!(contour_coefficient(&sq, 3.0, -1).unwrap().norm() < 1e-12);
        let mix: Vec<C64> = pts.iter().map(|z| 3.0 / z + 5.0 * z).collect();
        assert!((contour_coefficient(&mix, 3.0, -1).unwrap() - 3.0).norm() < 1e-10);
        assert!((contour_coefficient(&mix, 3.0, 1).unwrap() - 5.0).norm() < 1e-10);
        assert!(contour_coefficient(&inv[..32], 3.0, -1).is_err());
    }
}
