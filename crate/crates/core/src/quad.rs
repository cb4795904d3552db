//! One-dimensional quadrature: adaptive Gauss-Kronrod (7/15) and fixed
//! Gauss-Legendre rules.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Outcome of an adaptive integration.
#[derive(Clone, Copy, Debug)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
    pub converged: bool,
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    let kron = kron * h;
    let gauss = gauss * h;
    (kron, (kron - gauss).abs())
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Adaptive Gauss-Kronrod integration of `f` over `[a, b]`.
///
/// Bisects the piece with the largest error estimate until the total error
/// drops below `max(abs_tol, rel_tol * |value|)` or `max_pieces` is reached.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_pieces: usize,
) -> QuadResult {
    if a == b {
        return QuadResult { value: 0.0, error: 0.0, intervals: 0, converged: true };
    }
    let (v, e) = gk15(&mut f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Piece { a, b, value: v, error: e });
    let mut total = v;
    let mut err = e;
    while err > abs_tol.max(rel_tol * total.abs()) && heap.len() < max_pieces {
        let p = heap.pop().unwrap();
        let m = 0.5 * (p.a + p.b);
        if m <= p.a || m >= p.b {
            heap.push(p);
            break;
        }
        let (v1, e1) = gk15(&mut f, p.a, m);
        let (v2, e2) = gk15(&mut f, m, p.b);
        total += v1 + v2 - p.value;
        err += e1 + e2 - p.error;
        heap.push(Piece { a: p.a, b: m, value: v1, error: e1 });
        heap.push(Piece { a: m, b: p.b, value: v2, error: e2 });
    }
    // re-sum to shed accumulated cancellation
    let value: f64 = heap.iter().map(|p| p.value).sum();
    let error: f64 = heap.iter().map(|p| p.error).sum();
    QuadResult {
        value,
        error,
        intervals: heap.len(),
        converged: error <= abs_tol.max(rel_tol * value.abs()),
    }
}

/// Integrates over consecutive breakpoints, each piece adaptively.
pub fn integrate_pieces<F: FnMut(f64) -> f64>(
    mut f: F,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_pieces: usize,
) -> QuadResult {
    let mut out = QuadResult { value: 0.0, error: 0.0, intervals: 0, converged: true };
    for w in breaks.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let r = integrate(&mut f, w[0], w[1], abs_tol, rel_tol, max_pieces);
        out.value += r.value;
        out.error += r.error;
        out.intervals += r.intervals;
        out.converged &= r.converged;
    }
    out
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j as f64 + 1.0) * z * p1 - j as f64 * p2) / (j as f64 + 1.0);
            }
            dp = nf * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Gauss-Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    (x.iter().map(|t| c + h * t).collect(), w.iter().map(|v| h * v).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exactness() {
        let (x, w) = gauss_legendre(10);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(18)).sum();
        assert!((s - 2.0 / 19.0).abs() < 1e-14);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_sqrt_endpoint() {
        let r = integrate(|x: f64| x.sqrt(), 0.0, 1.0, 1e-13, 1e-13, 500);
        assert!(r.converged);
        assert!((r.value - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn adaptive_log_singularity() {
        let r = integrate(|x: f64| x.ln(), 0.0, 1.0, 1e-12, 1e-12, 2000);
        assert!((r.value + 1.0).abs() < 1e-10);
    }

    #[test]
    fn pieces_sum() {
        let r = integrate_pieces(|x: f64| x.abs(), &[-1.0, 0.0, 2.0], 1e-14, 1e-14, 50);
        assert!((r.value - 2.5).abs() < 1e-14);
    }
}
