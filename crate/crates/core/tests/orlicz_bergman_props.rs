use std::f64::consts::PI;
use std::sync::Arc;

use pluripot_core::geometry::{Cusp, HartogsProfileDomain};
use pluripot_core::orlicz_bergman::{
    disk_samples, hartogs_samples, lemma41_integrals, luxemburg_norm, orlicz_props_check, rotational_average,
    HartogsSampling, KernelApprox, KernelDomain, OrliczParams, SampleGrid, SampledFunction,
};
use pluripot_core::C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn disk() -> Arc<SampleGrid> {
    Arc::new(disk_samples(1.0, 16, 32).unwrap())
}

fn poly(grid: &Arc<SampleGrid>, c: &[(f64, f64)]) -> SampledFunction {
    let coeffs: Vec<C64> = c.iter().map(|&(a, b)| C64::new(a, b)).collect();
    SampledFunction::from_z(grid, move |z| coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &a| acc * z + a))
}

fn coeffs() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 1..5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn norm_is_homogeneous(c in coeffs(), lambda in 0.1f64..10.0, p in 1.0f64..3.0, q in 0.0f64..2.0) {
        let g = disk();
        let params = OrliczParams::new(p, q).unwrap();
        let f = poly(&g, &c);
        let n = luxemburg_norm(&f, &params).unwrap();
        prop_assume!(n > 1e-6);
        let m = luxemburg_norm(&f.scale(C64::new(lambda, 0.0)), &params).unwrap();
        prop_assert!((m - lambda * n).abs() <= 1e-6 * lambda * n, "{} vs {}", m, lambda * n);
    }

    #[test]
    fn norm_is_monotone(c in coeffs(), bump in 0.0f64..2.0, p in 1.0f64..3.0, q in 0.0f64..2.0) {
        let g = disk();
        let params = OrliczParams::new(p, q).unwrap();
        let f = poly(&g, &c);
        let bigger = f.map(|v| v * (1.0 + bump));
        let a = luxemburg_norm(&f, &params).unwrap();
        let b = luxemburg_norm(&bigger, &params).unwrap();
        prop_assert!(a <= b * (1.0 + 1e-9), "{} > {}", a, b);
    }

    #[test]
    fn q_zero_is_lp(c in coeffs(), p in 1.0f64..3.0) {
        let g = disk();
        let f = poly(&g, &c);
        let params = OrliczParams::new(p, 0.0).unwrap();
        let n = luxemburg_norm(&f, &params).unwrap();
        let lp = f.lp_norm(p);
        prop_assert!((n - lp).abs() <= 1e-8 * lp.max(1.0), "{} vs {}", n, lp);
    }

    #[test]
    fn kernel_is_hermitian(rz in 0.0f64..0.95, az in 0.0f64..6.2, rw in 0.0f64..0.95, aw in 0.0f64..6.2, inner in 0.1f64..0.5) {
        for dom in [KernelDomain::Disk, KernelDomain::annulus(inner).unwrap()] {
            let k = KernelApprox::with_default_order(dom);
            let lift = |r: f64| if let KernelDomain::Annulus { inner } = dom { inner + (1.0 - inner) * (0.05 + 0.9 * r) } else { r };
            let z = C64::from_polar(lift(rz), az);
            let w = C64::from_polar(lift(rw), aw);
            let a = k.eval(z, w).unwrap().value;
            let b = k.eval(w, z).unwrap().value;
            prop_assert!((a - b.conj()).norm() <= 1e-12 * a.norm().max(1.0));
            let d = k.eval(w, w).unwrap().value;
            prop_assert!(d.re > 0.0 && d.im.abs() <= 1e-12 * d.re);
        }
    }
}

#[test]
fn domination_constant_holds_for_random_functions() {
    let g = disk();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..100 {
        let p = rng.gen_range(1.0..3.0);
        let q = rng.gen_range(0.0..2.0);
        let params = OrliczParams::new(p, q).unwrap();
        let a: Vec<(f64, f64)> = (0..4).map(|_| (rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0))).collect();
        let b: Vec<(f64, f64)> = (0..3).map(|_| (rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0))).collect();
        let c = C64::new(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0));
        let rep = orlicz_props_check(&poly(&g, &a), &poly(&g, &b), c, &params).unwrap();
        assert!(rep.domination_ok, "function {i}: {} > {} * {}", rep.lp_norm, rep.domination_constant, rep.norm_f);
        assert!(rep.pass, "function {i}: {rep:?}");
    }
}

#[test]
fn rotational_average_is_idempotent_and_contracts() {
    let dom = HartogsProfileDomain::with_default_eps(0.5).unwrap();
    let cfg = HartogsSampling { n_t: 4, n_x: 8, n_phi: 8, n_theta: 16, z_cut: 0.0 };
    let g = Arc::new(hartogs_samples(&dom, &cfg).unwrap());
    let params = OrliczParams::new(2.0, 1.0).unwrap();
    let f = SampledFunction::from_fn(&g, |z, w| C64::new(1.0, 0.0) / z + w * 0.3 + w * w * z * C64::new(0.0, 0.1));
    let (avg, rep) = rotational_average(&f, &params).unwrap();
    assert!(rep.l2_ok && rep.jensen_ok, "{rep:?}");
    assert!(rep.l2_after <= rep.l2_before);
    assert!(rep.idempotence_error <= 1e-12 * avg.sup(), "{}", rep.idempotence_error);
    let (again, _) = rotational_average(&avg, &params).unwrap();
    let diff = avg.values.iter().zip(&again.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    assert!(diff <= 1e-12 * avg.sup());
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// `int_fiber |z|^-2 (log+ 1/|z|)^q`, in polar coordinates with the hole's
/// angular extent from the law of cosines.
fn fiber_oracle(dom: &HartogsProfileDomain, tau: f64, q: f64) -> f64 {
    let f = dom.cusp_fiber(Cusp::Three, tau).unwrap();
    let c = f.c.abs();
    let gap = f.ln_gap.exp();
    let angle = |rho: f64| {
        // |rho e^{i phi} - c| > r1  iff  cos phi < (rho^2 + c^2 - r1^2) / (2 rho c)
        let k = (rho * rho - gap * (c + f.r1)) / (2.0 * rho * c);
        2.0 * PI - 2.0 * k.clamp(-1.0, 1.0).acos()
    };
    let w = |x: f64| if x < 0.0 { (-x).powf(q) } else { 0.0 };
    let lo = f.ln_gap;
    let hi = f.hole_far().ln().min(0.0);
    let near = simpson(
        |u| {
            let x = lo + (hi - lo) * 0.5 * (1.0 - (PI * u).cos());
            angle(x.exp()) * w(x) * (hi - lo) * 0.5 * PI * (PI * u).sin()
        },
        0.0,
        1.0,
        4000,
    );
    let far = if hi < 0.0 { 2.0 * PI * (-hi).powf(q + 1.0) / (q + 1.0) } else { 0.0 };
    near + far
}

#[test]
fn collar_integral_matches_direct_quadrature() {
    let s = 0.5;
    let dom = HartogsProfileDomain::with_default_eps(s).unwrap();
    let eps = 0.02;
    for q in [0.5, 1.0] {
        let rep = lemma41_integrals(&dom, q, &[eps, 0.05, 0.1]).unwrap();
        let row = rep.rows.iter().find(|r| r.eps == eps).unwrap();
        // four one-sided collars with sum of t equal to 14, times 2 pi t dt
        let oracle = 2.0 * PI * 14.0
            * simpson(|u| fiber_oracle(&dom, u.exp(), q) * u.exp(), eps.ln(), dom.transition_eps.ln(), 400);
        let rel = (row.l - oracle).abs() / oracle;
        assert!(rel < 1e-4, "q {q}: {} vs oracle {oracle}, rel {rel}", row.l);
    }
}
