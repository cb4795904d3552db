use std::sync::Arc;

use pluripot_core::envelopes::{green_function, relative_extremal, Ball, GridFunction, SolverOptions};
use pluripot_core::geometry::{DomainSpec, PlanarGridDomain};
use pluripot_core::C64;
use proptest::prelude::*;

fn grid(spec: &DomainSpec, h: f64) -> Arc<PlanarGridDomain> {
    Arc::new(PlanarGridDomain::rasterize(spec, h).unwrap())
}

fn opts() -> SolverOptions {
    SolverOptions { tol: 1e-10, ..Default::default() }
}

fn green_exact(z: C64, w: C64) -> f64 {
    ((z - w) / (C64::new(1.0, 0.0) - w.conj() * z)).norm().ln()
}

fn rho_exact(z: C64, b: Ball) -> f64 {
    let m = ((z - b.center) / (C64::new(1.0, 0.0) - b.center.conj() * z)).norm();
    (-m.ln() / b.radius.ln()).max(-1.0).min(0.0)
}

/// No inside node lies strictly below all four of its inside neighbours,
/// away from the pole and the obstacle.
fn no_interior_minimum(f: &GridFunction, skip: impl Fn(C64) -> bool) -> usize {
    let d = &*f.domain;
    let mut bad = 0;
    for k in d.inside_nodes() {
        if skip(d.point(k)) {
            continue;
        }
        let nb: Vec<usize> = (0..4).filter_map(|dir| d.neighbor(k, dir)).filter(|&n| d.is_inside(n)).collect();
        if nb.len() == 4 && nb.iter().all(|&n| f.values[k] < f.values[n] - 1e-12) {
            bad += 1;
        }
    }
    bad
}

#[test]
fn green_decreases_as_the_domain_grows() {
    let h = 0.02;
    let w = C64::new(0.1, -0.05);
    let small = green_function(&grid(&DomainSpec::disk(C64::new(0.0, 0.0), 0.8), h), w, &opts()).unwrap();
    let big = green_function(&grid(&DomainSpec::unit_disk(), h), w, &opts()).unwrap();
    for (k, v) in small.inside_values() {
        let z = small.domain.point(k);
        if z != w {
            assert!(big.eval(z) <= v + 1e-3, "{z}: {} > {v}", big.eval(z));
        }
    }
}

#[test]
fn green_is_symmetric() {
    let d = grid(&DomainSpec::unit_disk(), 0.01);
    let pts = [C64::new(0.3, 0.2), C64::new(-0.4, 0.1), C64::new(0.05, -0.6)];
    let g: Vec<GridFunction> = pts.iter().map(|&w| green_function(&d, w, &opts()).unwrap()).collect();
    for i in 0..pts.len() {
        for j in 0..pts.len() {
            if i != j {
                let a = g[j].eval(pts[i]);
                let b = g[i].eval(pts[j]);
                assert!((a - b).abs() <= 1e-3, "g({}, {}) = {a}, swapped {b}", pts[i], pts[j]);
            }
        }
    }
}

#[test]
fn maximum_principle() {
    let d = grid(&DomainSpec::annulus(0.3, 1.0), 0.02);
    let w = C64::new(0.6, 0.0);
    let g = green_function(&d, w, &opts()).unwrap();
    assert_eq!(no_interior_minimum(&g, |z| (z - w).norm() < 0.05), 0);
    assert!(g.inside_values().all(|(_, v)| v <= 1e-9));
    let b = Ball::new(C64::new(-0.6, 0.0), 0.15);
    let rho = relative_extremal(&d, b, &opts()).unwrap();
    assert_eq!(no_interior_minimum(&rho, |z| (z - b.center).norm() < b.radius + 0.05), 0);
    assert!(rho.inside_values().all(|(_, v)| (-1.0 - 1e-9..=1e-9).contains(&v)));
}

#[test]
fn second_order_convergence() {
    let w = C64::new(0.3, 0.2);
    let b = Ball::new(C64::new(0.0, 0.0), 0.25);
    let mut green_err = Vec::new();
    let mut rho_err = Vec::new();
    for h in [0.04, 0.02, 0.01] {
        let d = grid(&DomainSpec::unit_disk(), h);
        let g = green_function(&d, w, &opts()).unwrap();
        let rho = relative_extremal(&d, b, &opts()).unwrap();
        let mut eg = 0.0f64;
        let mut er = 0.0f64;
        for (k, v) in g.inside_values() {
            let z = d.point(k);
            if z != w {
                eg = eg.max((v - green_exact(z, w)).abs());
            }
            er = er.max((rho.values[k] - rho_exact(z, b)).abs());
        }
        green_err.push(eg);
        rho_err.push(er);
    }
    for e in [&green_err, &rho_err] {
        for p in e.windows(2) {
            assert!(p[0] / p[1] >= 1.8, "errors {e:?}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn extremal_decreases_with_the_obstacle(x in -0.3f64..0.3, y in -0.3f64..0.3, r in 0.05f64..0.15, grow in 0.02f64..0.2) {
        let d = grid(&DomainSpec::unit_disk(), 0.04);
        let small = Ball::new(C64::new(x, y), r);
        let big = Ball::new(small.center, r + grow);
        let a = relative_extremal(&d, small, &opts()).unwrap();
        let b = relative_extremal(&d, big, &opts()).unwrap();
        for (k, v) in b.inside_values() {
            prop_assert!(v <= a.values[k] + 1e-9);
        }
    }
}
