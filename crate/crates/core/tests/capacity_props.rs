use pluripot_core::capacity::{interval_capacity, log_capacity_intervals};
use pluripot_core::geometry::{appendix_set, IntervalUnionSet, APPENDIX_TERMS};
use proptest::prelude::*;

const NODES: usize = 128;

fn cap(e: &IntervalUnionSet) -> f64 {
    log_capacity_intervals(e, NODES).unwrap().capacity
}

fn intervals() -> impl Strategy<Value = IntervalUnionSet> {
    prop::collection::vec((0.02f64..0.3, 0.02f64..0.3), 1..4).prop_map(|parts| {
        let mut x = -1.0;
        let mut v = Vec::new();
        for (gap, len) in parts {
            x += gap;
            v.push((x, x + len));
            x += len;
        }
        IntervalUnionSet::new(v, vec![]).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn scaling_covariance(e in intervals(), lambda in 0.1f64..10.0) {
        let a = cap(&e);
        let b = cap(&e.scaled(lambda));
        prop_assert!((b - lambda * a).abs() <= 0.01 * lambda * a, "{} vs {}", b, lambda * a);
    }

    #[test]
    fn translation_invariance(e in intervals(), t in -5.0f64..5.0) {
        let a = cap(&e);
        let b = cap(&e.translated(t));
        prop_assert!((b - a).abs() <= 0.01 * a, "{} vs {}", b, a);
    }

    #[test]
    fn monotone_under_inclusion(e in intervals(), grow in prop::collection::vec(0.0f64..0.2, 3)) {
        let widened: Vec<(f64, f64)> = e.intervals.iter().zip(&grow).map(|(&(l, r), g)| (l - g, r + g)).collect();
        let f = IntervalUnionSet::new(widened, vec![]).unwrap().normalized();
        prop_assert!(e.is_subset_of(&f));
        prop_assert!(cap(&e) <= cap(&f) + 1e-3);
    }
}

#[test]
fn unit_interval_quarter_length() {
    let c = cap(&IntervalUnionSet::interval(-1.0, 1.0));
    assert!((c - 0.5).abs() < 5e-3, "{c}");
    assert_eq!(interval_capacity(2.0).unwrap(), 0.5);
}

#[test]
fn equilibrium_has_arcsine_profile() {
    let sol = log_capacity_intervals(&IntervalUnionSet::interval(-1.0, 1.0), 512).unwrap();
    let mass = |lo: f64, hi: f64| -> f64 {
        sol.nodes.iter().zip(&sol.weights).filter(|(z, _)| z.re.abs() >= lo && z.re.abs() < hi).map(|(_, w)| w).sum()
    };
    // outer and middle tenths of the length
    let outer = mass(0.9, 1.0 + 1e-12);
    let middle = mass(0.0, 0.1);
    let arcsine = |a: f64, b: f64| (b.asin() - a.asin()) * 2.0 / std::f64::consts::PI;
    assert!(outer > middle, "{outer} {middle}");
    assert!((outer - arcsine(0.9, 1.0)).abs() < 0.01, "{outer}");
    assert!((middle - arcsine(0.0, 0.1)).abs() < 0.01, "{middle}");
}

#[test]
fn appendix_slices_grow_with_the_centre() {
    let e = appendix_set(APPENDIX_TERMS);
    for n0 in 1..8 {
        let a = 2f64.powi(-n0);
        for n in 0..n0 {
            let r = 2f64.powi(-n);
            let at_zero = e.clip(-r, r);
            let at_a = e.clip(a - r, a + r);
            assert!(at_zero.is_subset_of(&at_a), "n0 {n0} n {n}");
        }
    }
}
