//! Acceptance run: one line per criterion, nonzero exit on any failure.

use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::{Duration, Instant};

use pluripot_core::capacity::{log_capacity, log_capacity_intervals, verify_example5, Component, Example5Config, PlanarCompact};
use pluripot_core::chain::{chain_length, closed_form_l0, iterate, threshold, ChainParams};
use pluripot_core::envelopes::{check_blocki_bounds, green_function, relative_extremal, Ball, SolverOptions};
use pluripot_core::geometry::{DomainSpec, HartogsProfileDomain, IntervalUnionSet, PlanarGridDomain};
use pluripot_core::orlicz_bergman::{
    circle_points, closed_coefficient, contour_coefficient, disk_kernel_closed, disk_obstacle_rho, disk_samples,
    dyadic_orlicz_certifier, lemma41_integrals, luxemburg_norm, numeric_coefficient, orlicz_props_check,
    reproducing_check, sublevel_integral_scan, default_scan_levels, DyadicVerdict, KernelApprox, KernelDomain,
    Laurent, OrliczParams, SampledFunction,
};
use pluripot_core::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn capacity() -> Check {
    let seg = log_capacity_intervals(&IntervalUnionSet::interval(-1.0, 1.0), 512).map_err(err)?.capacity;
    ensure((0.495..=0.505).contains(&seg), format!("[-1,1] capacity {seg}"))?;
    let circle = PlanarCompact { components: vec![Component::Circle { center: C64::new(0.2, -0.1), radius: 0.3 }] };
    let c = log_capacity(&circle, 512).map_err(err)?.capacity;
    ensure((c - 0.3).abs() <= 0.003, format!("circle capacity {c}"))?;
    Ok(format!("segment {seg:.5}, circle {c:.5}"))
}

fn example5() -> Check {
    let rep = verify_example5(&Example5Config::default()).map_err(err)?;
    ensure(rep.part_i_pass, "gamma-density index set incomplete at some sample")?;
    let ct = rep
        .carleson_totik
        .iter()
        .find(|c| c.eps == 0.0625)
        .ok_or("no Carleson-Totik run at eps = 1/16")?;
    ensure(ct.finite && ct.report.density_value < 0.2, format!("Carleson-Totik density {}", ct.report.density_value))?;
    ensure(rep.pass, "report did not pass")?;
    Ok(format!("{} samples, Carleson-Totik density {:.4}", rep.samples.len(), ct.report.density_value))
}

fn disk_errors(h: f64, w: C64, b: Ball) -> Result<(f64, f64), String> {
    let d = Arc::new(PlanarGridDomain::rasterize(&DomainSpec::unit_disk(), h).map_err(err)?);
    let o = SolverOptions::default();
    let g = green_function(&d, w, &o).map_err(err)?;
    let rho = relative_extremal(&d, b, &o).map_err(err)?;
    let one = C64::new(1.0, 0.0);
    let (mut eg, mut er) = (0.0f64, 0.0f64);
    for k in d.inside_nodes() {
        let z = d.point(k);
        if z != w {
            eg = eg.max((g.values[k] - ((z - w) / (one - w.conj() * z)).norm().ln()).abs());
        }
        let m = ((z - b.center) / (one - b.center.conj() * z)).norm();
        er = er.max((rho.values[k] - (-m.ln() / b.radius.ln()).clamp(-1.0, 0.0)).abs());
    }
    Ok((eg, er))
}

fn disk_identities() -> Check {
    let w = C64::new(0.3, 0.2);
    let b = Ball::new(C64::new(0.0, 0.0), 0.25);
    let errs: Vec<(f64, f64)> = [0.02, 0.01, 0.005].iter().map(|&h| disk_errors(h, w, b)).collect::<Result<_, _>>()?;
    let (eg, er) = errs[2];
    ensure(eg <= 0.01, format!("Green error {eg}"))?;
    ensure(er <= 0.01, format!("extremal error {er}"))?;
    let ratios: Vec<f64> = errs.windows(2).map(|p| p[0].0 / p[1].0).collect();
    ensure(ratios.iter().all(|&r| r >= 1.8), format!("convergence ratios {ratios:?}"))?;
    let d = Arc::new(PlanarGridDomain::rasterize(&DomainSpec::unit_disk(), 0.005).map_err(err)?);
    let bl = check_blocki_bounds(&d, C64::new(0.0, 0.0), 0.1, None, &SolverOptions::default()).map_err(err)?;
    ensure(bl.max_violation <= 1e-3, format!("Blocki violation {}", bl.max_violation))?;
    Ok(format!(
        "green {eg:.2e}, extremal {er:.2e}, ratios {:.2}/{:.2}, Blocki {:.1e}",
        ratios[0], ratios[1], bl.max_violation
    ))
}

fn lemma41() -> Check {
    let dom = HartogsProfileDomain::with_default_eps(0.5).map_err(err)?;
    let eps = [1e-2, 1e-3, 1e-4, 1e-5];
    let mut out = Vec::new();
    for q in [2.0, 1.0, 0.5] {
        let rep = lemma41_integrals(&dom, q, &eps).map_err(err)?;
        let want = -(0.5 * (q + 1.0) - 1.0);
        ensure(
            (rep.fitted_exponent - want).abs() <= 0.05,
            format!("q = {q}: exponent {} vs {want}", rep.fitted_exponent),
        )?;
        ensure(rep.classification == rep.expected, format!("q = {q}: regime {:?}", rep.classification))?;
        ensure(rep.j_variation < 0.01, format!("q = {q}: J variation {}", rep.j_variation))?;
        out.push(format!("q={q}: {:.4}", rep.fitted_exponent));
    }
    Ok(out.join(", "))
}

fn orlicz_suite() -> Check {
    let grid = Arc::new(disk_samples(1.0, 24, 48).map_err(err)?);
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let random_poly = |rng: &mut ChaCha8Rng| {
        let c: Vec<C64> = (0..5).map(|_| C64::new(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0))).collect();
        SampledFunction::from_z(&grid, move |z| c.iter().rev().fold(C64::new(0.0, 0.0), |acc, &a| acc * z + a))
    };
    let l2 = OrliczParams::new(2.0, 0.0).map_err(err)?;
    let mut worst_q0 = 0.0f64;
    let mut worst_hom = 0.0f64;
    let mut worst_mono = f64::NEG_INFINITY;
    let mut worst_dom = f64::NEG_INFINITY;
    for i in 0..100 {
        let f = random_poly(&mut rng);
        let g = random_poly(&mut rng);
        let n0 = luxemburg_norm(&f, &l2).map_err(err)?;
        worst_q0 = worst_q0.max((n0 - f.lp_norm(2.0)).abs() / n0);
        let params = OrliczParams::new(2.0, rng.gen_range(0.0..3.0)).map_err(err)?;
        let c = C64::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        let rep = orlicz_props_check(&f, &g, c, &params).map_err(err)?;
        worst_hom = worst_hom.max(rep.homogeneity_error);
        worst_dom = worst_dom.max(rep.lp_norm / (rep.domination_constant * rep.norm_f));
        ensure(rep.pass, format!("function {i} failed the property checks"))?;
        let bigger = f.zip(&g, |a, b| a * (1.0 + b.norm() / (1.0 + b.norm()))).map_err(err)?;
        let bigger = luxemburg_norm(&bigger, &params).map_err(err)?;
        worst_mono = worst_mono.max(rep.norm_f / bigger - 1.0);
    }
    ensure(worst_q0 <= 1e-8, format!("q = 0 deviation from L2 {worst_q0}"))?;
    ensure(worst_hom <= 1e-6, format!("homogeneity error {worst_hom}"))?;
    ensure(worst_mono <= 1e-6, format!("monotonicity excess {worst_mono}"))?;
    ensure(worst_dom <= 1.0, format!("domination ratio {worst_dom}"))?;
    Ok(format!(
        "L2 {worst_q0:.1e}, homogeneity {worst_hom:.1e}, monotone excess {worst_mono:.1e}, domination ratio max {worst_dom:.3}"
    ))
}

fn kernel_suite() -> Check {
    let k = KernelApprox::new(KernelDomain::Disk, 60).map_err(err)?;
    let mut disk_err = 0.0f64;
    for i in 0..8 {
        for j in 0..8 {
            let z = C64::from_polar(0.1 * i as f64, 0.7 * j as f64);
            let w = C64::from_polar(0.75 - 0.1 * j as f64, -1.3 * i as f64);
            let got = k.eval(z, w).map_err(err)?.value;
            disk_err = disk_err.max((got - disk_kernel_closed(z, w)).norm());
        }
    }
    ensure(disk_err <= 1e-8, format!("disk kernel error {disk_err}"))?;
    let mut coef_err = 0.0f64;
    for inner in [0.1, 0.5] {
        let dom = KernelDomain::annulus(inner).map_err(err)?;
        for m in -20..=20 {
            let c = closed_coefficient(dom, m).ok_or("missing closed form")?;
            coef_err = coef_err.max((c - numeric_coefficient(dom, m)).abs() / c);
        }
    }
    ensure(coef_err <= 1e-10, format!("annulus coefficient error {coef_err}"))?;
    let mut repro = 0.0f64;
    for dom in [KernelDomain::Disk, KernelDomain::annulus(0.5).map_err(err)?] {
        let k = KernelApprox::with_default_order(dom);
        let lo = if dom == KernelDomain::Disk { 0 } else { -3 };
        for m in lo..=3 {
            let rep = reproducing_check(&k, &Laurent::monomial(m, C64::new(1.0, 0.0))).map_err(err)?;
            ensure(rep.in_span, format!("z^{m} not in span"))?;
            repro = repro.max(rep.residual);
        }
    }
    ensure(repro < 1e-6, format!("reproducing residual {repro}"))?;
    let pts = circle_points(0.5, 256);
    let vals: Vec<C64> = pts.iter().map(|z| z.inv()).collect();
    let a = contour_coefficient(&vals, 0.5, -1).map_err(err)?;
    ensure((a - 1.0).norm() <= 1e-10, format!("residue {a}"))?;
    Ok(format!("disk {disk_err:.1e}, coefficients {coef_err:.1e}, reproducing {repro:.1e}, residue {:.1e}", (a - 1.0).norm()))
}

fn dyadic() -> Check {
    let mut n = 0;
    for &alpha in &[0.5, 1.0, 2.0, 3.0] {
        for &(r, q) in &[(0.5, 0.1), (1.0, 0.7), (0.9, 1.3), (1.5, 2.9), (0.3, 2.0)] {
            let rep = dyadic_orlicz_certifier((1.0, alpha, r), q, 1, 60).map_err(err)?;
            let want = if q / alpha - r < 0.0 { DyadicVerdict::Converges } else { DyadicVerdict::Diverges };
            ensure(rep.verdict == want, format!("alpha {alpha}, r {r}, q {q}: {:?}", rep.verdict))?;
            n += 1;
        }
    }
    Ok(format!("{n} lattice points agree"))
}

fn chain() -> Check {
    let p = ChainParams::new(2, 2.0, 1.2, 10.0, 1.0).map_err(err)?;
    let l0 = -1.0;
    let ls = iterate(l0, 200, &p);
    let mut worst = 0.0f64;
    for m in 1..=200 {
        worst = worst.max((closed_form_l0(ls[m], m, &p) - l0).abs() / l0.abs());
    }
    ensure(worst <= 1e-10, format!("closed form error {worst}"))?;
    let mut ratios = Vec::new();
    for lambda in [1e2, 1e4, 1e8] {
        let t = chain_length(l0, lambda, &p, &p.default_link()).map_err(err)?;
        ratios.push(t.m as f64 / t.l_values[t.m].abs().ln());
    }
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let spread = ratios.iter().map(|r| (r - mean).abs() / mean).fold(0.0, f64::max);
    ensure(spread <= 0.1, format!("ratios {ratios:?}"))?;
    let th = threshold(2);
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    ensure((th - golden).abs() <= f64::EPSILON * golden, format!("threshold {th}"))?;
    Ok(format!("closed form {worst:.1e}, ratios {:.3}/{:.3}/{:.3} (spread {:.1}%)", ratios[0], ratios[1], ratios[2], 100.0 * spread))
}

fn disk_scan() -> Check {
    let k = KernelApprox::new(KernelDomain::Disk, 60).map_err(err)?;
    let rho = disk_obstacle_rho(0.5);
    let rep = sublevel_integral_scan(&k, &rho, C64::new(0.0, 0.0), &default_scan_levels()).map_err(err)?;
    ensure((0.9..=1.1).contains(&rep.r_fit), format!("r_fit {}", rep.r_fit))?;
    Ok(format!("r_fit {:.4}", rep.r_fit))
}

fn run_cli(args: &[&str]) -> Result<(Option<i32>, Vec<u8>), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_pluripot")).args(args).output().map_err(err)?;
    Ok((out.status.code(), out.stdout))
}

fn determinism() -> Check {
    let runs: &[&[&str]] = &[
        &["capacity", "eval", "--set", r#"{"intervals":[[-1,0.2],[0.5,1]]}"#, "--nodes", "128"],
        &["--format", "csv", "capacity", "eval", "--set", r#"{"intervals":[[-1,1]]}"#, "--nodes", "64"],
        &["capacity", "density", "--def", "carleson", "--nmax", "12"],
        &["capacity", "density", "--def", "gamma", "--a", "0.25", "--nmax", "8"],
        &["capacity", "verify-example5", "--nmax", "10", "--samples", "4"],
        &["verify", "example5", "--nmax", "10", "--samples", "4"],
        &["envelope", "extremal", "--domain", "disk", "--ball", "0.2i,0.2", "--h", "0.05"],
        &["--format", "csv", "envelope", "green", "--domain", "annulus:0.3", "--pole", "0.6", "--h", "0.05"],
        &["envelope", "check", "--lemma", "2.1", "--params", r#"{"h":0.04,"pairs":50}"#],
        &["--seed", "7", "envelope", "check", "--lemma", "2.1", "--params", r#"{"h":0.04,"pairs":50}"#],
        &["envelope", "check", "--lemma", "2.2", "--params", r#"{"h":0.04}"#],
        &["envelope", "check", "--lemma", "blocki", "--params", r#"{"h":0.02}"#],
        &["orlicz", "norm", "--f", r#"{"kind":"monomial","m":2}"#, "--nr", "16", "--nphi", "32"],
        &["orlicz", "norm", "--f", r#"{"kind":"reciprocal_z"}"#, "--domain", "annulus:0.5", "--nr", "16", "--nphi", "32"],
        &["orlicz", "lemma41", "--q", "1", "--eps", "1e-2,1e-3,1e-4"],
        &["bergman", "kernel", "--probe", "0.3,0.5i", "--M", "40"],
        &["bergman", "kernel", "--domain", "annulus:0.5", "--probe", "0.7,-0.6", "--auto"],
        &["bergman", "scan", "--r-fit"],
        &["bergman", "dyadic", "--alpha", "1", "--r", "0.9", "--q", "0.5"],
        &["chain", "run", "--n", "2", "--alpha", "2", "--beta", "1.2", "--C", "10", "--lambda-target", "690"],
        &["--format", "csv", "chain", "run", "--n", "3", "--alpha", "4", "--beta", "3", "--C", "2", "--lambda-target", "1e6"],
        &["chain", "admissible", "--n", "3", "--alpha", "3.5"],
    ];
    for args in runs {
        let (c1, a) = run_cli(args)?;
        let (c2, b) = run_cli(args)?;
        ensure(matches!(c1, Some(0 | 2)) && c1 == c2, format!("{args:?} exited with {c1:?}, {c2:?}"))?;
        ensure(!a.is_empty() && a == b, format!("{args:?} output differs between runs"))?;
    }
    Ok(format!("{} invocations byte-identical", runs.len()))
}

fn main() -> ExitCode {
    type Criterion = (&'static str, Duration, fn() -> Check);
    let criteria: [Criterion; 10] = [
        ("capacity oracle", Duration::from_secs(10), capacity),
        ("example 5", Duration::from_secs(120), example5),
        ("disk identities", Duration::from_secs(60), disk_identities),
        ("collar dichotomy", Duration::from_secs(180), lemma41),
        ("Orlicz norm suite", Duration::from_secs(60), orlicz_suite),
        ("kernel suite", Duration::from_secs(60), kernel_suite),
        ("dyadic certifier", Duration::from_secs(1), dyadic),
        ("chain recursion", Duration::from_secs(1), chain),
        ("disk sublevel scan", Duration::from_secs(60), disk_scan),
        ("determinism", Duration::from_secs(600), determinism),
    ];
    let mut failed = 0;
    for (i, (name, budget, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = f();
        let t = start.elapsed();
        let res = match res {
            Ok(s) if t > *budget => Err(format!("{s}; took {t:.2?}, budget {budget:?}")),
            r => r,
        };
        match res {
            Ok(s) => println!("criterion {}: PASS  {name} ({:.2} s): {s}", i + 1, t.as_secs_f64()),
            Err(e) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} ({:.2} s): {e}", i + 1, t.as_secs_f64());
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
