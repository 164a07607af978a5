//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits with a
//! failure status if any criterion fails.

use std::f64::consts::{PI, TAU};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wojcik::convergence::{
    compare, convergence_ladder, symmetric_bins, theoretical_masses, DEFAULT_BIN_WIDTH,
};
use wojcik::limit::continuous_mass;
use wojcik::paths::path_sum;
use wojcik::spectral::density_via_k_integration;
use wojcik::walk::{cesaro_average, DEFAULT_MAX_STEPS};
use wojcik::{
    distribution, evolve, Execution, Fixture, LimitMeasure, Walk, WalkParams, WeightCoefficients,
    SUPPORT_BOUND,
};

const QUAD_TOL: f64 = 1e-12;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn random_params(rng: &mut ChaCha8Rng) -> WalkParams {
    let eta: f64 = rng.gen_range(0.0..PI / 2.0);
    WalkParams::new(
        rng.gen_range(0.0..1.0),
        eta.cos(),
        rng.gen_range(0.0..TAU),
        eta.sin(),
        rng.gen_range(0.0..TAU),
    )
    .unwrap()
}

fn criterion_1() -> Outcome {
    let mut worst = 0.0f64;
    let mut slowest = Duration::ZERO;
    for f in Fixture::ALL {
        let start = Instant::now();
        let p = f.params();
        let r = continuous_mass(&WeightCoefficients::new(p.phi, &p.angles()), QUAD_TOL).unwrap();
        slowest = slowest.max(start.elapsed());
        worst = worst.max((r.value - f.continuous_mass()).abs());
    }
    outcome(
        worst <= 1e-8 && slowest < Duration::from_secs(1),
        format!("max |integral - expected| = {worst:.2e}, slowest {slowest:?}"),
    )
}

fn criterion_2() -> Outcome {
    let mut worst = 0.0f64;
    for f in Fixture::ALL {
        let m = LimitMeasure::for_params(&f.params(), QUAD_TOL).unwrap();
        worst = worst.max((m.atom - f.atom()).abs());
    }
    outcome(worst <= 1e-8, format!("max |C - expected| = {worst:.2e}"))
}

fn criterion_3() -> Outcome {
    let mut worst = 0.0f64;
    let mut grid: Vec<f64> = (0..1000)
        .map(|i| -SUPPORT_BOUND + 2.0 * SUPPORT_BOUND * i as f64 / 999.0)
        .collect();
    grid.extend([0.0, -0.0]);
    for f in Fixture::ALL {
        let p = f.params();
        let c = WeightCoefficients::new(p.phi, &p.angles());
        for &x in &grid {
            let w = wojcik::weight(x, &c).unwrap();
            worst = worst.max((w - f.closed_form_weight(x)).abs());
        }
    }
    outcome(
        worst <= 1e-12,
        format!("max pointwise |w - closed form| = {worst:.2e}"),
    )
}

fn criterion_4() -> Outcome {
    let mut worst = 0.0f64;
    let mut slowest = Duration::ZERO;
    for f in Fixture::ALL {
        let p = f.params();
        let start = Instant::now();
        let d = density_via_k_integration(p.phi, &p.angles(), 1_000_000, 40).unwrap();
        slowest = slowest.max(start.elapsed());
        let m = LimitMeasure::for_params(&p, QUAD_TOL).unwrap();
        for i in 0..d.bins() {
            let exact = m
                .mass_between(d.edges[i], d.edges[i + 1], QUAD_TOL)
                .unwrap();
            worst = worst.max((d.mass[i] - exact).abs());
        }
    }
    outcome(
        worst <= 1e-4 && slowest < Duration::from_secs(30),
        format!("max per-bin deviation = {worst:.2e}, slowest {slowest:?}"),
    )
}

fn criterion_5() -> Outcome {
    let p = WalkParams::left_localized(0.5).unwrap();
    let exec = Execution::default();
    let start = Instant::now();
    let top = convergence_ladder(
        &p,
        &[10_000],
        DEFAULT_BIN_WIDTH,
        QUAD_TOL,
        DEFAULT_MAX_STEPS,
        exec,
    )
    .unwrap();
    let elapsed = start.elapsed();
    let lower = convergence_ladder(
        &p,
        &[100, 1000],
        DEFAULT_BIN_WIDTH,
        QUAD_TOL,
        DEFAULT_MAX_STEPS,
        exec,
    )
    .unwrap();
    let devs = [
        lower[0].total_abs_deviation,
        lower[1].total_abs_deviation,
        top[0].total_abs_deviation,
    ];
    outcome(
        devs[2] <= 0.02
            && devs[0] > devs[1]
            && devs[1] > devs[2]
            && elapsed < Duration::from_secs(60),
        format!(
            "total |dev| at t=100,1000,10000 = {:.4}, {:.4}, {:.4}; t=10000 took {elapsed:?}",
            devs[0], devs[1], devs[2]
        ),
    )
}

fn criterion_6() -> Outcome {
    let half = cesaro_average(&WalkParams::left_localized(0.5).unwrap(), 5000, 0).unwrap();
    let quarter = cesaro_average(&WalkParams::left_localized(0.25).unwrap(), 5000, 0).unwrap();
    let plain = cesaro_average(&WalkParams::left_localized(0.0).unwrap(), 5000, 0).unwrap();
    outcome(
        (half - 8.0 / 25.0).abs() <= 0.02 && (quarter - 4.0 / 25.0).abs() <= 0.02 && plain <= 0.01,
        format!("phi=1/2: {half:.4}, phi=1/4: {quarter:.4}, phi=0: {plain:.5}"),
    )
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let p = random_params(&mut rng);
        let total = evolve(&p, 10_000).unwrap().total_probability();
        worst = worst.max((total - 1.0).abs());
    }
    outcome(
        worst <= 1e-11,
        format!("max |sum P - 1| at t=10000 = {worst:.2e}"),
    )
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for phi in [0.0, 0.25, 0.5, 0.3] {
        for _ in 0..3 {
            let mut p = random_params(&mut rng);
            p.phi = phi;
            for t in 0..=12 {
                let a = evolve(&p, t).unwrap();
                let b = path_sum(p.initial_spinor(), phi, t).unwrap();
                for x in -(t as i64)..=t as i64 {
                    let (u, v) = (a.amplitude(x), b.amplitude(x));
                    worst = worst
                        .max((u.left - v.left).norm())
                        .max((u.right - v.right).norm());
                }
            }
        }
    }
    outcome(
        worst <= 1e-12,
        format!("max |amplitude difference| = {worst:.2e}"),
    )
}

fn criterion_9() -> Outcome {
    let mut worst = 0.0f64;
    for phi in [0.5, 0.25] {
        let p = WalkParams::symmetric(phi).unwrap();
        let mut walk = Walk::new(p.initial_spinor(), phi, 1000, Execution::default()).unwrap();
        loop {
            let d = walk.distribution();
            let t = d.time as i64;
            for x in 1..=t {
                worst = worst.max((d.get(x) - d.get(-x)).abs());
            }
            if !walk.advance() {
                break;
            }
        }
    }
    let mut signs_ok = true;
    let mut details = Vec::new();
    let bins = symmetric_bins(DEFAULT_BIN_WIDTH, 0.05, SUPPORT_BOUND).unwrap();
    for phi in [0.0, 0.25, 0.5] {
        let p = WalkParams::left_localized(phi).unwrap();
        let m = LimitMeasure::for_params(&p, QUAD_TOL).unwrap();
        let expected = (m.weight(0.5).unwrap() - m.weight(-0.5).unwrap()).signum();
        let th = theoretical_masses(&m, &bins, QUAD_TOL).unwrap();
        let r = compare(&distribution(&evolve(&p, 10_000).unwrap()), &bins, &th).unwrap();
        // Bins holding +0.5 and -0.5.
        let right = r.bins.iter().find(|b| b.lo < 0.5 && 0.5 <= b.hi).unwrap();
        let left = r.bins.iter().find(|b| b.lo <= -0.5 && -0.5 < b.hi).unwrap();
        let diff = right.empirical - left.empirical;
        let noise = right.deviation().abs() + left.deviation().abs();
        signs_ok &= diff.signum() == expected && diff.abs() > noise;
        details.push(format!(
            "phi={phi}: bin(0.5)-bin(-0.5) {diff:+.2e} vs deviation {noise:.1e}"
        ));
    }
    outcome(
        worst <= 1e-12 && signs_ok,
        format!("max |P(x) - P(-x)| = {worst:.2e}; {}", details.join(", ")),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("quadrature constants", criterion_1),
        ("atom masses", criterion_2),
        ("closed-form reduction", criterion_3),
        ("spectral-oracle equivalence", criterion_4),
        ("simulation convergence", criterion_5),
        ("localization values", criterion_6),
        ("unitarity", criterion_7),
        ("brute-force oracle", criterion_8),
        ("symmetry witnesses", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("acceptance {}: {tag} {name}: {}", i + 1, o.detail);
        failed += usize::from(!o.pass);
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all 9 acceptance criteria passed");
}
