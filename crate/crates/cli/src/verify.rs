use std::path::Path;

use serde::{Deserialize, Serialize};

use wojcik::paths::{path_sum, MAX_PATH_STEPS};
use wojcik::spectral::density_via_k_integration;
use wojcik::walk::evolve_capped;
use wojcik::{weight, Execution, Fixture, LimitMeasure, WalkParams, SUPPORT_BOUND};

use crate::config::{load, RunConfig};
use crate::output::write_text;
use crate::{ChecksFailed, CommonArgs, Format};

pub const DEFAULT_STEPS: u64 = 12;
const ORACLE_K_POINTS: usize = 1_000_000;
const ORACLE_TOL: f64 = 1e-4;
const REDUCTION_TOL: f64 = 1e-12;
const FIXTURE_MASS_TOL: f64 = 1e-8;
const AMPLITUDE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub name: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: RunConfig,
    pub fixture: Option<String>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

fn check(id: &str, name: &str, result: wojcik::Result<(bool, String)>) -> Check {
    let (status, detail) = match result {
        Ok((true, d)) => (Status::Pass, d),
        Ok((false, d)) => (Status::Fail, d),
        Err(e) => (Status::Fail, format!("error: {e}")),
    };
    Check {
        id: id.into(),
        name: name.into(),
        status,
        detail,
    }
}

fn reduction(fixture: Fixture, params: &WalkParams) -> wojcik::Result<(bool, String)> {
    let c = wojcik::WeightCoefficients::new(params.phi, &params.angles());
    let mut grid: Vec<f64> = (0..1000)
        .map(|i| -SUPPORT_BOUND + 2.0 * SUPPORT_BOUND * i as f64 / 999.0)
        .collect();
    grid.push(0.0);
    let mut worst = 0.0f64;
    for x in grid {
        worst = worst.max((weight(x, &c)? - fixture.closed_form_weight(x)).abs());
    }
    Ok((
        worst <= REDUCTION_TOL,
        format!("max |w - closed form of {fixture}| = {worst:.3e} (limit {REDUCTION_TOL:e})"),
    ))
}

fn mass_balance(
    fixture: Option<Fixture>,
    params: &WalkParams,
    tol: f64,
) -> wojcik::Result<(bool, String)> {
    let m = LimitMeasure::for_params(params, tol)?;
    let raw_atom = 1.0 - m.integral.value;
    let mut ok = (-tol..=1.0 + tol).contains(&raw_atom) && m.integral.est_error <= tol;
    let mut detail = format!(
        "C = {:.12}, integral = {:.12}, sum = {:.12}, quadrature error estimate {:.1e}",
        m.atom,
        m.integral.value,
        m.atom + m.integral.value,
        m.integral.est_error
    );
    if let Some(f) = fixture {
        let off = (m.integral.value - f.continuous_mass()).abs();
        ok &= off <= FIXTURE_MASS_TOL;
        detail.push_str(&format!(
            "; expected integral {} (off by {off:.1e})",
            f.continuous_mass()
        ));
    }
    Ok((ok, detail))
}

fn oracle(params: &WalkParams, bins: usize, tol: f64) -> wojcik::Result<(bool, String)> {
    let d = density_via_k_integration(params.phi, &params.angles(), ORACLE_K_POINTS, bins)?;
    let m = LimitMeasure::for_params(params, tol)?;
    let mut worst = 0.0f64;
    for i in 0..d.bins() {
        let exact = m.mass_between(d.edges[i], d.edges[i + 1], tol)?;
        worst = worst.max((d.mass[i] - exact).abs());
    }
    Ok((
        worst <= ORACLE_TOL,
        format!("{bins} bins, n_k = {ORACLE_K_POINTS}: max per-bin deviation {worst:.3e} (limit {ORACLE_TOL:e})"),
    ))
}

fn brute_force(params: &WalkParams, horizon: u64) -> wojcik::Result<(bool, String)> {
    let mut worst = 0.0f64;
    for t in 0..=horizon {
        let a = evolve_capped(params, t, horizon, Execution::Sequential)?;
        let b = path_sum(params.initial_spinor(), params.phi, t)?;
        for x in -(t as i64)..=t as i64 {
            let (u, v) = (a.amplitude(x), b.amplitude(x));
            worst = worst
                .max((u.left - v.left).norm())
                .max((u.right - v.right).norm());
        }
    }
    Ok((
        worst <= AMPLITUDE_TOL,
        format!("t <= {horizon}: max amplitude difference {worst:.3e} (limit {AMPLITUDE_TOL:e})"),
    ))
}

pub fn verify(config: &RunConfig) -> Report {
    let params = config.params();
    let fixture = Fixture::matching(&params, 1e-9);
    let mut checks = Vec::new();
    checks.push(match fixture {
        Some(f) => check("i", "fixture reduction", reduction(f, &params)),
        None => Check {
            id: "i".into(),
            name: "fixture reduction".into(),
            status: Status::Skipped,
            detail: "configuration matches no worked fixture; skipped".into(),
        },
    });
    checks.push(check(
        "ii",
        "C + integral = 1",
        mass_balance(fixture, &params, config.tolerance),
    ));
    checks.push(check(
        "iii",
        "spectral oracle vs closed form",
        oracle(&params, config.bins, config.tolerance),
    ));
    let horizon = config.steps.min(MAX_PATH_STEPS);
    checks.push(check(
        "iv",
        "brute-force paths vs evolve",
        brute_force(&params, horizon),
    ));
    let passed = checks.iter().all(|c| c.status != Status::Fail);
    Report {
        config: config.clone(),
        fixture: fixture.map(|f| f.name().to_string()),
        checks,
        passed,
    }
}

pub fn human(report: &Report) -> String {
    let mut s = match &report.fixture {
        Some(f) => format!("configuration matches fixture {f}\n"),
        None => "configuration matches no fixture\n".to_string(),
    };
    for c in &report.checks {
        let tag = match c.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIP",
        };
        s.push_str(&format!("[{tag}] ({}) {}: {}\n", c.id, c.name, c.detail));
    }
    s.push_str(if report.passed {
        "all checks passed\n"
    } else {
        "some checks failed\n"
    });
    s
}

pub fn run(args: &CommonArgs) -> anyhow::Result<()> {
    let config = load(args, DEFAULT_STEPS)?;
    let report = verify(&config);
    let text = human(&report);
    let json = serde_json::to_string_pretty(&report)? + "\n";
    match (&config.output_path, config.output_format) {
        (Some(p), _) => {
            print!("{text}");
            write_text(Some(Path::new(p)), &json)?;
        }
        (None, Format::Json) => {
            eprint!("{text}");
            write_text(None, &json)?;
        }
        (None, Format::Csv) => print!("{text}"),
    }
    let failed = report
        .checks
        .iter()
        .filter(|c| c.status == Status::Fail)
        .count();
    if failed > 0 {
        return Err(ChecksFailed(failed).into());
    }
    Ok(())
}
