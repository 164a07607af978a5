//! Validation of command-line input into a [`RunConfig`].

use std::fmt;

use log::warn;
use serde::{Deserialize, Serialize};

use wojcik::quadrature::MAX_TOLERANCE;
use wojcik::walk::DEFAULT_MAX_STEPS;
use wojcik::WalkParams;

use crate::{CommonArgs, Format};

pub const MAX_STEPS_ENV: &str = "WOJCIK_MAX_STEPS";

/// Accepted without comment.
const NORM_EXACT: f64 = 1e-9;
/// Renormalized with a warning; rejected beyond.
const NORM_REPAIRABLE: f64 = 1e-6;

/// Invalid user input. Maps to exit status 2.
#[derive(Debug, Clone, PartialEq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage<T>(msg: impl Into<String>) -> Result<T, UsageError> {
    Err(UsageError(msg.into()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub phi: f64,
    /// `[a, phi1, b, phi2]` after normalization.
    pub init: [f64; 4],
    pub steps: u64,
    pub bins: usize,
    pub tolerance: f64,
    pub output_format: Format,
    pub output_path: Option<String>,
    pub max_steps: u64,
}

impl RunConfig {
    pub fn params(&self) -> WalkParams {
        let [a, phi1, b, phi2] = self.init;
        WalkParams::new(self.phi, a, phi1, b, phi2).expect("validated on load")
    }
}

/// Parses `a,phi1,b,phi2` and normalizes `(a, b)`.
pub fn parse_init(s: &str) -> Result<[f64; 4], UsageError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return usage(format!("--init expects a,phi1,b,phi2 (got {s:?})"));
    }
    let mut v = [0.0; 4];
    for (slot, p) in v.iter_mut().zip(&parts) {
        *slot = p
            .parse::<f64>()
            .map_err(|_| UsageError(format!("--init component {p:?} is not a number")))?;
        if !slot.is_finite() {
            return usage(format!("--init component {p:?} is not finite"));
        }
    }
    let [a, phi1, b, phi2] = v;
    if a < 0.0 || b < 0.0 {
        return usage("--init amplitudes a and b must be nonnegative; put signs into the phases");
    }
    let norm_sq = a * a + b * b;
    let off = (norm_sq - 1.0).abs();
    if off > NORM_REPAIRABLE {
        return usage(format!("--init is not normalized: a^2 + b^2 = {norm_sq}"));
    }
    if off > NORM_EXACT {
        warn!("initial state off by {off:.2e} from unit norm; renormalizing");
    }
    let n = norm_sq.sqrt();
    Ok([a / n, phi1, b / n, phi2])
}

fn max_steps_from_env() -> Result<u64, UsageError> {
    match std::env::var(MAX_STEPS_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| {
            UsageError(format!(
                "{MAX_STEPS_ENV}={v:?} is not a nonnegative integer"
            ))
        }),
        Err(_) => Ok(DEFAULT_MAX_STEPS),
    }
}

/// Validates everything up front; `default_steps` fills in a missing `--steps`.
pub fn load(args: &CommonArgs, default_steps: u64) -> Result<RunConfig, UsageError> {
    if !(0.0..1.0).contains(&args.phi) {
        return usage(format!("--phi must lie in [0, 1), got {}", args.phi));
    }
    if args.bins < 2 {
        return usage(format!("--bins must be at least 2, got {}", args.bins));
    }
    if !(args.tol > 0.0 && args.tol <= MAX_TOLERANCE) {
        return usage(format!(
            "--tol must lie in (0, {MAX_TOLERANCE}], got {}",
            args.tol
        ));
    }
    let init = parse_init(&args.init)?;
    let steps = args.steps.unwrap_or(default_steps);
    let max_steps = max_steps_from_env()?;
    if steps > max_steps {
        return usage(format!(
            "--steps {steps} exceeds the step cap {max_steps} (raise it with {MAX_STEPS_ENV})"
        ));
    }
    let config = RunConfig {
        phi: args.phi,
        init,
        steps,
        bins: args.bins,
        tolerance: args.tol,
        output_format: args.format,
        output_path: args.out.as_ref().map(|p| p.display().to_string()),
        max_steps,
    };
    let [a, phi1, b, phi2] = init;
    WalkParams::new(args.phi, a, phi1, b, phi2).map_err(|e| UsageError(e.to_string()))?;
    Ok(config)
}
