use log::info;
use serde::{Deserialize, Serialize};
use serde_json::json;

use wojcik::convergence::{convergence_ladder, ATOM_WINDOW};
use wojcik::{Execution, LimitMeasure, SUPPORT_BOUND};

use crate::config::{load, UsageError};
use crate::output::{emit, num, Row};
use crate::ConvergeArgs;

pub const DEFAULT_STEPS: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergeRow {
    pub t: u64,
    pub bin_lo: f64,
    pub bin_hi: f64,
    pub empirical: f64,
    pub theoretical: f64,
    pub deviation: f64,
}

impl Row for ConvergeRow {
    const HEADER: &'static str = "t,bin_lo,bin_hi,empirical,theoretical,deviation";
    fn fields(&self) -> Vec<String> {
        vec![
            self.t.to_string(),
            num(self.bin_lo),
            num(self.bin_hi),
            num(self.empirical),
            num(self.theoretical),
            num(self.deviation),
        ]
    }
}

/// `100, 1000, ...` below `steps`, then `steps` itself.
pub fn ladder(steps: u64) -> Vec<u64> {
    let mut out: Vec<u64> = std::iter::successors(Some(100u64), |t| t.checked_mul(10))
        .take_while(|&t| t < steps)
        .collect();
    out.push(steps);
    out
}

pub fn run(args: &ConvergeArgs) -> anyhow::Result<()> {
    let config = load(&args.common, DEFAULT_STEPS)?;
    if config.steps == 0 {
        return Err(UsageError("converge needs --steps >= 1".into()).into());
    }
    let width = args.bin_width;
    if !(width > 0.0 && width < SUPPORT_BOUND - ATOM_WINDOW) {
        return Err(UsageError(format!(
            "--bin-width must lie in (0, {}), got {width}",
            SUPPORT_BOUND - ATOM_WINDOW
        ))
        .into());
    }
    let params = config.params();
    let measure = LimitMeasure::for_params(&params, config.tolerance)?;
    let times = ladder(config.steps);
    info!("evolving t = {times:?}");
    let reports = convergence_ladder(
        &params,
        &times,
        width,
        config.tolerance,
        config.max_steps,
        Execution::default(),
    )?;
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for r in &reports {
        eprintln!(
            "t={}: total |deviation| {:.6}, left mass {:.6}, right mass {:.6}",
            r.time, r.total_abs_deviation, r.left_mass, r.right_mass
        );
        summary.push(json!({
            "t": r.time,
            "total_abs_deviation": r.total_abs_deviation,
            "left_mass": r.left_mass,
            "right_mass": r.right_mass,
        }));
        rows.extend(r.bins.iter().map(|b| ConvergeRow {
            t: r.time,
            bin_lo: b.lo,
            bin_hi: b.hi,
            empirical: b.empirical,
            theoretical: b.theoretical,
            deviation: b.deviation(),
        }));
    }
    emit(
        &config,
        measure.atom,
        measure.integral.value,
        Some(summary.into()),
        &[],
        rows,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladders() {
        assert_eq!(ladder(10_000), vec![100, 1000, 10_000]);
        assert_eq!(ladder(5000), vec![100, 1000, 5000]);
        assert_eq!(ladder(100), vec![100]);
        assert_eq!(ladder(40), vec![40]);
    }
}
