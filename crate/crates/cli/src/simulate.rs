use serde::{Deserialize, Serialize};

use wojcik::{distribution, evolve_capped, Execution, LimitMeasure};

use crate::config::{load, UsageError};
use crate::output::{emit, num, Row};
use crate::CommonArgs;

pub const DEFAULT_STEPS: u64 = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimRow {
    pub x_over_t: f64,
    pub scaled_prob: f64,
    pub density: f64,
}

impl Row for SimRow {
    const HEADER: &'static str = "x_over_t,scaled_prob,density";
    fn fields(&self) -> Vec<String> {
        vec![num(self.x_over_t), num(self.scaled_prob), num(self.density)]
    }
}

pub fn run(args: &CommonArgs) -> anyhow::Result<()> {
    let config = load(args, DEFAULT_STEPS)?;
    if config.steps == 0 {
        return Err(UsageError(
            "simulate needs --steps >= 1: the rescaled output (x/t, t P_t(x)) divides by t".into(),
        )
        .into());
    }
    let params = config.params();
    let measure = LimitMeasure::for_params(&params, config.tolerance)?;
    let t = config.steps;
    let state = evolve_capped(&params, t, config.max_steps, Execution::default())?;
    let tf = t as f64;
    let rows = distribution(&state)
        .iter()
        .filter(|(x, _)| (x + t as i64) % 2 == 0)
        .map(|(x, p)| {
            let v = x as f64 / tf;
            Ok(SimRow {
                x_over_t: v,
                scaled_prob: tf * p,
                density: measure.density(v)?,
            })
        })
        .collect::<wojcik::Result<Vec<_>>>()?;
    emit(
        &config,
        measure.atom,
        measure.integral.value,
        None,
        &[],
        rows,
    )
}
