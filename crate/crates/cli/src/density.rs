use serde::{Deserialize, Serialize};

use wojcik::{konno_half, LimitMeasure, SUPPORT_BOUND};

use crate::config::load;
use crate::output::{emit, num, Row};
use crate::CommonArgs;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityRow {
    pub x: f64,
    pub w: f64,
    pub f_k: f64,
    pub density: f64,
}

impl Row for DensityRow {
    const HEADER: &'static str = "x,w,f_k,density";
    fn fields(&self) -> Vec<String> {
        vec![num(self.x), num(self.w), num(self.f_k), num(self.density)]
    }
}

/// Midpoints of `bins` equal cells over the open support.
pub fn grid(bins: usize) -> impl Iterator<Item = f64> {
    (0..bins).map(move |i| SUPPORT_BOUND * ((2 * i + 1) as f64 / bins as f64 - 1.0))
}

pub fn run(args: &CommonArgs) -> anyhow::Result<()> {
    let config = load(args, 0)?;
    let measure = LimitMeasure::for_params(&config.params(), config.tolerance)?;
    let rows = grid(config.bins)
        .map(|x| {
            let w = measure.weight(x)?;
            let f_k = konno_half(x);
            Ok(DensityRow {
                x,
                w,
                f_k,
                density: w * f_k,
            })
        })
        .collect::<wojcik::Result<Vec<_>>>()?;
    let (c, integral) = (measure.atom, measure.integral.value);
    let comments = [
        format!("C={}", num(c)),
        format!("integral={}", num(integral)),
        format!("sum={}", num(c + integral)),
    ];
    emit(&config, c, integral, None, &comments, rows)
}
