//! Scoring finite-time distributions against the continuous part of the limit.

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::limit::LimitMeasure;
use crate::quadrature::SUPPORT_BOUND;
use crate::walk::{distribution, evolve_capped, Distribution, WalkParams};

/// Half-width of the rescaled window around the origin left out of scoring.
pub const ATOM_WINDOW: f64 = 0.05;
pub const DEFAULT_BIN_WIDTH: f64 = 0.02;

/// An interval of rescaled positions `x / t`. Bins on the positive side are
/// closed on the right and bins on the negative side on the left, so that
/// mirrored bins collect mirrored sites.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bin {
    pub lo: f64,
    pub hi: f64,
}

impl Bin {
    pub fn contains(&self, v: f64) -> bool {
        if self.lo >= 0.0 {
            v > self.lo && v <= self.hi
        } else {
            v >= self.lo && v < self.hi
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Bins of `width` covering `window < |v| <= bound`, mirrored about zero and
/// listed in increasing order. The outermost bins are truncated at `bound`.
pub fn symmetric_bins(width: f64, window: f64, bound: f64) -> Result<Vec<Bin>> {
    if !(width > 0.0) || !(window >= 0.0) || !(bound > window) {
        return Err(Error::InvalidParameter(format!(
            "bins need width > 0 and 0 <= window < bound (width {width}, window {window}, bound {bound})"
        )));
    }
    let mut right = Vec::new();
    let mut lo = window;
    while lo < bound {
        let hi = (lo + width).min(bound);
        right.push(Bin { lo, hi });
        lo = window + width * right.len() as f64;
    }
    let mut bins: Vec<Bin> = right
        .iter()
        .rev()
        .map(|b| Bin {
            lo: -b.hi,
            hi: -b.lo,
        })
        .collect();
    bins.extend(right);
    Ok(bins)
}

/// `sum_{x/t in bin} P_t(x)` for every bin.
pub fn empirical_masses(dist: &Distribution, bins: &[Bin]) -> Result<Vec<f64>> {
    if dist.time == 0 {
        return Err(Error::ZeroTime);
    }
    let t = dist.time as f64;
    let mut out = vec![0.0; bins.len()];
    for (x, p) in dist.iter() {
        let v = x as f64 / t;
        if let Some(i) = bins.iter().position(|b| b.contains(v)) {
            out[i] += p;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinComparison {
    pub lo: f64,
    pub hi: f64,
    pub empirical: f64,
    pub theoretical: f64,
}

impl BinComparison {
    pub fn deviation(&self) -> f64 {
        self.empirical - self.theoretical
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub time: u64,
    pub bins: Vec<BinComparison>,
    pub total_abs_deviation: f64,
    /// Empirical mass in the negative-side bins.
    pub left_mass: f64,
    pub right_mass: f64,
}

/// `int_bin w f_K dx` for every bin.
pub fn theoretical_masses(measure: &LimitMeasure, bins: &[Bin], tol: f64) -> Result<Vec<f64>> {
    bins.iter()
        .map(|b| measure.mass_between(b.lo, b.hi, tol))
        .collect()
}

pub fn compare(
    dist: &Distribution,
    bins: &[Bin],
    theoretical: &[f64],
) -> Result<ConvergenceReport> {
    if theoretical.len() != bins.len() {
        return Err(Error::InvalidParameter(
            "one theoretical mass per bin required".into(),
        ));
    }
    let empirical = empirical_masses(dist, bins)?;
    let rows: Vec<BinComparison> = bins
        .iter()
        .zip(empirical.iter().zip(theoretical))
        .map(|(b, (&e, &th))| BinComparison {
            lo: b.lo,
            hi: b.hi,
            empirical: e,
            theoretical: th,
        })
        .collect();
    let side = |neg: bool| -> f64 {
        rows.iter()
            .filter(|r| (r.hi <= 0.0) == neg)
            .map(|r| r.empirical)
            .sum()
    };
    Ok(ConvergenceReport {
        time: dist.time,
        total_abs_deviation: rows.iter().map(|r| r.deviation().abs()).sum(),
        left_mass: side(true),
        right_mass: side(false),
        bins: rows,
    })
}

/// Reports for each of `times`, evolving the walks concurrently.
pub fn convergence_ladder(
    params: &WalkParams,
    times: &[u64],
    width: f64,
    tol: f64,
    cap: u64,
    exec: Execution,
) -> Result<Vec<ConvergenceReport>> {
    if times.contains(&0) {
        return Err(Error::ZeroTime);
    }
    let bins = symmetric_bins(width, ATOM_WINDOW, SUPPORT_BOUND)?;
    let measure = LimitMeasure::for_params(params, tol)?;
    let theoretical = theoretical_masses(&measure, &bins, tol)?;
    exec.map(times, |&t| {
        let state = evolve_capped(params, t, cap, exec)?;
        compare(&distribution(&state), &bins, &theoretical)
    })
    .into_iter()
    .collect()
}
