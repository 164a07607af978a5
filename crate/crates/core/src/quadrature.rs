//! Integration of densities carried by the Konno kernel on `(-1/sqrt(2), 1/sqrt(2))`.
//!
//! The kernel has inverse-square-root singularities at both endpoints. Under
//! `x = sin(u) / sqrt(2)` the factor `sqrt(1 - 2x^2)` becomes `cos(u)`, which
//! cancels against the Jacobian `dx = cos(u) du / sqrt(2)`; what remains is
//! integrated with adaptive Gauss-Kronrod (7/15) on each half `u < 0`, `u > 0`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI, SQRT_2};

use crate::error::{Error, Result};

/// Upper end of the Konno support for `a = 1/sqrt(2)`.
pub const SUPPORT_BOUND: f64 = FRAC_1_SQRT_2;

pub const DEFAULT_MAX_EVALS: usize = 150_000;

/// Largest tolerance accepted by the public entry points.
pub const MAX_TOLERANCE: f64 = 1e-2;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub est_error: f64,
    pub evaluations: usize,
}

impl QuadratureResult {
    fn combine(self, other: QuadratureResult) -> QuadratureResult {
        QuadratureResult {
            value: self.value + other.value,
            est_error: self.est_error + other.est_error,
            evaluations: self.evaluations + other.evaluations,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Segment {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&node, &wk)) in XGK.iter().zip(&WGK).take(7).enumerate() {
        let dx = half * node;
        let pair = f(center - dx) + f(center + dx);
        kronrod += wk * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Segment {
        lo,
        hi,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Globally adaptive Gauss-Kronrod quadrature on `[lo, hi]` to absolute
/// tolerance `tol`, spending at most `max_evals` integrand evaluations.
pub fn adaptive_gauss_kronrod<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    tol: f64,
    max_evals: usize,
) -> Result<QuadratureResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance {tol} must be positive"
        )));
    }
    if lo == hi {
        return Ok(QuadratureResult {
            value: 0.0,
            est_error: 0.0,
            evaluations: 0,
        });
    }
    let first = kronrod15(&f, lo, hi);
    let mut evaluations = 15;
    let mut value = first.value;
    let mut error = first.error;
    let mut heap = BinaryHeap::from([first]);
    while error > tol {
        if evaluations + 30 > max_evals {
            return Err(Error::QuadratureNonConvergence {
                partial: value,
                est_error: error,
                evaluations,
            });
        }
        let worst = heap.pop().expect("heap holds at least one segment");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            // Segment cannot be split further in floating point.
            return Err(Error::QuadratureNonConvergence {
                partial: value,
                est_error: error,
                evaluations,
            });
        }
        let left = kronrod15(&f, worst.lo, mid);
        let right = kronrod15(&f, mid, worst.hi);
        evaluations += 30;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        if error <= tol {
            // Re-sum to shed the drift of the running updates.
            value = heap.iter().map(|s| s.value).sum();
            error = heap.iter().map(|s| s.error).sum();
        }
    }
    Ok(QuadratureResult {
        value,
        est_error: error,
        evaluations,
    })
}

fn check_tolerance(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol <= MAX_TOLERANCE) {
        return Err(Error::InvalidParameter(format!(
            "tolerance {tol} outside (0, {MAX_TOLERANCE}]"
        )));
    }
    Ok(())
}

fn join<A, B, RA, RB>(a: A, b: B) -> (RA, RB)
where
    A: FnOnce() -> RA + Send,
    B: FnOnce() -> RB + Send,
    RA: Send,
    RB: Send,
{
    #[cfg(feature = "parallel")]
    {
        rayon::join(a, b)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (a(), b())
    }
}

/// `u(x) = asin(sqrt(2) x)`, clamped onto `[-pi/2, pi/2]`.
pub fn angle_of(x: f64) -> f64 {
    (SQRT_2 * x).clamp(-1.0, 1.0).asin()
}

/// `x(u) = sin(u) / sqrt(2)`.
pub fn position_of(u: f64) -> f64 {
    u.sin() * FRAC_1_SQRT_2
}

/// Integrates a full density `w(x) f_K(x; 1/sqrt(2))` over the support.
///
/// The density is sampled at interior points only and multiplied by the
/// cosine Jacobian; the two halves are integrated independently.
pub fn integrate_ac<F>(density: F, tol: f64) -> Result<QuadratureResult>
where
    F: Fn(f64) -> f64 + Sync,
{
    check_tolerance(tol)?;
    let integrand = |u: f64| density(position_of(u)) * u.cos() * FRAC_1_SQRT_2;
    let half_tol = 0.5 * tol;
    let (left, right) = join(
        || adaptive_gauss_kronrod(integrand, -FRAC_PI_2, 0.0, half_tol, DEFAULT_MAX_EVALS),
        || adaptive_gauss_kronrod(integrand, 0.0, FRAC_PI_2, half_tol, DEFAULT_MAX_EVALS),
    );
    Ok(left?.combine(right?))
}

/// Integrates `w(x) f_K(x; 1/sqrt(2))` over `[lo, hi]` given only the weight `w`.
///
/// In the angle variable the kernel times the Jacobian is the smooth factor
/// `1 / (sqrt(2) pi (1 - x^2))`, so no singular value is ever formed. Intervals
/// straddling zero are split there since `w` may be piecewise across the origin.
pub fn integrate_weighted<F>(weight: F, lo: f64, hi: f64, tol: f64) -> Result<QuadratureResult>
where
    F: Fn(f64) -> f64 + Sync,
{
    check_tolerance(tol)?;
    if !(lo <= hi) || lo < -SUPPORT_BOUND || hi > SUPPORT_BOUND {
        return Err(Error::InvalidParameter(format!(
            "interval [{lo}, {hi}] is not inside the Konno support"
        )));
    }
    let integrand = |u: f64| {
        let x = position_of(u);
        weight(x) / (SQRT_2 * PI * (1.0 - x * x))
    };
    let (ulo, uhi) = (angle_of(lo), angle_of(hi));
    if ulo < 0.0 && uhi > 0.0 {
        let half_tol = 0.5 * tol;
        let (left, right) = join(
            || adaptive_gauss_kronrod(integrand, ulo, 0.0, half_tol, DEFAULT_MAX_EVALS),
            || adaptive_gauss_kronrod(integrand, 0.0, uhi, half_tol, DEFAULT_MAX_EVALS),
        );
        Ok(left?.combine(right?))
    } else {
        adaptive_gauss_kronrod(integrand, ulo, uhi, tol, DEFAULT_MAX_EVALS)
    }
}
