//! Residue reconstruction of the continuous limit density.
//!
//! For each wave number `k` the Fourier-transformed path generating function
//! has two unit-circle poles `e^{i theta^(+-)(k)}`, one per direction of
//! motion. The squared residue norm at each pole is the product of four
//! factors:
//!
//! 1. `|Res 1/(1 - e^{+-ik} lambda^(+-)(z))|^2`, the geometric series pole;
//! 2. `1 / |Lambda_0(z)|^2`, with `Lambda_0 = 1 - sqrt(2) w f + w^2 f^2`,
//!    `w = e^{2 pi i phi}`;
//! 3. `|alpha -+ beta - sqrt(2) w (alpha|beta) f|^2 / 2`, the initial-state factor;
//! 4. `|lambda f|^2 + 1`, the spinor norm.
//!
//! Integrating these norms against `dk / 2 pi`, with each `k` deposited at the
//! group velocity `x(k) = -d theta / dk`, yields `w(x) f_K(x; 1/sqrt(2)) dx`.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::limit::{konno_half, InitialStateAngles};
use crate::quadrature::SUPPORT_BOUND;
use crate::walk::defect_phase;

/// Distance from an axis below which `sin k` or `cos k` counts as zero.
const AXIS_EPS: f64 = 1e-12;

/// Samples a bin must receive before the k-grid is considered resolved.
pub const MIN_SAMPLES_PER_BIN: usize = 32;

pub const MIN_K_POINTS: usize = 10_000;
pub const MIN_BINS: usize = 20;

/// Number of k-grid blocks reduced in fixed order, so results do not depend
/// on thread scheduling.
const K_BLOCKS: usize = 256;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Direction of motion: `Plus` pairs with `lambda^(+)` and positive velocities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::Plus, Branch::Minus];

    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

fn sgn(v: f64) -> f64 {
    if v < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// `lambda^(+-)` and `f` at `z = e^{i theta}` in the ballistic region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchEval {
    pub theta: f64,
    pub branch: Branch,
    pub sgn_cos: f64,
    pub sgn_sin: f64,
    pub lambda: Complex64,
    pub f_tilde: Complex64,
}

impl BranchEval {
    pub fn z(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.theta)
    }

    /// Residual of `f^2 - sqrt(2)(1 + z^2) f + z^2 = 0`.
    pub fn quadratic_residual(&self) -> f64 {
        let z = self.z();
        let f = self.f_tilde;
        (f * f - SQRT_2 * (1.0 + z * z) * f + z * z).norm()
    }
}

fn circle_eval(cos: f64, sin: f64, branch: Branch) -> BranchEval {
    let root = (2.0 * cos * cos - 1.0).max(0.0).sqrt();
    let sc = sgn(cos);
    let lambda = -branch.sign() * Complex64::new(sc * root, SQRT_2 * sin);
    let z = Complex64::new(cos, sin);
    let f_tilde = sc * z * (SQRT_2 * cos.abs() - root);
    BranchEval {
        theta: sin.atan2(cos),
        branch,
        sgn_cos: sc,
        sgn_sin: sgn(sin),
        lambda,
        f_tilde,
    }
}

/// `lambda^(+-)(e^{i theta})` and `f(e^{i theta})` for `|sin theta| < 1/sqrt(2)`.
pub fn f_lambda_on_circle(theta: f64, branch: Branch) -> Result<BranchEval> {
    let (sin, cos) = theta.sin_cos();
    if sin.abs() >= FRAC_1_SQRT_2 {
        return Err(Error::OutsideBallisticRegion { theta });
    }
    let mut eval = circle_eval(cos, sin, branch);
    eval.theta = theta;
    Ok(eval)
}

/// Sign `delta` that keeps `|lambda| <= 1` when taking the boundary limit of
/// `sqrt((w + 1/w)^2 - 2)` at `w = i e^{i theta}`.
pub fn branch_delta(theta: f64) -> f64 {
    let (sin, cos) = theta.sin_cos();
    if sin.abs() >= FRAC_1_SQRT_2 {
        -sgn(sin)
    } else {
        -sgn(cos)
    }
}

/// Boundary value of `sqrt((w + 1/w)^2 - 2)` at `w = i e^{i theta}` on the
/// contracting branch, in both the localization and ballistic regions.
pub fn radical_limit(theta: f64) -> Complex64 {
    let (sin, cos) = theta.sin_cos();
    if sin.abs() >= FRAC_1_SQRT_2 {
        Complex64::new(-2.0 * sgn(sin) * (sin * sin - 0.5).sqrt(), 0.0)
    } else {
        Complex64::new(0.0, -2.0 * sgn(cos) * (0.5 - sin * sin).sqrt())
    }
}

/// `lambda^(+-) = +-(i/sqrt(2)) ((w + 1/w) - radical)` with `w = i e^{i theta}`.
pub fn lambda_from_radical(theta: f64, branch: Branch) -> Complex64 {
    let w = I * Complex64::from_polar(1.0, theta);
    branch.sign() * I * FRAC_1_SQRT_2 * ((w + w.inv()) - radical_limit(theta))
}

/// `f = -(w / sqrt(2)) ((w - 1/w) + radical)` with `w = i e^{i theta}`.
pub fn f_from_radical(theta: f64) -> Complex64 {
    let w = I * Complex64::from_polar(1.0, theta);
    -(w * FRAC_1_SQRT_2) * ((w - w.inv()) + radical_limit(theta))
}

fn check_off_axis(k: f64) -> Result<(f64, f64)> {
    let (sin, cos) = k.sin_cos();
    if !k.is_finite() || sin.abs() < AXIS_EPS || cos.abs() < AXIS_EPS {
        return Err(Error::AxisWaveNumber { k });
    }
    Ok((sin, cos))
}

/// Group velocities `(x_+, x_-) = (|cos k| / sqrt(1 + cos^2 k), -x_+)`.
pub fn x_of_k(k: f64) -> (f64, f64) {
    let c = k.cos().abs();
    let x = c / (1.0 + c * c).sqrt();
    (x, -x)
}

fn pole(x: f64, sgn_cos_k: f64, sgn_sin_k: f64, branch: Branch) -> Complex64 {
    let y = 1.0 - x * x;
    let re = -branch.sign() * sgn_cos_k / (2.0 * y).sqrt();
    let im = sgn_sin_k * ((1.0 - 2.0 * x * x).max(0.0) / (2.0 * y)).sqrt();
    Complex64::new(re, im)
}

/// Poles `(e^{i theta^(+)(k)}, e^{i theta^(-)(k)})` solving `1 - e^{+-ik} lambda^(+-)(z) = 0`.
pub fn singular_points(k: f64) -> Result<(Complex64, Complex64)> {
    let (sin, cos) = check_off_axis(k)?;
    let (x, _) = x_of_k(k);
    Ok((
        pole(x, sgn(cos), sgn(sin), Branch::Plus),
        pole(x, sgn(cos), sgn(sin), Branch::Minus),
    ))
}

/// `|Lambda_0(z)|^2` expanded in `f = f(z)` and the defect phase.
pub fn lambda0_modulus_sq(f: Complex64, phi: f64) -> f64 {
    let w = defect_phase(phi);
    let f2 = f * f;
    let nf = f.norm_sqr();
    1.0 + 2.0 * nf + nf * nf - 2.0 * SQRT_2 * (w * f).re + 2.0 * (w * w * f2).re
        - 2.0 * SQRT_2 * (w * f.conj() * f2).re
}

/// The four factors of the squared residue norm at one pole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidueFactors {
    pub item1: f64,
    pub item2: f64,
    pub item3: f64,
    pub item4: f64,
    /// Group velocity of the pole; positive on `Plus`, negative on `Minus`.
    pub x: f64,
}

impl ResidueFactors {
    pub fn norm_sq(&self) -> f64 {
        self.item1 * self.item2 * self.item3 * self.item4
    }
}

/// Initial-state amplitudes with the common phase removed: `(a e^{i phi12}, b)`.
fn amplitudes(init: &InitialStateAngles) -> (Complex64, Complex64) {
    (
        Complex64::from_polar(init.a, init.phi12),
        Complex64::new(init.b, 0.0),
    )
}

pub fn residue_factors(
    k: f64,
    branch: Branch,
    phi: f64,
    init: &InitialStateAngles,
) -> Result<ResidueFactors> {
    let (sin_k, cos_k) = check_off_axis(k)?;
    let (xp, _) = x_of_k(k);
    let z = pole(xp, sgn(cos_k), sgn(sin_k), branch);
    let eval = circle_eval(z.re, z.im, branch);
    let (c, s) = (z.re, z.im);

    // |d g / d z| = |d lambda / d theta| on the unit circle.
    let root2 = 2.0 * c * c - 1.0;
    let item1 = if root2 > 0.0 {
        let dl2 = 4.0 * c * c * s * s / root2 + 2.0 * c * c;
        1.0 / dl2
    } else {
        0.0
    };

    let item2 = 1.0 / lambda0_modulus_sq(eval.f_tilde, phi);

    let (alpha, beta) = amplitudes(init);
    let w = defect_phase(phi);
    let inner = match branch {
        Branch::Plus => alpha - beta - SQRT_2 * w * alpha * eval.f_tilde,
        Branch::Minus => alpha + beta - SQRT_2 * w * beta * eval.f_tilde,
    };
    let item3 = 0.5 * inner.norm_sqr();

    let item4 = 1.0 + (eval.lambda * eval.f_tilde).norm_sqr();

    Ok(ResidueFactors {
        item1,
        item2,
        item3,
        item4,
        x: branch.sign() * xp,
    })
}

/// Wave numbers in `[0, 2 pi)` whose `branch` pole moves with velocity `x`.
pub fn preimages(x: f64) -> Result<[f64; 4]> {
    if !(x.abs() < SUPPORT_BOUND) || x == 0.0 {
        return Err(Error::InvalidParameter(format!(
            "velocity {x} must satisfy 0 < |x| < 1/sqrt(2)"
        )));
    }
    let c = x.abs() / (1.0 - x * x).sqrt();
    let k0 = c.clamp(-1.0, 1.0).acos();
    Ok([k0, PI - k0, PI + k0, TAU - k0])
}

/// Continuous density at velocity `x` reassembled from the residues of
/// every preimage `k`, using `dk = pi f_K(x) dx` on each.
pub fn pointwise_density(x: f64, phi: f64, init: &InitialStateAngles) -> Result<f64> {
    let branch = if x > 0.0 { Branch::Plus } else { Branch::Minus };
    let mut total = 0.0;
    for k in preimages(x)? {
        total += residue_factors(k, branch, phi, init)?.norm_sq();
    }
    Ok(0.5 * total * konno_half(x))
}

/// Masses deposited into uniform bins over `(-1/sqrt(2), 1/sqrt(2))`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinnedDensity {
    pub edges: Vec<f64>,
    pub mass: Vec<f64>,
    pub samples: Vec<usize>,
}

impl BinnedDensity {
    pub fn bins(&self) -> usize {
        self.mass.len()
    }

    pub fn total(&self) -> f64 {
        self.mass.iter().sum()
    }

    fn empty(bins: usize) -> Self {
        let width = 2.0 * SUPPORT_BOUND / bins as f64;
        BinnedDensity {
            edges: (0..=bins)
                .map(|i| -SUPPORT_BOUND + i as f64 * width)
                .collect(),
            mass: vec![0.0; bins],
            samples: vec![0; bins],
        }
    }

    fn merge(&mut self, other: &BinnedDensity) {
        for (m, o) in self.mass.iter_mut().zip(&other.mass) {
            *m += o;
        }
        for (s, o) in self.samples.iter_mut().zip(&other.samples) {
            *s += o;
        }
    }
}

fn deposit_block(
    range: std::ops::Range<usize>,
    n_k: usize,
    bins: usize,
    phi: f64,
    init: &InitialStateAngles,
) -> Result<BinnedDensity> {
    let mut acc = BinnedDensity::empty(bins);
    let dk = TAU / n_k as f64;
    let scale = bins as f64 / (2.0 * SUPPORT_BOUND);
    for j in range {
        // Half-cell offset keeps every node off the axes when 4 | n_k.
        let k = (j as f64 + 0.5) * dk;
        for branch in Branch::BOTH {
            let r = residue_factors(k, branch, phi, init)?;
            let idx = (((r.x + SUPPORT_BOUND) * scale) as usize).min(bins - 1);
            acc.mass[idx] += r.norm_sq() * dk / TAU;
            acc.samples[idx] += 1;
        }
    }
    Ok(acc)
}

/// Bins `|Res|^2 dk / 2 pi` by group velocity on a uniform, half-offset k-grid.
pub fn density_via_k_integration(
    phi: f64,
    init: &InitialStateAngles,
    n_k: usize,
    bins: usize,
) -> Result<BinnedDensity> {
    density_via_k_integration_with(phi, init, n_k, bins, Execution::default())
}

pub fn density_via_k_integration_with(
    phi: f64,
    init: &InitialStateAngles,
    n_k: usize,
    bins: usize,
    exec: Execution,
) -> Result<BinnedDensity> {
    if n_k < MIN_K_POINTS || n_k % 4 != 0 {
        return Err(Error::InvalidParameter(format!(
            "k-grid size {n_k} must be a multiple of 4 and at least {MIN_K_POINTS}"
        )));
    }
    if bins < MIN_BINS {
        return Err(Error::InvalidParameter(format!(
            "need at least {MIN_BINS} bins, got {bins}"
        )));
    }
    let block = n_k.div_ceil(K_BLOCKS);
    let ranges: Vec<_> = (0..n_k)
        .step_by(block)
        .map(|start| start..(start + block).min(n_k))
        .collect();
    let parts = exec.map(&ranges, |r| deposit_block(r.clone(), n_k, bins, phi, init));
    let mut out = BinnedDensity::empty(bins);
    for part in parts {
        out.merge(&part?);
    }
    if let Some((bin, &samples)) = out
        .samples
        .iter()
        .enumerate()
        .find(|(_, &s)| s < MIN_SAMPLES_PER_BIN)
    {
        return Err(Error::CoarseGrid {
            bin,
            samples,
            required: MIN_SAMPLES_PER_BIN,
        });
    }
    Ok(out)
}
