//! Exact unitary evolution of the one-defect Hadamard walk on the integer line.
//!
//! The coin is the Hadamard matrix everywhere except at the origin, where it
//! carries the extra phase `e^{2 pi i phi}`. One step of the walk is
//!
//! ```text
//! psi_{t+1}(x) = P_{x+1} psi_t(x+1) + Q_{x-1} psi_t(x-1)
//! ```
//!
//! where `P_x` keeps the top row of the coin (left mover) and `Q_x` the bottom
//! row (right mover).

use std::f64::consts::{FRAC_1_SQRT_2, TAU};
use std::ops::RangeInclusive;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::limit::InitialStateAngles;

pub type Matrix2 = [[Complex64; 2]; 2];

/// Hard cap on the number of steps a single evolution may run.
pub const DEFAULT_MAX_STEPS: u64 = 1_000_000;

/// Tolerance on `a^2 + b^2 = 1` for initial coin states.
pub const NORM_TOLERANCE: f64 = 1e-12;

#[cfg(feature = "parallel")]
const PAR_MIN_SITES: usize = 4096;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Two-component amplitude `(left, right)` at one lattice site.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Spinor {
    pub left: Complex64,
    pub right: Complex64,
}

impl Spinor {
    pub const ZERO: Spinor = Spinor {
        left: ZERO,
        right: ZERO,
    };

    pub fn new(left: Complex64, right: Complex64) -> Self {
        Spinor { left, right }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.left.norm_sqr() + self.right.norm_sqr()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Spinor::new(self.left * c, self.right * c)
    }

    pub fn is_finite(&self) -> bool {
        self.left.is_finite() && self.right.is_finite()
    }

    pub fn apply(m: &Matrix2, v: Spinor) -> Spinor {
        Spinor::new(
            m[0][0] * v.left + m[0][1] * v.right,
            m[1][0] * v.left + m[1][1] * v.right,
        )
    }
}

/// `e^{2 pi i phi}`, the phase picked up at the defect.
pub fn defect_phase(phi: f64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * phi)
}

fn check_phi(phi: f64) -> Result<()> {
    if !(0.0..1.0).contains(&phi) {
        return Err(Error::InvalidParameter(format!(
            "defect phase phi = {phi} must lie in [0, 1)"
        )));
    }
    Ok(())
}

/// The quantum coin `U_x`.
pub fn coin_at(x: i64, phi: f64) -> Matrix2 {
    let c = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let c = if x == 0 { c * defect_phase(phi) } else { c };
    [[c, c], [c, -c]]
}

/// `P_x`: the top row of the coin, moving the walker one site to the left.
pub fn left_mover(x: i64, phi: f64) -> Matrix2 {
    let u = coin_at(x, phi);
    [u[0], [ZERO, ZERO]]
}

/// `Q_x`: the bottom row of the coin, moving the walker one site to the right.
pub fn right_mover(x: i64, phi: f64) -> Matrix2 {
    let u = coin_at(x, phi);
    [[ZERO, ZERO], u[1]]
}

/// Defect phase and initial coin state `[a e^{i phi1}, b e^{i phi2}]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkParams {
    pub phi: f64,
    pub a: f64,
    pub b: f64,
    pub phi1: f64,
    pub phi2: f64,
}

impl WalkParams {
    pub fn new(phi: f64, a: f64, phi1: f64, b: f64, phi2: f64) -> Result<Self> {
        check_phi(phi)?;
        if !(a.is_finite() && b.is_finite() && phi1.is_finite() && phi2.is_finite()) {
            return Err(Error::InvalidParameter(
                "initial state components must be finite".into(),
            ));
        }
        if a < 0.0 || b < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "amplitudes must be nonnegative (a = {a}, b = {b})"
            )));
        }
        let norm = a * a + b * b;
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidParameter(format!(
                "a^2 + b^2 = {norm} is not 1"
            )));
        }
        Ok(WalkParams {
            phi,
            a,
            b,
            phi1,
            phi2,
        })
    }

    /// Initial state `[1, 0]`.
    pub fn left_localized(phi: f64) -> Result<Self> {
        Self::new(phi, 1.0, 0.0, 0.0, 0.0)
    }

    /// Initial state `[i/sqrt(2), 1/sqrt(2)]`.
    pub fn symmetric(phi: f64) -> Result<Self> {
        Self::new(
            phi,
            FRAC_1_SQRT_2,
            std::f64::consts::FRAC_PI_2,
            FRAC_1_SQRT_2,
            0.0,
        )
    }

    pub fn initial_spinor(&self) -> Spinor {
        Spinor::new(
            Complex64::from_polar(self.a, self.phi1),
            Complex64::from_polar(self.b, self.phi2),
        )
    }

    pub fn angles(&self) -> InitialStateAngles {
        InitialStateAngles {
            a: self.a,
            b: self.b,
            phi12: self.phi1 - self.phi2,
        }
    }
}

/// Walk state `psi_t`, stored densely over the support `[-t, t]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeField {
    /// Lattice position of `amplitudes[0]`.
    pub origin_offset: i64,
    pub amplitudes: Vec<Spinor>,
    pub time: u64,
}

impl AmplitudeField {
    /// State at `t = 0`: `spinor` at the origin.
    pub fn point(spinor: Spinor) -> Self {
        AmplitudeField {
            origin_offset: 0,
            amplitudes: vec![spinor],
            time: 0,
        }
    }

    pub fn support(&self) -> RangeInclusive<i64> {
        self.origin_offset..=self.origin_offset + self.amplitudes.len() as i64 - 1
    }

    pub fn amplitude(&self, x: i64) -> Spinor {
        let idx = x - self.origin_offset;
        if idx < 0 {
            return Spinor::ZERO;
        }
        self.amplitudes
            .get(idx as usize)
            .copied()
            .unwrap_or(Spinor::ZERO)
    }

    pub fn total_probability(&self) -> f64 {
        self.amplitudes.iter().map(Spinor::norm_sqr).sum()
    }
}

/// Probabilities `P_t(x) = |L_x|^2 + |R_x|^2` over a contiguous support.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    pub support: RangeInclusive<i64>,
    pub prob: Vec<f64>,
    pub time: u64,
}

impl Distribution {
    pub fn get(&self, x: i64) -> f64 {
        if !self.support.contains(&x) {
            return 0.0;
        }
        self.prob[(x - self.support.start()) as usize]
    }

    pub fn total(&self) -> f64 {
        self.prob.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.support.clone().zip(self.prob.iter().copied())
    }
}

/// One step of the walk. `src` and `dst` are aligned so that `dst[j]` and
/// `src[j + 1]` describe the same site `x0 + j`; `src` therefore carries one
/// extra site on each side.
fn shift_coin(src: &[Spinor], dst: &mut [Spinor], x0: i64, defect: Complex64, exec: Execution) {
    debug_assert_eq!(src.len(), dst.len() + 2);
    let site = |j: usize| -> Spinor {
        let x = x0 + j as i64;
        let from_right = src[j + 2];
        let from_left = src[j];
        let mut left = (from_right.left + from_right.right) * FRAC_1_SQRT_2;
        let mut right = (from_left.left - from_left.right) * FRAC_1_SQRT_2;
        if x + 1 == 0 {
            left *= defect;
        }
        if x - 1 == 0 {
            right *= defect;
        }
        Spinor::new(left, right)
    };
    match exec {
        Execution::Sequential => {
            for (j, out) in dst.iter_mut().enumerate() {
                *out = site(j);
            }
        }
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            dst.par_iter_mut()
                .enumerate()
                .with_min_len(PAR_MIN_SITES)
                .for_each(|(j, out)| *out = site(j));
        }
    }
}

/// Advances `state` by one time step.
pub fn step(state: &AmplitudeField, phi: f64) -> AmplitudeField {
    let n = state.amplitudes.len();
    let mut src = Vec::with_capacity(n + 4);
    src.extend_from_slice(&[Spinor::ZERO; 2]);
    src.extend_from_slice(&state.amplitudes);
    src.extend_from_slice(&[Spinor::ZERO; 2]);
    let mut dst = vec![Spinor::ZERO; n + 2];
    let x0 = state.origin_offset - 1;
    shift_coin(&src, &mut dst, x0, defect_phase(phi), Execution::Sequential);
    AmplitudeField {
        origin_offset: x0,
        amplitudes: dst,
        time: state.time + 1,
    }
}

/// In-place evolver with two preallocated buffers covering `[-horizon, horizon]`.
#[derive(Debug, Clone)]
pub struct Walk {
    phi: f64,
    defect: Complex64,
    horizon: u64,
    time: u64,
    current: Vec<Spinor>,
    scratch: Vec<Spinor>,
    exec: Execution,
}

impl Walk {
    pub fn new(initial: Spinor, phi: f64, horizon: u64, exec: Execution) -> Result<Self> {
        check_phi(phi)?;
        if !initial.is_finite() {
            return Err(Error::InvalidParameter(
                "initial spinor is not finite".into(),
            ));
        }
        // One padding site on each side keeps the kernel's neighbour reads in bounds.
        let len = 2 * horizon as usize + 3;
        let mut current = vec![Spinor::ZERO; len];
        current[horizon as usize + 1] = initial;
        Ok(Walk {
            phi,
            defect: defect_phase(phi),
            horizon,
            time: 0,
            current,
            scratch: vec![Spinor::ZERO; len],
            exec,
        })
    }

    pub fn time(&self) -> u64 {
        self.time
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    fn index(&self, x: i64) -> usize {
        (x + self.horizon as i64 + 1) as usize
    }

    /// Performs one step. Returns `false` without stepping once the horizon is reached.
    pub fn advance(&mut self) -> bool {
        if self.time >= self.horizon {
            return false;
        }
        let t = self.time as i64;
        let lo = self.index(-t - 1);
        let hi = self.index(t + 1);
        shift_coin(
            &self.current[lo - 1..=hi + 1],
            &mut self.scratch[lo..=hi],
            -t - 1,
            self.defect,
            self.exec,
        );
        std::mem::swap(&mut self.current, &mut self.scratch);
        self.time += 1;
        true
    }

    fn window(&self) -> &[Spinor] {
        let t = self.time as i64;
        &self.current[self.index(-t)..=self.index(t)]
    }

    pub fn state(&self) -> AmplitudeField {
        AmplitudeField {
            origin_offset: -(self.time as i64),
            amplitudes: self.window().to_vec(),
            time: self.time,
        }
    }

    pub fn distribution(&self) -> Distribution {
        let t = self.time as i64;
        Distribution {
            support: -t..=t,
            prob: self.window().iter().map(Spinor::norm_sqr).collect(),
            time: self.time,
        }
    }

    /// Adds `P_t(x)` into `acc`, which is indexed over `[-horizon, horizon]`.
    fn accumulate(&self, acc: &mut [f64]) {
        let t = self.time as i64;
        let start = (self.horizon as i64 - t) as usize;
        for (slot, s) in acc[start..].iter_mut().zip(self.window()) {
            *slot += s.norm_sqr();
        }
    }
}

fn check_cap(t: u64, cap: u64) -> Result<()> {
    if t > cap {
        return Err(Error::StepCapExceeded { requested: t, cap });
    }
    Ok(())
}

/// `psi_t` started from `initial` at the origin.
pub fn evolve_from(
    initial: Spinor,
    phi: f64,
    t: u64,
    cap: u64,
    exec: Execution,
) -> Result<AmplitudeField> {
    check_cap(t, cap)?;
    let mut walk = Walk::new(initial, phi, t, exec)?;
    while walk.advance() {}
    Ok(walk.state())
}

/// `psi_t` for the given parameters, subject to [`DEFAULT_MAX_STEPS`].
pub fn evolve(params: &WalkParams, t: u64) -> Result<AmplitudeField> {
    evolve_capped(params, t, DEFAULT_MAX_STEPS, Execution::default())
}

pub fn evolve_capped(
    params: &WalkParams,
    t: u64,
    cap: u64,
    exec: Execution,
) -> Result<AmplitudeField> {
    evolve_from(params.initial_spinor(), params.phi, t, cap, exec)
}

pub fn distribution(state: &AmplitudeField) -> Distribution {
    Distribution {
        support: state.support(),
        prob: state.amplitudes.iter().map(Spinor::norm_sqr).collect(),
        time: state.time,
    }
}

/// Pairs `(x/t, t P_t(x))` for every site of the support.
pub fn rescaled_distribution(dist: &Distribution, t: u64) -> Result<Vec<(f64, f64)>> {
    if t == 0 {
        return Err(Error::ZeroTime);
    }
    if t != dist.time {
        return Err(Error::InvalidParameter(format!(
            "rescaling time {t} differs from distribution time {}",
            dist.time
        )));
    }
    let tf = t as f64;
    Ok(dist.iter().map(|(x, p)| (x as f64 / tf, tf * p)).collect())
}

/// Cesaro averages `(1/T) sum_{t<T} P_t(x)` over the support `[-(T-1), T-1]`.
///
/// Odd times are included, so sites of the wrong parity contribute zeros.
pub fn time_averaged(params: &WalkParams, horizon: u64, exec: Execution) -> Result<Distribution> {
    if horizon == 0 {
        return Err(Error::InvalidParameter(
            "averaging horizon T must be >= 1".into(),
        ));
    }
    check_cap(horizon, DEFAULT_MAX_STEPS)?;
    let last = horizon - 1;
    let mut walk = Walk::new(params.initial_spinor(), params.phi, last, exec)?;
    let mut acc = vec![0.0; 2 * last as usize + 1];
    loop {
        walk.accumulate(&mut acc);
        if !walk.advance() {
            break;
        }
    }
    let scale = 1.0 / horizon as f64;
    acc.iter_mut().for_each(|p| *p *= scale);
    let l = last as i64;
    Ok(Distribution {
        support: -l..=l,
        prob: acc,
        time: last,
    })
}

pub fn cesaro_average(params: &WalkParams, horizon: u64, x: i64) -> Result<f64> {
    Ok(time_averaged(params, horizon, Execution::default())?.get(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn is_unitary(m: &Matrix2, tol: f64) -> bool {
        for i in 0..2 {
            for j in 0..2 {
                let dot: Complex64 = (0..2).map(|k| m[k][i].conj() * m[k][j]).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                if (dot - expect).norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn coin_off_defect_is_hadamard() {
        let u = coin_at(3, 0.73);
        let h = FRAC_1_SQRT_2;
        assert_eq!(u, [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]]);
        assert_eq!(coin_at(0, 0.0), u);
    }

    #[test]
    fn quarter_phase_coin_is_i_hadamard() {
        let u = coin_at(0, 0.25);
        let h = FRAC_1_SQRT_2;
        let expect = [[c(0.0, h), c(0.0, h)], [c(0.0, h), c(0.0, -h)]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((u[i][j] - expect[i][j]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn coins_are_unitary() {
        for phi in [0.0, 0.1, 0.25, 0.5, 0.77, 0.999] {
            for x in -2..=2 {
                assert!(is_unitary(&coin_at(x, phi), 1e-15));
            }
        }
    }

    #[test]
    fn movers_split_the_coin() {
        let (p, q, u) = (left_mover(0, 0.3), right_mover(0, 0.3), coin_at(0, 0.3));
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(p[i][j] + q[i][j], u[i][j]);
            }
        }
        assert_eq!(p[1], [ZERO, ZERO]);
        assert_eq!(q[0], [ZERO, ZERO]);
    }

    #[test]
    fn one_step_from_left_state() {
        for phi in [0.0, 0.3, 0.5] {
            let s = step(&AmplitudeField::point(Spinor::new(c(1.0, 0.0), ZERO)), phi);
            let d = distribution(&s);
            assert_eq!(d.support, -1..=1);
            assert_abs_diff_eq!(d.get(-1), 0.5, epsilon = 1e-15);
            assert_eq!(d.get(0), 0.0);
            assert_abs_diff_eq!(d.get(1), 0.5, epsilon = 1e-15);
        }
    }

    #[test]
    fn two_steps_hadamard() {
        // Paths from [1,0]: LL, RR each weight 1/4; LR and RL interfere at 0.
        let s0 = AmplitudeField::point(Spinor::new(c(1.0, 0.0), ZERO));
        let d = distribution(&step(&step(&s0, 0.0), 0.0));
        assert_abs_diff_eq!(d.get(-2), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(d.get(0), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(d.get(2), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn evolve_matches_pure_step() {
        let params = WalkParams::new(0.3, 0.6, 0.4, 0.8, -1.1).unwrap();
        let mut s = AmplitudeField::point(params.initial_spinor());
        for _ in 0..25 {
            s = step(&s, params.phi);
        }
        let e = evolve(&params, 25).unwrap();
        assert_eq!(e.support(), s.support());
        for (a, b) in e.amplitudes.iter().zip(&s.amplitudes) {
            assert!((a.left - b.left).norm() < 1e-15);
            assert!((a.right - b.right).norm() < 1e-15);
        }
    }

    #[test]
    fn evolve_zero_steps_is_point_mass() {
        let params = WalkParams::new(0.1, 0.6, 0.2, 0.8, 0.3).unwrap();
        let s = evolve(&params, 0).unwrap();
        assert_eq!(s.support(), 0..=0);
        assert_eq!(s.amplitudes[0], params.initial_spinor());
        assert_abs_diff_eq!(s.total_probability(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn half_phase_two_steps() {
        let params = WalkParams::left_localized(0.5).unwrap();
        let d = distribution(&evolve(&params, 2).unwrap());
        assert_abs_diff_eq!(d.get(-2), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(d.get(0), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(d.get(2), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn symmetric_state_two_steps_is_symmetric() {
        let params = WalkParams::symmetric(0.0).unwrap();
        let d = distribution(&evolve(&params, 2).unwrap());
        assert_abs_diff_eq!(d.get(-2), d.get(2), epsilon = 1e-15);
        assert_abs_diff_eq!(d.total(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn long_run_stays_unitary() {
        let params = WalkParams::left_localized(0.5).unwrap();
        let s = evolve(&params, 10_000).unwrap();
        assert!((s.total_probability() - 1.0).abs() <= 1e-11);
        assert!(s.amplitudes.iter().all(Spinor::is_finite));
    }

    #[test]
    fn parity_sites_are_exactly_zero() {
        let params = WalkParams::new(0.37, 0.6, 1.0, 0.8, 0.0).unwrap();
        let d = distribution(&evolve(&params, 51).unwrap());
        for (x, p) in d.iter() {
            if (x + 51) % 2 != 0 {
                assert_eq!(p, 0.0, "site {x}");
            }
        }
    }

    #[test]
    fn step_cap_is_enforced() {
        let params = WalkParams::left_localized(0.5).unwrap();
        let err = evolve_capped(&params, 11, 10, Execution::Sequential).unwrap_err();
        assert_eq!(
            err,
            Error::StepCapExceeded {
                requested: 11,
                cap: 10
            }
        );
    }

    #[test]
    fn params_validation() {
        assert!(WalkParams::new(1.0, 1.0, 0.0, 0.0, 0.0).is_err());
        assert!(WalkParams::new(-0.1, 1.0, 0.0, 0.0, 0.0).is_err());
        assert!(WalkParams::new(0.2, 0.9, 0.0, 0.9, 0.0).is_err());
        assert!(WalkParams::new(0.2, -0.6, 0.0, 0.8, 0.0).is_err());
        assert!(WalkParams::new(0.2, 0.6, 0.0, 0.8, 0.0).is_ok());
    }

    #[test]
    fn rescaling() {
        let d = Distribution {
            support: 50..=50,
            prob: vec![0.002],
            time: 100,
        };
        let r = rescaled_distribution(&d, 100).unwrap();
        assert_abs_diff_eq!(r[0].0, 0.5);
        assert_abs_diff_eq!(r[0].1, 0.2, epsilon = 1e-15);

        let d1 = distribution(&evolve(&WalkParams::left_localized(0.0).unwrap(), 1).unwrap());
        let r1 = rescaled_distribution(&d1, 1).unwrap();
        assert_eq!(r1.len(), 3);
        assert_eq!(r1[0].0, -1.0);
        assert_abs_diff_eq!(r1[0].1, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(r1[2].1, 0.5, epsilon = 1e-15);

        assert_eq!(rescaled_distribution(&d1, 0), Err(Error::ZeroTime));
        assert!(rescaled_distribution(&d1, 2).is_err());
    }

    #[test]
    fn cesaro_matches_direct_average() {
        let params = WalkParams::new(0.2, 0.6, 0.3, 0.8, 0.0).unwrap();
        let mut direct = 0.0;
        for t in 0..40 {
            direct += distribution(&evolve(&params, t).unwrap()).get(1);
        }
        assert_abs_diff_eq!(
            cesaro_average(&params, 40, 1).unwrap(),
            direct / 40.0,
            epsilon = 1e-14
        );
        assert!(cesaro_average(&params, 0, 0).is_err());
    }

    #[test]
    fn half_phase_localizes_at_origin() {
        let params = WalkParams::left_localized(0.5).unwrap();
        let avg = time_averaged(&params, 5000, Execution::default()).unwrap();
        assert_abs_diff_eq!(avg.get(0), 8.0 / 25.0, epsilon = 0.02);
        // 24/25 (1/5)^|x|; see the fixture notes in `limit`.
        assert_abs_diff_eq!(avg.get(2), 24.0 / 25.0 / 25.0, epsilon = 0.005);
    }

    #[test]
    fn hadamard_does_not_localize() {
        let params = WalkParams::left_localized(0.0).unwrap();
        let short = cesaro_average(&params, 500, 0).unwrap();
        let long = cesaro_average(&params, 5000, 0).unwrap();
        assert!(long < short);
        assert!(long < 0.01);
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn parallel_and_sequential_agree_bitwise() {
        let params = WalkParams::new(0.41, 0.6, 0.3, 0.8, 0.0).unwrap();
        let a = evolve_capped(&params, 6000, DEFAULT_MAX_STEPS, Execution::Sequential).unwrap();
        let b = evolve_capped(&params, 6000, DEFAULT_MAX_STEPS, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }
}
