//! Weak-limit measure of `X_t / t`: an atom `C` at the origin plus the
//! absolutely continuous part `w(x) f_K(x; 1/sqrt(2))`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::quadrature::{self, QuadratureResult, SUPPORT_BOUND};
use crate::walk::{WalkParams, NORM_TOLERANCE};

/// Below this a denominator coefficient is treated as vanishing when taking
/// the removable limit at `x = 0`.
const REMOVABLE_EPS: f64 = 1e-12;

/// Number of grid points used to validate the weight denominator.
const DENOMINATOR_GRID: usize = 4001;

/// Konno density `sqrt(1-a^2) / (pi (1-x^2) sqrt(a^2-x^2))` on `(-a, a)`, zero elsewhere.
pub fn konno_density(x: f64, a: f64) -> Result<f64> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "Konno parameter a = {a} outside (0, 1)"
        )));
    }
    if x.abs() >= a {
        return Ok(0.0);
    }
    Ok((1.0 - a * a).sqrt() / (PI * (1.0 - x * x) * (a * a - x * x).sqrt()))
}

/// `f_K(x; 1/sqrt(2))`.
pub fn konno_half(x: f64) -> f64 {
    if x.abs() >= SUPPORT_BOUND {
        return 0.0;
    }
    1.0 / (PI * (1.0 - x * x) * (1.0 - 2.0 * x * x).sqrt())
}

/// Amplitudes `a, b` and relative phase `phi12 = phi1 - phi2` of the initial coin state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialStateAngles {
    pub a: f64,
    pub b: f64,
    pub phi12: f64,
}

impl InitialStateAngles {
    pub fn new(a: f64, b: f64, phi12: f64) -> Result<Self> {
        if a < 0.0 || b < 0.0 || ((a * a + b * b) - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidParameter(format!(
                "(a, b) = ({a}, {b}) is not a normalized nonnegative pair"
            )));
        }
        Ok(InitialStateAngles { a, b, phi12 })
    }
}

/// Coefficients of the rational weight
/// `w(x) = (t3 x^5 + t2 x^4 + t1 x^3 + t0 x^2) / (s2 x^4 + s1 x^2 + s0)`.
///
/// `t_pos[i]` is `t_i` on `x >= 0`, `t_neg[i]` on `x < 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightCoefficients {
    pub s0: f64,
    pub s1: f64,
    pub s2: f64,
    pub t_pos: [f64; 4],
    pub t_neg: [f64; 4],
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
}

impl WeightCoefficients {
    pub fn new(phi: f64, init: &InitialStateAngles) -> Self {
        let InitialStateAngles { a, b, phi12 } = *init;
        let turn = 2.0 * PI * phi;
        let sin_half = (PI * phi).sin();
        let sin_half2 = sin_half * sin_half;
        let (sin1, cos1) = turn.sin_cos();
        let cos2 = (2.0 * turn).cos();
        let ab = a * b;

        let a1 = 1.0 + 2.0 * a * a - 2.0 * ab * phi12.cos() - 2.0 * a * a * cos1
            + 2.0 * ab * (phi12 + turn).cos();
        let a2 = 1.0 - 2.0 * a * a - 2.0 * ab * phi12.cos();
        let a3 = 2.0 * a * (a * sin1 - b * (phi12 + turn).sin());

        let b1 = 1.0 + 2.0 * b * b + 2.0 * ab * phi12.cos()
            - 2.0 * ab * (phi12 - turn).cos()
            - 2.0 * b * b * cos1;
        let b2 = 1.0 - 2.0 * b * b + 2.0 * ab * phi12.cos();
        let b3 = 2.0 * b * (-a * (phi12 - turn).sin() + b * sin1);

        let s2 = cos2 * cos2;
        let s1 = 8.0 * sin_half2 * (cos2 + 4.0 * sin_half2 * sin1 * sin1);
        let s0 = 16.0 * sin_half2 * sin_half2 * cos1 * cos1;

        let branch = |c1: f64, c2: f64, c3: f64, sign: f64| -> [f64; 4] {
            [
                -4.0 * sin_half2 * (c3 * sin1 - c1),
                sign * 4.0 * c2 * sin_half2,
                c1 * cos2 + 8.0 * c3 * sin_half2 * sin1,
                sign * c2 * cos2,
            ]
        };

        WeightCoefficients {
            s0,
            s1,
            s2,
            t_pos: branch(a1, a2, a3, 1.0),
            t_neg: branch(b1, b2, b3, -1.0),
            a1,
            a2,
            a3,
            b1,
            b2,
            b3,
        }
    }

    pub fn numerator_coefficients(&self, x: f64) -> &[f64; 4] {
        if x >= 0.0 {
            &self.t_pos
        } else {
            &self.t_neg
        }
    }

    pub fn denominator(&self, x: f64) -> f64 {
        let y = x * x;
        (self.s2 * y + self.s1) * y + self.s0
    }
}

pub fn weight_coefficients(phi: f64, init: &InitialStateAngles) -> WeightCoefficients {
    WeightCoefficients::new(phi, init)
}

/// Evaluates `w(x)`, taking the removable limit at `x = 0` when `s0` (and
/// possibly `s1`) vanish.
pub fn weight(x: f64, coeffs: &WeightCoefficients) -> Result<f64> {
    let [t0, t1, t2, t3] = *coeffs.numerator_coefficients(x);
    let (s0, s1, s2) = (coeffs.s0, coeffs.s1, coeffs.s2);
    if x == 0.0 {
        if s0 > REMOVABLE_EPS {
            return Ok(0.0);
        }
        if s1.abs() > REMOVABLE_EPS {
            return Ok(t0 / s1);
        }
        if s2 > REMOVABLE_EPS {
            return Ok(t2 / s2);
        }
        return Err(Error::DegenerateDenominator { x });
    }
    let y = x * x;
    let den = coeffs.denominator(x);
    let scale = s0.abs() + s1.abs() * y + s2.abs() * y * y;
    if !(den > 16.0 * f64::EPSILON * scale) {
        return Err(Error::DegenerateDenominator { x });
    }
    let num = (((t3 * x + t2) * x + t1) * x + t0) * y;
    Ok(num / den)
}

/// `w(x) f_K(x; 1/sqrt(2))` inside the support, zero outside.
pub fn ac_density(x: f64, coeffs: &WeightCoefficients) -> Result<f64> {
    if x.abs() >= SUPPORT_BOUND {
        return Ok(0.0);
    }
    Ok(weight(x, coeffs)? * konno_half(x))
}

/// Checks that the denominator is positive on a fine grid over the support.
pub fn validate_denominator(coeffs: &WeightCoefficients) -> Result<()> {
    let n = DENOMINATOR_GRID;
    for i in 0..n {
        let x = -SUPPORT_BOUND + (i as f64 + 0.5) * 2.0 * SUPPORT_BOUND / n as f64;
        weight(x, coeffs)?;
    }
    Ok(())
}

/// `int w f_K dx` over the whole support.
pub fn continuous_mass(coeffs: &WeightCoefficients, tol: f64) -> Result<QuadratureResult> {
    continuous_mass_between(coeffs, -SUPPORT_BOUND, SUPPORT_BOUND, tol)
}

/// `int w f_K dx` over `[lo, hi]`.
pub fn continuous_mass_between(
    coeffs: &WeightCoefficients,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<QuadratureResult> {
    // The quadrature wants a plain closure; remember the first weight failure.
    let failure: std::sync::Mutex<Option<Error>> = std::sync::Mutex::new(None);
    let result = quadrature::integrate_weighted(
        |x| match weight(x, coeffs) {
            Ok(w) => w,
            Err(e) => {
                failure.lock().unwrap().get_or_insert(e);
                0.0
            }
        },
        lo,
        hi,
        tol,
    )?;
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    Ok(result)
}

/// Atom mass `C = 1 - int w f_K dx`.
///
/// Raw values outside `[0, 1]` by more than `tol` are clamped with a warning.
pub fn atom_mass(coeffs: &WeightCoefficients, tol: f64) -> Result<f64> {
    let integral = continuous_mass(coeffs, tol)?;
    Ok(clamp_atom(1.0 - integral.value, tol))
}

fn clamp_atom(raw: f64, tol: f64) -> f64 {
    if raw < -tol || raw > 1.0 + tol {
        log::warn!("atom mass {raw} outside [0, 1]; clamping");
    }
    raw.clamp(0.0, 1.0)
}

/// The weak-limit measure for one configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitMeasure {
    pub atom: f64,
    pub coefficients: WeightCoefficients,
    pub support_bound: f64,
    /// `int w f_K dx` as returned by the quadrature.
    pub integral: QuadratureResult,
}

impl LimitMeasure {
    pub fn new(phi: f64, init: &InitialStateAngles, tol: f64) -> Result<Self> {
        let coefficients = WeightCoefficients::new(phi, init);
        validate_denominator(&coefficients)?;
        let integral = continuous_mass(&coefficients, tol)?;
        Ok(LimitMeasure {
            atom: clamp_atom(1.0 - integral.value, tol),
            coefficients,
            support_bound: SUPPORT_BOUND,
            integral,
        })
    }

    pub fn for_params(params: &WalkParams, tol: f64) -> Result<Self> {
        Self::new(params.phi, &params.angles(), tol)
    }

    pub fn weight(&self, x: f64) -> Result<f64> {
        weight(x, &self.coefficients)
    }

    pub fn density(&self, x: f64) -> Result<f64> {
        ac_density(x, &self.coefficients)
    }

    pub fn mass_between(&self, lo: f64, hi: f64, tol: f64) -> Result<f64> {
        Ok(continuous_mass_between(&self.coefficients, lo, hi, tol)?.value)
    }
}

/// The worked configurations with hand-reduced weight functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Fixture {
    HadamardLeft,
    HadamardSymmetric,
    HalfPhaseLeft,
    HalfPhaseSymmetric,
    QuarterPhaseLeft,
    QuarterPhaseSymmetric,
}

impl Fixture {
    pub const ALL: [Fixture; 6] = [
        Fixture::HadamardLeft,
        Fixture::HadamardSymmetric,
        Fixture::HalfPhaseLeft,
        Fixture::HalfPhaseSymmetric,
        Fixture::QuarterPhaseLeft,
        Fixture::QuarterPhaseSymmetric,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Fixture::HadamardLeft => "hadamard_10",
            Fixture::HadamardSymmetric => "hadamard_sym",
            Fixture::HalfPhaseLeft => "halfphase_10",
            Fixture::HalfPhaseSymmetric => "halfphase_sym",
            Fixture::QuarterPhaseLeft => "quarterphase_10",
            Fixture::QuarterPhaseSymmetric => "quarterphase_sym",
        }
    }

    pub fn phi(self) -> f64 {
        match self {
            Fixture::HadamardLeft | Fixture::HadamardSymmetric => 0.0,
            Fixture::HalfPhaseLeft | Fixture::HalfPhaseSymmetric => 0.5,
            Fixture::QuarterPhaseLeft | Fixture::QuarterPhaseSymmetric => 0.25,
        }
    }

    pub fn is_symmetric(self) -> bool {
        matches!(
            self,
            Fixture::HadamardSymmetric
                | Fixture::HalfPhaseSymmetric
                | Fixture::QuarterPhaseSymmetric
        )
    }

    pub fn params(self) -> WalkParams {
        let p = if self.is_symmetric() {
            WalkParams::symmetric(self.phi())
        } else {
            WalkParams::left_localized(self.phi())
        };
        p.expect("fixture parameters are valid")
    }

    /// Hand-reduced closed form of `w(x)`.
    pub fn closed_form_weight(self, x: f64) -> f64 {
        let x2 = x * x;
        match self {
            Fixture::HadamardLeft => 1.0 - x,
            Fixture::HadamardSymmetric => 1.0,
            Fixture::HalfPhaseLeft if x >= 0.0 => (-x2 * x + 5.0 * x2) / (x2 + 4.0),
            Fixture::HalfPhaseLeft => (-x2 * x + x2) / (x2 + 4.0),
            Fixture::QuarterPhaseLeft if x >= 0.0 => {
                (x2 * x + 5.0 * x2 - 2.0 * x + 2.0) / (x2 + 4.0)
            }
            Fixture::QuarterPhaseLeft => (x2 * x - x2 - 2.0 * x + 2.0) / (x2 + 4.0),
            Fixture::HalfPhaseSymmetric | Fixture::QuarterPhaseSymmetric => 3.0 * x2 / (4.0 + x2),
        }
    }

    /// `int w f_K dx`.
    pub fn continuous_mass(self) -> f64 {
        match self {
            Fixture::HadamardLeft | Fixture::HadamardSymmetric => 1.0,
            Fixture::QuarterPhaseLeft => 3.0 / 5.0,
            _ => 1.0 / 5.0,
        }
    }

    /// Atom `C` at the origin.
    pub fn atom(self) -> f64 {
        1.0 - self.continuous_mass()
    }

    /// Time-averaged limit `(origin value, tail prefactor)` with
    /// `mu(x) = prefactor * (1/5)^|x|` for `x != 0`.
    ///
    /// For `halfphase_10` the prefactor is 24/25: that is what the Cesaro
    /// averages converge to, and the only value that sums to `C = 4/5`.
    pub fn time_averaged_profile(self) -> Option<(f64, f64)> {
        match self {
            Fixture::HadamardLeft | Fixture::HadamardSymmetric => None,
            Fixture::HalfPhaseLeft
            | Fixture::HalfPhaseSymmetric
            | Fixture::QuarterPhaseSymmetric => Some((8.0 / 25.0, 24.0 / 25.0)),
            Fixture::QuarterPhaseLeft => Some((4.0 / 25.0, 12.0 / 25.0)),
        }
    }

    /// Finds the fixture whose parameters match `params` to within `tol`.
    pub fn matching(params: &WalkParams, tol: f64) -> Option<Fixture> {
        let angles = params.angles();
        Fixture::ALL.into_iter().find(|f| {
            let p = f.params();
            let g = p.angles();
            let close = |u: f64, v: f64| (u - v).abs() <= tol;
            // Only the relative phase is observable.
            let dphase = (angles.phi12 - g.phi12).rem_euclid(2.0 * PI);
            let phase_ok =
                dphase <= tol || 2.0 * PI - dphase <= tol || g.b == 0.0 && angles.b <= tol;
            close(params.phi, p.phi) && close(angles.a, g.a) && close(angles.b, g.b) && phase_ok
        })
    }
}

impl fmt::Display for Fixture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Fixture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Fixture::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::UnknownFixture(s.to_string()))
    }
}

/// Closed-form evaluator for the named case.
pub fn example_fixture(case_id: &str) -> Result<impl Fn(f64) -> f64> {
    let fixture: Fixture = case_id.parse()?;
    Ok(move |x| fixture.closed_form_weight(x))
}

/// Symmetric initial state angles `(1/sqrt(2), 1/sqrt(2), pi/2)`.
pub fn symmetric_angles() -> InitialStateAngles {
    InitialStateAngles {
        a: FRAC_1_SQRT_2,
        b: FRAC_1_SQRT_2,
        phi12: FRAC_PI_2,
    }
}
