//! Brute-force path sums, used as an independent reference for short times.
//!
//! `psi_t(x)` is the sum over all `2^t` step sequences ending at `x` of the
//! ordered product of movers `P_y` / `Q_y` picked up along the way.

use crate::error::{Error, Result};
use crate::walk::{left_mover, right_mover, AmplitudeField, Spinor};

pub const MAX_PATH_STEPS: u64 = 20;

fn descend(v: Spinor, y: i64, left: u64, phi: f64, t: i64, out: &mut [Spinor]) {
    if left == 0 {
        let s = &mut out[(y + t) as usize];
        s.left += v.left;
        s.right += v.right;
        return;
    }
    descend(
        Spinor::apply(&left_mover(y, phi), v),
        y - 1,
        left - 1,
        phi,
        t,
        out,
    );
    descend(
        Spinor::apply(&right_mover(y, phi), v),
        y + 1,
        left - 1,
        phi,
        t,
        out,
    );
}

/// `psi_t` over `[-t, t]` by explicit enumeration of all paths.
pub fn path_sum(initial: Spinor, phi: f64, t: u64) -> Result<AmplitudeField> {
    if t > MAX_PATH_STEPS {
        return Err(Error::InvalidParameter(format!(
            "path enumeration limited to t <= {MAX_PATH_STEPS}, got {t}"
        )));
    }
    let ti = t as i64;
    let mut out = vec![Spinor::ZERO; 2 * t as usize + 1];
    descend(initial, 0, t, phi, ti, &mut out);
    Ok(AmplitudeField {
        origin_offset: -ti,
        amplitudes: out,
        time: t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::{evolve, WalkParams};

    #[test]
    fn matches_evolution() {
        for phi in [0.0, 0.25, 0.5, 0.7] {
            let p = WalkParams::new(phi, 0.6, 0.3, 0.8, -1.1).unwrap();
            for t in 0..=10 {
                let a = path_sum(p.initial_spinor(), phi, t).unwrap();
                let b = evolve(&p, t).unwrap();
                for x in -(t as i64)..=t as i64 {
                    let (u, v) = (a.amplitude(x), b.amplitude(x));
                    assert!((u.left - v.left).norm() < 1e-13);
                    assert!((u.right - v.right).norm() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn rejects_long_paths() {
        let p = WalkParams::left_localized(0.0).unwrap();
        assert!(path_sum(p.initial_spinor(), 0.0, 21).is_err());
    }
}
