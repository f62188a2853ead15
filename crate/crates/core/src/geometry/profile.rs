//! Smooth monotone step profiles with exact plateaus.
//!
//! Both profiles are built from the bump quotient
//! `theta(r) = e(r) / (e(r) + e(1 - r))` with `e(r) = exp(-1/r)` for `r > 0`
//! and `e(r) = 0` otherwise. The quotient is C-infinity, vanishes identically
//! on `(-inf, 0]`, equals one identically on `[1, inf)` and is strictly
//! increasing on `(0, 1)`.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoothStepProfile {
    /// 0 on `(-inf, 0]`, 1 on `[1, inf)`.
    UnitStep,
    /// 0 on `(-inf, 0]`, the identity on `[1, inf)`.
    FreezeRamp,
}

fn bump_tail(r: f64) -> f64 {
    if r > 0.0 {
        (-1.0 / r).exp()
    } else {
        0.0
    }
}

/// The unit step `theta`.
pub fn unit_step(r: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    if r >= 1.0 {
        return 1.0;
    }
    let a = bump_tail(r);
    let b = bump_tail(1.0 - r);
    a / (a + b)
}

/// The freeze ramp `psi(r) = r * theta(r)`.
pub fn freeze_ramp(r: f64) -> f64 {
    if r <= 0.0 {
        0.0
    } else if r >= 1.0 {
        r
    } else {
        r * unit_step(r)
    }
}

impl SmoothStepProfile {
    pub fn eval(&self, r: f64) -> f64 {
        match self {
            SmoothStepProfile::UnitStep => unit_step(r),
            SmoothStepProfile::FreezeRamp => freeze_ramp(r),
        }
    }
}

/// Evaluates `profile` at `r`.
pub fn smooth_step_eval(profile: SmoothStepProfile, r: f64) -> f64 {
    profile.eval(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateaus_are_exact() {
        assert_eq!(unit_step(-3.0), 0.0);
        assert_eq!(unit_step(0.0), 0.0);
        assert_eq!(unit_step(1.0), 1.0);
        assert_eq!(unit_step(7.5), 1.0);
        assert_eq!(freeze_ramp(2.0), 2.0);
        assert_eq!(freeze_ramp(-1e300), 0.0);
    }

    #[test]
    fn midpoint_by_symmetry() {
        // e(0.5) / (e(0.5) + e(0.5)) is exactly one half.
        assert_eq!(unit_step(0.5), 0.5);
        for k in 1..100 {
            let r = k as f64 / 100.0;
            assert!((unit_step(r) + unit_step(1.0 - r) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn freeze_ramp_interior_value() {
        let v = freeze_ramp(0.5);
        assert_eq!(v, 0.25);
        assert!(v > 0.0 && v <= 0.5);
    }

    #[test]
    fn no_nan_near_the_edges() {
        for r in [1e-300, 1e-12, 1.0 - 1e-16, 0.999_999] {
            assert!(unit_step(r).is_finite());
            assert!(freeze_ramp(r).is_finite());
        }
    }
}
