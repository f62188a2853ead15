//! Classical fourth-order Runge-Kutta, generic over the scalar type so the
//! same stepping code can be run in extended precision.

use num_traits::{FromPrimitive, Num};

/// One RK4 step of `dy/dt = f(t, y)`:
///
/// ```text
/// k1 = f(t,       y)
/// k2 = f(t + h/2, y + h k1 / 2)
/// k3 = f(t + h/2, y + h k2 / 2)
/// k4 = f(t + h,   y + h k3)
/// y' = y + h (k1 + 2 k2 + 2 k3 + k4) / 6
/// ```
pub fn rk4_step<T, const N: usize, E, F>(f: &mut F, t: T, y: &[T; N], h: T) -> Result<[T; N], E>
where
    T: Num + Copy + FromPrimitive,
    F: FnMut(T, &[T; N]) -> Result<[T; N], E>,
{
    let two = T::from_f64(2.0).unwrap();
    let six = T::from_f64(6.0).unwrap();
    let half = h / two;
    let offset = |base: &[T; N], k: &[T; N], s: T| -> [T; N] {
        let mut out = *base;
        for i in 0..N {
            out[i] = base[i] + s * k[i];
        }
        out
    };
    let k1 = f(t, y)?;
    let k2 = f(t + half, &offset(y, &k1, half))?;
    let k3 = f(t + half, &offset(y, &k2, half))?;
    let k4 = f(t + h, &offset(y, &k3, h))?;
    let mut out = *y;
    for i in 0..N {
        out[i] = y[i] + h * (k1[i] + two * k2[i] + two * k3[i] + k4[i]) / six;
    }
    Ok(out)
}

/// Integrates from `t0` to `t1` in `steps` equal steps; returns the final state.
pub fn rk4_integrate<T, const N: usize, E, F>(mut f: F, t0: T, y0: [T; N], t1: T, steps: usize) -> Result<[T; N], E>
where
    T: Num + Copy + FromPrimitive,
    F: FnMut(T, &[T; N]) -> Result<[T; N], E>,
{
    let n = T::from_usize(steps).unwrap();
    let h = (t1 - t0) / n;
    let mut y = y0;
    for k in 0..steps {
        let t = t0 + h * T::from_usize(k).unwrap();
        y = rk4_step(&mut f, t, &y, h)?;
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::convert::Infallible;

    #[test]
    fn exponential_growth() {
        let y = rk4_integrate(|_, y: &[f64; 1]| Ok::<_, Infallible>([y[0]]), 0.0, [1.0], 1.0, 100).unwrap();
        assert!((y[0] - std::f64::consts::E).abs() < 1e-9);
    }

    #[test]
    fn fourth_order_on_a_stiffish_problem() {
        // y' = -5 y: truncation error is well above round-off at these steps.
        let err = |n| {
            let y = rk4_integrate(|_, y: &[f64; 1]| Ok::<_, Infallible>([-5.0 * y[0]]), 0.0, [1.0], 1.0, n).unwrap();
            (y[0] - (-5.0f64).exp()).abs()
        };
        let ratio = err(50) / err(100);
        assert!(ratio > 14.0 && ratio < 18.0, "ratio {ratio}");
    }
}
