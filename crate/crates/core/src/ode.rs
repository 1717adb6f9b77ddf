//! Adaptive Dormand–Prince 5(4) integrator over real or complex state.
//!
//! The independent variable is always a real path parameter `s`; complex
//! time paths are handled by the caller scaling the vector field by the
//! segment direction `dt/ds`.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{ChaosError, Result};

pub trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn from_f64(x: f64) -> Self;
    fn modulus(self) -> f64;
    fn finite(self) -> bool;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn finite(self) -> bool {
        self.is_finite()
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn from_f64(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rtol: 1e-12,
            atol: 1e-12,
            h_min: 1e-14,
            max_steps: 5_000_000,
        }
    }
}

/// Why an integration stopped before reaching the end of the interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Halt {
    /// The supplied guard returned false at parameter `s`.
    Guard { s: f64 },
    /// Step size fell below `h_min` at parameter `s`.
    Underflow { s: f64, h: f64 },
}

pub struct Outcome<T, const N: usize> {
    pub y: [T; N],
    pub s: f64,
    pub halted: Option<Halt>,
    pub steps: usize,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// error weights: b - b*
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn lin<T: Scalar, const N: usize>(y: &[T; N], h: f64, terms: &[(f64, &[T; N])]) -> [T; N] {
    let mut out = *y;
    for i in 0..N {
        let mut acc = T::zero();
        for (c, k) in terms {
            acc = acc + k[i] * *c;
        }
        out[i] = out[i] + acc * h;
    }
    out
}

/// Integrate `dy/ds = f(s, y)` from `s0` to `s1` (`s1 > s0`).
///
/// `observe` is called after every accepted step with `(s, y)`; returning
/// `false` halts the integration with [`Halt::Guard`].
pub fn integrate<T, F, O, const N: usize>(
    f: F,
    s0: f64,
    s1: f64,
    y0: [T; N],
    tol: &Tolerances,
    mut observe: O,
) -> Result<Outcome<T, N>>
where
    T: Scalar,
    F: Fn(f64, &[T; N]) -> [T; N],
    O: FnMut(f64, &[T; N]) -> bool,
{
    if !(s0.is_finite() && s1.is_finite()) || y0.iter().any(|v| !v.finite()) {
        return Err(ChaosError::NonFinite("integrator input"));
    }
    let mut y = y0;
    let mut s = s0;
    if s1 <= s0 {
        return Ok(Outcome {
            y,
            s,
            halted: None,
            steps: 0,
        });
    }
    let span = s1 - s0;
    let mut h = (span * 1e-3).min(1e-2).max(tol.h_min * 10.0);
    let mut k1 = f(s, &y);
    let mut steps = 0usize;
    while s < s1 {
        if steps >= tol.max_steps {
            return Err(ChaosError::StepUnderflow { t: s, h });
        }
        let last = s + h >= s1;
        if last {
            h = s1 - s;
        }
        let k2 = f(s + C2 * h, &lin(&y, h, &[(A21, &k1)]));
        let k3 = f(s + C3 * h, &lin(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(s + C4 * h, &lin(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(
            s + C5 * h,
            &lin(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = f(
            s + h,
            &lin(
                &y,
                h,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            ),
        );
        let y_new = lin(
            &y,
            h,
            &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
        );
        let k7 = f(s + h, &y_new);
        let mut err: f64 = 0.0;
        let mut finite = true;
        for i in 0..N {
            let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7)
                * h;
            if !y_new[i].finite() || !e.finite() {
                finite = false;
                break;
            }
            let scale = tol.atol + tol.rtol * y[i].modulus().max(y_new[i].modulus());
            err = err.max(e.modulus() / scale);
        }
        if !finite {
            err = f64::INFINITY;
        }
        if err <= 1.0 {
            s = if last { s1 } else { s + h };
            y = y_new;
            k1 = k7;
            steps += 1;
            if !observe(s, &y) {
                return Ok(Outcome {
                    y,
                    s,
                    halted: Some(Halt::Guard { s }),
                    steps,
                });
            }
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h *= factor;
        } else {
            let factor = if err.is_finite() {
                (0.9 * err.powf(-0.2)).clamp(0.1, 0.9)
            } else {
                0.1
            };
            h *= factor;
            if h < tol.h_min {
                return Ok(Outcome {
                    y,
                    s,
                    halted: Some(Halt::Underflow { s, h }),
                    steps,
                });
            }
        }
    }
    Ok(Outcome {
        y,
        s,
        halted: None,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let out = integrate(
            |_, y: &[f64; 1]| [-y[0]],
            0.0,
            3.0,
            [1.0],
            &Tolerances::default(),
            |_, _| true,
        )
        .unwrap();
        assert!((out.y[0] - (-3.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn complex_rotation() {
        let i = Complex64::new(0.0, 1.0);
        let out = integrate(
            |_, y: &[Complex64; 1]| [y[0] * i],
            0.0,
            std::f64::consts::PI,
            [Complex64::new(1.0, 0.0)],
            &Tolerances::default(),
            |_, _| true,
        )
        .unwrap();
        assert!((out.y[0] + 1.0).norm() < 1e-11);
    }

    #[test]
    fn blowup_underflows() {
        // y' = y^2 from y = 1 blows up at s = 1
        let out = integrate(
            |_, y: &[f64; 1]| [y[0] * y[0]],
            0.0,
            2.0,
            [1.0],
            &Tolerances::default(),
            |_, y| y[0].abs() < 1e30,
        )
        .unwrap();
        assert!(out.halted.is_some());
        assert!((out.s - 1.0).abs() < 1e-3);
    }
}
