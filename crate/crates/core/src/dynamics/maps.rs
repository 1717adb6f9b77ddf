use std::f64::consts::PI;

use crate::error::{ensure_finite, ChaosError, Result};
use crate::linalg::Mat2;

use super::PhasePoint;

/// Reduce to `[0, 1)`, guarding against `rem_euclid` returning exactly 1.
pub fn unit_wrap(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Signed difference on the unit circle, in `(−1/2, 1/2]`.
pub fn unit_diff(a: f64, b: f64) -> f64 {
    let mut d = (a - b).rem_euclid(1.0);
    if d > 0.5 {
        d -= 1.0;
    }
    d
}

/// Standard map on the unwrapped plane; returns the lifted image.
pub fn standard_lift(x: PhasePoint, k: f64) -> PhasePoint {
    let p = x.p - k / (2.0 * PI) * (2.0 * PI * x.q).sin();
    PhasePoint::new(x.q + p, p)
}

pub fn standard_step(x: PhasePoint, k: f64, torus: bool) -> Result<PhasePoint> {
    ensure_finite(&[x.q, x.p, k], "standard map input")?;
    let y = standard_lift(x, k);
    Ok(if torus {
        PhasePoint::new(unit_wrap(y.q), unit_wrap(y.p))
    } else {
        PhasePoint::new(unit_wrap(y.q), y.p)
    })
}

pub fn standard_inverse(x: PhasePoint, k: f64, torus: bool) -> Result<PhasePoint> {
    ensure_finite(&[x.q, x.p, k], "standard map input")?;
    let q = x.q - x.p;
    let p = x.p + k / (2.0 * PI) * (2.0 * PI * q).sin();
    Ok(if torus {
        PhasePoint::new(unit_wrap(q), unit_wrap(p))
    } else {
        PhasePoint::new(unit_wrap(q), p)
    })
}

/// Jacobian in `(q, p)` ordering.
pub fn standard_jacobian(x: PhasePoint, k: f64) -> Mat2 {
    let kc = k * (2.0 * PI * x.q).cos();
    Mat2::new(1.0 - kc, 1.0, -kc, 1.0)
}

/// Generating-function increment `F(q, q') = (q' − q)²/2 + K cos(2πq)/4π²`.
pub fn standard_action(x: PhasePoint, k: f64) -> f64 {
    let y = standard_lift(x, k);
    0.5 * (y.q - x.q).powi(2) + k / (4.0 * PI * PI) * (2.0 * PI * x.q).cos()
}

fn check_unit_square(x: PhasePoint) -> Result<()> {
    ensure_finite(&[x.q, x.p], "baker input")?;
    if !(0.0..1.0).contains(&x.q) || !(0.0..1.0).contains(&x.p) {
        return Err(ChaosError::OutOfChart {
            q: x.q,
            p: x.p,
            chart: "unit square",
        });
    }
    Ok(())
}

pub fn baker_step(x: PhasePoint) -> Result<PhasePoint> {
    check_unit_square(x)?;
    let e = (2.0 * x.q).floor();
    Ok(PhasePoint::new(2.0 * x.q - e, 0.5 * x.p + 0.5 * e))
}

pub fn baker_inverse(x: PhasePoint) -> Result<PhasePoint> {
    check_unit_square(x)?;
    let e = (2.0 * x.p).floor();
    Ok(PhasePoint::new(0.5 * x.q + 0.5 * e, 2.0 * x.p - e))
}

pub fn baker_jacobian() -> Mat2 {
    Mat2::new(2.0, 0.0, 0.0, 0.5)
}

/// Type-2 generating function `F(q, p') = 2qp' − ε(q + p')` minus `q'p'`.
pub fn baker_action(x: PhasePoint) -> f64 {
    let e = (2.0 * x.q).floor();
    let q1 = 2.0 * x.q - e;
    let p1 = 0.5 * x.p + 0.5 * e;
    2.0 * x.q * p1 - e * (x.q + p1) - q1 * p1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_examples() {
        let y = standard_step(PhasePoint::new(0.25, 0.0), 1.0, true).unwrap();
        assert!((y.p - unit_wrap(-1.0 / (2.0 * PI))).abs() < 1e-15);
        assert!((y.q - unit_wrap(0.25 - 1.0 / (2.0 * PI))).abs() < 1e-15);
        let y = standard_step(PhasePoint::new(0.5, 0.0), 3.0, true).unwrap();
        assert!(unit_diff(y.q, 0.5).abs() < 1e-15 && unit_diff(y.p, 0.0).abs() < 1e-15);
    }

    #[test]
    fn baker_examples() {
        let y = baker_step(PhasePoint::new(0.25, 0.5)).unwrap();
        assert_eq!((y.q, y.p), (0.5, 0.25));
        let y = baker_step(PhasePoint::new(0.75, 0.5)).unwrap();
        assert_eq!((y.q, y.p), (0.5, 0.75));
        let z = baker_inverse(y).unwrap();
        assert_eq!((z.q, z.p), (0.75, 0.5));
    }
}
