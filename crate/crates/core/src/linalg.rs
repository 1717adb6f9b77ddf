//! Small fixed-size matrices for 1-DOF tangent dynamics.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};

/// 2×2 matrix `[[a, b], [c, d]]`, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2<T = f64> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

pub type CMat2 = Mat2<Complex64>;

impl<T> Mat2<T>
where
    T: Copy + Zero + One + Add<Output = T> + Sub<Output = T> + Mul<Output = T> + Neg<Output = T>,
{
    pub fn new(a: T, b: T, c: T, d: T) -> Self {
        Self { a, b, c, d }
    }

    pub fn identity() -> Self {
        Self::new(T::one(), T::zero(), T::zero(), T::one())
    }

    pub fn det(&self) -> T {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> T {
        self.a + self.d
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.a, self.c, self.b, self.d)
    }

    /// Inverse of a unit-determinant matrix (the symplectic inverse).
    pub fn symplectic_inverse(&self) -> Self {
        Self::new(self.d, -self.b, -self.c, self.a)
    }

    pub fn apply(&self, v: [T; 2]) -> [T; 2] {
        [self.a * v[0] + self.b * v[1], self.c * v[0] + self.d * v[1]]
    }

    pub fn scale(&self, s: T) -> Self {
        Self::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    pub fn minus_identity(&self) -> Self {
        Self::new(self.a - T::one(), self.b, self.c, self.d - T::one())
    }
}

impl Mat2<f64> {
    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        Some(Self::new(self.d / det, -self.b / det, -self.c / det, self.a / det))
    }

    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.b.is_finite() && self.c.is_finite() && self.d.is_finite()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.a - other.a)
            .abs()
            .max((self.b - other.b).abs())
            .max((self.c - other.c).abs())
            .max((self.d - other.d).abs())
    }

    pub fn to_complex(&self) -> CMat2 {
        CMat2::new(self.a.into(), self.b.into(), self.c.into(), self.d.into())
    }

    /// Eigen-decomposition of a real symmetric matrix: `(λ_small, λ_large, v_large)`.
    pub fn symmetric_eigen(&self) -> (f64, f64, [f64; 2]) {
        let half_tr = 0.5 * (self.a + self.d);
        let diff = 0.5 * (self.a - self.d);
        let off = 0.5 * (self.b + self.c);
        let r = diff.hypot(off);
        let lmax = half_tr + r;
        // det / λmax avoids cancellation for the small eigenvalue
        let det = self.a * self.d - off * off;
        let lmin = if lmax != 0.0 { det / lmax } else { half_tr - r };
        let v = if r == 0.0 {
            [1.0, 0.0]
        } else {
            // eigenvector of the larger eigenvalue
            let angle = 0.5 * off.atan2(diff);
            [angle.cos(), angle.sin()]
        };
        (lmin, lmax, v)
    }

    /// Real eigenvalues of a general 2×2 matrix, sorted by ascending modulus.
    pub fn real_eigenvalues(&self) -> Option<(f64, f64)> {
        let tr = self.trace();
        let det = self.det();
        let disc = 0.25 * tr * tr - det;
        if disc < 0.0 {
            return None;
        }
        let s = disc.sqrt();
        let big = 0.5 * tr + s.copysign(tr);
        let small = if big != 0.0 { det / big } else { 0.0 };
        Some((small, big))
    }

    /// Unit eigenvector for a real eigenvalue `lambda`.
    pub fn eigenvector(&self, lambda: f64) -> [f64; 2] {
        // (a-λ) x + b y = 0  and  c x + (d-λ) y = 0; use the better-conditioned row
        let r1 = [self.a - lambda, self.b];
        let r2 = [self.c, self.d - lambda];
        let row = if r1[0].hypot(r1[1]) >= r2[0].hypot(r2[1]) {
            r1
        } else {
            r2
        };
        let v = [-row[1], row[0]];
        let n = v[0].hypot(v[1]);
        if n == 0.0 {
            [1.0, 0.0]
        } else {
            [v[0] / n, v[1] / n]
        }
    }
}

impl<T> Mul for Mat2<T>
where
    T: Copy + Add<Output = T> + Mul<Output = T>,
{
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }
}

impl<T> Add for Mat2<T>
where
    T: Copy + Add<Output = T>,
{
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            a: self.a + o.a,
            b: self.b + o.b,
            c: self.c + o.c,
            d: self.d + o.d,
        }
    }
}

/// Solve the real 2×2 system `m x = rhs`.
pub fn solve2(m: &Mat2, rhs: [f64; 2]) -> Option<[f64; 2]> {
    let inv = m.inverse()?;
    Some(inv.apply(rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_eigen_matches_trace_and_det() {
        let m = Mat2::new(865.0, -612.0, -612.0, 433.0);
        let (lo, hi, v) = m.symmetric_eigen();
        assert!((lo + hi - m.trace()).abs() < 1e-9);
        assert!((lo * hi - m.det()).abs() < 1e-9);
        let mv = m.apply(v);
        assert!((mv[0] - hi * v[0]).abs() < 1e-9 * hi);
        assert!((mv[1] - hi * v[1]).abs() < 1e-9 * hi);
    }

    #[test]
    fn eigenvector_of_hyperbolic_matrix() {
        let m = Mat2::new(17.0, -24.0, -12.0, 17.0);
        let (small, big) = m.real_eigenvalues().unwrap();
        assert!((small * big - 1.0).abs() < 1e-12);
        for lam in [small, big] {
            let v = m.eigenvector(lam);
            let mv = m.apply(v);
            assert!((mv[0] - lam * v[0]).abs() < 1e-10);
            assert!((mv[1] - lam * v[1]).abs() < 1e-10);
        }
    }

    #[test]
    fn symplectic_inverse_is_inverse_for_unit_det() {
        let m = Mat2::new(3.0, -4.0, -2.0, 3.0);
        let p = m * m.symplectic_inverse();
        assert!(p.max_abs_diff(&Mat2::identity()) < 1e-15);
    }
}
