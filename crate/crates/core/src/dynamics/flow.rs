//! Smooth one-degree-of-freedom flows and their augmented (tangent + action) fields.

use crate::ode::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Flow {
    /// `H = p²/2m + mω²q²/2`
    Harmonic { m: f64, omega: f64 },
    /// `H = p²/2m + α q⁴`
    Quartic { m: f64, alpha: f64 },
    /// `H = p² + q`
    LinearRamp,
}

/// Augmented state layout: `q, p, S, J_qq, J_qp, J_pq, J_pp`.
pub const AUG: usize = 7;

impl Flow {
    pub fn name(&self) -> &'static str {
        match self {
            Flow::Harmonic { .. } => "harmonic",
            Flow::Quartic { .. } => "quartic",
            Flow::LinearRamp => "linear-ramp",
        }
    }

    pub fn energy<T: Scalar>(&self, q: T, p: T) -> T {
        match *self {
            Flow::Harmonic { m, omega } => p * p * (0.5 / m) + q * q * (0.5 * m * omega * omega),
            Flow::Quartic { m, alpha } => p * p * (0.5 / m) + q * q * q * q * alpha,
            Flow::LinearRamp => p * p + q,
        }
    }

    /// `(∂H/∂q, ∂H/∂p)`
    pub fn gradient<T: Scalar>(&self, q: T, p: T) -> (T, T) {
        match *self {
            Flow::Harmonic { m, omega } => (q * (m * omega * omega), p * (1.0 / m)),
            Flow::Quartic { m, alpha } => (q * q * q * (4.0 * alpha), p * (1.0 / m)),
            Flow::LinearRamp => (T::from_f64(1.0), p * 2.0),
        }
    }

    /// `(H_qq, H_pp)`; every catalog Hamiltonian is separable so `H_qp = 0`.
    pub fn hessian<T: Scalar>(&self, q: T, _p: T) -> (T, T) {
        match *self {
            Flow::Harmonic { m, omega } => (T::from_f64(m * omega * omega), T::from_f64(1.0 / m)),
            Flow::Quartic { m, alpha } => (q * q * (12.0 * alpha), T::from_f64(1.0 / m)),
            Flow::LinearRamp => (T::zero(), T::from_f64(2.0)),
        }
    }

    /// Augmented vector field scaled by the time direction `dir` (`dt = dir ds`).
    pub fn augmented_rhs<T: Scalar>(&self, y: &[T; AUG], dir: T) -> [T; AUG] {
        let (q, p) = (y[0], y[1]);
        let (hq, hp) = self.gradient(q, p);
        let (hqq, hpp) = self.hessian(q, p);
        let h = self.energy(q, p);
        let lag = p * hp - h;
        // dJ/dt = [[0, H_pp], [−H_qq, 0]] J
        let zero = T::zero();
        [
            hp * dir,
            (zero - hq) * dir,
            lag * dir,
            hpp * y[5] * dir,
            hpp * y[6] * dir,
            (zero - hqq * y[3]) * dir,
            (zero - hqq * y[4]) * dir,
        ]
    }

    pub fn augmented_initial<T: Scalar>(q: T, p: T) -> [T; AUG] {
        let one = T::from_f64(1.0);
        let zero = T::zero();
        [q, p, zero, one, zero, zero, one]
    }
}
