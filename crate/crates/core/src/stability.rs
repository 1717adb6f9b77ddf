//! Tangent-map propagation, stability exponents, classification and the
//! semiclassical determinants.

use num_complex::Complex64;

use crate::dynamics::{self, MapSystem, PhasePoint, Steps, TrajectorySegment};
use crate::error::{ChaosError, Result};
use crate::linalg::{CMat2, Mat2};
use crate::ode::Tolerances;

/// Stability matrix. Stored as the tangent map in `(q, p)` ordering; the
/// `m11..m22` accessors expose the `(δp, δq)` block convention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityMatrix<T = f64> {
    pub jac: Mat2<T>,
    pub steps: usize,
}

impl<T: Copy> StabilityMatrix<T> {
    /// `∂p_t/∂p_0`
    pub fn m11(&self) -> T {
        self.jac.d
    }
    /// `∂p_t/∂q_0`
    pub fn m12(&self) -> T {
        self.jac.c
    }
    /// `∂q_t/∂p_0`
    pub fn m21(&self) -> T {
        self.jac.b
    }
    /// `∂q_t/∂q_0`
    pub fn m22(&self) -> T {
        self.jac.a
    }
}

impl StabilityMatrix<f64> {
    pub fn new(jac: Mat2, steps: usize) -> Self {
        Self { jac, steps }
    }

    pub fn identity() -> Self {
        Self::new(Mat2::identity(), 0)
    }

    /// Build from the block entries `(M11, M12, M21, M22)`.
    pub fn from_blocks(m11: f64, m12: f64, m21: f64, m22: f64, steps: usize) -> Self {
        Self::new(Mat2::new(m22, m21, m12, m11), steps)
    }

    pub fn trace(&self) -> f64 {
        self.jac.trace()
    }

    pub fn det(&self) -> f64 {
        self.jac.det()
    }

    /// `det(M − 1) = 2 − Tr M` for unit-determinant `M`.
    pub fn det_minus_identity(&self) -> f64 {
        self.jac.minus_identity().det()
    }

    /// `self` followed by `later`.
    pub fn then(&self, later: &StabilityMatrix) -> StabilityMatrix {
        StabilityMatrix::new(later.jac * self.jac, self.steps + later.steps)
    }

    pub fn power(&self, k: usize) -> StabilityMatrix {
        let mut out = StabilityMatrix::identity();
        for _ in 0..k {
            out = out.then(self);
        }
        out
    }

    pub fn to_complex(&self) -> StabilityMatrix<Complex64> {
        StabilityMatrix {
            jac: self.jac.to_complex(),
            steps: self.steps,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilityTag {
    Elliptic,
    Parabolic,
    Hyperbolic,
    HyperbolicWithReflection,
}

impl StabilityTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            StabilityTag::Elliptic => "elliptic",
            StabilityTag::Parabolic => "parabolic",
            StabilityTag::Hyperbolic => "hyperbolic",
            StabilityTag::HyperbolicWithReflection => "hyperbolic-with-reflection",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityClass {
    pub tag: StabilityTag,
    /// Per-step exponent from `2 cosh(μ·steps) = |Tr M|`; zero unless hyperbolic.
    pub exponent: f64,
    pub trace: f64,
    /// Off-diagonal shear `M21` when parabolic (action-angle twist).
    pub shear: Option<f64>,
}

/// Tolerance on `|Tr| − 2` below which an orbit counts as parabolic.
pub const PARABOLIC_TOL: f64 = 1e-9;

/// Tangent propagation along a trajectory.
///
/// Maps use the analytic per-step Jacobians at each stored point; flows
/// integrate `dM/dt = K M` from the first point to the final time.
pub fn propagate_tangent(map: &MapSystem, segment: &TrajectorySegment) -> Result<StabilityMatrix> {
    match segment.steps {
        Steps::Discrete(n) => {
            if segment.points.len() < n + 1 {
                return Err(ChaosError::InvalidParameter(
                    "segment has fewer points than steps".into(),
                ));
            }
            let mut jac = Mat2::identity();
            for (i, x) in segment.points.iter().take(n).enumerate() {
                let (_, _, j) = map
                    .step_jacobian(*x)
                    .map_err(|e| dynamics::step_failed(i, e))?;
                if !j.is_finite() {
                    return Err(ChaosError::NonFiniteJacobian(i));
                }
                jac = j * jac;
            }
            Ok(StabilityMatrix::new(jac, n))
        }
        Steps::Time(t) => {
            let x0 = *segment
                .points
                .first()
                .ok_or(ChaosError::InvalidParameter("empty segment".into()))?;
            let run = dynamics::integrate_flow_with(map, x0, t, &Tolerances::default(), None)?;
            let jac = *run.jacobians.last().unwrap();
            if !jac.is_finite() {
                return Err(ChaosError::NonFiniteJacobian(run.jacobians.len() - 1));
            }
            Ok(StabilityMatrix::new(jac, 1))
        }
    }
}

/// Monodromy along `n` map steps from `x`.
pub fn monodromy(map: &MapSystem, x: PhasePoint, n: usize) -> Result<StabilityMatrix> {
    let (_, _, jac) = map.step_n_jacobian(x, n)?;
    Ok(StabilityMatrix::new(jac, n))
}

/// `μ_t = ln λ_max(M Mᵀ) / (2·steps)`.
pub fn finite_time_exponent(m: &StabilityMatrix) -> f64 {
    if m.steps == 0 {
        return 0.0;
    }
    let mmt = m.jac * m.jac.transpose();
    let (_, hi, _) = mmt.symmetric_eigen();
    hi.max(1.0).ln() / (2.0 * m.steps as f64)
}

/// Eigenvalues of `M Mᵀ`, returned as `(e^{−2μ·steps}, e^{+2μ·steps})`.
pub fn stretch_pair(m: &StabilityMatrix) -> (f64, f64) {
    let mmt = m.jac * m.jac.transpose();
    let (lo, hi, _) = mmt.symmetric_eigen();
    (lo, hi)
}

pub fn classify(m: &StabilityMatrix) -> StabilityClass {
    let tr = m.trace();
    let excess = tr.abs() - 2.0;
    let (tag, exponent) = if excess.abs() <= PARABOLIC_TOL * tr.abs().max(1.0) {
        (StabilityTag::Parabolic, 0.0)
    } else if excess < 0.0 {
        (StabilityTag::Elliptic, 0.0)
    } else {
        let mu = (0.5 * tr.abs()).acosh() / (m.steps.max(1) as f64);
        if tr > 0.0 {
            (StabilityTag::Hyperbolic, mu)
        } else {
            (StabilityTag::HyperbolicWithReflection, mu)
        }
    };
    StabilityClass {
        tag,
        exponent,
        trace: tr,
        shear: (tag == StabilityTag::Parabolic).then(|| m.m21()),
    }
}

/// Unit tangents of the unstable and stable directions at both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tangents {
    pub unstable_end: [f64; 2],
    pub stable_end: [f64; 2],
    pub unstable_start: [f64; 2],
    pub stable_start: [f64; 2],
}

/// Directions from the singular structure of `M` (vectors are `(δq, δp)`).
pub fn manifold_tangents(m: &StabilityMatrix) -> Result<Tangents> {
    let class = classify(m);
    if !matches!(
        class.tag,
        StabilityTag::Hyperbolic | StabilityTag::HyperbolicWithReflection
    ) {
        return Err(ChaosError::NotHyperbolic { trace: class.trace });
    }
    let perp = |v: [f64; 2]| [-v[1], v[0]];
    let (_, _, u_end) = (m.jac * m.jac.transpose()).symmetric_eigen();
    let inv = m.jac.symplectic_inverse();
    let (_, _, s_start) = (inv * inv.transpose()).symmetric_eigen();
    Ok(Tangents {
        unstable_end: u_end,
        stable_end: perp(u_end),
        unstable_start: perp(s_start),
        stable_start: s_start,
    })
}

/// Eigenvectors of a hyperbolic monodromy: `(λ_u, v_u, λ_s, v_s)`.
pub fn monodromy_eigen(m: &StabilityMatrix) -> Result<(f64, [f64; 2], f64, [f64; 2])> {
    let class = classify(m);
    if !matches!(
        class.tag,
        StabilityTag::Hyperbolic | StabilityTag::HyperbolicWithReflection
    ) {
        return Err(ChaosError::NotHyperbolic { trace: class.trace });
    }
    let (small, big) = m
        .jac
        .real_eigenvalues()
        .ok_or(ChaosError::NotHyperbolic { trace: class.trace })?;
    Ok((big, m.jac.eigenvector(big), small, m.jac.eigenvector(small)))
}

/// `(D0, D1, D2)` for a real or complexified stability matrix.
pub fn semiclassical_determinants(
    m: &StabilityMatrix<Complex64>,
    b_alpha: Complex64,
    b_beta: Complex64,
) -> (Complex64, Complex64, Complex64) {
    let i = Complex64::new(0.0, 1.0);
    let bb = b_beta.conj();
    let d0 = m.m21();
    let d1 = m.m22() + i * m.m21() * b_alpha;
    let d2 = m.m11() * b_alpha + bb * m.m22() + i * (bb * m.m21() * b_alpha - m.m12());
    (d0, d1, d2)
}

pub fn cmat_from_blocks(m11: Complex64, m12: Complex64, m21: Complex64, m22: Complex64) -> CMat2 {
    CMat2::new(m22, m21, m12, m11)
}

/// Times in `(0, t]` where `D0 = M21` changes sign along a flow trajectory,
/// refined by bisection.
pub fn caustic_times(map: &MapSystem, x: PhasePoint, t: f64, samples: usize) -> Result<Vec<f64>> {
    let tol = Tolerances::default();
    let dt = t / samples.max(1) as f64;
    let run = dynamics::integrate_flow_with(map, x, t, &tol, Some(dt))?;
    let d0 = |j: &Mat2| j.b;
    let eval = |s: f64| -> Result<f64> {
        let r = dynamics::integrate_flow_with(map, x, s, &tol, None)?;
        Ok(d0(r.jacobians.last().unwrap()))
    };
    let mut roots = Vec::new();
    for w in 1..run.segment.times.len() {
        let (ta, tb) = (run.segment.times[w - 1], run.segment.times[w]);
        let (fa, fb) = (d0(&run.jacobians[w - 1]), d0(&run.jacobians[w]));
        if ta == 0.0 || fa == 0.0 {
            continue;
        }
        if fa.signum() != fb.signum() {
            let (mut lo, mut hi, mut flo) = (ta, tb, fa);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let fm = eval(mid)?;
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if fm.signum() == flo.signum() {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
                if hi - lo < 1e-12 {
                    break;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
    }
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_parabolic_with_zero_exponent() {
        let m = StabilityMatrix::new(Mat2::identity(), 3);
        assert_eq!(finite_time_exponent(&m), 0.0);
        assert_eq!(classify(&m).tag, StabilityTag::Parabolic);
    }

    #[test]
    fn block_accessors_follow_p_q_order() {
        let m = StabilityMatrix::from_blocks(1.0, 2.0, 3.0, 4.0, 1);
        assert_eq!((m.m11(), m.m12(), m.m21(), m.m22()), (1.0, 2.0, 3.0, 4.0));
    }

    #[test]
    fn identity_determinants() {
        let m = StabilityMatrix::identity().to_complex();
        let one = Complex64::new(1.0, 0.0);
        let (d0, d1, _) = semiclassical_determinants(&m, one, one);
        assert_eq!(d0, Complex64::new(0.0, 0.0));
        assert_eq!(d1, one);
    }
}
