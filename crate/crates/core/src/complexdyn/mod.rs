//! Complexified trajectories: integration along complex time paths with
//! escape detection, the Airy benchmark, Gaussian-state Lagrangian
//! manifolds, complex saddle search and determinant phase tracking.

pub mod airy;
pub mod lagrangian;
pub mod phase;

use num_complex::Complex64;

use crate::dynamics::flow::{Flow, AUG};
use crate::dynamics::MapSystem;
use crate::error::{ChaosError, Result};
use crate::linalg::CMat2;
use crate::ode::{self, Halt, Tolerances};

pub use airy::{airy_oracle, airy_wkb, AIRY_EXCLUSION_AREA};
pub use lagrangian::{
    contour_map, evolve_flow_gaussian, lagrangian_manifold_point, saddle_search, ContourGrid,
    ContourMap, ContourSample, SaddleSolution,
};
pub use phase::{
    migrating_zero, sign_flip_sweep, track_determinant, track_flow_determinant, DeterminantKind, PhaseTracker,
    SweepResult,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexPhasePoint {
    pub q: Complex64,
    pub p: Complex64,
}

impl ComplexPhasePoint {
    pub fn new(q: Complex64, p: Complex64) -> Self {
        Self { q, p }
    }

    pub fn real(q: f64, p: f64) -> Self {
        Self::new(Complex64::new(q, 0.0), Complex64::new(p, 0.0))
    }

    pub fn is_finite(&self) -> bool {
        self.q.re.is_finite() && self.q.im.is_finite() && self.p.re.is_finite() && self.p.im.is_finite()
    }
}

/// Piecewise-linear complex time path starting at `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimePath {
    pub waypoints: Vec<Complex64>,
}

impl TimePath {
    pub fn new(waypoints: Vec<Complex64>) -> Result<Self> {
        if waypoints.first() != Some(&Complex64::new(0.0, 0.0)) {
            return Err(ChaosError::InvalidParameter("time path must start at t = 0".into()));
        }
        if waypoints.iter().any(|t| !(t.re.is_finite() && t.im.is_finite())) {
            return Err(ChaosError::NonFinite("time path"));
        }
        Ok(Self { waypoints })
    }

    /// Straight path from 0 to `t`.
    pub fn straight(t: Complex64) -> Self {
        Self {
            waypoints: vec![Complex64::new(0.0, 0.0), t],
        }
    }

    pub fn real(t: f64) -> Self {
        Self::straight(Complex64::new(t, 0.0))
    }

    pub fn final_time(&self) -> Complex64 {
        *self.waypoints.last().unwrap()
    }

    /// Sum of segment lengths `Σ |Δt|`.
    pub fn length(&self) -> f64 {
        self.waypoints.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexOptions {
    pub escape_radius: f64,
    pub tolerances: Tolerances,
}

impl Default for ComplexOptions {
    fn default() -> Self {
        Self {
            escape_radius: 1e6,
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexTrajectory {
    /// Complex times of the accepted steps, starting at 0.
    pub times: Vec<Complex64>,
    pub points: Vec<ComplexPhasePoint>,
    /// Tangent matrices in `(q, p)` ordering at each sample.
    pub jacobians: Vec<CMat2>,
    /// `∫ (p q̇ − H) dt` along the path.
    pub action: Complex64,
    /// Time at which `|q|` exceeded the escape radius.
    pub escape_time: Option<Complex64>,
}

impl ComplexTrajectory {
    pub fn escaped(&self) -> bool {
        self.escape_time.is_some()
    }

    pub fn end(&self) -> ComplexPhasePoint {
        *self.points.last().unwrap()
    }

    pub fn monodromy(&self) -> CMat2 {
        *self.jacobians.last().unwrap()
    }
}

pub(crate) fn flow_of(system: &MapSystem) -> Result<Flow> {
    match system {
        MapSystem::Flow(f) => Ok(*f),
        _ => Err(ChaosError::NotAFlow(system.name())),
    }
}

fn jac_of(y: &[Complex64; AUG]) -> CMat2 {
    CMat2::new(y[3], y[4], y[5], y[6])
}

/// Analytic continuation of Hamilton's equations along `path`.
///
/// Crossing the escape radius ends the trajectory with `escape_time` set;
/// a step-size collapse before that is reported as [`ChaosError::BranchCut`].
pub fn complex_integrate(
    system: &MapSystem,
    z0: ComplexPhasePoint,
    path: &TimePath,
    opts: &ComplexOptions,
) -> Result<ComplexTrajectory> {
    let flow = flow_of(system)?;
    if !z0.is_finite() {
        return Err(ChaosError::NonFinite("complex initial point"));
    }
    let mut y = Flow::augmented_initial(z0.q, z0.p);
    let mut traj = ComplexTrajectory {
        times: vec![Complex64::new(0.0, 0.0)],
        points: vec![z0],
        jacobians: vec![jac_of(&y)],
        action: Complex64::new(0.0, 0.0),
        escape_time: None,
    };
    let radius = opts.escape_radius;
    for w in path.waypoints.windows(2) {
        let (ta, tb) = (w[0], w[1]);
        let dir = tb - ta;
        let len = dir.norm();
        if len == 0.0 {
            continue;
        }
        // s is the arclength along the segment
        let unit = dir / len;
        let rhs = move |_s: f64, y: &[Complex64; AUG]| flow.augmented_rhs(y, unit);
        let mut escaped_at = None;
        let out = ode::integrate(rhs, 0.0, len, y, &opts.tolerances, |s, yy| {
            traj.times.push(ta + unit * s);
            traj.points.push(ComplexPhasePoint::new(yy[0], yy[1]));
            traj.jacobians.push(jac_of(yy));
            if yy[0].norm() > radius {
                escaped_at = Some(ta + unit * s);
                return false;
            }
            true
        })?;
        y = out.y;
        traj.action = y[2];
        match out.halted {
            Some(Halt::Guard { .. }) => {
                traj.escape_time = escaped_at;
                return Ok(traj);
            }
            Some(Halt::Underflow { s, .. }) => {
                return Err(ChaosError::BranchCut { t: ta + unit * s });
            }
            None => {}
        }
    }
    Ok(traj)
}

/// Complex energy along the trajectory relative to its start: `max |H − H₀|`.
pub fn energy_drift(system: &MapSystem, traj: &ComplexTrajectory) -> Result<f64> {
    let flow = flow_of(system)?;
    let e0 = flow.energy(traj.points[0].q, traj.points[0].p);
    Ok(traj
        .points
        .iter()
        .map(|z| (flow.energy(z.q, z.p) - e0).norm())
        .fold(0.0, f64::max))
}

/// Period of the real orbit through `(q, p)`: time of the first return to
/// the line through the start normal to the initial velocity.
pub fn orbit_period(system: &MapSystem, q: f64, p: f64) -> Result<f64> {
    let flow = flow_of(system)?;
    let (hq, hp) = flow.gradient(q, p);
    let v = [hp, -hq];
    let g = |y: &[f64; AUG]| (y[0] - q) * v[0] + (y[1] - p) * v[1];
    let tol = Tolerances::default();
    let rhs = move |_s: f64, y: &[f64; AUG]| flow.augmented_rhs(y, 1.0);
    let y0 = Flow::augmented_initial(q, p);
    // march until g goes from negative to non-negative after leaving
    let mut t = 0.0;
    let mut y = y0;
    let dt = 1e-2;
    let mut left = false;
    for _ in 0..10_000_000 {
        let out = ode::integrate(rhs, t, t + dt, y, &tol, |_, _| true)?;
        let (ga, gb) = (g(&y), g(&out.y));
        if ga < 0.0 {
            left = true;
        }
        if left && ga < 0.0 && gb >= 0.0 {
            let (mut lo, mut hi) = (t, t + dt);
            let mut ylo = y;
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let ym = ode::integrate(rhs, lo, mid, ylo, &tol, |_, _| true)?.y;
                if g(&ym) < 0.0 {
                    lo = mid;
                    ylo = ym;
                } else {
                    hi = mid;
                }
            }
            return Ok(0.5 * (lo + hi));
        }
        t += dt;
        y = out.y;
    }
    Err(ChaosError::NoConvergence("orbit did not return".into()))
}
