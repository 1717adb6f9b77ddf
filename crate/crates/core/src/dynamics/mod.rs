//! Phase-space charts, the map/flow catalog, propagation and conservation checks.

pub mod flow;
pub mod maps;
pub mod portrait;
pub mod stadium;

use crate::error::{ensure_finite, ChaosError, Result};
use crate::linalg::Mat2;
use crate::ode::{self, Halt, Tolerances};

pub use flow::Flow;
pub use portrait::{portrait, random_seeds, Portrait, StickyReport};
pub use stadium::{Piece, Stadium};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PhasePoint {
    pub q: f64,
    pub p: f64,
}

impl PhasePoint {
    pub const fn new(q: f64, p: f64) -> Self {
        Self { q, p }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chart {
    Torus,
    Cylinder,
    BilliardBoundary,
    Plane,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MapSystem {
    Standard { k: f64, chart: Chart },
    Baker,
    Stadium(Stadium),
    Flow(Flow),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Steps {
    Discrete(usize),
    Time(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySegment {
    pub points: Vec<PhasePoint>,
    /// Sample times for flows; empty for maps.
    pub times: Vec<f64>,
    pub steps: Steps,
    pub accumulated_action: f64,
}

impl MapSystem {
    pub fn standard(k: f64) -> Result<Self> {
        if !k.is_finite() {
            return Err(ChaosError::InvalidParameter("standard map K must be finite".into()));
        }
        Ok(MapSystem::Standard {
            k,
            chart: Chart::Torus,
        })
    }

    pub fn standard_cylinder(k: f64) -> Result<Self> {
        if !k.is_finite() {
            return Err(ChaosError::InvalidParameter("standard map K must be finite".into()));
        }
        Ok(MapSystem::Standard {
            k,
            chart: Chart::Cylinder,
        })
    }

    pub fn stadium(gamma: f64) -> Result<Self> {
        Ok(MapSystem::Stadium(Stadium::new(gamma)?))
    }

    pub fn harmonic(m: f64, omega: f64) -> Result<Self> {
        if !(m > 0.0 && omega > 0.0 && m.is_finite() && omega.is_finite()) {
            return Err(ChaosError::InvalidParameter("harmonic requires m, ω > 0".into()));
        }
        Ok(MapSystem::Flow(Flow::Harmonic { m, omega }))
    }

    pub fn quartic(m: f64, alpha: f64) -> Result<Self> {
        if !(m > 0.0 && alpha.is_finite() && m.is_finite()) {
            return Err(ChaosError::InvalidParameter("quartic requires m > 0".into()));
        }
        Ok(MapSystem::Flow(Flow::Quartic { m, alpha }))
    }

    pub fn linear_ramp() -> Self {
        MapSystem::Flow(Flow::LinearRamp)
    }

    pub fn name(&self) -> &'static str {
        match self {
            MapSystem::Standard { .. } => "standard-map",
            MapSystem::Baker => "bakers-map",
            MapSystem::Stadium(_) => "stadium",
            MapSystem::Flow(f) => f.name(),
        }
    }

    pub fn chart(&self) -> Chart {
        match self {
            MapSystem::Standard { chart, .. } => *chart,
            MapSystem::Baker => Chart::Torus,
            MapSystem::Stadium(_) => Chart::BilliardBoundary,
            MapSystem::Flow(_) => Chart::Plane,
        }
    }

    pub fn is_map(&self) -> bool {
        !matches!(self, MapSystem::Flow(_))
    }

    /// Periods of the chart coordinates (`None` = unbounded).
    pub fn periods(&self) -> (Option<f64>, Option<f64>) {
        match self {
            MapSystem::Standard { chart, .. } => match chart {
                Chart::Torus => (Some(1.0), Some(1.0)),
                _ => (Some(1.0), None),
            },
            MapSystem::Baker => (None, None),
            MapSystem::Stadium(s) => (Some(s.perimeter()), None),
            MapSystem::Flow(_) => (None, None),
        }
    }

    /// Chart-aware difference `a − b` (periodic coordinates reduced to half a period).
    pub fn diff(&self, a: PhasePoint, b: PhasePoint) -> [f64; 2] {
        let (pq, pp) = self.periods();
        let red = |d: f64, per: Option<f64>| match per {
            Some(per) => {
                let mut r = d.rem_euclid(per);
                if r > 0.5 * per {
                    r -= per;
                }
                r
            }
            None => d,
        };
        [red(a.q - b.q, pq), red(a.p - b.p, pp)]
    }

    pub fn distance(&self, a: PhasePoint, b: PhasePoint) -> f64 {
        let d = self.diff(a, b);
        d[0].hypot(d[1])
    }

    /// Bring a point into the canonical chart range.
    pub fn normalize(&self, x: PhasePoint) -> PhasePoint {
        match self {
            MapSystem::Standard { chart, .. } => match chart {
                Chart::Torus => PhasePoint::new(maps::unit_wrap(x.q), maps::unit_wrap(x.p)),
                _ => PhasePoint::new(maps::unit_wrap(x.q), x.p),
            },
            MapSystem::Stadium(s) => PhasePoint::new(s.wrap(x.q), x.p),
            _ => x,
        }
    }

    pub fn validate(&self, x: PhasePoint) -> Result<()> {
        ensure_finite(&[x.q, x.p], "phase point")?;
        let bad = |chart| {
            Err(ChaosError::OutOfChart {
                q: x.q,
                p: x.p,
                chart,
            })
        };
        match self {
            MapSystem::Standard { chart, .. } => {
                if !(0.0..1.0).contains(&x.q) {
                    return bad("standard-map q");
                }
                if *chart == Chart::Torus && !(0.0..1.0).contains(&x.p) {
                    return bad("torus");
                }
                Ok(())
            }
            MapSystem::Baker => {
                if (0.0..1.0).contains(&x.q) && (0.0..1.0).contains(&x.p) {
                    Ok(())
                } else {
                    bad("unit square")
                }
            }
            MapSystem::Stadium(s) => {
                if (0.0..s.perimeter()).contains(&x.q) && x.p.abs() < 1.0 {
                    Ok(())
                } else {
                    bad("stadium")
                }
            }
            MapSystem::Flow(_) => Ok(()),
        }
    }

    /// One map step with its action increment.
    pub fn step(&self, x: PhasePoint) -> Result<(PhasePoint, f64)> {
        match *self {
            MapSystem::Standard { k, chart } => {
                let y = maps::standard_step(x, k, chart == Chart::Torus)?;
                Ok((y, maps::standard_action(x, k)))
            }
            MapSystem::Baker => Ok((maps::baker_step(x)?, maps::baker_action(x))),
            MapSystem::Stadium(s) => s.step(x),
            MapSystem::Flow(f) => Err(ChaosError::NotAMap(f.name())),
        }
    }

    pub fn step_inverse(&self, x: PhasePoint) -> Result<PhasePoint> {
        match *self {
            MapSystem::Standard { k, chart } => maps::standard_inverse(x, k, chart == Chart::Torus),
            MapSystem::Baker => maps::baker_inverse(x),
            MapSystem::Stadium(s) => Ok(s.step_inverse(x)?.0),
            MapSystem::Flow(f) => Err(ChaosError::NotAMap(f.name())),
        }
    }

    /// One step with its Jacobian in `(q, p)` ordering.
    pub fn step_jacobian(&self, x: PhasePoint) -> Result<(PhasePoint, f64, Mat2)> {
        match *self {
            MapSystem::Standard { k, .. } => {
                let (y, a) = self.step(x)?;
                Ok((y, a, maps::standard_jacobian(x, k)))
            }
            MapSystem::Baker => {
                let (y, a) = self.step(x)?;
                Ok((y, a, maps::baker_jacobian()))
            }
            MapSystem::Stadium(s) => s.step_jacobian(x),
            MapSystem::Flow(f) => Err(ChaosError::NotAMap(f.name())),
        }
    }

    /// `n` forward (`n > 0`) or backward (`n < 0`) steps.
    pub fn step_n(&self, x: PhasePoint, n: i64) -> Result<PhasePoint> {
        let mut y = x;
        if n >= 0 {
            for i in 0..n as usize {
                y = self.step(y).map_err(|e| step_failed(i, e))?.0;
            }
        } else {
            for i in 0..(-n) as usize {
                y = self.step_inverse(y).map_err(|e| step_failed(i, e))?;
            }
        }
        Ok(y)
    }

    /// `n` steps with the accumulated Jacobian and action.
    pub fn step_n_jacobian(&self, x: PhasePoint, n: usize) -> Result<(PhasePoint, f64, Mat2)> {
        let mut y = x;
        let mut jac = Mat2::identity();
        let mut action = 0.0;
        for i in 0..n {
            let (z, a, j) = self.step_jacobian(y).map_err(|e| step_failed(i, e))?;
            if !j.is_finite() {
                return Err(ChaosError::NonFiniteJacobian(i));
            }
            jac = j * jac;
            action += a;
            y = z;
        }
        Ok((y, action, jac))
    }

    /// Hamiltonian value (flows only).
    pub fn energy(&self, x: PhasePoint) -> Result<f64> {
        match self {
            MapSystem::Flow(f) => Ok(f.energy(x.q, x.p)),
            _ => Err(ChaosError::NotAFlow(self.name())),
        }
    }
}

pub(crate) fn step_failed(index: usize, e: ChaosError) -> ChaosError {
    match e {
        ChaosError::StepFailed { .. } => e,
        other => ChaosError::StepFailed {
            index,
            source: Box::new(other),
        },
    }
}

/// `n`-fold composition of the map with accumulated action.
pub fn iterate(map: &MapSystem, x: PhasePoint, n: usize) -> Result<TrajectorySegment> {
    if !map.is_map() {
        return Err(ChaosError::NotAMap(map.name()));
    }
    map.validate(x)?;
    let mut points = Vec::with_capacity(n + 1);
    points.push(x);
    let mut y = x;
    let mut action = 0.0;
    for i in 0..n {
        let (z, a) = map.step(y).map_err(|e| step_failed(i, e))?;
        action += a;
        points.push(z);
        y = z;
    }
    Ok(TrajectorySegment {
        points,
        times: Vec::new(),
        steps: Steps::Discrete(n),
        accumulated_action: action,
    })
}

/// Result of a real-time flow integration including the tangent matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowRun {
    pub segment: TrajectorySegment,
    /// Tangent matrices in `(q, p)` ordering at each sample.
    pub jacobians: Vec<Mat2>,
}

pub fn integrate_flow(map: &MapSystem, x: PhasePoint, t: f64) -> Result<TrajectorySegment> {
    Ok(integrate_flow_with(map, x, t, &Tolerances::default(), None)?.segment)
}

/// Adaptive integration to time `t`; with `sample_dt`, the solution is also
/// recorded on a uniform grid (otherwise at every accepted step).
pub fn integrate_flow_with(
    map: &MapSystem,
    x: PhasePoint,
    t: f64,
    tol: &Tolerances,
    sample_dt: Option<f64>,
) -> Result<FlowRun> {
    let flow = match map {
        MapSystem::Flow(f) => *f,
        _ => return Err(ChaosError::NotAFlow(map.name())),
    };
    ensure_finite(&[x.q, x.p, t], "flow input")?;
    if t < 0.0 {
        return Err(ChaosError::InvalidParameter("flow time must be ≥ 0".into()));
    }
    let rhs = move |_s: f64, y: &[f64; flow::AUG]| flow.augmented_rhs(y, 1.0);
    let mut y = Flow::augmented_initial(x.q, x.p);
    let mut points = vec![x];
    let mut times = vec![0.0];
    let mut jacobians = vec![Mat2::identity()];
    let record = |y: &[f64; flow::AUG],
                      s: f64,
                      points: &mut Vec<PhasePoint>,
                      times: &mut Vec<f64>,
                      jacobians: &mut Vec<Mat2>| {
        points.push(PhasePoint::new(y[0], y[1]));
        times.push(s);
        jacobians.push(Mat2::new(y[3], y[4], y[5], y[6]));
    };
    match sample_dt {
        Some(dt) if dt > 0.0 => {
            let n = (t / dt).ceil().max(1.0) as usize;
            let mut s0 = 0.0;
            for k in 1..=n {
                let s1 = if k == n { t } else { k as f64 * dt };
                let out = ode::integrate(rhs, s0, s1, y, tol, |_, _| true)?;
                if let Some(Halt::Underflow { s, h }) = out.halted {
                    return Err(ChaosError::StepUnderflow { t: s, h });
                }
                y = out.y;
                record(&y, s1, &mut points, &mut times, &mut jacobians);
                s0 = s1;
            }
        }
        _ => {
            let mut buf: Vec<(f64, [f64; flow::AUG])> = Vec::new();
            let out = ode::integrate(rhs, 0.0, t, y, tol, |s, yy| {
                buf.push((s, *yy));
                true
            })?;
            if let Some(Halt::Underflow { s, h }) = out.halted {
                return Err(ChaosError::StepUnderflow { t: s, h });
            }
            for (s, yy) in buf {
                record(&yy, s, &mut points, &mut times, &mut jacobians);
            }
            y = out.y;
        }
    }
    Ok(FlowRun {
        segment: TrajectorySegment {
            points,
            times,
            steps: Steps::Time(t),
            accumulated_action: y[2],
        },
        jacobians,
    })
}

/// Maximum energy drift `max |H(x_t) − H(x_0)|` along a flow segment.
pub fn conservation_check(map: &MapSystem, segment: &TrajectorySegment) -> Result<f64> {
    let first = segment
        .points
        .first()
        .ok_or(ChaosError::InvalidParameter("empty segment".into()))?;
    let e0 = map.energy(*first)?;
    let mut drift: f64 = 0.0;
    for x in &segment.points {
        drift = drift.max((map.energy(*x)? - e0).abs());
    }
    Ok(drift)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn harmonic_period() {
        let map = MapSystem::harmonic(1.0, 1.0).unwrap();
        let x = PhasePoint::new(0.7, -0.3);
        let seg = integrate_flow(&map, x, 2.0 * PI).unwrap();
        let y = *seg.points.last().unwrap();
        assert!((y.q - x.q).abs() < 1e-10 && (y.p - x.p).abs() < 1e-10);
        assert!(conservation_check(&map, &seg).unwrap() < 1e-10);
    }

    #[test]
    fn linear_ramp_exact_energy() {
        let map = MapSystem::linear_ramp();
        let seg = integrate_flow(&map, PhasePoint::new(-1.0, 1.0), 3.0).unwrap();
        assert!(conservation_check(&map, &seg).unwrap() < 1e-12);
    }

    #[test]
    fn iterate_zero_steps() {
        let map = MapSystem::Baker;
        let seg = iterate(&map, PhasePoint::new(0.3, 0.2), 0).unwrap();
        assert_eq!(seg.points.len(), 1);
    }

    #[test]
    fn flows_are_not_maps() {
        let map = MapSystem::linear_ramp();
        assert!(matches!(
            iterate(&map, PhasePoint::new(0.0, 0.0), 3),
            Err(ChaosError::NotAMap(_))
        ));
    }
}
