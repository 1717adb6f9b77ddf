//! Periodic orbits: Newton solvers, censuses, actions, symmetry and the
//! uniformity sum rule.

pub mod billiard;
pub mod census;
pub mod symmetry;
pub mod uniformity;

use crate::dynamics::{MapSystem, PhasePoint};
use crate::error::{ChaosError, Result};
use crate::linalg::Mat2;
use crate::stability::{classify, StabilityClass, StabilityMatrix, StabilityTag};

pub use census::{find_periodic_orbits, CensusOptions, FixedPointCensus, Seeding};
pub use symmetry::{symmetry_classify, SymmetryInfo};
pub use uniformity::{uniformity_sum, CellGrid, UniformityReport};

/// Closure tolerance for a stored orbit.
pub const CLOSURE_TOL: f64 = 1e-10;
/// Marginal-stability flag threshold on `|Tr M − 2|`.
pub const MARGINAL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicOrbit {
    /// `period` points; `points[i+1] = T(points[i])`.
    pub points: Vec<PhasePoint>,
    pub period: usize,
    /// Smallest `d` with `T^d(x) = x`.
    pub primitive_period: usize,
    pub action: f64,
    pub monodromy: StabilityMatrix,
    pub stability: StabilityClass,
    pub symmetry_class: Option<String>,
    pub itinerary: Option<String>,
}

impl PeriodicOrbit {
    /// Assemble from a closed point list, recomputing monodromy and action.
    pub fn from_points(map: &MapSystem, points: Vec<PhasePoint>) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Err(ChaosError::InvalidParameter("empty orbit".into()));
        }
        let mut jac = Mat2::identity();
        let mut action = 0.0;
        for i in 0..n {
            let (y, a, j) = map.step_jacobian(points[i])?;
            let next = points[(i + 1) % n];
            let gap = map.distance(y, next);
            if gap > CLOSURE_TOL {
                return Err(ChaosError::NoConvergence(format!(
                    "orbit does not close at point {i}: gap {gap:e}"
                )));
            }
            jac = j * jac;
            action += a;
        }
        let monodromy = StabilityMatrix::new(jac, n);
        let primitive_period = (1..=n)
            .find(|&d| n % d == 0 && (0..n).all(|i| map.distance(points[i], points[(i + d) % n]) < 1e-8))
            .unwrap_or(n);
        Ok(Self {
            stability: classify(&monodromy),
            points,
            period: n,
            primitive_period,
            action,
            monodromy,
            symmetry_class: None,
            itinerary: None,
        })
    }

    pub fn trace(&self) -> f64 {
        self.monodromy.trace()
    }

    pub fn is_marginal(&self) -> bool {
        (self.trace() - 2.0).abs() < MARGINAL_TOL
    }

    pub fn is_hyperbolic(&self) -> bool {
        matches!(
            self.stability.tag,
            StabilityTag::Hyperbolic | StabilityTag::HyperbolicWithReflection
        )
    }

    /// The orbit traversed `k` times.
    pub fn repeated(&self, map: &MapSystem, k: usize) -> Result<Self> {
        let mut pts = Vec::with_capacity(self.period * k);
        for _ in 0..k {
            pts.extend_from_slice(&self.points);
        }
        let mut o = Self::from_points(map, pts)?;
        o.itinerary = self.itinerary.as_ref().map(|s| s.repeat(k));
        o.symmetry_class = self.symmetry_class.clone();
        Ok(o)
    }

    /// Same orbit relabelled to start at point `k`.
    pub fn shifted(&self, k: usize) -> Self {
        let mut o = self.clone();
        o.points.rotate_left(k % self.period);
        o
    }

    /// Max over points of the distance to the best cyclic alignment of `other`.
    pub fn cyclic_distance(&self, other: &Self, map: &MapSystem) -> f64 {
        if self.primitive_period != other.primitive_period {
            return f64::INFINITY;
        }
        let d = self.primitive_period;
        (0..d)
            .map(|s| {
                (0..d)
                    .map(|i| map.distance(self.points[i], other.points[(i + s) % d]))
                    .fold(0.0, f64::max)
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Total action per period: chord lengths for billiards, generating-function
/// sums for smooth maps.
pub fn orbit_action(orbit: &PeriodicOrbit, map: &MapSystem) -> Result<f64> {
    let mut w = 0.0;
    for x in &orbit.points {
        w += map.step(*x)?.1;
    }
    Ok(w)
}

fn solve_or_min_norm(m: &Mat2, rhs: [f64; 2]) -> [f64; 2] {
    let scale = m.a.abs().max(m.b.abs()).max(m.c.abs()).max(m.d.abs()).max(1e-300);
    if m.det().abs() > 1e-12 * scale * scale {
        let inv = m.inverse().unwrap();
        return inv.apply(rhs);
    }
    // least-squares minimum-norm solution for a (near) rank-one matrix
    let mtm = m.transpose() * *m;
    let (_, hi, v) = mtm.symmetric_eigen();
    if hi <= 0.0 {
        return [0.0, 0.0];
    }
    let mtr = m.transpose().apply(rhs);
    let coef = (mtr[0] * v[0] + mtr[1] * v[1]) / hi;
    [coef * v[0], coef * v[1]]
}

/// Largest step length accepted by the Newton solvers, per map.
fn max_newton_step(map: &MapSystem) -> f64 {
    match map {
        MapSystem::Stadium(_) => 0.3,
        _ => 0.1,
    }
}

fn apply_step(map: &MapSystem, x: PhasePoint, d: [f64; 2]) -> Option<PhasePoint> {
    let y = map.normalize(PhasePoint::new(x.q + d[0], x.p + d[1]));
    match map {
        MapSystem::Stadium(_) if y.p.abs() >= 1.0 - 1e-12 => None,
        MapSystem::Baker if !(0.0..1.0).contains(&y.q) || !(0.0..1.0).contains(&y.p) => None,
        _ => Some(y),
    }
}

/// Single-shooting Newton on `Tⁿ(x) − x`.
pub fn newton_fixed_point(map: &MapSystem, seed: PhasePoint, n: usize, max_iter: usize) -> Result<PhasePoint> {
    let mut x = map.normalize(seed);
    let cap = max_newton_step(map);
    let mut last_res = f64::INFINITY;
    for _ in 0..max_iter {
        let (y, _, jac) = map.step_n_jacobian(x, n)?;
        let r = map.diff(y, x);
        let res = r[0].hypot(r[1]);
        if res < 1e-13 {
            return Ok(x);
        }
        let mut d = solve_or_min_norm(&jac.minus_identity(), [-r[0], -r[1]]);
        let len = d[0].hypot(d[1]);
        if !len.is_finite() {
            break;
        }
        if len > cap {
            d = [d[0] * cap / len, d[1] * cap / len];
        }
        if len < 1e-14 && res < 1e-7 {
            return Ok(x);
        }
        x = apply_step(map, x, d).ok_or_else(|| ChaosError::NoConvergence("left chart".into()))?;
        last_res = res;
    }
    if last_res < 1e-7 {
        Ok(x)
    } else {
        Err(ChaosError::NoConvergence(format!("residual {last_res:e}")))
    }
}

/// Multiple-shooting Newton polish of a closed `n`-point guess.
pub fn polish_cycle(map: &MapSystem, guess: &[PhasePoint], max_iter: usize) -> Result<Vec<PhasePoint>> {
    let n = guess.len();
    let mut xs: Vec<PhasePoint> = guess.iter().map(|x| map.normalize(*x)).collect();
    for _ in 0..max_iter {
        let mut jacs = Vec::with_capacity(n);
        let mut res = Vec::with_capacity(n);
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let (y, _, j) = map.step_jacobian(xs[i])?;
            let r = map.diff(y, xs[(i + 1) % n]);
            worst = worst.max(r[0].hypot(r[1]));
            jacs.push(j);
            res.push(r);
        }
        if worst < 1e-14 {
            return Ok(xs);
        }
        // δ_{i+1} = J_i δ_i + r_i, closed by δ_n = δ_0
        let mut phi = Mat2::identity();
        let mut c = [0.0, 0.0];
        for i in 0..n {
            phi = jacs[i] * phi;
            let jc = jacs[i].apply(c);
            c = [jc[0] + res[i][0], jc[1] + res[i][1]];
        }
        let d0 = solve_or_min_norm(&phi.minus_identity(), [-c[0], -c[1]]);
        let mut d = d0;
        let mut deltas = Vec::with_capacity(n);
        for i in 0..n {
            deltas.push(d);
            let jd = jacs[i].apply(d);
            d = [jd[0] + res[i][0], jd[1] + res[i][1]];
        }
        let big = deltas.iter().map(|d| d[0].hypot(d[1])).fold(0.0, f64::max);
        if !big.is_finite() {
            return Err(ChaosError::NoConvergence("non-finite shooting step".into()));
        }
        let scale = if big > 0.3 { 0.3 / big } else { 1.0 };
        for i in 0..n {
            xs[i] = apply_step(map, xs[i], [deltas[i][0] * scale, deltas[i][1] * scale])
                .ok_or_else(|| ChaosError::NoConvergence("left chart".into()))?;
        }
        if big < 1e-15 {
            break;
        }
    }
    let worst = (0..n)
        .map(|i| {
            map.step(xs[i])
                .map(|(y, _)| map.distance(y, xs[(i + 1) % n]))
                .unwrap_or(f64::INFINITY)
        })
        .fold(0.0, f64::max);
    if worst < 1e-12 {
        Ok(xs)
    } else {
        Err(ChaosError::NoConvergence(format!("shooting residual {worst:e}")))
    }
}

/// Find the periodic orbit through (near) `seed` and build it.
pub fn orbit_from_seed(map: &MapSystem, seed: PhasePoint, n: usize) -> Result<PeriodicOrbit> {
    let x = newton_fixed_point(map, seed, n, 60)?;
    let mut pts = vec![x];
    for _ in 1..n {
        let y = map.step(*pts.last().unwrap())?.0;
        pts.push(y);
    }
    let pts = polish_cycle(map, &pts, 30)?;
    PeriodicOrbit::from_points(map, pts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn horizontal_orbit() {
        let map = MapSystem::stadium(1.0).unwrap();
        let o = orbit_from_seed(&map, PhasePoint::new(0.01, 0.01), 2).unwrap();
        assert!((o.trace() - 34.0).abs() < 1e-9);
        assert!((o.action - 8.0).abs() < 1e-12);
        assert_eq!(o.primitive_period, 2);
    }

    #[test]
    fn bouncing_ball_is_marginal() {
        let map = MapSystem::stadium(1.0).unwrap();
        let st = match map {
            MapSystem::Stadium(s) => s,
            _ => unreachable!(),
        };
        let x = PhasePoint::new(st.bottom_mid(), 0.0);
        let y = map.step(x).unwrap().0;
        let o = PeriodicOrbit::from_points(&map, vec![x, y]).unwrap();
        assert!(o.is_marginal());
        assert!((o.action - 4.0).abs() < 1e-12);
    }
}
