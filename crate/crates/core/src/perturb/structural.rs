//! Structural stability: trajectories separate quickly under a change of
//! `γ` while invariant manifolds barely move.

use std::collections::HashMap;

use crate::dynamics::{MapSystem, PhasePoint};
use crate::error::{ChaosError, Result};
use crate::tangle::ManifoldSegment;

#[derive(Debug, Clone, PartialEq)]
pub struct StructuralReport {
    /// Chart separation of the trajectory pair after `k` bounces, `k = 0..`.
    pub separations: Vec<f64>,
    /// One-sided Hausdorff distance of the perturbed manifold portion from
    /// the base one.
    pub manifold_distance: f64,
    pub arclength: f64,
}

impl StructuralReport {
    /// First bounce at which the pair is farther apart than `threshold`.
    pub fn first_exceeding(&self, threshold: f64) -> Option<usize> {
        self.separations.iter().position(|s| *s > threshold)
    }

    /// Largest separation up to bounce `k` over the manifold distance.
    pub fn ratio(&self, k: usize) -> f64 {
        let s = self.separations[..=k.min(self.separations.len() - 1)]
            .iter()
            .copied()
            .fold(0.0, f64::max);
        if self.manifold_distance == 0.0 {
            if s == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            s / self.manifold_distance
        }
    }
}

fn stadium_gamma(map: &MapSystem) -> Result<f64> {
    match map {
        MapSystem::Stadium(st) => Ok(st.gamma),
        _ => Err(ChaosError::InvalidParameter("stadium maps required".into())),
    }
}

/// Chart distance between the same-step points of `x0` propagated in two
/// stadiums; `q` differences are wrapped with the first map's perimeter.
pub fn trajectory_separation(base: &MapSystem, pert: &MapSystem, x0: PhasePoint, bounces: usize) -> Result<Vec<f64>> {
    let mut a = base.normalize(x0);
    let mut b = pert.normalize(x0);
    let mut out = vec![0.0];
    for _ in 0..bounces {
        a = base.step(a)?.0;
        b = pert.step(b)?.0;
        let d = base.diff(b, a);
        out.push(d[0].hypot(d[1]));
    }
    Ok(out)
}

/// Vertices closer than this to the previous kept vertex are dropped; the
/// polylines bunch up enormously near the orbit point.
const THIN: f64 = 1e-4;

fn portion(seg: &ManifoldSegment, arclength: f64) -> Vec<PhasePoint> {
    let mut pts: Vec<PhasePoint> = Vec::new();
    let mut last_l = f64::NEG_INFINITY;
    for (x, l) in seg.points.iter().zip(&seg.arclength) {
        if *l >= arclength {
            pts.push(*x);
            break;
        }
        if *l - last_l >= THIN {
            pts.push(*x);
            last_l = *l;
        }
    }
    pts
}

fn point_segment(x: PhasePoint, a: PhasePoint, b: PhasePoint) -> f64 {
    let (dx, dy) = (b.q - a.q, b.p - a.p);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (((x.q - a.q) * dx + (x.p - a.p) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (x.q - a.q - t * dx).hypot(x.p - a.p - t * dy)
}

/// `sup_{x ∈ U_pert} dist(x, U_base)` over the first `arclength` of each
/// (unfolded coordinates, vertices thinned to `1e-4` arclength spacing).
pub fn manifold_distance(base: &ManifoldSegment, pert: &ManifoldSegment, arclength: f64) -> f64 {
    let b = portion(base, arclength);
    let p = portion(pert, arclength);
    if b.len() < 2 || p.is_empty() {
        return 0.0;
    }
    let cell = 0.05;
    let key = |x: PhasePoint| ((x.q / cell).floor() as i64, (x.p / cell).floor() as i64);
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for k in 0..b.len() - 1 {
        let (ka, kb) = (key(b[k]), key(b[k + 1]));
        for i in ka.0.min(kb.0)..=ka.0.max(kb.0) {
            for j in ka.1.min(kb.1)..=ka.1.max(kb.1) {
                grid.entry((i, j)).or_default().push(k);
            }
        }
    }
    let brute = |x: PhasePoint| {
        (0..b.len() - 1)
            .map(|k| point_segment(x, b[k], b[k + 1]))
            .fold(f64::INFINITY, f64::min)
    };
    p.iter()
        .map(|x| {
            let (i0, j0) = key(*x);
            let mut best = f64::INFINITY;
            for i in i0 - 1..=i0 + 1 {
                for j in j0 - 1..=j0 + 1 {
                    if let Some(list) = grid.get(&(i, j)) {
                        for &k in list {
                            best = best.min(point_segment(*x, b[k], b[k + 1]));
                        }
                    }
                }
            }
            if best > cell {
                brute(*x)
            } else {
                best
            }
        })
        .fold(0.0, f64::max)
}

/// Trajectory divergence against manifold displacement for the same orbit
/// branch at two values of `γ`.
pub fn manifold_stability_metric(
    u_base: &ManifoldSegment,
    u_pert: &ManifoldSegment,
    x0: PhasePoint,
    bounces: usize,
    arclength: f64,
) -> Result<StructuralReport> {
    stadium_gamma(&u_base.map)?;
    stadium_gamma(&u_pert.map)?;
    Ok(StructuralReport {
        separations: trajectory_separation(&u_base.map, &u_pert.map, x0, bounces)?,
        manifold_distance: manifold_distance(u_base, u_pert, arclength),
        arclength,
    })
}
