//! Shadowing relations between periodic orbits: cycle-expansion curvature
//! corrections and Sieber–Richter loop-reversal pairs.

use std::collections::HashSet;

use crate::dynamics::{MapSystem, Stadium};
use crate::error::{ChaosError, Result};
use crate::orbits::billiard::billiard_orbit_through;
use crate::orbits::symmetry::symmetry_classify;
use crate::orbits::{FixedPointCensus, PeriodicOrbit};
use crate::symbolic::stadium_itinerary_of_orbit;

/// Result of comparing a long orbit with the pair it shadows.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureCorrection {
    /// `W₁₂ − W₁ − W₂`.
    pub delta_w: f64,
    /// `det(Mᵢ − 1)` for orbit 1, orbit 2 and the shadow.
    pub dets: [f64; 3],
    /// `det(M₁₂ − 1) / (det(M₁ − 1) det(M₂ − 1))`.
    pub det_ratio: f64,
    /// `Tr Mᵢ − 2`, the same magnitudes with the opposite sign.
    pub trace_defects: [f64; 3],
    /// `|ΔW| / W₁₂`.
    pub relative_defect: f64,
}

fn piece_string(o: &PeriodicOrbit) -> Result<String> {
    o.itinerary
        .clone()
        .ok_or_else(|| ChaosError::ItineraryMismatch("orbit carries no itinerary".into()))
}

/// Bare piece letters (sense marks dropped), which is what concatenates.
fn letters(s: &str) -> String {
    s.chars().filter(|c| c.is_ascii_alphabetic()).collect()
}

fn is_rotation(a: &str, b: &str) -> bool {
    a.len() == b.len() && format!("{a}{a}").contains(b)
}

/// Curvature correction of a shadowing orbit. The shadow's itinerary must be
/// a cyclic rotation of the concatenation of the two (rotated) itineraries.
pub fn curvature_correction(
    o1: &PeriodicOrbit,
    o2: &PeriodicOrbit,
    shadow: &PeriodicOrbit,
) -> Result<CurvatureCorrection> {
    if shadow.period != o1.period + o2.period {
        return Err(ChaosError::ItineraryMismatch(format!(
            "shadow period {} is not {} + {}",
            shadow.period, o1.period, o2.period
        )));
    }
    let (s1, s2, s12) = (
        letters(&piece_string(o1)?),
        letters(&piece_string(o2)?),
        letters(&piece_string(shadow)?),
    );
    let ok = (0..s1.len().max(1)).any(|r1| {
        (0..s2.len().max(1)).any(|r2| {
            let a = format!("{}{}", &s1[r1..], &s1[..r1]);
            let b = format!("{}{}", &s2[r2..], &s2[..r2]);
            is_rotation(&format!("{a}{b}"), &s12)
        })
    });
    if !ok {
        return Err(ChaosError::ItineraryMismatch(format!(
            "{s12} is not a concatenation of {s1} and {s2}"
        )));
    }
    let d = |o: &PeriodicOrbit| o.monodromy.det_minus_identity();
    let dets = [d(o1), d(o2), d(shadow)];
    let t = |o: &PeriodicOrbit| o.trace() - 2.0;
    let delta_w = shadow.action - o1.action - o2.action;
    Ok(CurvatureCorrection {
        delta_w,
        dets,
        det_ratio: dets[2] / (dets[0] * dets[1]),
        trace_defects: [t(o1), t(o2), t(shadow)],
        relative_defect: delta_w.abs() / shadow.action,
    })
}

/// Cartesian bounce points of a stadium orbit.
pub fn configuration_points(st: &Stadium, o: &PeriodicOrbit) -> Vec<[f64; 2]> {
    o.points.iter().map(|x| st.boundary(x.q).pos).collect()
}

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

/// Proper crossings between chords of a closed polygon, with their angles
/// in `(0, π/2]`. Chords that merely touch or overlap do not count.
pub fn self_crossings(pts: &[[f64; 2]]) -> Vec<f64> {
    let n = pts.len();
    let tol = 1e-9;
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (pts[i], pts[(i + 1) % n]);
            let (c, d) = (pts[j], pts[(j + 1) % n]);
            let (o1, o2) = (orient(a, b, c), orient(a, b, d));
            let (o3, o4) = (orient(c, d, a), orient(c, d, b));
            if o1 * o2 < -tol && o3 * o4 < -tol {
                let u = [b[0] - a[0], b[1] - a[1]];
                let v = [d[0] - c[0], d[1] - c[1]];
                let cos = (u[0] * v[0] + u[1] * v[1]).abs() / (u[0].hypot(u[1]) * v[0].hypot(v[1]));
                out.push(cos.min(1.0).acos());
            }
        }
    }
    out
}

/// Conjugate points (zeros of `∂q_t/∂p₀` along the flow) over one period,
/// from the transverse Jacobi field started at `(δx, δθ) = (0, 1)`.
pub fn caustic_count(st: &Stadium, o: &PeriodicOrbit) -> Result<usize> {
    let (mut x, mut th) = (0.0f64, 1.0f64);
    let mut count = 0;
    for pt in &o.points {
        let b = st.bounce(*pt)?;
        let x1 = x + b.chord * th;
        if x * x1 < 0.0 || x1 == 0.0 {
            count += 1;
        }
        x = x1;
        let cos_in = (1.0 - b.to.p * b.to.p).sqrt();
        th -= 2.0 * b.to_piece.curvature() * x / cos_in;
    }
    Ok(count)
}

/// A Sieber–Richter partner pair.
#[derive(Debug, Clone, PartialEq)]
pub struct SrPair {
    pub crossing: PeriodicOrbit,
    pub partner: PeriodicOrbit,
    /// `W_cross − W_noncross`.
    pub delta_w: f64,
    /// `Tr M_cross / Tr M_noncross`.
    pub trace_ratio: f64,
    /// Smallest self-crossing angle of the crossing orbit.
    pub crossing_angle: f64,
    pub caustics: (usize, usize),
}

/// Pairs obtained by reversing one loop (a cyclic block of bounces) of each
/// census orbit and re-solving the length functional. The member with more
/// self-crossings is the crossing orbit; pairs are sorted by period, then
/// `|ΔW|`.
pub fn sieber_richter_scan(
    map: &MapSystem,
    census: &FixedPointCensus,
    angle_max: f64,
) -> Result<Vec<SrPair>> {
    let st = match map {
        MapSystem::Stadium(st) => *st,
        _ => return Err(ChaosError::InvalidParameter("loop reversal needs the stadium".into())),
    };
    let mut seen = HashSet::new();
    let mut pairs = Vec::new();
    for o in census.orbits.iter().filter(|o| !o.is_marginal()) {
        let pts = configuration_points(&st, o);
        let n = pts.len();
        if n < 4 {
            continue;
        }
        for s in 0..n {
            let mut rot = pts.clone();
            rot.rotate_left(s);
            for k in 2..=n - 2 {
                let mut trial = rot.clone();
                trial[1..k + 1].reverse();
                let Ok(mut partner) = billiard_orbit_through(&st, &trial) else {
                    continue;
                };
                if (partner.action - o.action).abs() < 1e-9 || partner.is_marginal() {
                    continue;
                }
                let key = (
                    (o.action.min(partner.action) * 1e7).round() as i64,
                    (o.action.max(partner.action) * 1e7).round() as i64,
                );
                if seen.contains(&key) {
                    continue;
                }
                partner.itinerary = Some(stadium_itinerary_of_orbit(&st, &partner));
                partner.symmetry_class = Some(symmetry_classify(&st, &partner).class);
                let ca = self_crossings(&pts);
                let cb = self_crossings(&configuration_points(&st, &partner));
                let (cross, non, angles) = match ca.len().cmp(&cb.len()) {
                    std::cmp::Ordering::Greater => (o.clone(), partner, ca),
                    std::cmp::Ordering::Less => (partner, o.clone(), cb),
                    std::cmp::Ordering::Equal => continue,
                };
                let angle = angles.iter().copied().fold(f64::INFINITY, f64::min);
                if angle > angle_max {
                    continue;
                }
                seen.insert(key);
                pairs.push(SrPair {
                    delta_w: cross.action - non.action,
                    trace_ratio: cross.trace() / non.trace(),
                    crossing_angle: angle,
                    caustics: (caustic_count(&st, &cross)?, caustic_count(&st, &non)?),
                    crossing: cross,
                    partner: non,
                });
            }
        }
    }
    pairs.sort_by(|a, b| {
        a.crossing
            .period
            .cmp(&b.crossing.period)
            .then(a.delta_w.abs().total_cmp(&b.delta_w.abs()))
    });
    Ok(pairs)
}
