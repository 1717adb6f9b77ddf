//! Manifold intersections, MacKay–Meiss–Percival action differences and
//! phase-space areas of manifold circuits.

use std::collections::HashMap;

use crate::dynamics::{MapSystem, PhasePoint};
use crate::error::{ChaosError, Result};
use crate::orbits::PeriodicOrbit;

use super::manifold::ManifoldSegment;

/// Crossings flatter than this (rad) are flagged as near-tangential.
pub const TANGENTIAL_ANGLE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct HomoclinicPoint {
    pub location: PhasePoint,
    /// Manifold parameters on `U` and `S`.
    pub sigma_u: f64,
    pub sigma_s: f64,
    /// Polyline segment indices of the crossing.
    pub u_index: usize,
    pub s_index: usize,
    /// Crossing angle (rad, in `[0, π/2]`).
    pub angle: f64,
    pub tangential: bool,
    /// Gap between the two local curve fits at the refined location.
    pub residual: f64,
    pub relative_action: Option<f64>,
}

fn seg_bbox_keys(a: PhasePoint, d: [f64; 2], cell: f64) -> Vec<(i64, i64)> {
    let (q0, q1) = (a.q.min(a.q + d[0]), a.q.max(a.q + d[0]));
    let (p0, p1) = (a.p.min(a.p + d[1]), a.p.max(a.p + d[1]));
    let mut keys = Vec::new();
    for i in (q0 / cell).floor() as i64..=(q1 / cell).floor() as i64 {
        for j in (p0 / cell).floor() as i64..=(p1 / cell).floor() as i64 {
            keys.push((i, j));
        }
    }
    keys
}

/// Transversal crossings of two polylines, refined on the true map and
/// ordered along `u`.
pub fn find_homoclinic_points(u: &ManifoldSegment, s: &ManifoldSegment) -> Result<Vec<HomoclinicPoint>> {
    let map = u.map;
    let cell = 0.02;
    let (per_q, per_p) = map.periods();
    let norm = |x: PhasePoint| map.normalize(x);
    let mut index: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for k in 0..s.points.len().saturating_sub(1) {
        let a = norm(s.points[k]);
        let d = [s.points[k + 1].q - s.points[k].q, s.points[k + 1].p - s.points[k].p];
        if d[0].hypot(d[1]) > 0.5 {
            continue;
        }
        for key in seg_bbox_keys(a, d, cell) {
            index.entry(key).or_default().push(k);
        }
    }
    let wrap_shift = |key: (i64, i64)| -> Vec<(i64, i64)> {
        let mut out = vec![key];
        if let Some(per) = per_q {
            let m = (per / cell).round() as i64;
            for dm in [-m - 1, -m, -m + 1, m - 1, m, m + 1] {
                out.push((key.0 + dm, key.1));
            }
        }
        if let Some(per) = per_p {
            let m = (per / cell).round() as i64;
            for dm in [-m - 1, -m, -m + 1, m - 1, m, m + 1] {
                out.push((key.0, key.1 + dm));
            }
        }
        out
    };

    let mut raw = Vec::new();
    for k in 1..u.points.len().saturating_sub(1) {
        let a = norm(u.points[k]);
        let du = [u.points[k + 1].q - u.points[k].q, u.points[k + 1].p - u.points[k].p];
        if du[0].hypot(du[1]) > 0.5 {
            continue;
        }
        let mut cand: Vec<usize> = Vec::new();
        for key in seg_bbox_keys(a, du, cell) {
            for kk in wrap_shift(key) {
                if let Some(ids) = index.get(&kk) {
                    cand.extend_from_slice(ids);
                }
            }
        }
        cand.sort_unstable();
        cand.dedup();
        for j in cand {
            if j == 0 {
                continue;
            }
            let c = map.diff(s.points[j], u.points[k]);
            let ds = [s.points[j + 1].q - s.points[j].q, s.points[j + 1].p - s.points[j].p];
            let den = du[0] * ds[1] - du[1] * ds[0];
            if den == 0.0 {
                continue;
            }
            // a + t du = c' + r ds with a at the origin
            let t = (c[0] * ds[1] - c[1] * ds[0]) / den;
            let r = (c[0] * du[1] - c[1] * du[0]) / den;
            if (0.0..1.0).contains(&t) && (0.0..1.0).contains(&r) {
                raw.push((k, j, t, r));
            }
        }
    }

    let mut out = Vec::new();
    for (k, j, t, r) in raw {
        let su = u.params[k] + t * (u.params[k + 1] - u.params[k]);
        let ss = s.params[j] + r * (s.params[j + 1] - s.params[j]);
        let du = [u.points[k + 1].q - u.points[k].q, u.points[k + 1].p - u.points[k].p];
        let ds = [s.points[j + 1].q - s.points[j].q, s.points[j + 1].p - s.points[j].p];
        let rate_u = du[0].hypot(du[1]) / (u.params[k + 1] - u.params[k]);
        let rate_s = ds[0].hypot(ds[1]) / (s.params[j + 1] - s.params[j]);
        let (su, ss, location, res) = refine_crossing(u, s, su, ss, rate_u, rate_s)?;
        let cos = (du[0] * ds[0] + du[1] * ds[1]).abs() / (du[0].hypot(du[1]) * ds[0].hypot(ds[1]));
        let angle = cos.min(1.0).acos();
        out.push(HomoclinicPoint {
            location,
            sigma_u: su,
            sigma_s: ss,
            u_index: k,
            s_index: j,
            angle,
            tangential: angle < TANGENTIAL_ANGLE,
            residual: res,
            relative_action: None,
        });
    }
    out.sort_by(|a, b| a.sigma_u.total_cmp(&b.sigma_u));
    out.dedup_by(|a, b| (a.sigma_u - b.sigma_u).abs() < 1e-12 && (a.sigma_s - b.sigma_s).abs() < 1e-12);
    Ok(out)
}

/// Local quadratic through three manifold points around `σ`, with the
/// parameter step chosen to give roughly `spacing` between the points.
fn local_arc(m: &ManifoldSegment, sigma: f64, dsig: f64) -> Result<[PhasePoint; 3]> {
    let b = m.point_at(sigma)?;
    let a = m.point_at(sigma - dsig)?;
    let c = m.point_at(sigma + dsig)?;
    let map = m.map;
    let da = map.diff(a, b);
    let dc = map.diff(c, b);
    Ok([
        PhasePoint::new(b.q + da[0], b.p + da[1]),
        b,
        PhasePoint::new(b.q + dc[0], b.p + dc[1]),
    ])
}

fn quad(arc: &[PhasePoint; 3], t: f64) -> ([f64; 2], [f64; 2]) {
    let [a, b, c] = arc;
    let v = [0.5 * (c.q - a.q), 0.5 * (c.p - a.p)];
    let w = [0.5 * (a.q - 2.0 * b.q + c.q), 0.5 * (a.p - 2.0 * b.p + c.p)];
    (
        [b.q + t * v[0] + t * t * w[0], b.p + t * v[1] + t * t * w[1]],
        [v[0] + 2.0 * t * w[0], v[1] + 2.0 * t * w[1]],
    )
}

/// Intersect two local quadratics; returns `(t, r, point)`.
fn intersect_arcs(u: &[PhasePoint; 3], s: &[PhasePoint; 3], map: &MapSystem) -> Option<(f64, f64, [f64; 2])> {
    // express s relative to u's centre so the chart wrap is handled once
    let off = map.diff(s[1], u[1]);
    let shift = [s[1].q - u[1].q - off[0], s[1].p - u[1].p - off[1]];
    let s = [
        PhasePoint::new(s[0].q - shift[0], s[0].p - shift[1]),
        PhasePoint::new(s[1].q - shift[0], s[1].p - shift[1]),
        PhasePoint::new(s[2].q - shift[0], s[2].p - shift[1]),
    ];
    let (mut t, mut r) = (0.0, 0.0);
    for _ in 0..50 {
        let (xu, du) = quad(u, t);
        let (xs, ds) = quad(&s, r);
        let f = [xu[0] - xs[0], xu[1] - xs[1]];
        let det = -du[0] * ds[1] + du[1] * ds[0];
        if det == 0.0 {
            return None;
        }
        let dt = -(-ds[1] * f[0] + ds[0] * f[1]) / det;
        let dr = -(-du[1] * f[0] + du[0] * f[1]) / det;
        t += dt;
        r += dr;
        if dt.abs() + dr.abs() < 1e-15 {
            break;
        }
    }
    let x = quad(u, t).0;
    (t.is_finite() && r.is_finite()).then_some((t, r, x))
}

/// Geometric refinement of a polyline crossing. Points computed far out on a
/// manifold are accurate across it but their parameter is not (rounding is
/// stretched along the curve), so the crossing is located by intersecting
/// local quadratics through on-manifold points at shrinking spacing.
fn refine_crossing(
    u: &ManifoldSegment,
    s: &ManifoldSegment,
    mut su: f64,
    mut ss: f64,
    rate_u: f64,
    rate_s: f64,
) -> Result<(f64, f64, PhasePoint, f64)> {
    let map = u.map;
    let mut loc = u.point_at(su)?;
    let mut residual = f64::INFINITY;
    for spacing in [1e-4, 1e-5, 1e-6] {
        let (hu, hs) = (spacing / rate_u, spacing / rate_s);
        for _ in 0..4 {
            let au = local_arc(u, su, hu)?;
            let as_ = local_arc(s, ss, hs)?;
            let Some((t, r, x)) = intersect_arcs(&au, &as_, &map) else {
                break;
            };
            su += t * hu;
            ss += r * hs;
            loc = map.normalize(PhasePoint::new(x[0], x[1]));
            // distance between the two chords' predictions at the solution
            let xs = quad(&as_, r).0;
            let d = map.diff(PhasePoint::new(xs[0], xs[1]), PhasePoint::new(x[0], x[1]));
            residual = d[0].hypot(d[1]);
            if t.abs() < 0.5 && r.abs() < 0.5 {
                break;
            }
        }
    }
    Ok((su, ss, loc, residual))
}

/// Limiting action difference of a homoclinic orbit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MmpResult {
    /// `W(orbit) − W(homoclinic)` over matched step counts, in the limit.
    pub delta_w: f64,
    pub steps_back: usize,
    pub steps_forward: usize,
    /// Magnitude of the last increment on either side.
    pub last_increment: f64,
}

pub const MMP_MAX_STEPS: usize = 200;

fn nearest_index(map: &MapSystem, orbit: &PeriodicOrbit, x: PhasePoint) -> (usize, f64) {
    orbit
        .points
        .iter()
        .enumerate()
        .map(|(i, y)| (i, map.distance(x, *y)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap()
}

/// `ΔW = lim Σ_j [a(x_{φ(j)}) − a(Tʲh)]` over the homoclinic orbit through
/// `h`, with `a` the one-step action and `x_{φ(j)}` the orbit point it
/// shadows. Each side stops once it sits within `1e-6` of the orbit and the
/// increment is below `1e-12`.
pub fn mmp_action_difference(map: &MapSystem, orbit: &PeriodicOrbit, h: PhasePoint) -> Result<MmpResult> {
    let n = orbit.period;
    let step_actions: Vec<f64> = orbit
        .points
        .iter()
        .map(|x| map.step(*x).map(|r| r.1))
        .collect::<Result<_>>()?;

    // backward: points T^{-k} h, k = 1..
    let mut back = Vec::new();
    let mut x = h;
    let mut converged_back = false;
    for _ in 0..MMP_MAX_STEPS {
        x = map.step_inverse(x)?;
        back.push(x);
        let (_, d) = nearest_index(map, orbit, x);
        if d < 1e-6 && back.len() > n {
            let (y, a) = map.step(x)?;
            let _ = y;
            let (i, _) = nearest_index(map, orbit, x);
            if (a - step_actions[i]).abs() < 1e-12 {
                converged_back = true;
                break;
            }
        }
    }
    let mut fwd = vec![h];
    let mut x = h;
    let mut converged_fwd = false;
    for _ in 0..MMP_MAX_STEPS {
        x = map.step(x)?.0;
        fwd.push(x);
        let (i, d) = nearest_index(map, orbit, x);
        if d < 1e-6 && fwd.len() > n {
            let a = map.step(x)?.1;
            if (a - step_actions[i]).abs() < 1e-12 {
                converged_fwd = true;
                break;
            }
        }
    }
    if !converged_back || !converged_fwd {
        return Err(ChaosError::NoConvergence(format!(
            "homoclinic action sum not converged within {MMP_MAX_STEPS} steps"
        )));
    }
    // phases from the far ends
    let kb = back.len();
    let (ib, _) = nearest_index(map, orbit, back[kb - 1]);
    let mut delta = 0.0;
    let mut last = 0.0f64;
    // back[m] = T^{-(m+1)} h; its phase is ib + (kb - 1 - m)
    for (m, x) in back.iter().enumerate() {
        let phase = (ib + (kb - 1 - m)) % n;
        let a = map.step(*x)?.1;
        let inc = step_actions[phase] - a;
        if m == kb - 1 {
            last = inc.abs();
        }
        delta += inc;
    }
    let kf = fwd.len();
    let (jf, _) = nearest_index(map, orbit, fwd[kf - 1]);
    // fwd[m] = T^m h; the last step is the converged one
    for (m, x) in fwd.iter().enumerate() {
        let phase = (jf + n * (kf + 1) - (kf - 1 - m)) % n;
        let a = map.step(*x)?.1;
        let inc = step_actions[phase] - a;
        if m == kf - 1 {
            last = last.max(inc.abs());
        }
        delta += inc;
    }
    Ok(MmpResult {
        delta_w: delta,
        steps_back: kb,
        steps_forward: kf,
        last_increment: last,
    })
}

/// `∮ p dq` around a circuit given as consecutive paths; each path must start
/// where the previous one ended (within `close_tol`, chart-aware). Periodic
/// coordinates are unfolded for continuity.
pub fn area_between_manifolds(map: &MapSystem, paths: &[Vec<PhasePoint>], close_tol: f64) -> Result<f64> {
    let paths: Vec<&Vec<PhasePoint>> = paths.iter().filter(|p| !p.is_empty()).collect();
    if paths.is_empty() {
        return Ok(0.0);
    }
    for k in 0..paths.len() {
        let end = *paths[k].last().unwrap();
        let start = paths[(k + 1) % paths.len()][0];
        let gap = map.distance(end, start);
        if gap > close_tol {
            return Err(ChaosError::OpenCircuit { gap });
        }
    }
    let mut area = 0.0;
    let mut prev = paths[0][0];
    for path in &paths {
        for x in path.iter() {
            let d = map.diff(*x, prev);
            let cur = PhasePoint::new(prev.q + d[0], prev.p + d[1]);
            area += 0.5 * (prev.p + cur.p) * (cur.q - prev.q);
            prev = cur;
        }
    }
    // close back onto the start
    let d = map.diff(paths[0][0], prev);
    area += 0.5 * (prev.p + prev.p + d[1]) * d[0];
    Ok(area)
}
