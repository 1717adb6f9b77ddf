//! Billiard periodic orbits as stationary points of the polygon length.
//!
//! Each bounce is constrained to the analytic continuation of one boundary
//! piece (full circle or full line); validity on the actual piece is checked
//! afterwards, so solutions that leave their piece are reported, not kept.

use std::f64::consts::PI;

use crate::dynamics::stadium::JOINT_TIE;
use crate::dynamics::{MapSystem, PhasePoint, Piece, Stadium};
use crate::error::{ChaosError, Result};

use super::{polish_cycle, PeriodicOrbit};

/// Position and derivative of a piece parameter (`θ` on arcs, `x` on edges).
pub fn piece_point(st: &Stadium, piece: Piece, u: f64) -> ([f64; 2], [f64; 2]) {
    let g = st.gamma;
    match piece {
        Piece::RightArc => ([g + u.cos(), u.sin()], [-u.sin(), u.cos()]),
        Piece::LeftArc => ([-g + u.cos(), u.sin()], [-u.sin(), u.cos()]),
        Piece::TopEdge => ([u, 1.0], [1.0, 0.0]),
        Piece::BottomEdge => ([u, -1.0], [1.0, 0.0]),
    }
}

/// Piece parameter of a Cartesian point (projected onto the piece).
pub fn piece_param(st: &Stadium, piece: Piece, pos: [f64; 2]) -> f64 {
    let g = st.gamma;
    match piece {
        Piece::RightArc => pos[1].atan2(pos[0] - g),
        Piece::LeftArc => pos[1].atan2(pos[0] + g).rem_euclid(2.0 * PI),
        Piece::TopEdge | Piece::BottomEdge => pos[0],
    }
}

/// Whether a parameter lies on the physical piece (arc-side tie rule at joints).
pub fn on_piece(st: &Stadium, piece: Piece, u: f64) -> bool {
    let g = st.gamma;
    match piece {
        Piece::RightArc => u.cos() >= -JOINT_TIE,
        Piece::LeftArc => u.cos() <= JOINT_TIE,
        Piece::TopEdge | Piece::BottomEdge => u.abs() < g - JOINT_TIE,
    }
}

fn unit(a: [f64; 2], b: [f64; 2]) -> ([f64; 2], f64) {
    let d = [b[0] - a[0], b[1] - a[1]];
    let l = d[0].hypot(d[1]);
    ([d[0] / l, d[1] / l], l)
}

pub fn polygon_length(st: &Stadium, pieces: &[Piece], u: &[f64]) -> f64 {
    let n = pieces.len();
    (0..n)
        .map(|i| {
            let a = piece_point(st, pieces[i], u[i]).0;
            let b = piece_point(st, pieces[(i + 1) % n], u[(i + 1) % n]).0;
            (b[0] - a[0]).hypot(b[1] - a[1])
        })
        .sum()
}

/// `∂L/∂u_i = t_i · (û_in − û_out)`.
pub fn length_gradient(st: &Stadium, pieces: &[Piece], u: &[f64]) -> Vec<f64> {
    let n = pieces.len();
    let pts: Vec<([f64; 2], [f64; 2])> = (0..n).map(|i| piece_point(st, pieces[i], u[i])).collect();
    (0..n)
        .map(|i| {
            let (prev, next) = (pts[(i + n - 1) % n].0, pts[(i + 1) % n].0);
            let (uin, _) = unit(prev, pts[i].0);
            let (uout, _) = unit(pts[i].0, next);
            let t = pts[i].1;
            t[0] * (uin[0] - uout[0]) + t[1] * (uin[1] - uout[1])
        })
        .collect()
}

fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f != 0.0 {
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// Newton on `∇L = 0` with a central-difference Hessian of the analytic gradient.
pub fn solve_length_functional(st: &Stadium, pieces: &[Piece], guess: &[f64]) -> Result<Vec<f64>> {
    let n = pieces.len();
    if n < 2 || guess.len() != n {
        return Err(ChaosError::InvalidParameter("need ≥ 2 bounces with one guess each".into()));
    }
    let mut u = guess.to_vec();
    let h = 1e-6;
    for _ in 0..100 {
        let g = length_gradient(st, pieces, &u);
        let gn = g.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if !gn.is_finite() {
            break;
        }
        if gn < 1e-14 {
            return Ok(u);
        }
        let mut hess = vec![vec![0.0; n]; n];
        for j in 0..n {
            let mut up = u.clone();
            let mut dn = u.clone();
            up[j] += h;
            dn[j] -= h;
            let gp = length_gradient(st, pieces, &up);
            let gm = length_gradient(st, pieces, &dn);
            for i in 0..n {
                hess[i][j] = (gp[i] - gm[i]) / (2.0 * h);
            }
        }
        for i in 0..n {
            for j in 0..i {
                let s = 0.5 * (hess[i][j] + hess[j][i]);
                hess[i][j] = s;
                hess[j][i] = s;
            }
        }
        let d = solve_dense(hess, g.iter().map(|v| -v).collect())
            .ok_or(ChaosError::Singular("length Hessian"))?;
        let big = d.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let scale = if big > 0.2 { 0.2 / big } else { 1.0 };
        for i in 0..n {
            u[i] += d[i] * scale;
        }
        if big < 1e-15 {
            return Ok(u);
        }
    }
    let gn = length_gradient(st, pieces, &u)
        .iter()
        .map(|v| v.abs())
        .fold(0.0, f64::max);
    if gn < 1e-10 {
        Ok(u)
    } else {
        Err(ChaosError::NoConvergence(format!("length gradient {gn:e}")))
    }
}

/// Birkhoff coordinates of a polygon whose vertices lie on their pieces.
pub fn polygon_phase_points(st: &Stadium, pieces: &[Piece], u: &[f64]) -> Result<Vec<PhasePoint>> {
    let n = pieces.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        if !on_piece(st, pieces[i], u[i]) {
            return Err(ChaosError::ItineraryMismatch(format!(
                "bounce {i} leaves its boundary piece {:?}",
                pieces[i]
            )));
        }
        let a = piece_point(st, pieces[i], u[i]).0;
        let b = piece_point(st, pieces[(i + 1) % n], u[(i + 1) % n]).0;
        let (dir, _) = unit(a, b);
        let q = st.arclength_on(a, pieces[i]);
        let t = st.boundary(q).tangent;
        // the frame at an exact joint is the arc's; recompute from the piece
        let t = match pieces[i] {
            Piece::RightArc | Piece::LeftArc => {
                let tt = piece_point(st, pieces[i], u[i]).1;
                [tt[0], tt[1]]
            }
            _ => t,
        };
        let p = dir[0] * t[0] + dir[1] * t[1];
        out.push(PhasePoint::new(q, p));
    }
    Ok(out)
}

/// Solve for the billiard orbit with the given piece sequence and build it.
pub fn billiard_orbit(st: &Stadium, pieces: &[Piece], guess: &[f64]) -> Result<PeriodicOrbit> {
    let u = solve_length_functional(st, pieces, guess)?;
    let pts = polygon_phase_points(st, pieces, &u)?;
    let map = MapSystem::Stadium(*st);
    let pts = polish_cycle(&map, &pts, 20)?;
    let mut o = PeriodicOrbit::from_points(&map, pts)?;
    o.itinerary = Some(crate::symbolic::stadium_itinerary_of_orbit(st, &o));
    Ok(o)
}

/// Orbit through approximate Cartesian bounce points; pieces inferred.
pub fn billiard_orbit_through(st: &Stadium, points: &[[f64; 2]]) -> Result<PeriodicOrbit> {
    let g = st.gamma;
    let pieces: Vec<Piece> = points
        .iter()
        .map(|p| {
            if p[0] > g {
                Piece::RightArc
            } else if p[0] < -g {
                Piece::LeftArc
            } else if p[1] > 0.0 {
                Piece::TopEdge
            } else {
                Piece::BottomEdge
            }
        })
        .collect();
    let guess: Vec<f64> = points
        .iter()
        .zip(&pieces)
        .map(|(p, pc)| piece_param(st, *pc, *p))
        .collect();
    billiard_orbit(st, &pieces, &guess)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn horizontal_from_length_functional() {
        let st = Stadium::new(1.0).unwrap();
        let o = billiard_orbit(&st, &[Piece::RightArc, Piece::LeftArc], &[0.1, PI - 0.1]).unwrap();
        assert!((o.action - 8.0).abs() < 1e-12);
        assert!((o.trace() - 34.0).abs() < 1e-9);
    }

    #[test]
    fn gradient_matches_finite_difference() {
        let st = Stadium::new(1.0).unwrap();
        let pieces = [Piece::RightArc, Piece::TopEdge, Piece::LeftArc, Piece::BottomEdge];
        let u = [0.3, 0.2, 2.9, -0.4];
        let g = length_gradient(&st, &pieces, &u);
        for j in 0..4 {
            let mut a = u;
            let mut b = u;
            a[j] += 1e-6;
            b[j] -= 1e-6;
            let fd = (polygon_length(&st, &pieces, &a) - polygon_length(&st, &pieces, &b)) / 2e-6;
            assert!((fd - g[j]).abs() < 1e-7);
        }
    }
}
