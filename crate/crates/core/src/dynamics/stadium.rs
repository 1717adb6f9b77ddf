//! Stadium billiard in Birkhoff coordinates.
//!
//! Unit-radius semicircles centred at `(±γ, 0)` joined by straight edges
//! `y = ±1`, `|x| ≤ γ`. Arclength `q` starts at the right apex `(γ+1, 0)`
//! and increases counterclockwise; `p` is the component of the unit
//! outgoing velocity along the counterclockwise tangent.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{ChaosError, Result};
use crate::linalg::Mat2;

use super::PhasePoint;

/// Joint tie-breaking width: hits this close to a joint belong to the arc.
pub const JOINT_TIE: f64 = 1e-13;

/// Boundary pieces in counterclockwise order from the right apex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Piece {
    RightArc,
    TopEdge,
    LeftArc,
    BottomEdge,
}

impl Piece {
    pub fn is_arc(self) -> bool {
        matches!(self, Piece::RightArc | Piece::LeftArc)
    }

    pub fn curvature(self) -> f64 {
        if self.is_arc() {
            1.0
        } else {
            0.0
        }
    }
}

/// Cartesian description of a boundary point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub pos: [f64; 2],
    /// Unit counterclockwise tangent.
    pub tangent: [f64; 2],
    /// Unit inward normal.
    pub normal: [f64; 2],
    pub piece: Piece,
}

/// One bounce with the quantities needed for its Jacobian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounce {
    pub to: PhasePoint,
    pub chord: f64,
    pub from_piece: Piece,
    pub to_piece: Piece,
    pub hit: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stadium {
    pub gamma: f64,
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

impl Stadium {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(ChaosError::InvalidParameter(format!(
                "stadium requires gamma > 0, got {gamma}"
            )));
        }
        Ok(Self { gamma })
    }

    pub fn perimeter(&self) -> f64 {
        2.0 * PI + 4.0 * self.gamma
    }

    /// Arclength of the four joints: top-right, top-left, bottom-left, bottom-right.
    pub fn joints(&self) -> [f64; 4] {
        let g = self.gamma;
        [
            FRAC_PI_2,
            FRAC_PI_2 + 2.0 * g,
            1.5 * PI + 2.0 * g,
            1.5 * PI + 4.0 * g,
        ]
    }

    pub fn wrap(&self, q: f64) -> f64 {
        let per = self.perimeter();
        let r = q.rem_euclid(per);
        if r >= per {
            0.0
        } else {
            r
        }
    }

    pub fn piece_of(&self, q: f64) -> Piece {
        let q = self.wrap(q);
        let j = self.joints();
        if q < j[0] || q >= j[3] {
            Piece::RightArc
        } else if q < j[1] {
            Piece::TopEdge
        } else if q < j[2] {
            Piece::LeftArc
        } else {
            Piece::BottomEdge
        }
    }

    /// Cartesian point, tangent and normal at arclength `q`.
    pub fn boundary(&self, q: f64) -> BoundaryPoint {
        let g = self.gamma;
        let q = self.wrap(q);
        let j = self.joints();
        let piece = self.piece_of(q);
        let (pos, tangent) = match piece {
            Piece::RightArc => {
                let th = if q < j[0] { q } else { q - 4.0 * g };
                let (s, c) = th.sin_cos();
                ([g + c, s], [-s, c])
            }
            Piece::TopEdge => ([g - (q - j[0]), 1.0], [-1.0, 0.0]),
            Piece::LeftArc => {
                let th = q - 2.0 * g;
                let (s, c) = th.sin_cos();
                ([-g + c, s], [-s, c])
            }
            Piece::BottomEdge => ([-g + (q - j[2]), -1.0], [1.0, 0.0]),
        };
        BoundaryPoint {
            pos,
            tangent,
            normal: [-tangent[1], tangent[0]],
            piece,
        }
    }

    /// Arclength of a Cartesian point known to lie on `piece`.
    pub fn arclength_on(&self, pos: [f64; 2], piece: Piece) -> f64 {
        let g = self.gamma;
        let j = self.joints();
        let q = match piece {
            Piece::RightArc => {
                let th = pos[1].atan2(pos[0] - g);
                if th >= 0.0 {
                    th
                } else {
                    self.perimeter() + th
                }
            }
            Piece::TopEdge => j[0] + (g - pos[0]),
            Piece::LeftArc => pos[1].atan2(pos[0] + g) .rem_euclid(2.0 * PI) + 2.0 * g,
            Piece::BottomEdge => j[2] + (pos[0] + g),
        };
        self.wrap(q)
    }

    /// Identify the piece of a Cartesian boundary point and return its arclength.
    pub fn to_arclength(&self, pos: [f64; 2]) -> Result<f64> {
        let g = self.gamma;
        let piece = if pos[0] >= g - JOINT_TIE {
            Piece::RightArc
        } else if pos[0] <= -g + JOINT_TIE {
            Piece::LeftArc
        } else if pos[1] > 0.0 {
            Piece::TopEdge
        } else {
            Piece::BottomEdge
        };
        let on = match piece {
            Piece::RightArc => ((pos[0] - g).hypot(pos[1]) - 1.0).abs(),
            Piece::LeftArc => ((pos[0] + g).hypot(pos[1]) - 1.0).abs(),
            Piece::TopEdge | Piece::BottomEdge => (pos[1].abs() - 1.0).abs(),
        };
        if on > 1e-9 {
            return Err(ChaosError::OutOfChart {
                q: pos[0],
                p: pos[1],
                chart: "stadium boundary (Cartesian)",
            });
        }
        Ok(self.arclength_on(pos, piece))
    }

    /// Unit outgoing velocity for a phase point.
    pub fn velocity(&self, x: PhasePoint) -> Result<(BoundaryPoint, [f64; 2])> {
        if !(x.q.is_finite() && x.p.is_finite()) {
            return Err(ChaosError::NonFinite("stadium phase point"));
        }
        if x.p.abs() >= 1.0 {
            return Err(ChaosError::OutOfChart {
                q: x.q,
                p: x.p,
                chart: "stadium",
            });
        }
        let b = self.boundary(x.q);
        let c = (1.0 - x.p * x.p).sqrt();
        let v = [
            x.p * b.tangent[0] + c * b.normal[0],
            x.p * b.tangent[1] + c * b.normal[1],
        ];
        Ok((b, v))
    }

    /// Next boundary intersection of the outgoing ray, with specular reflection.
    pub fn bounce(&self, x: PhasePoint) -> Result<Bounce> {
        let g = self.gamma;
        let (b, v) = self.velocity(x)?;
        let start = b.pos;
        let mut best: Option<(f64, Piece)> = None;
        let mut consider = |s: f64, piece: Piece| {
            if s > 1e-14 && best.map_or(true, |(bs, _)| s < bs) {
                best = Some((s, piece));
            }
        };
        // straight edges
        for (piece, y_edge) in [(Piece::TopEdge, 1.0), (Piece::BottomEdge, -1.0)] {
            if piece == b.piece {
                continue;
            }
            let toward = if y_edge > 0.0 { v[1] > 0.0 } else { v[1] < 0.0 };
            if !toward {
                continue;
            }
            let s = (y_edge - start[1]) / v[1];
            let xh = start[0] + s * v[0];
            if xh.abs() < g - JOINT_TIE {
                consider(s, piece);
            }
        }
        // semicircles
        for (piece, cx) in [(Piece::RightArc, g), (Piece::LeftArc, -g)] {
            let d = [start[0] - cx, start[1]];
            let bb = dot(d, v);
            let cc = if piece == b.piece { 0.0 } else { dot(d, d) - 1.0 };
            let disc = bb * bb - cc;
            if disc < 0.0 {
                continue;
            }
            let s = -bb + disc.sqrt();
            let xh = start[0] + s * v[0];
            let on_side = if cx > 0.0 {
                xh >= g - JOINT_TIE
            } else {
                xh <= -g + JOINT_TIE
            };
            if on_side {
                consider(s, piece);
            }
        }
        let (s, piece) = best.ok_or(ChaosError::RayTrace { q: x.q, p: x.p })?;
        let hit = [start[0] + s * v[0], start[1] + s * v[1]];
        let q_new = self.arclength_on(hit, piece);
        let nb = self.boundary_on(hit, piece);
        let p_new = dot(v, nb.tangent);
        if !(p_new.abs() < 1.0) {
            return Err(ChaosError::Tangency { q: q_new });
        }
        Ok(Bounce {
            to: PhasePoint::new(q_new, p_new),
            chord: s,
            from_piece: b.piece,
            to_piece: piece,
            hit,
        })
    }

    /// Boundary frame at a Cartesian point of a known piece (avoids re-deriving the piece
    /// from arclength right at a joint).
    fn boundary_on(&self, pos: [f64; 2], piece: Piece) -> BoundaryPoint {
        let g = self.gamma;
        let tangent = match piece {
            Piece::RightArc => {
                let d = [pos[0] - g, pos[1]];
                let n = d[0].hypot(d[1]);
                [-d[1] / n, d[0] / n]
            }
            Piece::LeftArc => {
                let d = [pos[0] + g, pos[1]];
                let n = d[0].hypot(d[1]);
                [-d[1] / n, d[0] / n]
            }
            Piece::TopEdge => [-1.0, 0.0],
            Piece::BottomEdge => [1.0, 0.0],
        };
        BoundaryPoint {
            pos,
            tangent,
            normal: [-tangent[1], tangent[0]],
            piece,
        }
    }

    pub fn step(&self, x: PhasePoint) -> Result<(PhasePoint, f64)> {
        let b = self.bounce(x)?;
        Ok((b.to, b.chord))
    }

    /// Inverse bounce via time reversal `R (q, p) = (q, −p)`.
    pub fn step_inverse(&self, x: PhasePoint) -> Result<(PhasePoint, f64)> {
        let b = self.bounce(PhasePoint::new(x.q, -x.p))?;
        Ok((PhasePoint::new(b.to.q, -b.to.p), b.chord))
    }

    /// Analytic one-bounce Jacobian in `(q, p)` ordering.
    pub fn jacobian(&self, x: PhasePoint, b: &Bounce) -> Mat2 {
        let c0 = (1.0 - x.p * x.p).sqrt();
        let c1 = (1.0 - b.to.p * b.to.p).sqrt();
        let k0 = b.from_piece.curvature();
        let k1 = b.to_piece.curvature();
        let l = b.chord;
        let a = c0 - l * k0;
        Mat2::new(
            -a / c1,
            -l / (c0 * c1),
            c1 * k0 + k1 * a,
            (k1 * l - c1) / c0,
        )
    }

    pub fn step_jacobian(&self, x: PhasePoint) -> Result<(PhasePoint, f64, Mat2)> {
        let b = self.bounce(x)?;
        let j = self.jacobian(x, &b);
        Ok((b.to, b.chord, j))
    }

    /// Symmetry images of a phase point: time reversal, x-reflection, y-reflection.
    pub fn time_reversed(&self, x: PhasePoint) -> PhasePoint {
        PhasePoint::new(x.q, -x.p)
    }

    /// Reflection `x → −x` (about the y-axis) reverses orientation.
    pub fn mirror_x(&self, x: PhasePoint) -> PhasePoint {
        PhasePoint::new(self.wrap(PI + 2.0 * self.gamma - x.q), -x.p)
    }

    /// Reflection `y → −y` (about the x-axis) reverses orientation.
    pub fn mirror_y(&self, x: PhasePoint) -> PhasePoint {
        PhasePoint::new(self.wrap(-x.q), -x.p)
    }

    /// Named reference points.
    pub fn right_apex(&self) -> f64 {
        0.0
    }
    pub fn left_apex(&self) -> f64 {
        PI + 2.0 * self.gamma
    }
    pub fn top_mid(&self) -> f64 {
        FRAC_PI_2 + self.gamma
    }
    pub fn bottom_mid(&self) -> f64 {
        1.5 * PI + 3.0 * self.gamma
    }

    /// Signed chart difference `a − b` reduced to `(−P/2, P/2]`.
    pub fn q_diff(&self, a: f64, b: f64) -> f64 {
        let per = self.perimeter();
        let mut d = (a - b).rem_euclid(per);
        if d > 0.5 * per {
            d -= per;
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn horizontal_and_bouncing_ball() {
        let st = Stadium::new(1.0).unwrap();
        let (y, l) = st.step(PhasePoint::new(0.0, 0.0)).unwrap();
        assert!((y.q - st.left_apex()).abs() < 1e-12 && y.p.abs() < 1e-12);
        assert!((l - 4.0).abs() < 1e-12);
        let (y, l) = st.step(PhasePoint::new(st.bottom_mid(), 0.0)).unwrap();
        assert!((y.q - st.top_mid()).abs() < 1e-12 && y.p.abs() < 1e-12);
        assert!((l - 2.0).abs() < 1e-12);
    }

    #[test]
    fn horizontal_jacobian() {
        let st = Stadium::new(1.0).unwrap();
        let (_, _, j) = st.step_jacobian(PhasePoint::new(0.0, 0.0)).unwrap();
        assert!(j.max_abs_diff(&Mat2::new(3.0, -4.0, -2.0, 3.0)) < 1e-12);
    }

    #[test]
    fn inverse_undoes_step() {
        let st = Stadium::new(1.0).unwrap();
        let x = PhasePoint::new(5.0, 0.04);
        let (y, _) = st.step(x).unwrap();
        let (z, _) = st.step_inverse(y).unwrap();
        assert!(st.q_diff(z.q, x.q).abs() < 1e-12 && (z.p - x.p).abs() < 1e-12);
    }

    #[test]
    fn cartesian_round_trip() {
        let st = Stadium::new(1.3).unwrap();
        for k in 0..200 {
            let q = st.perimeter() * k as f64 / 200.0;
            let b = st.boundary(q);
            let back = st.to_arclength(b.pos).unwrap();
            assert!(st.q_diff(back, q).abs() < 1e-12, "q = {q}, back = {back}");
        }
    }
}
