use crate::dynamics::{PhasePoint, Stadium};

use super::PeriodicOrbit;

/// The eight stadium symmetries as compositions of time reversal `T`,
/// reflection `X` (x → −x) and reflection `Y` (y → −y).
pub const GROUP: [(&str, bool, bool, bool); 8] = [
    ("I", false, false, false),
    ("T", true, false, false),
    ("X", false, true, false),
    ("Y", false, false, true),
    ("XY", false, true, true),
    ("TX", true, true, false),
    ("TY", true, false, true),
    ("TXY", true, true, true),
];

pub fn apply(st: &Stadium, x: PhasePoint, t: bool, mx: bool, my: bool) -> PhasePoint {
    let mut y = x;
    if mx {
        y = st.mirror_x(y);
    }
    if my {
        y = st.mirror_y(y);
    }
    if t {
        y = st.time_reversed(y);
    }
    y
}

/// Image of an orbit's point list under a group element, re-ordered so it is
/// again a forward orbit.
pub fn image(st: &Stadium, o: &PeriodicOrbit, t: bool, mx: bool, my: bool) -> Vec<PhasePoint> {
    let d = o.primitive_period;
    let mut pts: Vec<PhasePoint> = o.points[..d].iter().map(|x| apply(st, *x, t, mx, my)).collect();
    if t {
        pts.reverse();
    }
    let mut out = Vec::with_capacity(o.period);
    for _ in 0..o.period / d {
        out.extend_from_slice(&pts);
    }
    out
}

/// All seven non-trivial images.
pub fn images(st: &Stadium, o: &PeriodicOrbit) -> Vec<Vec<PhasePoint>> {
    GROUP[1..]
        .iter()
        .map(|&(_, t, mx, my)| image(st, o, t, mx, my))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryInfo {
    pub time_reversal: bool,
    pub x_reflection: bool,
    pub y_reflection: bool,
    /// Names of the stabilizer elements (including `I`).
    pub stabilizer: Vec<&'static str>,
    pub multiplicity: usize,
    /// Stabilizer without the identity, `+`-joined, or `none`.
    pub class: String,
}

fn set_distance(st: &Stadium, a: &[PhasePoint], b: &[PhasePoint]) -> f64 {
    let per = st.perimeter();
    let d = |x: &PhasePoint, y: &PhasePoint| {
        let mut dq = (x.q - y.q).rem_euclid(per);
        if dq > 0.5 * per {
            dq -= per;
        }
        dq.hypot(x.p - y.p)
    };
    a.iter()
        .map(|x| b.iter().map(|y| d(x, y)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

pub fn symmetry_classify(st: &Stadium, o: &PeriodicOrbit) -> SymmetryInfo {
    let d = o.primitive_period;
    let pts = &o.points[..d];
    let mut stabilizer = Vec::new();
    for &(name, t, mx, my) in GROUP.iter() {
        let img: Vec<PhasePoint> = pts.iter().map(|x| apply(st, *x, t, mx, my)).collect();
        if set_distance(st, &img, pts) < 1e-8 {
            stabilizer.push(name);
        }
    }
    let has = |n: &str| stabilizer.contains(&n);
    let class = if stabilizer.len() == 1 {
        "none".to_string()
    } else {
        stabilizer[1..].join("+")
    };
    SymmetryInfo {
        time_reversal: has("T"),
        x_reflection: has("X"),
        y_reflection: has("Y"),
        multiplicity: 8 / stabilizer.len().max(1),
        stabilizer,
        class,
    }
}
