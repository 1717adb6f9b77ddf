//! Minimal SVG emission: rectangles, circles and polylines in a data
//! coordinate box, with `y` pointing up.

use std::fmt::Write as _;

pub struct Svg {
    width: f64,
    height: f64,
    x_range: (f64, f64),
    y_range: (f64, f64),
    body: String,
}

impl Svg {
    pub fn new(width: f64, height: f64, x_range: (f64, f64), y_range: (f64, f64)) -> Self {
        Self {
            width,
            height,
            x_range,
            y_range,
            body: String::new(),
        }
    }

    fn px(&self, x: f64, y: f64) -> (f64, f64) {
        let u = (x - self.x_range.0) / (self.x_range.1 - self.x_range.0) * self.width;
        let v = (1.0 - (y - self.y_range.0) / (self.y_range.1 - self.y_range.0)) * self.height;
        (u, v)
    }

    /// Axis-aligned rectangle with data-space corners.
    pub fn rect(&mut self, x0: f64, y0: f64, x1: f64, y1: f64, fill: &str) {
        let (u0, v0) = self.px(x0.min(x1), y0.max(y1));
        let (u1, v1) = self.px(x0.max(x1), y0.min(y1));
        let _ = writeln!(
            self.body,
            r#"<rect x="{u0:.3}" y="{v0:.3}" width="{:.3}" height="{:.3}" fill="{fill}"/>"#,
            u1 - u0,
            v1 - v0
        );
    }

    pub fn circle(&mut self, x: f64, y: f64, r: f64, fill: &str) {
        let (u, v) = self.px(x, y);
        let _ = writeln!(self.body, r#"<circle cx="{u:.3}" cy="{v:.3}" r="{r}" fill="{fill}"/>"#);
    }

    pub fn polyline(&mut self, pts: &[(f64, f64)], stroke: &str, width: f64) {
        if pts.len() < 2 {
            return;
        }
        let mut s = String::new();
        for (x, y) in pts {
            let (u, v) = self.px(*x, *y);
            let _ = write!(s, "{u:.3},{v:.3} ");
        }
        let _ = writeln!(
            self.body,
            r#"<polyline points="{}" fill="none" stroke="{stroke}" stroke-width="{width}"/>"#,
            s.trim_end()
        );
    }

    pub fn finish(&self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n{body}</svg>\n",
            w = self.width,
            h = self.height,
            body = self.body
        )
    }
}

/// Blue-to-red ramp for `t ∈ [0, 1]`.
pub fn ramp(t: f64) -> String {
    let t = if t.is_finite() { t.clamp(0.0, 1.0) } else { 0.5 };
    let r = (255.0 * t) as u8;
    let b = (255.0 * (1.0 - t)) as u8;
    let g = (255.0 * (1.0 - (2.0 * t - 1.0).abs()) * 0.8) as u8;
    format!("#{r:02x}{g:02x}{b:02x}")
}
