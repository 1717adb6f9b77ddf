//! Gaussian phase-space densities: Wigner form of a wave packet, linearized
//! evolution and overlaps summed over heteroclinic segments.

use num_complex::Complex64;

use crate::dynamics::{MapSystem, PhasePoint};
use crate::error::{ChaosError, Result};
use crate::linalg::Mat2;
use crate::stability::StabilityMatrix;

/// Wave packet centroid and shape `b = c + i d`, with its Wigner density
/// `W(p, q) = (πħ)⁻¹ exp[−(δp, δq)·A·(δp, δq)/ħ]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianState {
    pub q: f64,
    pub p: f64,
    pub b: Complex64,
    pub hbar: f64,
}

impl GaussianState {
    pub fn new(q: f64, p: f64, b: Complex64, hbar: f64) -> Result<Self> {
        if !(b.re > 0.0) || !b.im.is_finite() {
            return Err(ChaosError::InvalidParameter(format!(
                "shape b = {b} needs a positive real part"
            )));
        }
        if !(hbar > 0.0) {
            return Err(ChaosError::InvalidParameter("ħ must be positive".into()));
        }
        Ok(Self { q, p, b, hbar })
    }

    pub fn centroid(&self) -> PhasePoint {
        PhasePoint::new(self.q, self.p)
    }

    /// `A` in `(p, q)` ordering: `[[1/c, d/c], [d/c, c + d²/c]]`.
    pub fn wigner_matrix(&self) -> Mat2 {
        let (c, d) = (self.b.re, self.b.im);
        Mat2::new(1.0 / c, d / c, d / c, c + d * d / c)
    }

    /// Shape recovered from a real symmetric unit-determinant `A`.
    pub fn from_wigner(q: f64, p: f64, a: &Mat2, hbar: f64) -> Result<Self> {
        if !(a.a > 0.0) {
            return Err(ChaosError::InvalidParameter("A is not positive definite".into()));
        }
        let c = 1.0 / a.a;
        Self::new(q, p, Complex64::new(c, a.b * c), hbar)
    }

    /// Covariance of `(p, q)` under the density: `(ħ/2) A⁻¹`.
    pub fn covariance(&self) -> Mat2 {
        let a = self.wigner_matrix();
        a.symplectic_inverse().scale(0.5 * self.hbar)
    }

    /// Density value at `x` (no chart wrap).
    pub fn density(&self, x: PhasePoint) -> f64 {
        let v = [x.p - self.p, x.q - self.q];
        let a = self.wigner_matrix();
        let quad = v[0] * (a.a * v[0] + a.b * v[1]) + v[1] * (a.c * v[0] + a.d * v[1]);
        (-quad / self.hbar).exp() / (std::f64::consts::PI * self.hbar)
    }
}

/// `M` in `(p, q)` ordering.
pub fn pq_matrix(m: &StabilityMatrix) -> Mat2 {
    Mat2::new(m.m11(), m.m12(), m.m21(), m.m22())
}

/// `A(t) = M⁻ᵀ A M⁻¹` about a new centroid.
pub fn evolve_linear(state: &GaussianState, m: &StabilityMatrix, centroid: PhasePoint) -> Result<GaussianState> {
    let minv = pq_matrix(m).symplectic_inverse();
    let a = minv.transpose() * state.wigner_matrix() * minv;
    let a = Mat2::new(a.a, 0.5 * (a.b + a.c), 0.5 * (a.b + a.c), a.d);
    GaussianState::from_wigner(centroid.q, centroid.p, &a, state.hbar)
}

/// Linearized evolution over `n` map steps: the centroid follows the map.
pub fn evolve_gaussian(map: &MapSystem, state: &GaussianState, n: usize) -> Result<GaussianState> {
    let (y, _, jac) = map.step_n_jacobian(state.centroid(), n)?;
    evolve_linear(state, &StabilityMatrix::new(jac, n), map.normalize(y))
}

/// One heteroclinic term of an overlap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapTerm {
    /// Initial point of the segment (on the stretching line of `ρ_i`).
    pub start: PhasePoint,
    pub end: PhasePoint,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OverlapResult {
    pub total: f64,
    pub terms: Vec<OverlapTerm>,
    /// The scanned line ended while still inside `ρ_f`'s support.
    pub truncated: bool,
}

/// Options for the segment scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapOptions {
    /// Half-width of the scanned line in standard deviations of `ρ_i`.
    pub width: f64,
    pub samples: usize,
    /// Segments whose scaled distance `δ·A_f·δ/ħ` exceeds this are dropped.
    pub cutoff: f64,
}

impl Default for OverlapOptions {
    fn default() -> Self {
        Self {
            width: 8.0,
            samples: 20_001,
            cutoff: 60.0,
        }
    }
}

fn quad_form(a: &Mat2, v: [f64; 2]) -> f64 {
    v[0] * (a.a * v[0] + a.b * v[1]) + v[1] * (a.c * v[0] + a.d * v[1])
}

/// `(ρ_f, Tⁿρ_i) = Σ_γ (ρ_f, T_γ ρ_i)`.
///
/// The support of `Tⁿρ_i` is followed along the line through `ρ_i`'s
/// centroid in the direction `Tⁿ` stretches most. Each local minimum of the
/// `ρ_f`-scaled distance of its image from `ρ_f`'s centroid marks one
/// segment `γ`. The term is the Gaussian integral under the affine
/// linearization of `Tⁿ` about that segment, restricted to the stretch of
/// line on which `Tⁿ` is continuous (maps with cuts, like the baker map).
pub fn heteroclinic_overlap(
    map: &MapSystem,
    rho_f: &GaussianState,
    rho_i: &GaussianState,
    n: usize,
    opts: &OverlapOptions,
) -> Result<OverlapResult> {
    let hbar = rho_i.hbar;
    let xi = rho_i.centroid();
    let xf = rho_f.centroid();
    let af = rho_f.wigner_matrix();
    let ai = rho_i.wigner_matrix();
    let (_, _, jac) = map.step_n_jacobian(xi, n)?;
    // stretching direction in (q, p)
    let (_, _, e) = (jac.transpose() * jac).symmetric_eigen();
    let cov = rho_i.covariance();
    let var_e = quad_form(&cov, [e[1], e[0]]);
    let half = opts.width * var_e.sqrt();
    let m = opts.samples.max(3);
    let ds = 2.0 * half / (m - 1) as f64;
    let s_of = |k: usize| -half + ds * k as f64;
    let point = |s: f64| PhasePoint::new(xi.q + s * e[0], xi.p + s * e[1]);
    let scaled = |y: PhasePoint| {
        let d = map.diff(y, xf);
        quad_form(&af, [d[1], d[0]]) / hbar
    };
    let dist = |s: f64| -> Option<f64> {
        let y = map.step_n(map.normalize(point(s)), n as i64).ok()?;
        Some(scaled(y))
    };
    let samples: Vec<Option<(PhasePoint, f64)>> = (0..m)
        .map(|k| {
            let (y, _, j) = map.step_n_jacobian(map.normalize(point(s_of(k))), n).ok()?;
            let je = j.apply(e);
            Some((y, je[0].hypot(je[1])))
        })
        .collect();
    let vals: Vec<Option<f64>> = samples.iter().map(|x| x.map(|(y, _)| scaled(y))).collect();
    // break[k]: the image jumps between samples k and k + 1
    let breaks: Vec<bool> = (0..m - 1)
        .map(|k| match (samples[k], samples[k + 1]) {
            (Some((ya, ga)), Some((yb, gb))) => map.distance(ya, yb) > 10.0 * ga.max(gb) * ds,
            _ => true,
        })
        .collect();

    let mut terms = Vec::new();
    for k in 0..m {
        let Some(v) = vals[k] else { continue };
        if v > opts.cutoff {
            continue;
        }
        let left = if k > 0 && !breaks[k - 1] { vals[k - 1] } else { None };
        let right = if k + 1 < m && !breaks[k] { vals[k + 1] } else { None };
        let is_min = left.map_or(true, |l| v < l) && right.map_or(true, |r| v <= r);
        if !is_min {
            continue;
        }
        let lo_k = if left.is_some() { k - 1 } else { k };
        let hi_k = if right.is_some() { k + 1 } else { k };
        let (mut lo, mut hi) = (s_of(lo_k), s_of(hi_k));
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..80 {
            let (a, b) = (hi - g * (hi - lo), lo + g * (hi - lo));
            match (dist(a), dist(b)) {
                (Some(fa), Some(fb)) if fa < fb => hi = b,
                (Some(_), Some(_)) => lo = a,
                _ => break,
            }
        }
        let s0 = 0.5 * (lo + hi);
        // continuity interval along the line; open at the scan ends
        let mut a = k;
        while a > 0 && !breaks[a - 1] {
            a -= 1;
        }
        let mut b = k;
        while b + 1 < m && !breaks[b] {
            b += 1;
        }
        let s_lo = if a == 0 { f64::NEG_INFINITY } else { s_of(a) - 0.5 * ds };
        let s_hi = if b + 1 == m { f64::INFINITY } else { s_of(b) + 0.5 * ds };

        let x0 = map.normalize(point(s0));
        let (y0, _, j) = map.step_n_jacobian(x0, n)?;
        let value = segment_integral(map, &af, &ai, hbar, xi, xf, x0, y0, &j, e, (s_lo, s_hi))?;
        terms.push(OverlapTerm {
            start: x0,
            end: map.normalize(y0),
            value,
        });
    }
    let truncated = [vals[0], vals[m - 1]]
        .iter()
        .any(|v| v.is_some_and(|v| v < opts.cutoff));
    Ok(OverlapResult {
        total: terms.iter().map(|t| t.value).sum(),
        terms,
        truncated,
    })
}

/// `∫ W_f(y0 + M(y − x0)) W_i(y) dy` over the band `s_lo < e·(y − x_i) < s_hi`.
#[allow(clippy::too_many_arguments)]
fn segment_integral(
    map: &MapSystem,
    af: &Mat2,
    ai: &Mat2,
    hbar: f64,
    xi: PhasePoint,
    xf: PhasePoint,
    x0: PhasePoint,
    y0: PhasePoint,
    j: &Mat2,
    e: [f64; 2],
    (s_lo, s_hi): (f64, f64),
) -> Result<f64> {
    // everything below in (p, q) ordering
    let mpq = Mat2::new(j.d, j.c, j.b, j.a);
    let minv = mpq.symplectic_inverse();
    let dyf = map.diff(y0, xf);
    let off = minv.apply([dyf[1], dyf[0]]);
    let dxi = map.diff(x0, xi);
    // μ1 − μ2 with μ1 = x0 − M⁻¹(y0 − x_f), μ2 = x_i
    let mu = [dxi[1] - off[0], dxi[0] - off[1]];
    let p1 = (mpq.transpose() * *af * mpq).scale(1.0 / hbar);
    let p2 = ai.scale(1.0 / hbar);
    // y − x_i = s ê + t ê⊥
    let ee = Mat2::new(e[1], e[0], e[0], -e[1]);
    let h = ee.transpose() * (p1 + p2) * ee;
    let h_st = 0.5 * (h.b + h.c);
    let p1mu = p1.apply(mu);
    let gv = ee.transpose().apply(p1mu);
    let c0 = mu[0] * p1mu[0] + mu[1] * p1mu[1];
    if !(h.d > 0.0) {
        return Err(ChaosError::Singular("overlap precision"));
    }
    let alpha = h.a - h_st * h_st / h.d;
    let beta = gv[0] - h_st * gv[1] / h.d;
    let gamma = c0 - gv[1] * gv[1] / h.d;
    if !(alpha > 0.0) {
        return Err(ChaosError::Singular("overlap precision"));
    }
    let pi = std::f64::consts::PI;
    let centre = beta / alpha;
    let ra = alpha.sqrt();
    let frac = 0.5 * (erf_at(ra * (s_hi - centre)) - erf_at(ra * (s_lo - centre)));
    let full = (pi / h.d).sqrt() * (pi / alpha).sqrt() * (beta * beta / alpha - gamma).exp();
    Ok(full * frac / (pi * hbar).powi(2))
}

fn erf_at(x: f64) -> f64 {
    if x == f64::INFINITY {
        1.0
    } else if x == f64::NEG_INFINITY {
        -1.0
    } else {
        libm::erf(x)
    }
}
