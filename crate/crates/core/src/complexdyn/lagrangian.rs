//! Complex Lagrangian manifolds of Gaussian states and the two-point
//! boundary problem connecting two of them.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{complex_integrate, ComplexOptions, ComplexPhasePoint, ComplexTrajectory, TimePath};
use crate::dynamics::{self, MapSystem};
use crate::error::{ChaosError, Result};
use crate::ode::Tolerances;
use crate::stability::StabilityMatrix;
use crate::svg::{ramp, Svg};
use crate::tangle::{evolve_linear, GaussianState};

/// Point of the manifold `b (Q − q₁) + i (P − p₁) = 0` at position `Q`.
pub fn lagrangian_manifold_point(state: &GaussianState, param: Complex64) -> ComplexPhasePoint {
    let p = Complex64::new(state.p, 0.0) + Complex64::i() * state.b * (param - state.q);
    ComplexPhasePoint::new(param, p)
}

/// Linearized Gaussian transported along the real centroid trajectory.
pub fn evolve_flow_gaussian(system: &MapSystem, state: &GaussianState, t: f64) -> Result<GaussianState> {
    let run = dynamics::integrate_flow_with(system, state.centroid(), t, &Tolerances::default(), None)?;
    let end = *run.segment.points.last().unwrap();
    let m = StabilityMatrix::new(*run.jacobians.last().unwrap(), 1);
    evolve_linear(state, &m, end)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourGrid {
    pub re: (f64, f64),
    pub im: (f64, f64),
    pub nx: usize,
    pub ny: usize,
}

impl ContourGrid {
    pub fn param(&self, i: usize, j: usize) -> Complex64 {
        let f = |r: (f64, f64), k: usize, n: usize| {
            if n <= 1 {
                r.0
            } else {
                r.0 + (r.1 - r.0) * k as f64 / (n - 1) as f64
            }
        };
        Complex64::new(f(self.re, i, self.nx), f(self.im, j, self.ny))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourSample {
    pub param: Complex64,
    /// Final position, `None` when the trajectory escaped.
    pub qt: Option<Complex64>,
    pub escape_time: Option<f64>,
    /// Step collapse without crossing the escape radius.
    pub branch_cut: bool,
}

impl ContourSample {
    pub fn escaped(&self) -> bool {
        self.qt.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContourMap {
    pub grid: ContourGrid,
    pub t: f64,
    /// Row-major in the imaginary direction: index `j * nx + i`.
    pub samples: Vec<ContourSample>,
}

impl ContourMap {
    pub fn at(&self, i: usize, j: usize) -> &ContourSample {
        &self.samples[j * self.grid.nx + i]
    }

    pub fn escaped_fraction(&self) -> f64 {
        self.samples.iter().filter(|s| s.escaped()).count() as f64 / self.samples.len() as f64
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "parameter_re,parameter_im,Qt_re,Qt_im,escaped,escape_time")?;
        for s in &self.samples {
            let (qr, qi) = s.qt.map_or((f64::NAN, f64::NAN), |q| (q.re, q.im));
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e},{:.16e},{},{:.16e}",
                s.param.re,
                s.param.im,
                qr,
                qi,
                u8::from(s.escaped()),
                s.escape_time.unwrap_or(f64::NAN)
            )?;
        }
        Ok(())
    }

    /// Heatmap of `Re Q_t` with escaping cells left blank.
    pub fn to_svg(&self) -> String {
        let g = &self.grid;
        let mut svg = Svg::new(600.0, 600.0, g.re, g.im);
        let finite: Vec<f64> = self.samples.iter().filter_map(|s| s.qt.map(|q| q.re)).collect();
        let (lo, hi) = finite
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
        let dx = (g.re.1 - g.re.0) / g.nx.max(2).saturating_sub(1) as f64;
        let dy = (g.im.1 - g.im.0) / g.ny.max(2).saturating_sub(1) as f64;
        for s in &self.samples {
            if let Some(q) = s.qt {
                let t = if hi > lo { (q.re - lo) / (hi - lo) } else { 0.5 };
                svg.rect(
                    s.param.re - 0.5 * dx,
                    s.param.im - 0.5 * dy,
                    s.param.re + 0.5 * dx,
                    s.param.im + 0.5 * dy,
                    &ramp(t),
                );
            }
        }
        svg.finish()
    }
}

/// Integrate every manifold point of `state` over real time `t`.
pub fn contour_map(
    state: &GaussianState,
    system: &MapSystem,
    t: f64,
    grid: &ContourGrid,
    opts: &ComplexOptions,
) -> Result<ContourMap> {
    if grid.nx == 0 || grid.ny == 0 {
        return Err(ChaosError::InvalidParameter("empty contour grid".into()));
    }
    let path = TimePath::real(t);
    let samples: Result<Vec<ContourSample>> = (0..grid.nx * grid.ny)
        .into_par_iter()
        .map(|k| {
            let param = grid.param(k % grid.nx, k / grid.nx);
            let z0 = lagrangian_manifold_point(state, param);
            match complex_integrate(system, z0, &path, opts) {
                Ok(tr) => Ok(ContourSample {
                    param,
                    qt: if tr.escaped() { None } else { Some(tr.end().q) },
                    escape_time: tr.escape_time.map(|t| t.re),
                    branch_cut: false,
                }),
                Err(ChaosError::BranchCut { .. }) | Err(ChaosError::StepUnderflow { .. }) => {
                    Ok(ContourSample {
                        param,
                        qt: None,
                        escape_time: None,
                        branch_cut: true,
                    })
                }
                Err(e) => Err(e),
            }
        })
        .collect();
    Ok(ContourMap {
        grid: *grid,
        t,
        samples: samples?,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaddleSolution {
    pub start: ComplexPhasePoint,
    pub end: ComplexPhasePoint,
    pub action: Complex64,
    /// Tangent matrix over the full time, `(q, p)` ordering.
    pub monodromy: crate::linalg::CMat2,
    pub residuals: [f64; 2],
    pub iterations: usize,
}

fn residuals(
    s1: &GaussianState,
    s2: &GaussianState,
    z0: ComplexPhasePoint,
    tr: &ComplexTrajectory,
) -> [Complex64; 2] {
    let i = Complex64::i();
    let zt = tr.end();
    [
        s1.b * (z0.q - s1.q) + i * (z0.p - s1.p),
        s2.b.conj() * (zt.q - s2.q) - i * (zt.p - s2.p),
    ]
}

/// Newton iteration for the complex trajectory leaving the manifold of
/// `state1` and arriving on the conjugate manifold of `state2` after time `t`.
pub fn saddle_search(
    state1: &GaussianState,
    state2: &GaussianState,
    system: &MapSystem,
    t: f64,
    seed: ComplexPhasePoint,
    opts: &ComplexOptions,
) -> Result<SaddleSolution> {
    const TOL: f64 = 1e-10;
    const MAX_ITER: usize = 60;
    let i = Complex64::i();
    let path = TimePath::real(t);
    let mut z = seed;
    for iter in 0..=MAX_ITER {
        let tr = complex_integrate(system, z, &path, opts)?;
        if let Some(te) = tr.escape_time {
            return Err(ChaosError::Escaped {
                t: te,
                radius: opts.escape_radius,
            });
        }
        let r = residuals(state1, state2, z, &tr);
        let rn = [r[0].norm(), r[1].norm()];
        if rn[0] < TOL && rn[1] < TOL {
            return Ok(SaddleSolution {
                start: z,
                end: tr.end(),
                action: tr.action,
                monodromy: tr.monodromy(),
                residuals: rn,
                iterations: iter,
            });
        }
        if iter == MAX_ITER || !(rn[0].is_finite() && rn[1].is_finite()) {
            break;
        }
        let j = tr.monodromy();
        let bb = state2.b.conj();
        // rows: ∂r/∂(Q0, P0)
        let (a11, a12) = (state1.b, i);
        let (a21, a22) = (bb * j.a - i * j.c, bb * j.b - i * j.d);
        let det = a11 * a22 - a12 * a21;
        if det.norm() < 1e-300 {
            return Err(ChaosError::Singular("saddle Jacobian"));
        }
        let dq = (a22 * r[0] - a12 * r[1]) / det;
        let dp = (a11 * r[1] - a21 * r[0]) / det;
        z = ComplexPhasePoint::new(z.q - dq, z.p - dp);
    }
    Err(ChaosError::NoConvergence(format!(
        "saddle search from ({}, {}) did not converge",
        seed.q, seed.p
    )))
}
