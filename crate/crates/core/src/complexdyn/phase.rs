//! Continuous phase of the semiclassical determinants along a trajectory,
//! and the sign-flip correction of the half-phase under parameter sweeps.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dynamics::flow::{Flow, AUG};
use crate::dynamics::{MapSystem, PhasePoint};
use crate::error::{ChaosError, Result};
use crate::ode::{self, Halt, Tolerances};
use crate::stability::{semiclassical_determinants, StabilityMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeterminantKind {
    D0,
    D1,
    D2,
}

impl DeterminantKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            DeterminantKind::D0 => "D0",
            DeterminantKind::D1 => "D1",
            DeterminantKind::D2 => "D2",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseTracker {
    pub kind: DeterminantKind,
    pub times: Vec<f64>,
    pub values: Vec<Complex64>,
    /// Unwrapped `arg D`, starting from the principal value at the first sample.
    pub phase: Vec<f64>,
    /// Net turns, `(φ_end − φ_start) / 2π`.
    pub winding: f64,
    pub sign_flip_corrections: usize,
}

impl PhaseTracker {
    pub fn final_phase(&self) -> f64 {
        *self.phase.last().unwrap()
    }

    pub fn half_phase(&self) -> f64 {
        0.5 * self.final_phase()
    }

    pub fn max_jump(&self) -> f64 {
        self.phase.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max)
    }

    /// True when the phase never decreases.
    pub fn counterclockwise(&self) -> bool {
        self.phase.windows(2).all(|w| w[1] >= w[0])
    }
}

/// Track `arg D(t)` over `[t0, t1]`, starting from `samples` uniform points
/// and bisecting any interval whose phase step is not below `π/2`.
pub fn track_determinant<F>(eval: F, t0: f64, t1: f64, samples: usize, kind: DeterminantKind) -> Result<PhaseTracker>
where
    F: Fn(f64) -> Result<Complex64> + Sync,
{
    const MIN_DT: f64 = 1e-13;
    let n = samples.max(2);
    let grid: Vec<f64> = (0..n)
        .map(|k| if k + 1 == n { t1 } else { t0 + (t1 - t0) * k as f64 / (n - 1) as f64 })
        .collect();
    let vals: Result<Vec<Complex64>> = grid.par_iter().map(|&t| eval(t)).collect();
    let vals = vals?;
    let mut times = vec![grid[0]];
    let mut values = vec![vals[0]];
    if vals[0].norm() == 0.0 {
        return Err(ChaosError::DeterminantZero(grid[0]));
    }
    // depth-first refinement of each coarse interval
    for k in 1..n {
        let mut stack = vec![(grid[k], vals[k])];
        while let Some(&(tb, vb)) = stack.last() {
            let (ta, va) = (*times.last().unwrap(), *values.last().unwrap());
            if vb.norm() == 0.0 {
                return Err(ChaosError::DeterminantZero(tb));
            }
            let step = (vb / va).arg().abs();
            if step < FRAC_PI_2 {
                times.push(tb);
                values.push(vb);
                stack.pop();
                continue;
            }
            if tb - ta < MIN_DT {
                return Err(ChaosError::DeterminantZero(0.5 * (ta + tb)));
            }
            let tm = 0.5 * (ta + tb);
            stack.push((tm, eval(tm)?));
        }
    }
    let mut phase = Vec::with_capacity(values.len());
    phase.push(values[0].arg());
    for w in values.windows(2) {
        let prev = *phase.last().unwrap();
        phase.push(prev + (w[1] / w[0]).arg());
    }
    let winding = (phase.last().unwrap() - phase[0]) / TAU;
    Ok(PhaseTracker {
        kind,
        times,
        values,
        phase,
        winding,
        sign_flip_corrections: 0,
    })
}

fn determinant_of(jac: crate::linalg::Mat2, kind: DeterminantKind, b_alpha: Complex64, b_beta: Complex64) -> Complex64 {
    let m = StabilityMatrix::new(jac, 1).to_complex();
    let (d0, d1, d2) = semiclassical_determinants(&m, b_alpha, b_beta);
    match kind {
        DeterminantKind::D0 => d0,
        DeterminantKind::D1 => d1,
        DeterminantKind::D2 => d2,
    }
}

/// Phase of a determinant along the real trajectory of a flow from `x`.
pub fn track_flow_determinant(
    system: &MapSystem,
    x: PhasePoint,
    t: f64,
    kind: DeterminantKind,
    b_alpha: Complex64,
    b_beta: Complex64,
    samples: usize,
) -> Result<PhaseTracker> {
    let flow = super::flow_of(system)?;
    let tol = Tolerances::default();
    let rhs = move |_s: f64, y: &[f64; AUG]| flow.augmented_rhs(y, 1.0);
    // checkpoints so each evaluation integrates over at most one interval
    let n = samples.max(2);
    let dt = t / (n - 1) as f64;
    let mut checkpoints = vec![Flow::augmented_initial(x.q, x.p)];
    for k in 1..n {
        let out = ode::integrate(rhs, (k - 1) as f64 * dt, k as f64 * dt, checkpoints[k - 1], &tol, |_, _| true)?;
        if let Some(Halt::Underflow { s, h }) = out.halted {
            return Err(ChaosError::StepUnderflow { t: s, h });
        }
        checkpoints.push(out.y);
    }
    let eval = |s: f64| -> Result<Complex64> {
        let k = ((s / dt).floor().max(0.0) as usize).min(n - 1);
        let s0 = k as f64 * dt;
        let out = ode::integrate(rhs, s0, s, checkpoints[k], &tol, |_, _| true)?;
        let y = out.y;
        Ok(determinant_of(
            crate::linalg::Mat2::new(y[3], y[4], y[5], y[6]),
            kind,
            b_alpha,
            b_beta,
        ))
    };
    let grid_eval = |s: f64| {
        // exact checkpoint values on the coarse grid
        let k = (s / dt).round() as usize;
        if k < n && (k as f64 * dt - s).abs() < 1e-15 * t.max(1.0) {
            let y = checkpoints[k];
            return Ok(determinant_of(
                crate::linalg::Mat2::new(y[3], y[4], y[5], y[6]),
                kind,
                b_alpha,
                b_beta,
            ));
        }
        eval(s)
    };
    track_determinant(grid_eval, 0.0, t, n, kind)
}

/// `D(t; λ) = (t − 1 − iλ)/(−1 − iλ) · e^{it}`: a unit-start determinant
/// whose zero crosses the real time axis at `t = 1` as `λ` changes sign.
pub fn migrating_zero(lambda: f64, t: f64) -> Result<Complex64> {
    let z = Complex64::new(-1.0, -lambda);
    Ok((z + t) / z * Complex64::new(0.0, t).exp())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub params: Vec<f64>,
    pub raw_half_phase: Vec<f64>,
    pub corrected_half_phase: Vec<f64>,
    /// Sweep indices `k` where a π jump between `k − 1` and `k` was removed.
    pub flips: Vec<usize>,
    pub sign_flip_corrections: usize,
}

impl SweepResult {
    pub fn max_corrected_jump(&self) -> f64 {
        self.corrected_half_phase
            .windows(2)
            .map(|w| (w[1] - w[0]).abs())
            .fold(0.0, f64::max)
    }
}

/// Half-phase of `D(t1; λ)` tracked from `t0` for each `λ`, with abrupt
/// jumps near `π` between neighbouring parameters removed as sign flips.
pub fn sign_flip_sweep<F>(family: F, params: &[f64], t0: f64, t1: f64, samples: usize) -> Result<SweepResult>
where
    F: Fn(f64, f64) -> Result<Complex64> + Sync,
{
    let raw: Result<Vec<f64>> = params
        .par_iter()
        .map(|&lam| {
            track_determinant(|t| family(lam, t), t0, t1, samples, DeterminantKind::D1).map(|p| p.half_phase())
        })
        .collect();
    let raw = raw?;
    let mut corrected: Vec<f64> = Vec::with_capacity(raw.len());
    let mut flips = Vec::new();
    let mut offset = 0.0f64;
    for (k, &h) in raw.iter().enumerate() {
        if k > 0 {
            let jump = h + offset - corrected[k - 1];
            if jump.abs() > FRAC_PI_2 {
                let turns = (jump / PI).round();
                offset -= turns * PI;
                flips.push(k);
            }
        }
        corrected.push(h + offset);
    }
    Ok(SweepResult {
        params: params.to_vec(),
        raw_half_phase: raw,
        corrected_half_phase: corrected,
        sign_flip_corrections: flips.len(),
        flips,
    })
}
