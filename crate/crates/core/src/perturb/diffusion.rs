//! Action diffusion: the first-order action change accumulated along chaotic
//! trajectories behaves like a random walk, `Var δW(t) ≈ 2ε²K t`.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dynamics::{PhasePoint, Stadium};
use crate::error::{ChaosError, Result};

use super::bounce_action_derivative;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionOptions {
    pub gamma: f64,
    /// `δγ`.
    pub epsilon: f64,
    pub ensemble: usize,
    pub t_max: usize,
    /// Inclusive bounce range of the linear fit.
    pub fit_range: (usize, usize),
    pub seed: u64,
    /// Initial conditions starting this many consecutive edge-to-edge
    /// bounces are rejected as bouncing-ball band members.
    pub band_run: usize,
}

impl Default for DiffusionOptions {
    fn default() -> Self {
        Self {
            gamma: 1.0,
            epsilon: 1e-3,
            ensemble: 10_000,
            t_max: 200,
            fit_range: (10, 200),
            seed: 1,
            band_run: 6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionReport {
    pub epsilon: f64,
    pub ensemble: usize,
    /// Mean per-bounce increment removed before accumulating.
    pub drift: f64,
    /// `t = 1..=t_max`.
    pub t: Vec<usize>,
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
    pub slope: f64,
    pub slope_stderr: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// `K = slope / (2ε²)` with its 95% half-width.
    pub k: f64,
    pub k_ci: f64,
}

impl DiffusionReport {
    /// Standard error of the ensemble mean at bounce `t`.
    pub fn mean_stderr(&self, t: usize) -> f64 {
        (self.variance[t - 1] / self.ensemble as f64).sqrt()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,mean,variance,fitted_k,k_ci")?;
        for (i, t) in self.t.iter().enumerate() {
            writeln!(
                w,
                "{},{:.16e},{:.16e},{:.16e},{:.16e}",
                t, self.mean[i], self.variance[i], self.k, self.k_ci
            )?;
        }
        Ok(())
    }
}

fn in_band(st: &Stadium, x: PhasePoint, run: usize) -> bool {
    let mut cur = x;
    for _ in 0..run {
        if st.piece_of(cur.q).is_arc() {
            return false;
        }
        match st.step(cur) {
            Ok((y, _)) => cur = y,
            Err(_) => return true,
        }
    }
    true
}

fn member(st: &Stadium, opts: &DiffusionOptions, index: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(index as u64);
    let per = st.perimeter();
    'draw: loop {
        let x = PhasePoint::new(rng.gen::<f64>() * per, rng.gen_range(-1.0..1.0));
        if in_band(st, x, opts.band_run) {
            continue;
        }
        let mut out = Vec::with_capacity(opts.t_max);
        let mut cur = x;
        for _ in 0..opts.t_max {
            cur = match st.step(cur) {
                Ok((y, _)) => y,
                Err(_) => continue 'draw,
            };
            out.push(bounce_action_derivative(st, cur.q, cur.p));
        }
        return out;
    }
}

/// Ensemble statistics of `δW(t) = ε Σ_{k ≤ t} (w_k − w̄)` where `w_k` is the
/// first-order action derivative at bounce `k` and `w̄` the ensemble drift.
pub fn action_diffusion(opts: &DiffusionOptions) -> Result<DiffusionReport> {
    let st = Stadium::new(opts.gamma)?;
    let (lo, hi) = opts.fit_range;
    if opts.ensemble < 2 || opts.t_max == 0 || lo == 0 || lo >= hi || hi > opts.t_max {
        return Err(ChaosError::InvalidParameter("bad ensemble size or fit range".into()));
    }
    let members: Vec<Vec<f64>> = (0..opts.ensemble)
        .into_par_iter()
        .map(|i| member(&st, opts, i))
        .collect();
    let count = (opts.ensemble * opts.t_max) as f64;
    let drift = members.iter().flatten().sum::<f64>() / count;
    let n = opts.ensemble as f64;
    let mut sum = vec![0.0; opts.t_max];
    let mut sum2 = vec![0.0; opts.t_max];
    for m in &members {
        let mut acc = 0.0;
        for (k, w) in m.iter().enumerate() {
            acc += opts.epsilon * (w - drift);
            sum[k] += acc;
            sum2[k] += acc * acc;
        }
    }
    let mean: Vec<f64> = sum.iter().map(|s| s / n).collect();
    let variance: Vec<f64> = sum2
        .iter()
        .zip(&mean)
        .map(|(s2, m)| (s2 - n * m * m) / (n - 1.0))
        .collect();

    let xs: Vec<f64> = (lo..=hi).map(|t| t as f64).collect();
    let ys: Vec<f64> = (lo..=hi).map(|t| variance[t - 1]).collect();
    let fit = linear_fit(&xs, &ys);
    let eps2 = opts.epsilon * opts.epsilon;
    Ok(DiffusionReport {
        epsilon: opts.epsilon,
        ensemble: opts.ensemble,
        drift,
        t: (1..=opts.t_max).collect(),
        mean,
        variance,
        slope: fit.slope,
        slope_stderr: fit.slope_stderr,
        intercept: fit.intercept,
        r_squared: fit.r_squared,
        k: fit.slope / (2.0 * eps2),
        k_ci: 1.96 * fit.slope_stderr / (2.0 * eps2),
    })
}

pub(crate) struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub slope_stderr: f64,
}

pub(crate) fn linear_fit(xs: &[f64], ys: &[f64]) -> LinearFit {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    LinearFit {
        slope,
        intercept,
        r_squared: if syy > 0.0 { 1.0 - sse / syy } else { 1.0 },
        slope_stderr: (sse / (n - 2.0).max(1.0) / sxx).sqrt(),
    }
}
