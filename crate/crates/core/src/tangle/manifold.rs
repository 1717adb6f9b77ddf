//! Unstable and stable manifolds of hyperbolic periodic orbits as adaptive
//! polylines.
//!
//! A branch is parameterized by `σ = g + f` with `g` the generation and
//! `f ∈ [0, 1)`: the point is `P^g(x + s ε λ^f v)` for the period map `P`
//! (its inverse on stable branches), so vertex `(g, f)` maps exactly onto
//! vertex `(g + 1, f)`.

use rayon::prelude::*;

use crate::dynamics::{MapSystem, PhasePoint};
use crate::error::{ChaosError, Result};
use crate::orbits::PeriodicOrbit;
use crate::stability::{monodromy_eigen, StabilityMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Unstable,
    Stable,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::Unstable => "unstable",
            Branch::Stable => "stable",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManifoldOptions {
    /// Seed offset along the eigenvector.
    pub eps: f64,
    pub max_spacing: f64,
    /// Max turning angle between consecutive polyline segments (rad).
    pub max_angle: f64,
    pub max_generations: usize,
    /// Parameter intervals are not split below this width.
    pub min_df: f64,
}

impl Default for ManifoldOptions {
    fn default() -> Self {
        Self {
            eps: 1e-8,
            max_spacing: 1e-3,
            max_angle: 0.05,
            max_generations: 60,
            min_df: 1e-13,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldSegment {
    pub map: MapSystem,
    /// Orbit point the branch emanates from.
    pub base: PhasePoint,
    pub base_index: usize,
    pub branch: Branch,
    /// `+1` or `−1`: which half of the eigenline.
    pub side: f64,
    /// Unit eigenvector `(δq, δp)` at the base.
    pub direction: [f64; 2],
    /// Expansion factor per generation (> 1).
    pub multiplier: f64,
    pub steps_per_generation: usize,
    pub eps: f64,
    /// Vertex parameters; the base point has `σ = −∞`.
    pub params: Vec<f64>,
    /// Vertices in the unfolded chart (periodic coordinates made continuous).
    pub points: Vec<PhasePoint>,
    pub arclength: Vec<f64>,
    /// Highest generation present.
    pub generation: usize,
}

impl ManifoldSegment {
    fn seed(&self, f: f64) -> PhasePoint {
        let s = self.side * self.eps * self.multiplier.powf(f);
        PhasePoint::new(
            self.base.q + s * self.direction[0],
            self.base.p + s * self.direction[1],
        )
    }

    /// Exact manifold point at parameter `σ` (chart-normalized).
    pub fn point_at(&self, sigma: f64) -> Result<PhasePoint> {
        if sigma == f64::NEG_INFINITY {
            return Ok(self.map.normalize(self.base));
        }
        let g = sigma.floor();
        let x = self.map.normalize(self.seed(sigma - g));
        let steps = g as i64 * self.steps_per_generation as i64;
        let y = match self.branch {
            Branch::Unstable => self.map.step_n(x, steps)?,
            Branch::Stable => self.map.step_n(x, -steps)?,
        };
        Ok(self.map.normalize(y))
    }

    pub fn total_length(&self) -> f64 {
        self.arclength.last().copied().unwrap_or(0.0)
    }

    /// Chart-normalized path between two parameters (endpoints exact,
    /// interior vertices from the polyline), in the order given.
    pub fn sub_path(&self, from: f64, to: f64) -> Result<Vec<PhasePoint>> {
        let (lo, hi) = if from <= to { (from, to) } else { (to, from) };
        let mut out = vec![self.point_at(lo)?];
        for (s, x) in self.params.iter().zip(&self.points) {
            if *s > lo && *s < hi {
                out.push(self.map.normalize(*x));
            }
        }
        out.push(self.point_at(hi)?);
        if from > to {
            out.reverse();
        }
        Ok(out)
    }

    /// Write `branch,generation,q,p,arclength` rows (unfolded chart).
    pub fn write_csv<W: std::io::Write>(&self, mut w: W, header: bool) -> std::io::Result<()> {
        if header {
            writeln!(w, "branch,generation,q,p,arclength")?;
        }
        for ((s, x), l) in self.params.iter().zip(&self.points).zip(&self.arclength) {
            let g = if s.is_finite() { s.floor() as i64 } else { -1 };
            writeln!(
                w,
                "{},{},{:.16e},{:.16e},{:.16e}",
                self.branch.as_str(),
                g,
                x.q,
                x.p,
                l
            )?;
        }
        Ok(())
    }
}

fn turning(map: &MapSystem, a: PhasePoint, b: PhasePoint, c: PhasePoint) -> f64 {
    let u = map.diff(b, a);
    let v = map.diff(c, b);
    let cross = u[0] * v[1] - u[1] * v[0];
    let dot = u[0] * v[0] + u[1] * v[1];
    cross.atan2(dot).abs()
}

/// Grow one branch of the manifold of `orbit` at point `index` until its
/// arclength reaches `budget`.
///
/// On a step failure the partial segment is reported through
/// [`ChaosError::BudgetUnreached`].
pub fn grow_manifold(
    map: &MapSystem,
    orbit: &PeriodicOrbit,
    index: usize,
    branch: Branch,
    side: f64,
    budget: f64,
    opts: &ManifoldOptions,
) -> Result<ManifoldSegment> {
    match try_grow(map, orbit, index, branch, side, budget, opts) {
        Ok((seg, None)) => Ok(seg),
        Ok((seg, Some(reason))) => Err(ChaosError::BudgetUnreached {
            reached: seg.total_length(),
            budget,
            reason,
        }),
        Err(e) => Err(e),
    }
}

/// Like [`grow_manifold`] but returns the partial segment with the reason
/// growth stopped short.
pub fn try_grow(
    map: &MapSystem,
    orbit: &PeriodicOrbit,
    index: usize,
    branch: Branch,
    side: f64,
    budget: f64,
    opts: &ManifoldOptions,
) -> Result<(ManifoldSegment, Option<String>)> {
    if !map.is_map() {
        return Err(ChaosError::NotAMap(map.name()));
    }
    if index >= orbit.period {
        return Err(ChaosError::InvalidParameter(format!(
            "orbit point {index} out of range"
        )));
    }
    let base = orbit.points[index];
    let (_, _, jac) = map.step_n_jacobian(base, orbit.period)?;
    let m = StabilityMatrix::new(jac, orbit.period);
    let (lu, vu, ls, vs) = monodromy_eigen(&m)?;
    let (lambda, v) = match branch {
        Branch::Unstable => (lu, vu),
        Branch::Stable => (1.0 / ls, vs),
    };
    // a reflecting orbit flips sides each period; use the doubled period map
    let (multiplier, steps_per_generation) = if lambda < 0.0 {
        (lambda * lambda, 2 * orbit.period)
    } else {
        (lambda, orbit.period)
    };
    let norm = v[0].hypot(v[1]);
    let mut seg = ManifoldSegment {
        map: *map,
        base,
        base_index: index,
        branch,
        side: side.signum(),
        direction: [v[0] / norm, v[1] / norm],
        multiplier,
        steps_per_generation,
        eps: opts.eps,
        params: Vec::new(),
        points: Vec::new(),
        arclength: Vec::new(),
        generation: 0,
    };

    let mut fs: Vec<f64> = (0..16).map(|k| k as f64 / 16.0).collect();
    let mut total = 0.0;
    let mut stop_reason = None;
    let mut last_gen = 0;
    let mut cut_f = 1.0;
    'gens: for g in 0..opts.max_generations {
        last_gen = g;
        let gf = g as f64;
        let eval = |fs: &[f64]| -> Result<Vec<PhasePoint>> {
            fs.par_iter()
                .map(|f| seg.point_at(gf + f))
                .chain(rayon::iter::once(seg.point_at(gf + 1.0)))
                .collect()
        };
        let mut pts = match eval(&fs) {
            Ok(p) => p,
            Err(e) => {
                stop_reason = Some(format!("generation {g}: {e}"));
                break;
            }
        };
        loop {
            let n = pts.len();
            let mut split = vec![false; n - 1];
            for k in 0..n - 1 {
                if map.distance(pts[k], pts[k + 1]) > opts.max_spacing {
                    split[k] = true;
                }
                if k + 2 < n && turning(map, pts[k], pts[k + 1], pts[k + 2]) > opts.max_angle {
                    split[k] = true;
                    split[k + 1] = true;
                }
            }
            let fnext = |k: usize| if k + 1 < fs.len() { fs[k + 1] } else { 1.0 };
            let mids: Vec<(usize, f64)> = (0..n - 1)
                .filter(|&k| split[k] && fnext(k) - fs[k] > opts.min_df)
                .map(|k| (k, 0.5 * (fs[k] + fnext(k))))
                .collect();
            if mids.is_empty() {
                break;
            }
            let new_f: Vec<f64> = mids.iter().map(|m| m.1).collect();
            let new_pts: Result<Vec<PhasePoint>> =
                new_f.par_iter().map(|f| seg.point_at(gf + f)).collect();
            let new_pts = match new_pts {
                Ok(p) => p,
                Err(e) => {
                    stop_reason = Some(format!("generation {g}: {e}"));
                    break 'gens;
                }
            };
            let mut merged_f = Vec::with_capacity(fs.len() + new_f.len());
            let mut merged_p = Vec::with_capacity(pts.len() + new_f.len());
            let mut it = mids.iter().zip(new_pts).peekable();
            for k in 0..fs.len() {
                merged_f.push(fs[k]);
                merged_p.push(pts[k]);
                while let Some(((kk, f), x)) = it.peek() {
                    if *kk == k {
                        merged_f.push(*f);
                        merged_p.push(*x);
                        it.next();
                    } else {
                        break;
                    }
                }
            }
            merged_p.push(*pts.last().unwrap());
            fs = merged_f;
            pts = merged_p;
        }
        for k in 0..pts.len() - 1 {
            total += map.distance(pts[k], pts[k + 1]);
            if total >= budget {
                cut_f = if k + 1 < fs.len() { fs[k + 1] } else { 1.0 };
                break 'gens;
            }
        }
        if g + 1 == opts.max_generations {
            stop_reason = Some(format!("{} generations exhausted", opts.max_generations));
        }
    }

    // assemble every generation on the common parameter set
    let mut sigmas = Vec::new();
    for g in 0..=last_gen {
        for f in &fs {
            if g == last_gen && *f > cut_f {
                break;
            }
            sigmas.push(g as f64 + f);
        }
    }
    if stop_reason.is_none() && cut_f >= 1.0 {
        sigmas.push(last_gen as f64 + 1.0);
    }
    let evaluated: Vec<Result<PhasePoint>> = sigmas.par_iter().map(|s| seg.point_at(*s)).collect();
    let mut params = vec![f64::NEG_INFINITY];
    let mut pts = vec![map.normalize(base)];
    for (s, r) in sigmas.into_iter().zip(evaluated) {
        match r {
            Ok(x) => {
                params.push(s);
                pts.push(x);
            }
            Err(e) => {
                if stop_reason.is_none() {
                    stop_reason = Some(format!("σ = {s}: {e}"));
                }
                break;
            }
        }
    }
    let mut unfolded = Vec::with_capacity(pts.len());
    let mut arclength = Vec::with_capacity(pts.len());
    let mut acc = 0.0;
    for (k, x) in pts.iter().enumerate() {
        if k == 0 {
            unfolded.push(*x);
            arclength.push(0.0);
            continue;
        }
        let d = map.diff(*x, pts[k - 1]);
        let prev: PhasePoint = unfolded[k - 1];
        unfolded.push(PhasePoint::new(prev.q + d[0], prev.p + d[1]));
        acc += d[0].hypot(d[1]);
        arclength.push(acc);
    }
    seg.generation = params.last().map(|s| s.max(0.0).floor() as usize).unwrap_or(0);
    seg.params = params;
    seg.points = unfolded;
    seg.arclength = arclength;
    Ok((seg, stop_reason))
}
