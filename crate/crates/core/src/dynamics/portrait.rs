//! Surface-of-section portraits: ensembles of orbits with finite-time
//! exponents, rotational-curve detection and point-density statistics.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::maps::unit_wrap;
use super::{MapSystem, PhasePoint};
use crate::error::{ChaosError, Result};
use crate::svg::Svg;

/// Plotting window `((q0, q1), (p0, p1))` of a map's chart.
pub fn chart_window(map: &MapSystem) -> Result<((f64, f64), (f64, f64))> {
    match map {
        MapSystem::Standard { .. } | MapSystem::Baker => Ok(((0.0, 1.0), (0.0, 1.0))),
        MapSystem::Stadium(st) => Ok(((0.0, st.perimeter()), (-1.0, 1.0))),
        MapSystem::Flow(f) => Err(ChaosError::NotAMap(f.name())),
    }
}

/// `count` seeds uniform over the chart window.
pub fn random_seeds(map: &MapSystem, count: usize, seed: u64) -> Result<Vec<PhasePoint>> {
    let ((q0, q1), (p0, p1)) = chart_window(map)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| PhasePoint::new(rng.gen_range(q0..q1), rng.gen_range(p0..p1)))
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Portrait {
    pub map: MapSystem,
    /// One orbit per seed, seed included. On the standard-map cylinder `p`
    /// is kept unwrapped.
    pub orbits: Vec<Vec<PhasePoint>>,
    /// Finite-time Lyapunov exponent of each orbit.
    pub exponents: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StickyReport {
    /// Densest cell count over the median visited-cell count.
    pub ratio: f64,
    pub median: f64,
    pub max: f64,
    /// Centre of the densest cell.
    pub location: PhasePoint,
    /// Ratio a pure counting-noise excursion of four standard deviations would give.
    pub noise_ratio: f64,
}

fn orbit_with_exponent(map: &MapSystem, x: PhasePoint, n: usize) -> Result<(Vec<PhasePoint>, f64)> {
    let mut pts = Vec::with_capacity(n + 1);
    pts.push(x);
    let mut y = x;
    let mut v = [1.0, 0.0];
    let mut acc = 0.0;
    for _ in 0..n {
        let (z, _, j) = map.step_jacobian(y)?;
        let w = j.apply(v);
        let norm = w[0].hypot(w[1]);
        acc += norm.ln();
        v = [w[0] / norm, w[1] / norm];
        pts.push(z);
        y = z;
    }
    Ok((pts, if n > 0 { acc / n as f64 } else { 0.0 }))
}

/// Iterate every seed `iterations` times.
pub fn portrait(map: &MapSystem, seeds: &[PhasePoint], iterations: usize) -> Result<Portrait> {
    if !map.is_map() {
        return Err(ChaosError::NotAMap(map.name()));
    }
    let runs: Result<Vec<(Vec<PhasePoint>, f64)>> = seeds
        .par_iter()
        .map(|x| orbit_with_exponent(map, *x, iterations))
        .collect();
    let (orbits, exponents) = runs?.into_iter().unzip();
    Ok(Portrait {
        map: *map,
        orbits,
        exponents,
    })
}

impl Portrait {
    fn window(&self) -> ((f64, f64), (f64, f64)) {
        chart_window(&self.map).expect("portraits are built from maps")
    }

    /// Point folded into the plotting window.
    pub fn folded(&self, x: PhasePoint) -> PhasePoint {
        match self.map {
            MapSystem::Standard { .. } => PhasePoint::new(unit_wrap(x.q), unit_wrap(x.p)),
            _ => self.map.normalize(x),
        }
    }

    /// Orbits that visit every one of `q_bins` columns while their `p`
    /// stays within a band of width `max_dp`.
    pub fn rotational_orbits(&self, q_bins: usize, max_dp: f64) -> Vec<usize> {
        let ((q0, q1), _) = self.window();
        (0..self.orbits.len())
            .filter(|&i| {
                let o = &self.orbits[i];
                let mut seen = vec![false; q_bins];
                let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
                for x in o {
                    let f = (x.q - q0) / (q1 - q0);
                    seen[((f * q_bins as f64) as usize).min(q_bins - 1)] = true;
                    lo = lo.min(x.p);
                    hi = hi.max(x.p);
                }
                seen.iter().all(|s| *s) && hi - lo <= max_dp
            })
            .collect()
    }

    /// `bins × bins` point counts of orbits whose exponent exceeds `min_exponent`,
    /// indexed `[iq * bins + ip]`.
    pub fn density(&self, bins: usize, min_exponent: f64) -> Vec<usize> {
        let ((q0, q1), (p0, p1)) = self.window();
        let mut counts = vec![0usize; bins * bins];
        for (o, lam) in self.orbits.iter().zip(&self.exponents) {
            if *lam <= min_exponent {
                continue;
            }
            for x in o {
                let y = self.folded(*x);
                let i = (((y.q - q0) / (q1 - q0) * bins as f64) as usize).min(bins - 1);
                let j = (((y.p - p0) / (p1 - p0) * bins as f64) as usize).min(bins - 1);
                counts[i * bins + j] += 1;
            }
        }
        counts
    }

    /// Densest cell of the chaotic orbits relative to the median visited cell.
    pub fn sticky_excess(&self, bins: usize, min_exponent: f64) -> Result<StickyReport> {
        let counts = self.density(bins, min_exponent);
        let mut visited: Vec<usize> = counts.iter().copied().filter(|c| *c > 0).collect();
        if visited.is_empty() {
            return Err(ChaosError::InvalidParameter("no chaotic orbit in the portrait".into()));
        }
        visited.sort_unstable();
        let m = visited.len();
        let median = if m % 2 == 1 {
            visited[m / 2] as f64
        } else {
            0.5 * (visited[m / 2 - 1] + visited[m / 2]) as f64
        };
        let (arg, max) = counts
            .iter()
            .enumerate()
            .max_by_key(|(_, c)| **c)
            .map(|(k, c)| (k, *c as f64))
            .unwrap();
        let ((q0, q1), (p0, p1)) = self.window();
        let (i, j) = (arg / bins, arg % bins);
        let location = PhasePoint::new(
            q0 + (i as f64 + 0.5) / bins as f64 * (q1 - q0),
            p0 + (j as f64 + 0.5) / bins as f64 * (p1 - p0),
        );
        Ok(StickyReport {
            ratio: max / median,
            median,
            max,
            location,
            noise_ratio: 1.0 + 4.0 / median.sqrt(),
        })
    }

    /// `orbit,iteration,q,p` rows with points folded into the window.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "orbit,iteration,q,p")?;
        for (k, o) in self.orbits.iter().enumerate() {
            for (t, x) in o.iter().enumerate() {
                let y = self.folded(*x);
                writeln!(w, "{k},{t},{:.16e},{:.16e}", y.q, y.p)?;
            }
        }
        Ok(())
    }

    pub fn to_svg(&self) -> String {
        let (qr, pr) = self.window();
        let mut svg = Svg::new(600.0, 600.0, qr, pr);
        let palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b"];
        for (k, o) in self.orbits.iter().enumerate() {
            for x in o {
                let y = self.folded(*x);
                svg.circle(y.q, y.p, 0.6, palette[k % palette.len()]);
            }
        }
        svg.finish()
    }
}
