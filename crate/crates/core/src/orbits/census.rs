use std::collections::HashMap;
use std::io::Write;

use rayon::prelude::*;

use crate::dynamics::{MapSystem, PhasePoint};
use crate::error::Result;
use crate::stability::finite_time_exponent;

use super::{orbit_from_seed, symmetry, PeriodicOrbit};

#[derive(Debug, Clone, PartialEq)]
pub enum Seeding {
    /// Uniform `nq × np` grid of cell centres over the chart.
    Grid { nq: usize, np: usize },
    /// Explicit seeds, e.g. partition-cell centroids.
    Points(Vec<PhasePoint>),
}

impl Default for Seeding {
    fn default() -> Self {
        Seeding::Grid { nq: 400, np: 400 }
    }
}

#[derive(Debug, Clone)]
pub struct CensusOptions {
    pub dedup_tol: f64,
    pub max_newton: usize,
    /// Add the symmetry images of every found orbit (stadium only).
    pub symmetrize: bool,
}

impl Default for CensusOptions {
    fn default() -> Self {
        Self {
            dedup_tol: 1e-8,
            max_newton: 60,
            symmetrize: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointCensus {
    pub n: usize,
    /// Non-marginal orbits, ordered by their lexicographically first point.
    pub orbits: Vec<PeriodicOrbit>,
    /// Marginal orbits (bouncing-ball family members), segregated.
    pub marginal: Vec<PeriodicOrbit>,
    pub excluded_marginal: usize,
    pub seeds: usize,
    pub converged_seeds: usize,
}

impl FixedPointCensus {
    /// Number of distinct fixed points of `Tⁿ` among non-marginal orbits.
    pub fn fixed_point_count(&self) -> usize {
        self.orbits.iter().map(|o| o.primitive_period).sum()
    }

    pub fn all_fixed_points(&self) -> impl Iterator<Item = (&PeriodicOrbit, PhasePoint)> {
        self.orbits
            .iter()
            .flat_map(|o| o.points[..o.primitive_period].iter().map(move |x| (o, *x)))
    }

    /// CSV with columns `n, orbit_id, point_index, q, p, action, trace, mu_per_step, symmetry_class`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "n,orbit_id,point_index,q,p,action,trace,mu_per_step,symmetry_class")?;
        for (id, o) in self.orbits.iter().enumerate() {
            let mu = finite_time_exponent(&o.monodromy);
            for (i, x) in o.points.iter().enumerate() {
                writeln!(
                    w,
                    "{},{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
                    self.n,
                    id,
                    i,
                    x.q,
                    x.p,
                    o.action,
                    o.trace(),
                    mu,
                    o.symmetry_class.as_deref().unwrap_or("")
                )?;
            }
        }
        Ok(())
    }
}

fn seeds_for(map: &MapSystem, seeding: &Seeding) -> Vec<PhasePoint> {
    match seeding {
        Seeding::Points(v) => v.clone(),
        Seeding::Grid { nq, np } => {
            let (q0, q1, p0, p1) = match map {
                MapSystem::Stadium(s) => (0.0, s.perimeter(), -1.0, 1.0),
                _ => (0.0, 1.0, 0.0, 1.0),
            };
            let mut out = Vec::with_capacity(nq * np);
            for i in 0..*nq {
                for j in 0..*np {
                    let q = q0 + (q1 - q0) * (i as f64 + 0.5) / *nq as f64;
                    let p = p0 + (p1 - p0) * (j as f64 + 0.5) / *np as f64;
                    out.push(PhasePoint::new(q, p));
                }
            }
            out
        }
    }
}

/// Deduplicating store keyed on a spatial hash of every orbit point.
pub(crate) struct OrbitStore<'a> {
    map: &'a MapSystem,
    tol: f64,
    cell: f64,
    index: HashMap<(i64, i64), Vec<usize>>,
    pub orbits: Vec<PeriodicOrbit>,
}

impl<'a> OrbitStore<'a> {
    pub fn new(map: &'a MapSystem, tol: f64) -> Self {
        Self {
            map,
            tol,
            cell: (tol * 100.0).max(1e-6),
            index: HashMap::new(),
            orbits: Vec::new(),
        }
    }

    fn key(&self, x: PhasePoint) -> (i64, i64) {
        ((x.q / self.cell).floor() as i64, (x.p / self.cell).floor() as i64)
    }

    pub fn find(&self, o: &PeriodicOrbit) -> Option<usize> {
        let x = self.map.normalize(o.points[0]);
        let (kq, kp) = self.key(x);
        // chart wrap: also probe the wrapped-around neighbour keys
        let (per_q, _) = self.map.periods();
        let wrap_keys: Vec<i64> = match per_q {
            Some(per) => {
                let m = (per / self.cell).floor() as i64;
                vec![kq, kq - m, kq + m, kq - m - 1, kq + m + 1]
            }
            None => vec![kq],
        };
        for kq0 in wrap_keys {
            for dq in -1..=1 {
                for dp in -1..=1 {
                    if let Some(ids) = self.index.get(&(kq0 + dq, kp + dp)) {
                        for &id in ids {
                            let other = &self.orbits[id];
                            if other.primitive_period == o.primitive_period
                                && o.cyclic_distance(other, self.map) < self.tol
                            {
                                return Some(id);
                            }
                        }
                    }
                }
            }
        }
        None
    }

    /// Insert unless already present; returns whether it was new.
    pub fn insert(&mut self, o: PeriodicOrbit) -> bool {
        if self.find(&o).is_some() {
            return false;
        }
        let id = self.orbits.len();
        for x in &o.points[..o.primitive_period] {
            let k = self.key(self.map.normalize(*x));
            self.index.entry(k).or_default().push(id);
        }
        self.orbits.push(o);
        true
    }
}

/// Rotate an orbit so its lexicographically smallest point comes first.
pub(crate) fn canonical(map: &MapSystem, mut o: PeriodicOrbit) -> PeriodicOrbit {
    for x in o.points.iter_mut() {
        *x = map.normalize(*x);
    }
    let d = o.primitive_period;
    let best = (0..d)
        .min_by(|&a, &b| {
            let (x, y) = (o.points[a], o.points[b]);
            x.q.total_cmp(&y.q).then(x.p.total_cmp(&y.p))
        })
        .unwrap_or(0);
    o.points.rotate_left(best);
    o
}

/// Newton census of the fixed points of `Tⁿ`.
pub fn find_periodic_orbits(
    map: &MapSystem,
    n: usize,
    seeding: &Seeding,
    opts: &CensusOptions,
) -> Result<FixedPointCensus> {
    let seeds = seeds_for(map, seeding);
    let found: Vec<Option<PeriodicOrbit>> = seeds
        .par_iter()
        .map(|s| orbit_from_seed(map, *s, n).ok())
        .collect();
    let converged_seeds = found.iter().filter(|o| o.is_some()).count();

    let mut store = OrbitStore::new(map, opts.dedup_tol);
    for o in found.into_iter().flatten() {
        let o = canonical(map, o);
        if store.find(&o).is_some() {
            continue;
        }
        if opts.symmetrize {
            if let MapSystem::Stadium(st) = map {
                for img in symmetry::images(st, &o) {
                    if let Ok(img) = PeriodicOrbit::from_points(map, img) {
                        store.insert(canonical(map, img));
                    }
                }
            }
        }
        store.insert(o);
    }
    let mut all = store.orbits;
    if let MapSystem::Stadium(st) = map {
        for o in all.iter_mut() {
            o.symmetry_class = Some(symmetry::symmetry_classify(st, o).class);
            o.itinerary = Some(crate::symbolic::stadium_itinerary_of_orbit(st, o));
        }
    }
    all.sort_by(|a, b| {
        let (x, y) = (a.points[0], b.points[0]);
        x.q.total_cmp(&y.q).then(x.p.total_cmp(&y.p))
    });
    let (marginal, orbits): (Vec<_>, Vec<_>) = all.into_iter().partition(|o| o.is_marginal());
    Ok(FixedPointCensus {
        n,
        excluded_marginal: marginal.iter().map(|o| o.primitive_period).sum(),
        marginal,
        orbits,
        seeds: seeds.len(),
        converged_seeds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_map_contains_fixed_points() {
        let map = MapSystem::standard(1.1).unwrap();
        let c = find_periodic_orbits(&map, 1, &Seeding::Grid { nq: 20, np: 20 }, &CensusOptions::default())
            .unwrap();
        let has = |q: f64, p: f64| {
            c.orbits
                .iter()
                .chain(c.marginal.iter())
                .any(|o| map.distance(o.points[0], PhasePoint::new(q, p)) < 1e-9)
        };
        assert!(has(0.0, 0.0));
        assert!(has(0.5, 0.0));
    }
}
