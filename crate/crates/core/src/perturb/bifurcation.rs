//! Orbits born at a bifurcation value of `γ`, located by failed continuation.

use std::collections::BTreeSet;
use std::io::Write;

use rayon::prelude::*;

use crate::dynamics::MapSystem;
use crate::error::{ChaosError, Result};
use crate::orbits::{find_periodic_orbits, CensusOptions, PeriodicOrbit, Seeding};
use crate::symbolic::{stadium_partition, PartitionOptions};

use super::{continue_orbit, PerturbationSpec, CONTINUATION_STEP};

#[derive(Debug, Clone, PartialEq)]
pub struct BifurcationPoint {
    pub gamma: f64,
    /// Census orbits of period `n` at this `γ`.
    pub census_size: usize,
    /// Orientation-preserving (`Tr M > 2`) orbits that cannot be continued
    /// through the bifurcation value.
    pub family: Vec<PeriodicOrbit>,
    /// Inverse-hyperbolic (`Tr M < −2`) orbits born at the same value.
    pub companions: Vec<PeriodicOrbit>,
    /// Itinerary labels present here but not at the bifurcation value
    /// (when a partition depth was requested).
    pub new_cells: Vec<String>,
    pub cell_count: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BifurcationReport {
    pub gamma_b: f64,
    pub n: usize,
    pub reference_cells: Option<usize>,
    pub points: Vec<BifurcationPoint>,
}

impl BifurcationReport {
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "gamma,family_count,companion_count,new_cell_count")?;
        for p in &self.points {
            writeln!(
                w,
                "{:.16e},{},{},{}",
                p.gamma,
                p.family.len(),
                p.companions.len(),
                p.new_cells.len()
            )?;
        }
        Ok(())
    }
}

/// Whether `orbit` at `gamma` fails to continue across `gamma_b`, with the
/// failure within one continuation step of `gamma_b`.
pub fn born_at(orbit: &PeriodicOrbit, gamma: f64, gamma_b: f64) -> Result<bool> {
    let overshoot = CONTINUATION_STEP * (gamma_b - gamma).signum();
    let spec = PerturbationSpec::new(gamma, gamma_b + overshoot - gamma)?;
    match continue_orbit(orbit, &spec) {
        Ok(_) => Ok(false),
        Err(ChaosError::SuspectedBifurcation { gamma: g, .. }) => {
            Ok((g - gamma_b).abs() <= CONTINUATION_STEP + 1e-12)
        }
        Err(e) => Err(e),
    }
}

/// Period-`n` orbits at each `γ` of the sweep that belong to the family born
/// at `gamma_b`, with the depth-`partition_depth` itinerary cells that are
/// new relative to `gamma_b`.
pub fn bifurcation_census(
    gammas: &[f64],
    gamma_b: f64,
    n: usize,
    seeding: &Seeding,
    partition_depth: Option<(usize, PartitionOptions)>,
) -> Result<BifurcationReport> {
    let reference = match &partition_depth {
        Some((d, opts)) => Some(stadium_partition(gamma_b, *d, opts)?),
        None => None,
    };
    let ref_labels: BTreeSet<String> = reference
        .iter()
        .flat_map(|p| p.cells.iter().map(|c| c.itinerary.clone()))
        .collect();
    let mut points = Vec::new();
    for &g in gammas {
        let map = MapSystem::stadium(g)?;
        let census = find_periodic_orbits(&map, n, seeding, &CensusOptions::default())?;
        let candidates: Vec<&PeriodicOrbit> = census
            .orbits
            .iter()
            .filter(|o| o.primitive_period == n)
            .collect();
        let flags: Vec<Result<bool>> = candidates.par_iter().map(|o| born_at(o, g, gamma_b)).collect();
        let mut family = Vec::new();
        let mut companions = Vec::new();
        for (o, f) in candidates.into_iter().zip(flags) {
            if f? {
                if o.trace() > 0.0 {
                    family.push(o.clone());
                } else {
                    companions.push(o.clone());
                }
            }
        }
        let (new_cells, cell_count) = match &partition_depth {
            Some((d, opts)) if g != gamma_b => {
                let part = stadium_partition(g, *d, opts)?;
                let labels: Vec<String> = part
                    .cells
                    .iter()
                    .map(|c| c.itinerary.clone())
                    .filter(|l| !ref_labels.contains(l))
                    .collect();
                (labels, Some(part.cell_count()))
            }
            Some(_) => (Vec::new(), reference.as_ref().map(|p| p.cell_count())),
            None => (Vec::new(), None),
        };
        points.push(BifurcationPoint {
            gamma: g,
            census_size: census.orbits.len(),
            family,
            companions,
            new_cells,
            cell_count,
        });
    }
    Ok(BifurcationReport {
        gamma_b,
        n,
        reference_cells: reference.map(|p| p.cell_count()),
        points,
    })
}
