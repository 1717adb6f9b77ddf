use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::complexdyn::{
    airy_oracle, airy_wkb, contour_map, migrating_zero, orbit_period, sign_flip_sweep, track_flow_determinant,
    ComplexOptions, ContourGrid, DeterminantKind,
};
use crate::dynamics::{portrait, random_seeds, MapSystem, PhasePoint, Piece, Stadium};
use crate::error::{ChaosError, Result};
use crate::orbits::billiard::{billiard_orbit, piece_param};
use crate::orbits::{find_periodic_orbits, orbit_from_seed, uniformity_sum, CellGrid, CensusOptions, PeriodicOrbit, Seeding};
use crate::perturb::{action_diffusion, bifurcation_census, manifold_stability_metric, DiffusionOptions};
use crate::svg::Svg;
use crate::symbolic::{
    brute_force_fixed_points, brute_force_uniformity_total, entropy_bound, enumerate_fixed_points,
    exact_uniformity_cells, exact_uniformity_total, is_exactly_periodic, stadium_partition, PartitionOptions,
    Rational,
};
use crate::tangle::{
    area_between_manifolds, curvature_correction, find_homoclinic_points, grow_manifold, mmp_action_difference,
    sieber_richter_scan, Branch, GaussianState, ManifoldOptions, ManifoldSegment,
};

use super::config::Params;
use super::{Artifact, Metric};

/// Operation names accepted in scenario files.
pub const OPERATIONS: [&str; 16] = [
    "sos",
    "turnstile",
    "monodromy",
    "cycle",
    "sieber-richter",
    "partition",
    "bifurcation",
    "baker",
    "uniformity",
    "structural",
    "diffusion",
    "airy",
    "phase",
    "orbits",
    "manifold",
    "contour",
];

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum OpSpec {
    Sos {
        map: String,
        values: Vec<f64>,
        orbits: usize,
        iterations: usize,
        q_bins: usize,
        max_dp: f64,
        density_bins: usize,
        min_exponent: f64,
    },
    Turnstile {
        gamma: f64,
        budget: f64,
    },
    Monodromy {
        gamma: f64,
        q: f64,
        p: f64,
        period: usize,
    },
    Cycle {
        gamma: f64,
    },
    SieberRichter {
        gamma: f64,
        periods: Vec<f64>,
        grid: usize,
        lengths: Vec<f64>,
        length_tol: f64,
    },
    Partition {
        gammas: Vec<f64>,
        depth: usize,
        grid: usize,
        area_floor: f64,
    },
    Bifurcation {
        gammas: Vec<f64>,
        gamma_b: f64,
        period: usize,
        grid: usize,
    },
    Baker {
        max_period: usize,
    },
    Uniformity {
        gamma: f64,
        period: usize,
        grid: usize,
        baker_from: usize,
        baker_to: usize,
        baker_cells: usize,
    },
    Structural {
        gamma: f64,
        gamma_pert: f64,
        q: f64,
        p: f64,
        bounces: usize,
        arclength: f64,
        budget: f64,
    },
    Diffusion {
        gamma: f64,
        epsilons: Vec<f64>,
        ensemble: usize,
        t_max: usize,
        fit_from: usize,
        fit_to: usize,
    },
    Airy {
        points: Vec<f64>,
    },
    Phase {
        mass: f64,
        alpha: f64,
        q: f64,
        p: f64,
        b: Complex64,
        periods: f64,
        samples: usize,
        sweep: Vec<f64>,
        sweep_samples: usize,
    },
    Orbits {
        map: String,
        value: f64,
        period: usize,
        grid: usize,
    },
    Manifold {
        gamma: f64,
        q: f64,
        p: f64,
        period: usize,
        budget: f64,
    },
    Contour {
        system: String,
        mass: f64,
        coupling: f64,
        q: f64,
        p: f64,
        b: Complex64,
        time: f64,
        re: (f64, f64),
        im: (f64, f64),
        nx: usize,
        ny: usize,
        escape_radius: f64,
    },
}

fn bad(line: usize, message: String) -> ChaosError {
    ChaosError::Config { line, message }
}

fn pair(p: &Params, key: &str, default: (f64, f64)) -> Result<(f64, f64)> {
    let v = p.list_or(key, &[default.0, default.1])?;
    if v.len() != 2 {
        let line = p.section().entries.iter().find(|e| e.key == key).map(|e| e.line).unwrap_or(0);
        return Err(bad(line, format!("`{key}` takes two numbers")));
    }
    Ok((v[0], v[1]))
}

impl OpSpec {
    pub(crate) fn parse(op: &str, p: &Params, line: usize) -> Result<Self> {
        Ok(match op {
            "sos" => {
                let map = p.str_or("map", "standard");
                let key = match map.as_str() {
                    "standard" => "kparam",
                    "stadium" => "gamma",
                    other => return Err(bad(line, format!("sos map must be standard or stadium, got `{other}`"))),
                };
                OpSpec::Sos {
                    values: p.list_or(key, &[0.4, 1.1, 4.0])?,
                    map,
                    orbits: p.usize_or("orbits", 50)?,
                    iterations: p.usize_or("iterations", 2000)?,
                    q_bins: p.usize_or("q_bins", 50)?,
                    max_dp: p.f64_or("max_dp", 0.5)?,
                    density_bins: p.usize_or("density_bins", 40)?,
                    min_exponent: p.f64_or("min_exponent", 0.05)?,
                }
            }
            "turnstile" => OpSpec::Turnstile {
                gamma: p.f64_or("gamma", 1.0)?,
                budget: p.f64_or("budget", 10.0)?,
            },
            "monodromy" => OpSpec::Monodromy {
                gamma: p.f64_or("gamma", 1.0)?,
                q: p.f64_or("q", 0.0)?,
                p: p.f64_or("p", 0.0)?,
                period: p.usize_or("period", 2)?,
            },
            "cycle" => OpSpec::Cycle {
                gamma: p.f64_or("gamma", 1.0)?,
            },
            "sieber-richter" => OpSpec::SieberRichter {
                gamma: p.f64_or("gamma", 1.0)?,
                periods: p.list_or("periods", &[4.0, 6.0, 8.0])?,
                grid: p.usize_or("grid", 200)?,
                lengths: p.list_or("lengths", &[])?,
                length_tol: p.f64_or("length_tol", 1e-5)?,
            },
            "partition" => OpSpec::Partition {
                gammas: p.list_or("gamma", &[1.0])?,
                depth: p.usize_or("depth", 3)?,
                grid: p.usize_or("grid", PartitionOptions::default().grid_q)?,
                area_floor: p.f64_or("area_floor", PartitionOptions::default().area_floor)?,
            },
            "bifurcation" => OpSpec::Bifurcation {
                gammas: p.list_or("gamma", &[0.98, 1.05])?,
                gamma_b: p.f64_or("gamma_b", 1.0)?,
                period: p.usize_or("period", 6)?,
                grid: p.usize_or("grid", 200)?,
            },
            "baker" => OpSpec::Baker {
                max_period: p.usize_or("max_period", 10)?,
            },
            "uniformity" => OpSpec::Uniformity {
                gamma: p.f64_or("gamma", 1.0)?,
                period: p.usize_or("period", 10)?,
                grid: p.usize_or("grid", 200)?,
                baker_from: p.usize_or("baker_from", 4)?,
                baker_to: p.usize_or("baker_to", 10)?,
                baker_cells: p.usize_or("baker_cells", 4)?,
            },
            "structural" => OpSpec::Structural {
                gamma: p.f64_or("gamma", 1.0)?,
                gamma_pert: p.f64_or("gamma_pert", 1.05)?,
                q: p.f64_or("q", 0.0)?,
                p: p.f64_or("p", 0.075)?,
                bounces: p.usize_or("bounces", 5)?,
                arclength: p.f64_or("arclength", 2.0)?,
                budget: p.f64_or("budget", 2.4)?,
            },
            "diffusion" => OpSpec::Diffusion {
                gamma: p.f64_or("gamma", 1.0)?,
                epsilons: p.list_or("epsilon", &[1e-3, 2e-3])?,
                ensemble: p.usize_or("ensemble", 10_000)?,
                t_max: p.usize_or("t_max", 200)?,
                fit_from: p.usize_or("fit_from", 10)?,
                fit_to: p.usize_or("fit_to", 200)?,
            },
            "airy" => OpSpec::Airy {
                points: p.list_or("points", &[-5.0, 3.0])?,
            },
            "phase" => {
                let b = pair(p, "b", (1.0, 0.0))?;
                let sweep = p.list_or("sweep", &[-0.49, 0.02, 51.0])?;
                if sweep.len() != 3 {
                    return Err(bad(line, "`sweep` takes start, step, count".into()));
                }
                OpSpec::Phase {
                    mass: p.f64_or("mass", 1.0)?,
                    alpha: p.f64_or("alpha", 1.0)?,
                    q: p.f64_or("q", 1.0)?,
                    p: p.f64_or("p", 0.0)?,
                    b: Complex64::new(b.0, b.1),
                    periods: p.f64_or("periods", 3.0)?,
                    samples: p.usize_or("samples", 200)?,
                    sweep,
                    sweep_samples: p.usize_or("sweep_samples", 50)?,
                }
            }
            "orbits" => {
                let map = p.str_or("map", "stadium");
                let (key, default) = match map.as_str() {
                    "stadium" => ("gamma", 1.0),
                    "standard" => ("kparam", 1.1),
                    other => return Err(bad(line, format!("orbits map must be stadium or standard, got `{other}`"))),
                };
                OpSpec::Orbits {
                    value: p.f64_or(key, default)?,
                    map,
                    period: p.usize_or("period", 2)?,
                    grid: p.usize_or("grid", 200)?,
                }
            }
            "manifold" => OpSpec::Manifold {
                gamma: p.f64_or("gamma", 1.0)?,
                q: p.f64_or("q", 0.0)?,
                p: p.f64_or("p", 0.0)?,
                period: p.usize_or("period", 2)?,
                budget: p.f64_or("budget", 5.0)?,
            },
            "contour" => {
                let b = pair(p, "b", (1.0, 0.0))?;
                OpSpec::Contour {
                    system: p.str_or("system", "quartic"),
                    mass: p.f64_or("mass", 1.0)?,
                    coupling: p.f64_or("coupling", 1.0)?,
                    q: p.f64_or("q", 1.0)?,
                    p: p.f64_or("p", 0.0)?,
                    b: Complex64::new(b.0, b.1),
                    time: p.f64_or("time", 1.0)?,
                    re: pair(p, "re", (-2.0, 2.0))?,
                    im: pair(p, "im", (-2.0, 2.0))?,
                    nx: p.usize_or("nx", 41)?,
                    ny: p.usize_or("ny", 41)?,
                    escape_radius: p.f64_or("escape_radius", ComplexOptions::default().escape_radius)?,
                }
            }
            other => {
                return Err(bad(
                    line,
                    format!("unknown operation `{other}` (known: {})", OPERATIONS.join(", ")),
                ))
            }
        })
    }

    pub(crate) fn run(&self, seed: u64) -> Result<Outcome> {
        let mut out = Outcome::default();
        match self {
            OpSpec::Sos {
                map,
                values,
                orbits,
                iterations,
                q_bins,
                max_dp,
                density_bins,
                min_exponent,
            } => {
                for &v in values {
                    let system = if map == "standard" {
                        MapSystem::standard_cylinder(v)?
                    } else {
                        MapSystem::stadium(v)?
                    };
                    let seeds = random_seeds(&system, *orbits, seed)?;
                    let pt = portrait(&system, &seeds, *iterations)?;
                    out.metric(format!("rotational[{v}]"), pt.rotational_orbits(*q_bins, *max_dp).len() as f64);
                    match pt.sticky_excess(*density_bins, *min_exponent) {
                        Ok(s) => {
                            out.metric(format!("sticky[{v}]"), s.ratio);
                            out.metric(format!("sticky_noise[{v}]"), s.noise_ratio);
                        }
                        Err(ChaosError::InvalidParameter(_)) => {}
                        Err(e) => return Err(e),
                    }
                    let stem = format!("portrait_{}_{v}", map);
                    out.csv(format!("{stem}.csv"), |w| pt.write_csv(w))?;
                    out.file(format!("{stem}.svg"), pt.to_svg());
                }
            }
            OpSpec::Turnstile { gamma, budget } => turnstile(*gamma, *budget, &mut out)?,
            OpSpec::Monodromy { gamma, q, p, period } => {
                let map = MapSystem::stadium(*gamma)?;
                let orbit = orbit_from_seed(&map, PhasePoint::new(*q, *p), *period)?;
                let tr = orbit.trace();
                out.metric("trace", tr);
                out.metric("mu", (0.5 * tr.abs()).acosh() / *period as f64);
                out.metric("action", orbit.action);
                out.csv("orbit.csv".into(), |w| write_orbit_rows(w, &orbit))?;
            }
            OpSpec::Cycle { gamma } => cycle(*gamma, &mut out)?,
            OpSpec::SieberRichter {
                gamma,
                periods,
                grid,
                lengths,
                length_tol,
            } => {
                let map = MapSystem::stadium(*gamma)?;
                let mut pairs = Vec::new();
                for &n in periods {
                    let census = find_periodic_orbits(&map, n as usize, &Seeding::Grid { nq: *grid, np: *grid }, &CensusOptions::default())?;
                    pairs.extend(sieber_richter_scan(&map, &census, FRAC_PI_2)?);
                }
                out.metric("pairs", pairs.len() as f64);
                for (k, &len) in lengths.iter().enumerate() {
                    if let Some(sr) = pairs.iter().find(|sr| (sr.crossing.action - len).abs() <= *length_tol) {
                        out.metric(format!("delta_w[{}]", k + 1), sr.delta_w);
                        out.metric(format!("trace_ratio[{}]", k + 1), sr.trace_ratio);
                    }
                }
                let mut csv = String::from("period,crossing_length,partner_length,delta_w,trace_ratio,crossing_angle\n");
                for sr in &pairs {
                    let _ = writeln!(
                        csv,
                        "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                        sr.crossing.period,
                        sr.crossing.action,
                        sr.partner.action,
                        sr.delta_w,
                        sr.trace_ratio,
                        sr.crossing_angle
                    );
                }
                out.file("pairs.csv".into(), csv);
            }
            OpSpec::Partition {
                gammas,
                depth,
                grid,
                area_floor,
            } => {
                let opts = PartitionOptions {
                    grid_q: *grid,
                    grid_p: *grid,
                    area_floor: *area_floor,
                    ..PartitionOptions::default()
                };
                let mut reference: Vec<BTreeSet<String>> = Vec::new();
                let mut csv = String::from("gamma,n,cell_count,new_cells,fragments,unresolved\n");
                for (gi, &g) in gammas.iter().enumerate() {
                    let mut counts = Vec::new();
                    for n in 1..=*depth {
                        let part = stadium_partition(g, n, &opts)?;
                        let labels: BTreeSet<String> = part.cells.iter().map(|c| c.itinerary.clone()).collect();
                        counts.push(part.cell_count());
                        out.metric(format!("cells[{g},{n}]"), part.cell_count() as f64);
                        let new = if gi == 0 {
                            reference.push(labels);
                            0
                        } else {
                            let new = labels.difference(&reference[n - 1]).count();
                            out.metric(format!("new_cells[{g},{n}]"), new as f64);
                            new
                        };
                        let _ = writeln!(
                            csv,
                            "{g:.16e},{n},{},{new},{},{}",
                            part.cell_count(),
                            part.fragments,
                            part.unresolved
                        );
                    }
                    if let Some(h) = entropy_bound(&counts).last() {
                        out.metric(format!("entropy[{g}]"), *h);
                    }
                }
                out.file("partitions.csv".into(), csv);
            }
            OpSpec::Bifurcation {
                gammas,
                gamma_b,
                period,
                grid,
            } => {
                let rep = bifurcation_census(gammas, *gamma_b, *period, &Seeding::Grid { nq: *grid, np: *grid }, None)?;
                for pnt in &rep.points {
                    out.metric(format!("family[{}]", pnt.gamma), pnt.family.len() as f64);
                    out.metric(format!("companions[{}]", pnt.gamma), pnt.companions.len() as f64);
                }
                out.csv("bifurcation.csv".into(), |w| rep.write_csv(w))?;
            }
            OpSpec::Baker { max_period } => baker(*max_period, &mut out)?,
            OpSpec::Uniformity {
                gamma,
                period,
                grid,
                baker_from,
                baker_to,
                baker_cells,
            } => {
                let map = MapSystem::stadium(*gamma)?;
                let st = Stadium::new(*gamma)?;
                let census = find_periodic_orbits(&map, *period, &Seeding::Grid { nq: *grid, np: *grid }, &CensusOptions::default())?;
                let whole = uniformity_sum(&census, &CellGrid::whole((0.0, st.perimeter()), (-1.0, 1.0)));
                out.metric("stadium_total", whole.total);
                out.metric("stadium_fixed_points", census.fixed_point_count() as f64);
                let mut csv = String::from("n,max_fluctuation,total\n");
                let mut prev = f64::INFINITY;
                let mut monotone = true;
                for n in *baker_from..=*baker_to {
                    let rep = exact_uniformity_cells(n, &CellGrid::unit_square(*baker_cells, *baker_cells));
                    let f = rep.max_fluctuation();
                    monotone &= f < prev;
                    prev = f;
                    out.metric(format!("baker_fluctuation[{n}]"), f);
                    let _ = writeln!(csv, "{n},{f:.16e},{:.16e}", rep.total);
                }
                out.metric("baker_monotone", f64::from(u8::from(monotone)));
                out.file("baker_fluctuations.csv".into(), csv);
            }
            OpSpec::Structural {
                gamma,
                gamma_pert,
                q,
                p,
                bounces,
                arclength,
                budget,
            } => {
                let grow = |g: f64| -> Result<ManifoldSegment> {
                    let map = MapSystem::stadium(g)?;
                    let orbit = orbit_from_seed(&map, PhasePoint::new(0.0, 0.0), 2)?;
                    grow_manifold(&map, &orbit, 0, Branch::Unstable, 1.0, *budget, &ManifoldOptions::default())
                };
                let (ub, up) = (grow(*gamma)?, grow(*gamma_pert)?);
                let rep = manifold_stability_metric(&ub, &up, PhasePoint::new(*q, *p), *bounces, *arclength)?;
                out.metric("max_separation", rep.separations.iter().copied().fold(0.0, f64::max));
                out.metric("manifold_distance", rep.manifold_distance);
                out.metric("ratio", rep.ratio(*bounces));
                let mut csv = String::from("bounce,separation\n");
                for (k, s) in rep.separations.iter().enumerate() {
                    let _ = writeln!(csv, "{k},{s:.16e}");
                }
                out.file("separation.csv".into(), csv);
            }
            OpSpec::Diffusion {
                gamma,
                epsilons,
                ensemble,
                t_max,
                fit_from,
                fit_to,
            } => {
                let mut slopes = Vec::new();
                for &eps in epsilons {
                    let rep = action_diffusion(&DiffusionOptions {
                        gamma: *gamma,
                        epsilon: eps,
                        ensemble: *ensemble,
                        t_max: *t_max,
                        fit_range: (*fit_from, *fit_to),
                        seed,
                        ..DiffusionOptions::default()
                    })?;
                    out.metric(format!("r_squared[{eps}]"), rep.r_squared);
                    out.metric(format!("slope[{eps}]"), rep.slope);
                    out.metric(format!("k[{eps}]"), rep.k);
                    out.csv(format!("variance_{eps}.csv"), |w| rep.write_csv(w))?;
                    slopes.push((eps, rep.slope));
                }
                if let (Some(a), Some(b)) = (slopes.first(), slopes.last()) {
                    if slopes.len() > 1 {
                        out.metric("epsilon_scaling", (b.1 / a.1) / (b.0 / a.0).powi(2));
                    }
                }
            }
            OpSpec::Airy { points } => {
                let mut csv = String::from("q,wkb,oracle,relative_error\n");
                for &q in points {
                    let w = airy_wkb(q)?;
                    let o = airy_oracle(q);
                    let rel = ((w - o) / o).abs();
                    out.metric(format!("wkb[{q}]"), w);
                    out.metric(format!("oracle[{q}]"), o);
                    out.metric(format!("relative_error[{q}]"), rel);
                    let _ = writeln!(csv, "{q:.16e},{w:.16e},{o:.16e},{rel:.16e}");
                }
                out.file("airy.csv".into(), csv);
            }
            OpSpec::Phase {
                mass,
                alpha,
                q,
                p,
                b,
                periods,
                samples,
                sweep,
                sweep_samples,
            } => {
                let system = MapSystem::quartic(*mass, *alpha)?;
                let tau = orbit_period(&system, *q, *p)?;
                let tr = track_flow_determinant(
                    &system,
                    PhasePoint::new(*q, *p),
                    periods * tau,
                    DeterminantKind::D1,
                    *b,
                    *b,
                    *samples,
                )?;
                out.metric("period", tau);
                out.metric("winding", tr.winding);
                out.metric("counterclockwise", f64::from(u8::from(tr.counterclockwise())));
                out.metric("max_phase_step", tr.max_jump());
                let params: Vec<f64> = (0..sweep[2] as usize).map(|k| sweep[0] + k as f64 * sweep[1]).collect();
                let sw = sign_flip_sweep(migrating_zero, &params, 0.0, 2.0, *sweep_samples)?;
                out.metric("sweep_corrections", sw.sign_flip_corrections as f64);
                out.metric("sweep_max_jump", sw.max_corrected_jump());
                let mut csv = String::from("t,re,im,phase\n");
                for ((t, v), ph) in tr.times.iter().zip(&tr.values).zip(&tr.phase) {
                    let _ = writeln!(csv, "{t:.16e},{:.16e},{:.16e},{ph:.16e}", v.re, v.im);
                }
                out.file("phase.csv".into(), csv);
                let mut csv = String::from("lambda,raw_half_phase,corrected_half_phase\n");
                for k in 0..params.len() {
                    let _ = writeln!(
                        csv,
                        "{:.16e},{:.16e},{:.16e}",
                        params[k], sw.raw_half_phase[k], sw.corrected_half_phase[k]
                    );
                }
                out.file("sweep.csv".into(), csv);
            }
            OpSpec::Orbits { map, value, period, grid } => {
                let system = if map == "stadium" {
                    MapSystem::stadium(*value)?
                } else {
                    MapSystem::standard(*value)?
                };
                let census = find_periodic_orbits(&system, *period, &Seeding::Grid { nq: *grid, np: *grid }, &CensusOptions::default())?;
                out.metric("orbits", census.orbits.len() as f64);
                out.metric("fixed_points", census.fixed_point_count() as f64);
                out.metric("marginal", census.marginal.len() as f64);
                out.csv("census.csv".into(), |w| census.write_csv(w))?;
            }
            OpSpec::Manifold {
                gamma,
                q,
                p,
                period,
                budget,
            } => {
                let map = MapSystem::stadium(*gamma)?;
                let orbit = orbit_from_seed(&map, PhasePoint::new(*q, *p), *period)?;
                let u = grow_manifold(&map, &orbit, 0, Branch::Unstable, 1.0, *budget, &ManifoldOptions::default())?;
                let s = grow_manifold(&map, &orbit, 0, Branch::Stable, 1.0, *budget, &ManifoldOptions::default())?;
                out.metric("unstable_vertices", u.points.len() as f64);
                out.metric("stable_vertices", s.points.len() as f64);
                out.metric("unstable_generations", u.generation as f64);
                out.csv("manifolds.csv".into(), |w| {
                    let mut w = w;
                    u.write_csv(&mut w, true)?;
                    s.write_csv(&mut w, false)
                })?;
                out.file("manifolds.svg".into(), manifold_svg(&[&u, &s], &[]));
            }
            OpSpec::Contour {
                system,
                mass,
                coupling,
                q,
                p,
                b,
                time,
                re,
                im,
                nx,
                ny,
                escape_radius,
            } => {
                let sys = match system.as_str() {
                    "quartic" => MapSystem::quartic(*mass, *coupling)?,
                    "harmonic" => MapSystem::harmonic(*mass, *coupling)?,
                    other => return Err(ChaosError::InvalidParameter(format!("contour system `{other}`"))),
                };
                let state = GaussianState::new(*q, *p, *b, 1.0)?;
                let grid = ContourGrid {
                    re: *re,
                    im: *im,
                    nx: *nx,
                    ny: *ny,
                };
                let opts = ComplexOptions {
                    escape_radius: *escape_radius,
                    ..ComplexOptions::default()
                };
                let map = contour_map(&state, &sys, *time, &grid, &opts)?;
                out.metric("escaped_fraction", map.escaped_fraction());
                out.metric("branch_cuts", map.samples.iter().filter(|s| s.branch_cut).count() as f64);
                out.csv("contour.csv".into(), |w| map.write_csv(w))?;
                out.file("contour.svg".into(), map.to_svg());
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Default)]
pub(crate) struct Outcome {
    pub metrics: Vec<Metric>,
    pub artifacts: Vec<Artifact>,
}

impl Outcome {
    fn metric(&mut self, name: impl Into<String>, value: f64) {
        self.metrics.push(Metric {
            name: name.into(),
            value,
        });
    }

    fn file(&mut self, file: String, contents: String) {
        self.artifacts.push(Artifact { file, contents });
    }

    fn csv<F>(&mut self, file: String, f: F) -> Result<()>
    where
        F: FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
    {
        let mut buf = Vec::new();
        f(&mut buf)?;
        let contents = String::from_utf8(buf).map_err(|e| ChaosError::Io(e.to_string()))?;
        self.file(file, contents);
        Ok(())
    }
}

fn write_orbit_rows(w: &mut Vec<u8>, o: &PeriodicOrbit) -> std::io::Result<()> {
    use std::io::Write;
    writeln!(w, "index,q,p")?;
    for (k, x) in o.points.iter().enumerate() {
        writeln!(w, "{k},{:.16e},{:.16e}", x.q, x.p)?;
    }
    Ok(())
}

fn manifold_svg(segments: &[&ManifoldSegment], marks: &[PhasePoint]) -> String {
    let (mut q0, mut q1, mut p0, mut p1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for s in segments {
        for x in &s.points {
            q0 = q0.min(x.q);
            q1 = q1.max(x.q);
            p0 = p0.min(x.p);
            p1 = p1.max(x.p);
        }
    }
    let pad = 0.02 * (q1 - q0).max(p1 - p0).max(1e-9);
    let mut svg = Svg::new(800.0, 400.0, (q0 - pad, q1 + pad), (p0 - pad, p1 + pad));
    for s in segments {
        let colour = match s.branch {
            Branch::Unstable => "#d62728",
            Branch::Stable => "#1f77b4",
        };
        let pts: Vec<(f64, f64)> = s.points.iter().map(|x| (x.q, x.p)).collect();
        svg.polyline(&pts, colour, 1.0);
    }
    for m in marks {
        svg.circle(m.q, m.p, 3.0, "#000000");
    }
    svg.finish()
}

fn turnstile(gamma: f64, budget: f64, out: &mut Outcome) -> Result<()> {
    let map = MapSystem::stadium(gamma)?;
    let st = Stadium::new(gamma)?;
    let orbit = PeriodicOrbit::from_points(
        &map,
        vec![PhasePoint::new(st.right_apex(), 0.0), PhasePoint::new(st.left_apex(), 0.0)],
    )?;
    let opts = ManifoldOptions::default();
    // the unstable branch from the right apex that heads into p < 0
    let probe = grow_manifold(&map, &orbit, 0, Branch::Unstable, 1.0, 1e-3, &opts)?;
    let side = if probe.direction[1] < 0.0 { 1.0 } else { -1.0 };
    let u = grow_manifold(&map, &orbit, 0, Branch::Unstable, side, budget, &opts)?;
    let s = grow_manifold(&map, &orbit, 1, Branch::Stable, -1.0, budget, &opts)?;
    let hs = find_homoclinic_points(&u, &s)?;
    if hs.len() < 2 {
        return Err(ChaosError::NoConvergence(format!(
            "found {} primary homoclinic points, need 2",
            hs.len()
        )));
    }
    let (a, b) = (&hs[0], &hs[1]);
    let mmp_a = mmp_action_difference(&map, &orbit, a.location)?.delta_w;
    let mmp_b = mmp_action_difference(&map, &orbit, b.location)?.delta_w;
    let zone = area_between_manifolds(
        &map,
        &[
            u.sub_path(f64::NEG_INFINITY, a.sigma_u)?,
            s.sub_path(a.sigma_s, f64::NEG_INFINITY)?,
            vec![orbit.points[1], orbit.points[0]],
        ],
        1e-7,
    )?
    .abs();
    let lobe = area_between_manifolds(
        &map,
        &[u.sub_path(a.sigma_u, b.sigma_u)?, s.sub_path(b.sigma_s, a.sigma_s)?],
        1e-7,
    )?
    .abs();
    out.metric("mmp_a", mmp_a);
    out.metric("mmp_b", mmp_b);
    out.metric("turnstile_mmp", mmp_a - mmp_b);
    out.metric("zone_area", zone);
    out.metric("turnstile_area", lobe);
    out.metric("route_gap_zone", (zone - mmp_a).abs());
    out.metric("route_gap_turnstile", (lobe - (mmp_a - mmp_b)).abs());
    out.csv("manifolds.csv".into(), |w| {
        let mut w = w;
        u.write_csv(&mut w, true)?;
        s.write_csv(&mut w, false)
    })?;
    let mut csv = String::from("label,q,p,sigma_u,sigma_s,angle,mmp_delta_w\n");
    for (label, h, w) in [("a", a, mmp_a), ("b", b, mmp_b)] {
        let _ = writeln!(
            csv,
            "{label},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            h.location.q, h.location.p, h.sigma_u, h.sigma_s, h.angle, w
        );
    }
    out.file("homoclinic.csv".into(), csv);
    let marks: Vec<PhasePoint> = [a, b]
        .iter()
        .map(|h| u.points[h.u_index])
        .collect();
    out.file("tangle.svg".into(), manifold_svg(&[&u, &s], &marks));
    Ok(())
}

fn cycle(gamma: f64, out: &mut Outcome) -> Result<()> {
    use Piece::*;
    let st = Stadium::new(gamma)?;
    let t1 = billiard_orbit(&st, &[LeftArc, RightArc, RightArc], &[PI, 0.9, -0.9])?;
    let t2 = billiard_orbit(&st, &[TopEdge, RightArc, LeftArc], &[0.0, -0.3, PI + 0.3])?;
    let cfg = |x: &PhasePoint| {
        let bp = st.boundary(x.q);
        (bp.piece, piece_param(&st, bp.piece, bp.pos))
    };
    let mut pieces = Vec::new();
    let mut guess = Vec::new();
    for (o, rot) in [(&t1, 0), (&t2, 2)] {
        for k in 0..o.period {
            let (pc, u) = cfg(&o.points[(k + rot) % o.period]);
            pieces.push(pc);
            guess.push(u);
        }
    }
    let shadow = billiard_orbit(&st, &pieces, &guess)?;
    let cc = curvature_correction(&t1, &t2, &shadow)?;
    for (k, o) in [&t1, &t2, &shadow].into_iter().enumerate() {
        out.metric(format!("length[{}]", k + 1), o.action);
    }
    // quoted as the primitive lengths minus the shadow
    out.metric("delta_w", -cc.delta_w);
    for k in 0..3 {
        out.metric(format!("trace_defect[{}]", k + 1), cc.trace_defects[k]);
        out.metric(format!("det[{}]", k + 1), cc.dets[k]);
    }
    let gap = (0..3)
        .map(|k| ((cc.dets[k] + cc.trace_defects[k]) / cc.dets[k]).abs())
        .fold(0.0, f64::max);
    out.metric("det_sign_gap", gap);
    out.metric("det_ratio", cc.det_ratio);
    let mut csv = String::from("orbit,index,q,p\n");
    for (name, o) in [("t1", &t1), ("t2", &t2), ("t1t2", &shadow)] {
        for (k, x) in o.points.iter().enumerate() {
            let _ = writeln!(csv, "{name},{k},{:.16e},{:.16e}", x.q, x.p);
        }
    }
    out.file("cycle_orbits.csv".into(), csv);
    Ok(())
}

fn baker(max_period: usize, out: &mut Outcome) -> Result<()> {
    let mut failures = 0usize;
    let mut codes = 0usize;
    let mut enumeration_mismatch = 0usize;
    let mut total_mismatch = 0usize;
    let mut csv = String::from("n,fixed_points,total_num,total_den\n");
    for n in 1..=max_period {
        for i in 0..(1u64 << n) - 1 {
            let code: String = (0..n).map(|k| if (i >> (n - 1 - k)) & 1 == 1 { 'R' } else { 'L' }).collect();
            codes += 1;
            if !is_exactly_periodic(&code)? {
                failures += 1;
            }
        }
        let mut coded = enumerate_fixed_points(n);
        coded.sort();
        let brute = brute_force_fixed_points(n)?;
        if brute != coded {
            enumeration_mismatch += 1;
        }
        let total = exact_uniformity_total(n);
        let closed = Rational::new(1i128 << n, (1i128 << n) - 1);
        if brute_force_uniformity_total(n)? != total || total != closed {
            total_mismatch += 1;
        }
        let _ = writeln!(csv, "{n},{},{},{}", brute.len(), total.numer(), total.denom());
    }
    out.metric("codes_checked", codes as f64);
    out.metric("periodicity_failures", failures as f64);
    out.metric("enumeration_mismatches", enumeration_mismatch as f64);
    out.metric("total_mismatches", total_mismatch as f64);
    out.file("baker_totals.csv".into(), csv);
    Ok(())
}
