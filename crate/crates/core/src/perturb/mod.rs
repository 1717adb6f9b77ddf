//! Response of the stadium to changes of `γ`: orbit continuation, first-order
//! action changes, action diffusion, structural stability of manifolds and
//! the `γ = 1` bifurcation census.
//!
//! Increasing `γ` translates each semicircle outward along `x` with the
//! radius fixed; the straight edges lengthen and do not move normally.

pub mod bifurcation;
pub mod diffusion;
pub mod structural;

use crate::dynamics::{Piece, Stadium};
use crate::error::{ChaosError, Result};
use crate::orbits::billiard::{billiard_orbit, piece_param};
use crate::orbits::symmetry::symmetry_classify;
use crate::orbits::PeriodicOrbit;
use crate::symbolic::stadium_itinerary_of_orbit;

pub use bifurcation::{bifurcation_census, born_at, BifurcationPoint, BifurcationReport};
pub use diffusion::{action_diffusion, DiffusionOptions, DiffusionReport};
pub use structural::{manifold_stability_metric, trajectory_separation, StructuralReport};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationSpec {
    pub base_gamma: f64,
    pub delta: f64,
}

impl PerturbationSpec {
    pub fn new(base_gamma: f64, delta: f64) -> Result<Self> {
        if !(base_gamma > 0.0 && (base_gamma + delta) > 0.0) || !delta.is_finite() {
            return Err(ChaosError::InvalidParameter(format!(
                "γ = {base_gamma} + {delta} is not a stadium"
            )));
        }
        Ok(Self { base_gamma, delta })
    }

    pub fn perturbed_gamma(&self) -> f64 {
        self.base_gamma + self.delta
    }
}

/// Outward normal displacement of the wall at `pos` per unit `δγ`.
pub fn normal_displacement(st: &Stadium, piece: Piece, pos: [f64; 2]) -> f64 {
    match piece {
        Piece::RightArc => pos[0] - st.gamma,
        Piece::LeftArc => -(pos[0] + st.gamma),
        Piece::TopEdge | Piece::BottomEdge => 0.0,
    }
}

/// First-order change of the chord sum per unit `δγ` when leaving `x`:
/// `2 · h · cos(incidence)` for the wall displacement `h`.
pub fn bounce_action_derivative(st: &Stadium, q: f64, p: f64) -> f64 {
    let b = st.boundary(q);
    let h = normal_displacement(st, b.piece, b.pos);
    2.0 * h * (1.0 - p * p).max(0.0).sqrt()
}

/// `dW/dγ` along the unperturbed orbit.
pub fn action_derivative(orbit: &PeriodicOrbit, gamma: f64) -> Result<f64> {
    let st = Stadium::new(gamma)?;
    Ok(orbit
        .points
        .iter()
        .map(|x| bounce_action_derivative(&st, x.q, x.p))
        .sum())
}

/// `δW` to first order in `δγ`, from the unperturbed orbit only.
pub fn first_order_action_change(orbit: &PeriodicOrbit, spec: &PerturbationSpec) -> Result<f64> {
    Ok(spec.delta * action_derivative(orbit, spec.base_gamma)?)
}

/// Largest `γ` increment taken per Newton continuation step.
pub const CONTINUATION_STEP: f64 = 0.01;

fn continue_once(orbit: &PeriodicOrbit, from: &Stadium, to: &Stadium) -> Result<PeriodicOrbit> {
    let pieces: Vec<Piece> = orbit.points.iter().map(|x| from.piece_of(x.q)).collect();
    let scale = to.gamma / from.gamma;
    let guess: Vec<f64> = orbit
        .points
        .iter()
        .zip(&pieces)
        .map(|(x, pc)| {
            let pos = from.boundary(x.q).pos;
            match pc {
                Piece::RightArc | Piece::LeftArc => piece_param(from, *pc, pos),
                Piece::TopEdge | Piece::BottomEdge => pos[0] * scale,
            }
        })
        .collect();
    let mut o = billiard_orbit(to, &pieces, &guess)?;
    o.itinerary = Some(stadium_itinerary_of_orbit(to, &o));
    o.symmetry_class = Some(symmetry_classify(to, &o).class);
    Ok(o)
}

/// Follow `orbit` from `spec.base_gamma` to `γ + δγ` by Newton steps of at
/// most [`CONTINUATION_STEP`], checking the itinerary after each.
pub fn continue_orbit(orbit: &PeriodicOrbit, spec: &PerturbationSpec) -> Result<PeriodicOrbit> {
    let target = spec.perturbed_gamma();
    let mut st = Stadium::new(spec.base_gamma)?;
    let itin = stadium_itinerary_of_orbit(&st, orbit);
    let steps = (spec.delta.abs() / CONTINUATION_STEP).ceil().max(1.0) as usize;
    let mut cur = orbit.clone();
    for k in 1..=steps {
        let g = spec.base_gamma + spec.delta * k as f64 / steps as f64;
        let next = Stadium::new(g)?;
        cur = continue_once(&cur, &st, &next).map_err(|e| ChaosError::SuspectedBifurcation {
            gamma: g,
            reason: e.to_string(),
        })?;
        if cur.itinerary.as_deref() != Some(itin.as_str()) {
            return Err(ChaosError::SuspectedBifurcation {
                gamma: g,
                reason: format!(
                    "itinerary changed from {itin} to {}",
                    cur.itinerary.as_deref().unwrap_or("?")
                ),
            });
        }
        st = next;
    }
    debug_assert!((st.gamma - target).abs() < 1e-12);
    Ok(cur)
}
