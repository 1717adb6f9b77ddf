//! Built-in reproduction scenarios, one per golden-number check.

use super::{load, parse_config, Scenario};
use crate::error::{ChaosError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CatalogEntry {
    pub name: &'static str,
    /// Acceptance item the entry reproduces.
    pub criterion: usize,
    /// Scenario file text.
    pub text: &'static str,
}

impl CatalogEntry {
    pub fn scenario(&self) -> Result<Scenario> {
        let (_, mut list) = load(&parse_config(self.text)?)?;
        list.pop().ok_or_else(|| ChaosError::InvalidParameter(format!("catalog entry {} is empty", self.name)))
    }

    pub fn anchor(&self) -> String {
        self.scenario().ok().and_then(|s| s.anchor).unwrap_or_default()
    }
}

const ENTRIES: [CatalogEntry; 14] = [
    CatalogEntry {
        name: "sec3-areas",
        criterion: 1,
        text: "[scenario sec3-areas]
operation = turnstile
anchor = the action difference on the energy surface |p|=1 equals 3.36839, precisely the resonance area A_R
gamma = 1.0
budget = 10.0
assert.mmp_a = 3.36839 +- 1e-4
assert.mmp_b = 2.991143 +- 1e-4
assert.turnstile_mmp = 0.377248 +- 1e-5
",
    },
    CatalogEntry {
        name: "sec3-circuits",
        criterion: 2,
        text: "[scenario sec3-circuits]
operation = turnstile
anchor = the flux through the turnstile, A_t=0.377248
gamma = 1.0
budget = 10.0
assert.zone_area = 3.36839 +- 1e-4
assert.turnstile_area = 0.377248 +- 1e-5
assert.route_gap_zone = <= 1e-4
assert.route_gap_turnstile = <= 1e-4
",
    },
    CatalogEntry {
        name: "sec3-monodromy",
        criterion: 3,
        text: "[scenario sec3-monodromy]
operation = monodromy
anchor = 2cosh(2 mu t)=34 or mu approx 1.76
gamma = 1.0
q = 0.0
p = 0.0
period = 2
assert.trace = 34 +- 1e-9
assert.mu = 1.763 +- 1e-3
",
    },
    CatalogEntry {
        name: "fig10-cycle",
        criterion: 4,
        text: "[scenario fig10-cycle]
operation = cycle
anchor = 8.977479 + 8.601952 - 17.554815 = 0.024616, a very small result
gamma = 1.0
assert.length[1] = 8.977479 +- 1e-5
assert.length[2] = 8.601952 +- 1e-5
assert.length[3] = 17.554815 +- 1e-5
assert.delta_w = 0.024616 +- 1e-5
assert.trace_defect[1] = 68.35 +- 0.5%
assert.trace_defect[2] = -48.05 +- 0.5%
assert.trace_defect[3] = -3267.27 +- 0.5%
assert.det_sign_gap = <= 1e-9
",
    },
    CatalogEntry {
        name: "fig11-sr",
        criterion: 5,
        text: "[scenario fig11-sr]
operation = sieber-richter
anchor = Delta W = 10.392305 - 9.656854 = 0.735451, R= 98.00/175.25=0.56
gamma = 1.0
periods = 4, 6, 8
grid = 200
lengths = 10.392305, 18.081381, 18.506560
assert.delta_w[1] = 0.735451 +- 1e-5
assert.delta_w[2] = 0.126423 +- 1e-5
assert.delta_w[3] = 0.184608 +- 1e-5
assert.trace_ratio[1] = 0.56 +- 0.01
assert.trace_ratio[2] = 0.85 +- 0.01
assert.trace_ratio[3] = 0.78 +- 0.01
",
    },
    CatalogEntry {
        name: "fig9-partitions",
        criterion: 6,
        text: "[scenario fig9-partitions]
operation = partition
anchor = 192 partitions, which is only 3.2 times larger than the number in the middle panel
gamma = 1.0, 1.05
depth = 3
grid = 2048
area_floor = 1e-7
assert.cells[1,1] = == 16
assert.cells[1,2] = == 60
assert.cells[1,3] = == 192
assert.cells[1.05,1] = == 16
assert.cells[1.05,2] = == 60
assert.cells[1.05,3] = == 208
assert.new_cells[1.05,3] = == 16
assert.entropy[1] = 1.1631508098056809 +- 1e-12
",
    },
    CatalogEntry {
        name: "fig13-bifurcation",
        criterion: 7,
        text: "[scenario fig13-bifurcation]
operation = bifurcation
anchor = all 16 tiny partitions are associated with the introduction of a single bifurcation
gamma = 0.98, 1.05
gamma_b = 1.0
period = 6
grid = 200
assert.family[0.98] = == 0
assert.family[1.05] = == 16
",
    },
    CatalogEntry {
        name: "baker-exact",
        criterion: 8,
        text: "[scenario baker-exact]
operation = baker
anchor = for which there are no finite time stability exponent fluctuations at all
max_period = 10
assert.codes_checked = == 2036
assert.periodicity_failures = == 0
assert.enumeration_mismatches = == 0
assert.total_mismatches = == 0
",
    },
    CatalogEntry {
        name: "fig4-census",
        criterion: 9,
        text: "[scenario fig4-census]
operation = uniformity
anchor = it is not possible to see the exponential convergence of the summation over the full surface of section by 10 bounces
gamma = 1.0
period = 10
grid = 200
baker_from = 4
baker_to = 10
baker_cells = 4
assert.stadium_total = 1.25 +- 0.75
assert.baker_monotone = == 1
",
    },
    CatalogEntry {
        name: "fig12-structural",
        criterion: 10,
        text: "[scenario fig12-structural]
operation = structural
anchor = Five bounces of two trajectories starting from the same initial condition (0, 0.075)
gamma = 1.0
gamma_pert = 1.05
q = 0.0
p = 0.075
bounces = 5
arclength = 2.0
budget = 2.4
assert.max_separation = > 0.5
assert.manifold_distance = < 0.02
assert.ratio = > 10
",
    },
    CatalogEntry {
        name: "sec4-diffusion",
        criterion: 11,
        text: "[scenario sec4-diffusion]
operation = diffusion
anchor = the total phase change is like a random walk in smaller phase changes
gamma = 1.0
epsilon = 0.001, 0.002
ensemble = 10000
t_max = 200
fit_from = 10
fit_to = 200
seed = 1
assert.r_squared[0.001] = > 0.95
assert.r_squared[0.002] = > 0.95
assert.epsilon_scaling = 1 +- 0.1
",
    },
    CatalogEntry {
        name: "airy",
        criterion: 12,
        text: "[scenario airy]
operation = airy
anchor = Illustration of the utility of a complex trajectory for the Airy function
points = -5, 3
assert.relative_error[-5] = <= 0.02
assert.relative_error[3] = <= 0.02
",
    },
    CatalogEntry {
        name: "fig15-phase",
        criterion: 13,
        text: "[scenario fig15-phase]
operation = phase
anchor = curve starts at the point (1,0) and proceeds always in a counterclockwise direction
mass = 1.0
alpha = 1.0
q = 1.0
p = 0.0
b = 1.0, 0.0
periods = 3
samples = 200
sweep = -0.49, 0.02, 51
sweep_samples = 50
assert.winding = 3 +- 1e-6
assert.counterclockwise = == 1
assert.sweep_corrections = == 1
assert.sweep_max_jump = < 0.7853981633974483
",
    },
    CatalogEntry {
        name: "fig2-sos",
        criterion: 14,
        text: "[scenario fig2-sos]
operation = sos
anchor = The values of K are 0.4, 1.1, and 4.0
map = standard
kparam = 0.4, 1.1, 4.0
orbits = 50
iterations = 2000
seed = 1
assert.rotational[0.4] = >= 1
assert.rotational[4] = == 0
assert.sticky[1.1] = >= 2
",
    },
];

pub fn catalog() -> &'static [CatalogEntry] {
    &ENTRIES
}

pub fn catalog_entry(name: &str) -> Option<&'static CatalogEntry> {
    ENTRIES.iter().find(|e| e.name == name)
}

/// Text listing of the catalog with expected values and tolerances.
pub fn listing() -> Result<String> {
    let mut out = String::new();
    for e in catalog() {
        let s = e.scenario()?;
        out += &format!("{} (criterion {}, operation {})\n", e.name, e.criterion, s.operation);
        out += &format!("  anchor: \"{}\"\n", s.anchor.unwrap_or_default());
        for a in &s.assertions {
            out += &format!("  {} {}\n", a.metric, a.check.describe());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_entry_parses_with_anchor() {
        for e in catalog() {
            let s = e.scenario().unwrap();
            assert_eq!(s.name, e.name);
            assert!(s.anchor.as_deref().is_some_and(|a| !a.is_empty()), "{}", e.name);
            assert!(!s.assertions.is_empty());
        }
    }

    #[test]
    fn one_entry_per_criterion() {
        let mut c: Vec<usize> = catalog().iter().map(|e| e.criterion).collect();
        c.sort();
        assert_eq!(c, (1..=14).collect::<Vec<_>>());
    }
}
