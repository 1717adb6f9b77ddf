use hamchaos::dynamics::Stadium;
use hamchaos::orbits::{find_periodic_orbits, CensusOptions, PeriodicOrbit, Seeding};
use hamchaos::perturb::{continue_orbit, first_order_action_change, trajectory_separation, PerturbationSpec};
use hamchaos::stability::monodromy;
use hamchaos::tangle::{evolve_gaussian, grow_manifold, Branch, GaussianState, ManifoldOptions};
use hamchaos::{ChaosError, MapSystem, PhasePoint};
use num_complex::Complex64;

fn horizontal(map: &MapSystem, st: &Stadium) -> PeriodicOrbit {
    PeriodicOrbit::from_points(
        map,
        vec![PhasePoint::new(st.right_apex(), 0.0), PhasePoint::new(st.left_apex(), 0.0)],
    )
    .unwrap()
}

#[test]
fn manifold_is_invariant() {
    let st = Stadium::new(1.0).unwrap();
    let map = MapSystem::stadium(1.0).unwrap();
    let orbit = horizontal(&map, &st);
    for (branch, side) in [(Branch::Unstable, 1.0), (Branch::Stable, -1.0)] {
        let seg = grow_manifold(&map, &orbit, 0, branch, side, 2.0, &ManifoldOptions::default()).unwrap();
        let top = *seg.params.last().unwrap();
        let mut checked = 0;
        for (sigma, x) in seg.params.iter().zip(&seg.points) {
            if !sigma.is_finite() {
                continue;
            }
            let exact = seg.point_at(*sigma).unwrap();
            assert!(map.distance(map.normalize(*x), exact) < 1e-8);
            if sigma + 1.0 <= top {
                let steps = match branch {
                    Branch::Unstable => 2,
                    Branch::Stable => -2,
                };
                let image = map.step_n(exact, steps).unwrap();
                let d = map.distance(image, seg.point_at(sigma + 1.0).unwrap());
                assert!(d < 1e-8, "{branch:?} σ = {sigma}: {d:e}");
                checked += 1;
            }
        }
        assert!(checked > 10);
    }
}

#[test]
fn eigenvector_is_invariant_under_monodromy() {
    let st = Stadium::new(1.0).unwrap();
    let map = MapSystem::stadium(1.0).unwrap();
    let orbit = horizontal(&map, &st);
    let seg = grow_manifold(&map, &orbit, 0, Branch::Unstable, 1.0, 0.5, &ManifoldOptions::default()).unwrap();
    let v = seg.direction;
    let mv = orbit.monodromy.jac.apply(v);
    let cross = v[0] * mv[1] - v[1] * mv[0];
    assert!(cross.abs() < 1e-9 * seg.multiplier);
    assert!((mv[0] * v[0] + mv[1] * v[1] - seg.multiplier).abs() < 1e-9 * seg.multiplier);
}

#[test]
fn first_order_action_matches_finite_differences() {
    let map = MapSystem::stadium(1.0).unwrap();
    let census = find_periodic_orbits(&map, 4, &Seeding::Grid { nq: 60, np: 60 }, &CensusOptions::default()).unwrap();
    let mut ratios = Vec::new();
    for o in census.orbits.iter().filter(|o| o.is_hyperbolic()) {
        let discrepancy = |delta: f64| -> Option<f64> {
            let spec = PerturbationSpec::new(1.0, delta).ok()?;
            let moved = continue_orbit(o, &spec).ok()?;
            Some((moved.action - o.action - first_order_action_change(o, &spec).ok()?).abs())
        };
        if let (Some(d1), Some(d2)) = (discrepancy(4e-3), discrepancy(2e-3)) {
            if d2 > 1e-11 {
                assert!(d1 < 2.0 * (4e-3f64).powi(2) * o.period as f64, "second-order term too large: {d1}");
                ratios.push(d1 / d2);
            }
        }
        if ratios.len() == 20 {
            break;
        }
    }
    assert!(ratios.len() >= 10, "only {} orbits continued", ratios.len());
    ratios.sort_by(f64::total_cmp);
    let median = ratios[ratios.len() / 2];
    assert!((median - 4.0).abs() < 0.5, "halving δγ divides the error by {median}");
}

#[test]
fn zero_deformation_is_the_identity() {
    let st = Stadium::new(1.0).unwrap();
    let map = MapSystem::stadium(1.0).unwrap();
    let orbit = horizontal(&map, &st);
    let spec = PerturbationSpec::new(1.0, 0.0).unwrap();
    let same = continue_orbit(&orbit, &spec).unwrap();
    assert!((same.action - orbit.action).abs() < 1e-12);
    assert_eq!(first_order_action_change(&orbit, &spec).unwrap(), 0.0);
    let sep = trajectory_separation(&map, &map, PhasePoint::new(0.0, 0.075), 5).unwrap();
    assert!(sep.iter().all(|s| *s == 0.0));
}

#[test]
fn horizontal_action_grows_linearly_in_gamma() {
    // Chord length 2(2 + 2γ) per period.
    let st = Stadium::new(1.0).unwrap();
    let map = MapSystem::stadium(1.0).unwrap();
    let orbit = horizontal(&map, &st);
    let spec = PerturbationSpec::new(1.0, 0.05).unwrap();
    assert!((first_order_action_change(&orbit, &spec).unwrap() - 0.2).abs() < 1e-12);
    let moved = continue_orbit(&orbit, &spec).unwrap();
    assert!((moved.action - (4.0 + 4.0 * 1.05)).abs() < 1e-10);
}

#[test]
fn negative_stadium_is_rejected() {
    assert!(matches!(PerturbationSpec::new(1.0, -2.0), Err(ChaosError::InvalidParameter(_))));
}

#[test]
fn gaussian_evolution_keeps_unit_determinant() {
    let map = MapSystem::stadium(1.0).unwrap();
    let s = GaussianState::new(0.7, 0.2, Complex64::new(3.0, -1.0), 0.01).unwrap();
    let e = evolve_gaussian(&map, &s, 3).unwrap();
    assert!((e.wigner_matrix().det() - 1.0).abs() < 1e-10);
    let m = monodromy(&map, s.centroid(), 3).unwrap();
    assert!((m.det() - 1.0).abs() < 1e-9);
}
