use hamchaos::complexdyn::{
    airy_wkb, complex_integrate, contour_map, energy_drift, evolve_flow_gaussian, lagrangian_manifold_point, orbit_period,
    saddle_search, track_flow_determinant, ComplexOptions, ComplexPhasePoint, ContourGrid, DeterminantKind, TimePath,
};
use hamchaos::tangle::GaussianState;
use hamchaos::{ChaosError, MapSystem, PhasePoint};
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn manifold_points_satisfy_constraint(
        q in -3.0f64..3.0, p in -3.0f64..3.0, br in 0.1f64..4.0, bi in -2.0f64..2.0,
        xr in -5.0f64..5.0, xi in -5.0f64..5.0,
    ) {
        let s = GaussianState::new(q, p, c(br, bi), 1.0).unwrap();
        let z = lagrangian_manifold_point(&s, c(xr, xi));
        let r = s.b * (z.q - q) + Complex64::i() * (z.p - p);
        prop_assert!(r.norm() < 1e-14 * (1.0 + z.q.norm() + z.p.norm()));
    }

    #[test]
    fn wigner_matrix_is_unimodular(br in 0.05f64..10.0, bi in -5.0f64..5.0) {
        let s = GaussianState::new(0.0, 0.0, c(br, bi), 1.0).unwrap();
        prop_assert!((s.wigner_matrix().det() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn complex_energy_is_conserved(qr in -1.0f64..1.0, qi in -0.3f64..0.3, pr in -1.0f64..1.0, pi in -0.3f64..0.3) {
        let sys = MapSystem::quartic(1.0, 1.0).unwrap();
        let path = TimePath::new(vec![c(0.0, 0.0), c(0.5, -0.2), c(1.0, 0.0)]).unwrap();
        match complex_integrate(&sys, ComplexPhasePoint::new(c(qr, qi), c(pr, pi)), &path, &ComplexOptions::default()) {
            Ok(tr) if !tr.escaped() => prop_assert!(energy_drift(&sys, &tr).unwrap() < 1e-10),
            _ => {}
        }
    }
}

#[test]
fn centroid_is_the_real_point() {
    let s = GaussianState::new(0.4, -0.7, c(1.3, 0.2), 1.0).unwrap();
    let z = lagrangian_manifold_point(&s, c(0.4, 0.0));
    assert_eq!((z.q, z.p), (c(0.4, 0.0), c(-0.7, 0.0)));
    let unit = GaussianState::new(0.0, 0.0, c(1.0, 0.0), 1.0).unwrap();
    assert!((lagrangian_manifold_point(&unit, c(1.0, 0.0)).p - Complex64::i()).norm() < 1e-15);
}

#[test]
fn harmonic_complex_solution_is_closed_form() {
    let (m, w) = (1.3, 0.8);
    let sys = MapSystem::harmonic(m, w).unwrap();
    let z0 = ComplexPhasePoint::new(c(0.5, 0.2), c(-0.3, 0.7));
    for t in [c(2.0, 0.0), c(1.0, -0.5)] {
        let tr = complex_integrate(&sys, z0, &TimePath::straight(t), &ComplexOptions::default()).unwrap();
        let q = z0.q * (w * t).cos() + z0.p / (m * w) * (w * t).sin();
        let p = z0.p * (w * t).cos() - z0.q * (m * w) * (w * t).sin();
        assert!((tr.end().q - q).norm() < 1e-10 && (tr.end().p - p).norm() < 1e-10);
    }
}

#[test]
fn linear_ramp_turns_at_the_origin() {
    let sys = MapSystem::linear_ramp();
    let z0 = ComplexPhasePoint::new(c(4.0, 0.0), c(0.0, -2.0));
    // p = −2i − t, q = 4 − 4it − t²: the origin at t = −2i, back to q = 4 at t = −4i.
    let path = TimePath::new(vec![c(0.0, 0.0), c(0.0, -2.0), c(0.0, -4.0)]).unwrap();
    let tr = complex_integrate(&sys, z0, &path, &ComplexOptions::default()).unwrap();
    assert!(energy_drift(&sys, &tr).unwrap() < 1e-12);
    let k = tr.times.iter().position(|t| *t == c(0.0, -2.0)).unwrap();
    assert!(tr.points[k].q.norm() < 1e-10 && tr.points[k].p.norm() < 1e-10);
    assert!((tr.end().q - c(4.0, 0.0)).norm() < 1e-10 && (tr.end().p - c(0.0, 2.0)).norm() < 1e-10);
}

#[test]
fn homotopic_paths_agree() {
    let sys = MapSystem::quartic(1.0, 1.0).unwrap();
    let z0 = ComplexPhasePoint::new(c(1.0, 0.1), c(0.2, -0.1));
    let opts = ComplexOptions::default();
    let a = complex_integrate(&sys, z0, &TimePath::real(1.2), &opts).unwrap();
    let b = complex_integrate(&sys, z0, &TimePath::new(vec![c(0.0, 0.0), c(0.6, 0.15), c(1.2, 0.0)]).unwrap(), &opts)
        .unwrap();
    assert!((a.end().q - b.end().q).norm() < 1e-9 && (a.end().p - b.end().p).norm() < 1e-9);
    assert!((a.action - b.action).norm() < 1e-9);
}

#[test]
fn imaginary_start_escapes_at_the_quadrature_time() {
    // q = iy, p = iv turns the quartic into y'' = 4y³ with E = 1, so the time to
    // |q| = R is ∫_1^R du / sqrt(2(u⁴ − 1)) (reference by adaptive quadrature).
    let sys = MapSystem::quartic(1.0, 1.0).unwrap();
    let tr = complex_integrate(&sys, ComplexPhasePoint::new(c(0.0, 1.0), c(0.0, 0.0)), &TimePath::real(2.0), &ComplexOptions::default())
        .unwrap();
    let te = tr.escape_time.expect("escapes");
    assert!((te.re - 0.9270366315432774).abs() < 1e-5, "{te}");
}

#[test]
fn d1_starts_at_one_and_winds() {
    let sys = MapSystem::quartic(1.0, 1.0).unwrap();
    let tau = orbit_period(&sys, 1.0, 0.0).unwrap();
    let tr = track_flow_determinant(&sys, PhasePoint::new(1.0, 0.0), 3.0 * tau, DeterminantKind::D1, c(1.0, 0.0), c(1.0, 0.0), 200)
        .unwrap();
    assert!((tr.values[0] - c(1.0, 0.0)).norm() < 1e-14);
    assert_eq!(tr.phase[0], 0.0);
    assert!(tr.counterclockwise());
    assert!(tr.max_jump() < std::f64::consts::FRAC_PI_2);
}

#[test]
fn contour_centroid_does_not_escape() {
    let s = GaussianState::new(1.0, 0.0, c(1.0, 0.0), 1.0).unwrap();
    let sys = MapSystem::quartic(1.0, 1.0).unwrap();
    let grid = ContourGrid {
        re: (0.5, 1.5),
        im: (-0.5, 0.5),
        nx: 3,
        ny: 3,
    };
    let map = contour_map(&s, &sys, 1.0, &grid, &ComplexOptions::default()).unwrap();
    let centre = map.at(1, 1);
    assert_eq!(centre.param, c(1.0, 0.0));
    assert!(centre.qt.expect("centroid stays finite").im.abs() < 1e-12);
}

#[test]
fn harmonic_saddle_is_the_real_centroid() {
    let sys = MapSystem::harmonic(1.0, 1.0).unwrap();
    let s1 = GaussianState::new(0.8, 0.1, c(1.0, 0.0), 1.0).unwrap();
    let s2 = evolve_flow_gaussian(&sys, &s1, 0.7).unwrap();
    let seed = ComplexPhasePoint::real(0.9, 0.0);
    let sol = saddle_search(&s1, &s2, &sys, 0.7, seed, &ComplexOptions::default()).unwrap();
    assert!(sol.residuals[0] < 1e-10 && sol.residuals[1] < 1e-10);
    assert!(sol.start.q.im.abs() < 1e-12 && sol.start.p.im.abs() < 1e-12);
    assert!((sol.start.q.re - 0.8).abs() < 1e-10);
    let again = saddle_search(&s1, &s2, &sys, 0.7, sol.start, &ComplexOptions::default()).unwrap();
    assert_eq!(again.iterations, 0);
}

#[test]
fn evolved_gaussian_stays_unimodular() {
    let sys = MapSystem::quartic(1.0, 1.0).unwrap();
    let s = GaussianState::new(1.0, 0.0, c(2.0, 0.5), 1.0).unwrap();
    let e = evolve_flow_gaussian(&sys, &s, 2.3).unwrap();
    assert!((e.wigner_matrix().det() - 1.0).abs() < 1e-10);
}

#[test]
fn airy_turning_point_is_excluded() {
    assert!(matches!(airy_wkb(0.0), Err(ChaosError::ExclusionZone(_))));
    assert!(complex_integrate(&MapSystem::Baker, ComplexPhasePoint::real(0.1, 0.1), &TimePath::real(1.0), &ComplexOptions::default()).is_err());
}
