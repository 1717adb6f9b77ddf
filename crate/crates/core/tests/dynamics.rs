use hamchaos::dynamics::{conservation_check, integrate_flow, iterate, Stadium};
use hamchaos::stability::{finite_time_exponent, monodromy, propagate_tangent, stretch_pair};
use hamchaos::symbolic::{baker_decode, baker_encode};
use hamchaos::{ChaosError, MapSystem, PhasePoint};
use proptest::prelude::*;

fn stadium_point() -> impl Strategy<Value = (f64, PhasePoint)> {
    (0.2f64..2.0, 0.0f64..1.0, -0.95f64..0.95).prop_map(|(g, u, p)| {
        let st = Stadium::new(g).unwrap();
        (g, PhasePoint::new(u * st.perimeter(), p))
    })
}

/// Centered-difference Jacobian of `n` map steps.
fn fd_jacobian(map: &MapSystem, x: PhasePoint, n: usize, h: f64) -> Option<[[f64; 2]; 2]> {
    let col = |dq: f64, dp: f64| -> Option<[f64; 2]> {
        let a = map.step_n(PhasePoint::new(x.q + dq, x.p + dp), n as i64).ok()?;
        let b = map.step_n(PhasePoint::new(x.q - dq, x.p - dp), n as i64).ok()?;
        let d = map.diff(a, b);
        Some([d[0] / (2.0 * h), d[1] / (2.0 * h)])
    };
    let cq = col(h, 0.0)?;
    let cp = col(0.0, h)?;
    Some([[cq[0], cp[0]], [cq[1], cp[1]]])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stadium_jacobian_is_symplectic_and_matches_differences((g, x) in stadium_point()) {
        let map = MapSystem::stadium(g).unwrap();
        let (_, _, j) = map.step_jacobian(x).unwrap();
        prop_assert!((j.det() - 1.0).abs() < 1e-9, "det {}", j.det());
        if let Some(fd) = fd_jacobian(&map, x, 1, 1e-7) {
            // Difference quotients straddling a joint or a near-grazing bounce are meaningless.
            let scale = j.a.abs().max(j.b.abs()).max(j.c.abs()).max(j.d.abs());
            let fd_det = fd[0][0] * fd[1][1] - fd[0][1] * fd[1][0];
            if scale < 1e3 && (fd_det - 1.0).abs() < 1e-3 {
                for (an, fdv) in [(j.a, fd[0][0]), (j.b, fd[0][1]), (j.c, fd[1][0]), (j.d, fd[1][1])] {
                    prop_assert!((an - fdv).abs() <= 1e-5 * scale.max(1.0), "{an} vs {fdv}");
                }
            }
        }
    }

    #[test]
    fn standard_map_finite_difference_det(q in 0.0f64..1.0, p in 0.0f64..1.0, k in 0.0f64..5.0) {
        let map = MapSystem::standard(k).unwrap();
        let x = PhasePoint::new(q, p);
        let fd = fd_jacobian(&map, x, 3, 1e-7).unwrap();
        let det = fd[0][0] * fd[1][1] - fd[0][1] * fd[1][0];
        prop_assert!((det - 1.0).abs() < 1e-5, "det {det}");
        let (_, _, j) = map.step_n_jacobian(x, 3).unwrap();
        prop_assert!((j.det() - 1.0).abs() < 1e-9);
        let scale = j.a.abs().max(j.b.abs()).max(j.c.abs()).max(j.d.abs()).max(1.0);
        prop_assert!((j.a - fd[0][0]).abs() < 1e-5 * scale);
        prop_assert!((j.d - fd[1][1]).abs() < 1e-5 * scale);
    }

    #[test]
    fn stadium_chart_round_trip((g, x) in stadium_point()) {
        let st = Stadium::new(g).unwrap();
        let b = st.boundary(x.q);
        let back = st.to_arclength(b.pos).unwrap();
        prop_assert!(st.q_diff(back, x.q).abs() < 1e-12);
    }

    #[test]
    fn stadium_inverse_undoes_step((g, x) in stadium_point()) {
        let st = Stadium::new(g).unwrap();
        if let Ok((y, l)) = st.step(x) {
            let (z, l2) = st.step_inverse(y).unwrap();
            prop_assert!(st.q_diff(z.q, x.q).abs() < 1e-9 && (z.p - x.p).abs() < 1e-9);
            prop_assert!((l - l2).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_kick_conserves_p(q in 0.0f64..1.0, p in 0.0f64..1.0) {
        let map = MapSystem::standard(0.0).unwrap();
        let seg = iterate(&map, PhasePoint::new(q, p), 50).unwrap();
        prop_assert!(seg.points.iter().all(|y| y.p == p));
    }

    #[test]
    fn baker_step_is_a_shift(i in 0u64..(1 << 20), j in 0u64..(1 << 20)) {
        // Dyadic points are exact in binary floating point.
        let x = PhasePoint::new(i as f64 / (1u64 << 20) as f64, j as f64 / (1u64 << 20) as f64);
        let map = MapSystem::Baker;
        let (y, _) = map.step(x).unwrap();
        let s = baker_encode(x, 40).unwrap();
        let mut shifted = s.clone();
        let b = shifted.future.remove(0);
        shifted.past.insert(0, b);
        prop_assert_eq!(baker_decode(&shifted), y);
    }

    #[test]
    fn monodromy_chain_rule(q in 0.0f64..1.0, p in 0.0f64..1.0, k in 0.1f64..3.0, n in 1usize..6, m in 1usize..6) {
        let map = MapSystem::standard(k).unwrap();
        let x = PhasePoint::new(q, p);
        let mn = monodromy(&map, x, n).unwrap();
        let xn = map.step_n(x, n as i64).unwrap();
        let mm = monodromy(&map, xn, m).unwrap();
        let total = monodromy(&map, x, n + m).unwrap();
        let chained = mn.then(&mm);
        let scale = total.jac.a.abs().max(total.jac.d.abs()).max(1.0);
        prop_assert!(chained.jac.max_abs_diff(&total.jac) < 1e-9 * scale);
        prop_assert_eq!(chained.steps, n + m);
        prop_assert!((total.det() - 1.0).abs() < 1e-9 * scale);
    }

    #[test]
    fn stretch_pair_multiplies_to_one((g, x) in stadium_point(), n in 1usize..5) {
        let map = MapSystem::stadium(g).unwrap();
        if let Ok(m) = monodromy(&map, x, n) {
            let (lo, hi) = stretch_pair(&m);
            prop_assert!((lo * hi - 1.0).abs() < 1e-9 * hi.max(1.0), "{lo} * {hi}");
            prop_assert!(finite_time_exponent(&m) >= 0.0);
        }
    }
}

#[test]
fn tangent_propagation_matches_monodromy() {
    let map = MapSystem::stadium(1.0).unwrap();
    let x = PhasePoint::new(0.7, 0.31);
    let seg = iterate(&map, x, 7).unwrap();
    let a = propagate_tangent(&map, &seg).unwrap();
    let b = monodromy(&map, x, 7).unwrap();
    assert!(a.jac.max_abs_diff(&b.jac) < 1e-9 * b.jac.a.abs().max(1.0));
}

#[test]
fn horizontal_bounce_trace_and_baker_exponent() {
    let map = MapSystem::stadium(1.0).unwrap();
    let m = monodromy(&map, PhasePoint::new(0.0, 0.0), 2).unwrap();
    assert!((m.trace() - 34.0).abs() < 1e-9);
    let b = monodromy(&MapSystem::Baker, PhasePoint::new(0.3, 0.6), 5).unwrap();
    assert!((finite_time_exponent(&b) - std::f64::consts::LN_2).abs() < 1e-12);
}

#[test]
fn flows_conserve_energy() {
    for map in [MapSystem::harmonic(1.0, 1.3).unwrap(), MapSystem::quartic(1.0, 1.0).unwrap()] {
        let seg = integrate_flow(&map, PhasePoint::new(1.0, 0.2), 20.0).unwrap();
        let drift = conservation_check(&map, &seg).unwrap();
        assert!(drift < 1e-9, "{} drift {drift}", map.name());
    }
}

#[test]
fn bad_inputs_are_rejected() {
    let map = MapSystem::stadium(1.0).unwrap();
    assert!(map.step(PhasePoint::new(0.0, 1.5)).is_err());
    assert!(map.step(PhasePoint::new(f64::NAN, 0.0)).is_err());
    assert!(matches!(MapSystem::stadium(-0.5), Err(ChaosError::InvalidParameter(_))));
    assert!(MapSystem::standard(f64::INFINITY).is_err());
}
