use hamchaos::dynamics::Stadium;
use hamchaos::orbits::{find_periodic_orbits, orbit_action, CensusOptions, Seeding};
use hamchaos::symbolic::{
    baker_decode, baker_encode, enumerate_fixed_points, entropy_bound, is_exactly_periodic, itinerary,
    periodic_point_exact, stadium_partition, PartitionOptions, Rational,
};
use hamchaos::{MapSystem, PhasePoint};
use proptest::prelude::*;

fn code() -> impl Strategy<Value = String> {
    prop::collection::vec(prop::bool::ANY, 1..=12)
        .prop_map(|v| v.into_iter().map(|b| if b { 'R' } else { 'L' }).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn encode_decode_round_trip(q in 0.0f64..1.0, p in 0.0f64..1.0) {
        let x = PhasePoint::new(q, p);
        let y = baker_decode(&baker_encode(x, 52).unwrap());
        prop_assert!((y.q - q).abs() <= 2f64.powi(-52) && (y.p - p).abs() <= 2f64.powi(-52));
    }

    #[test]
    fn code_points_are_exactly_periodic(c in code()) {
        if c.chars().all(|s| s == 'R') {
            prop_assert!(is_exactly_periodic(&c).is_err());
            return Ok(());
        }
        prop_assert!(is_exactly_periodic(&c).unwrap());
        let n = c.len() as i128;
        let (q, p) = periodic_point_exact(&c).unwrap();
        let den = (1i128 << n) - 1;
        prop_assert_eq!(den % q.denom(), 0);
        prop_assert_eq!(den % p.denom(), 0);
    }

    #[test]
    fn straight_edge_symbols_never_repeat(u in 0.0f64..1.0, p in -0.99f64..0.99, g in 0.3f64..2.0) {
        let st = Stadium::new(g).unwrap();
        if let Ok(s) = itinerary(&st, PhasePoint::new(u * st.perimeter(), p), 12) {
            prop_assert!(!s.contains("TT") && !s.contains("BB"), "{s}");
        }
    }
}

#[test]
fn baker_period_two_points() {
    let third = |k| Rational::new(k, 3);
    let mut pts = enumerate_fixed_points(2);
    pts.sort();
    assert_eq!(
        pts,
        vec![(third(0), third(0)), (third(1), third(2)), (third(2), third(1))]
    );
}

#[test]
fn baker_census_is_the_symbolic_enumeration() {
    let map = MapSystem::Baker;
    for n in 1..=6 {
        let census = find_periodic_orbits(&map, n, &Seeding::Grid { nq: 128, np: 128 }, &CensusOptions::default()).unwrap();
        let mut found: Vec<PhasePoint> = census.all_fixed_points().map(|(_, x)| x).collect();
        found.sort_by(|a, b| a.q.total_cmp(&b.q).then(a.p.total_cmp(&b.p)));
        let exact: Vec<PhasePoint> = enumerate_fixed_points(n)
            .into_iter()
            .map(|(q, p)| PhasePoint::new(*q.numer() as f64 / *q.denom() as f64, *p.numer() as f64 / *p.denom() as f64))
            .collect();
        assert_eq!(found.len(), exact.len(), "n = {n}");
        for x in &exact {
            assert!(
                found.iter().any(|y| (y.q - x.q).abs() < 1e-10 && (y.p - x.p).abs() < 1e-10),
                "n = {n}: missing {x:?}"
            );
        }
    }
}

#[test]
fn census_orbits_close_and_action_is_cyclic() {
    let map = MapSystem::standard(1.4).unwrap();
    let census = find_periodic_orbits(&map, 3, &Seeding::Grid { nq: 40, np: 40 }, &CensusOptions::default()).unwrap();
    assert!(!census.orbits.is_empty());
    for o in &census.orbits {
        let back = map.step_n(o.points[0], o.period as i64).unwrap();
        assert!(map.distance(back, o.points[0]) < 1e-12);
        let a = orbit_action(o, &map).unwrap();
        for k in 1..o.period {
            let s = o.shifted(k);
            assert!((orbit_action(&s, &map).unwrap() - a).abs() < 1e-12);
        }
    }
}

#[test]
fn partition_cells_are_itinerary_pure() {
    let opts = PartitionOptions {
        grid_q: 256,
        grid_p: 256,
        ..PartitionOptions::default()
    };
    let part = stadium_partition(1.0, 2, &opts).unwrap();
    assert_eq!(part.cell_count(), 60);
    let st = Stadium::new(1.0).unwrap();
    for cell in &part.cells {
        for x in cell.interior.iter().take(200) {
            assert_eq!(itinerary(&st, *x, 2).unwrap(), cell.itinerary);
        }
    }
}

#[test]
fn doubling_counts_give_ln_two() {
    let counts: Vec<usize> = (1..=8).map(|n| 1 << n).collect();
    for h in entropy_bound(&counts) {
        assert!((h - std::f64::consts::LN_2).abs() < 1e-12);
    }
}
