use dlp_core::oracle::float_root_scan;
use dlp_core::periodic::{large_periodic_witness, periodic_census, Count, PeriodicOrbit};
use dlp_core::system::PiecewiseAffineMap;
use dlp_core::topology::{
    dlp_check_direct, dlp_check_touhey, shared_periodic_orbit, verify_dlp, Resolution,
};
use dlp_core::{builtins, rat, Limits, OpenRegion, Rational, System};
use proptest::collection::btree_set;
use proptest::prelude::*;

fn affine(s: System) -> PiecewiseAffineMap {
    match s {
        System::Affine(m) => m,
        _ => unreachable!(),
    }
}

fn orbit_meets(system: &System, orbit: &PeriodicOrbit, regions: &[OpenRegion]) -> bool {
    orbit.replays(system)
        && regions
            .iter()
            .all(|r| orbit.orbit.iter().any(|x| system.region_contains(r, x)))
}

#[test]
fn float_scan_agrees_with_exact_counts() {
    for sys in [builtins::tent(), builtins::doubling()] {
        let census = periodic_census(&sys, 10, 1 << 16).unwrap();
        let m = affine(sys);
        for n in 1..=10 {
            let scan = float_root_scan(&m, n, 1 << (n + 4)).unwrap();
            assert!(!scan.degenerate);
            assert_eq!(Count::Finite(scan.count), census.fix_counts[&n], "n = {n}");
        }
    }
}

#[test]
fn both_engines_agree_on_small_grids() {
    let limits = Limits::default();
    for (sys, res) in [
        (builtins::tent(), Resolution::Width(rat(1, 16))),
        (builtins::doubling(), Resolution::Width(rat(1, 16))),
        (builtins::full_shift(2), Resolution::Depth(3)),
        (builtins::golden_mean(), Resolution::Depth(3)),
        (builtins::full_shift(3), Resolution::Depth(2)),
    ] {
        for n in 0..=5 {
            for v in [
                dlp_check_direct(&sys, n, &res, &limits).unwrap(),
                dlp_check_touhey(&sys, n, &res, &limits).unwrap(),
            ] {
                assert!(v.is_verified(), "{v:?}");
                verify_dlp(&sys, &v, limits.piece_cap).unwrap();
                assert!(v.witnesses().iter().all(|w| w.minimal_period > n));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn tent_witnesses_are_valid(a in 0..63i64, w in 1..8i64, n in 1..8usize) {
        let tent = builtins::tent();
        let lo = rat(a, 64);
        let hi = (&lo + rat(w, 64)).min(rat(1, 1));
        let cell = OpenRegion::interval(lo, hi);
        let o = large_periodic_witness(&tent, &cell, n, &Limits::default()).unwrap();
        prop_assert!(o.minimal_period >= n);
        prop_assert!(tent.region_contains(&cell, &o.representative));
        prop_assert!(o.replays(&tent));
    }

    #[test]
    fn shared_orbits_through_disjoint_intervals(cuts in btree_set(1..40i64, 2..8)) {
        // consecutive cut points bound disjoint open intervals of [0, 1]
        let pts: Vec<Rational> = cuts.iter().map(|&c| rat(c, 40)).collect();
        let regions: Vec<OpenRegion> = pts.windows(2).map(|w| OpenRegion::interval(w[0].clone(), w[1].clone())).collect();
        for sys in [builtins::tent(), builtins::doubling()] {
            let o = shared_periodic_orbit(&sys, &regions, &Limits::default()).unwrap();
            prop_assert!(o.minimal_period >= regions.len());
            prop_assert!(orbit_meets(&sys, &o, &regions));
        }
    }

    #[test]
    fn shared_orbits_through_disjoint_cylinders(words in btree_set(proptest::collection::vec(0..2usize, 3), 1..8)) {
        let regions: Vec<OpenRegion> = words.into_iter().map(OpenRegion::cylinder).collect();
        let fs = builtins::full_shift(2);
        let o = shared_periodic_orbit(&fs, &regions, &Limits::default()).unwrap();
        prop_assert!(o.minimal_period >= regions.len());
        prop_assert!(orbit_meets(&fs, &o, &regions));
    }
}
