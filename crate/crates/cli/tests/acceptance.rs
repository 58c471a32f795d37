//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::time::{Duration, Instant};

use dlp_cli::app::{run_on, EngineChoice};
use dlp_cli::{Command, Report};
use dlp_core::builtins;
use dlp_core::oracle::{exhaustive_cycle_census, finite_reach_matrix, float_root_scan};
use dlp_core::periodic::{
    detect_identity_iterate, detect_reflection_segment, periodic_census, Count, PeriodicOrbit,
};
use dlp_core::system::{FiniteMap, Sft};
use dlp_core::topology::{
    dlp_check_direct, dlp_check_touhey, ncycle_sup_reach, reach_time, shared_periodic_orbit,
    verify_dlp, Resolution,
};
use dlp_core::{rat, Limits, OpenRegion, System};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, budget: Duration) -> Result<String, String> {
    let t = start.elapsed();
    ensure(t <= budget, || format!("took {t:.2?}, budget {budget:?}"))?;
    Ok(format!("{t:.2?}"))
}

fn affine(system: &System) -> &dlp_core::system::PiecewiseAffineMap {
    match system {
        System::Affine(m) => m,
        _ => unreachable!(),
    }
}

fn fixed_point_counts() -> Check {
    let start = Instant::now();
    let cap = Limits::default().piece_cap;
    for (name, sys, expected) in [
        (
            "tent",
            builtins::tent(),
            (|n: u32| 1u64 << n) as fn(u32) -> u64,
        ),
        ("doubling", builtins::doubling(), |n: u32| (1u64 << n) - 1),
    ] {
        let census = periodic_census(&sys, 12, cap).map_err(|e| e.to_string())?;
        for n in 1..=12u32 {
            let got = census.fix_counts[&(n as usize)];
            ensure(got == Count::Finite(expected(n)), || {
                format!("{name}: |Fix(f^{n})| = {got:?}")
            })?;
        }
    }
    let elapsed = within(start, Duration::from_secs(5))?;
    for sys in [builtins::tent(), builtins::doubling()] {
        for n in 1..=10 {
            let scan = float_root_scan(affine(&sys), n, 1 << (n + 4)).map_err(|e| e.to_string())?;
            let exact = periodic_census(&sys, n, cap)
                .map_err(|e| e.to_string())?
                .fix_counts[&n];
            ensure(
                !scan.degenerate && Count::Finite(scan.count) == exact,
                || format!("float scan n={n}: {} vs {exact:?}", scan.count),
            )?;
        }
    }
    Ok(format!(
        "n = 1..12 exact in {elapsed}, float scan agrees for n <= 10"
    ))
}

fn mobius(n: u64) -> i64 {
    let (mut n, mut sign, mut p) = (n, 1, 2);
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        -sign
    } else {
        sign
    }
}

fn necklace_points(q: i64, n: u64) -> i64 {
    (1..=n)
        .filter(|d| n.is_multiple_of(*d))
        .map(|d| mobius(n / d) * q.pow(d as u32))
        .sum()
}

fn shift_minimal_counts() -> Check {
    let sys = builtins::full_shift(2);
    let census =
        periodic_census(&sys, 12, Limits::default().piece_cap).map_err(|e| e.to_string())?;
    for n in 1..=12usize {
        let want = necklace_points(2, n as u64) as u64;
        let got = census.counts[&n];
        ensure(got == Count::Finite(want), || {
            format!("n={n}: {got:?}, expected {want}")
        })?;
    }
    let sft = Sft::full_shift(2);
    for n in 1..=10 {
        let oracle = exhaustive_cycle_census(&sft, n).map_err(|e| e.to_string())?;
        let got = oracle.by_period.get(&n).copied().unwrap_or(0);
        ensure(Count::Finite(got) == census.counts[&n], || {
            format!("exhaustive n={n}: {got}")
        })?;
    }
    Ok("Möbius formula for n = 1..12, exhaustive words for n <= 10".into())
}

fn dlp_cases() -> Vec<(&'static str, System, Resolution, &'static str)> {
    vec![
        (
            "tent",
            builtins::tent(),
            Resolution::Width(rat(1, 128)),
            "1/128",
        ),
        (
            "doubling",
            builtins::doubling(),
            Resolution::Width(rat(1, 128)),
            "1/128",
        ),
        (
            "fullshift:2",
            builtins::full_shift(2),
            Resolution::Depth(7),
            "7",
        ),
        (
            "goldenmean",
            builtins::golden_mean(),
            Resolution::Depth(7),
            "7",
        ),
    ]
}

fn both_engines_verify() -> Check {
    let start = Instant::now();
    let limits = Limits::default();
    let mut witnesses = 0;
    for (name, sys, res, _) in dlp_cases() {
        for n in 1..=8 {
            for (engine, v) in [
                ("direct", dlp_check_direct(&sys, n, &res, &limits)),
                ("touhey", dlp_check_touhey(&sys, n, &res, &limits)),
            ] {
                let v = v.map_err(|e| format!("{name} {engine} n={n}: {e}"))?;
                ensure(v.is_verified(), || {
                    format!("{name} {engine} n={n}: not verified")
                })?;
                verify_dlp(&sys, &v, limits.piece_cap)
                    .map_err(|e| format!("{name} {engine} n={n}: {e}"))?;
                witnesses += v.witnesses().len();
            }
        }
    }
    let elapsed = within(start, Duration::from_secs(60))?;
    Ok(format!(
        "4 systems, n = 1..8, {witnesses} witnesses replayed in {elapsed}"
    ))
}

fn refutations() -> Check {
    let limits = Limits::default();
    for (name, sys, n, res) in [
        ("cycle:5", builtins::cycle(5), 5, Resolution::Singletons),
        (
            "identity",
            builtins::identity(),
            2,
            Resolution::Width(rat(1, 128)),
        ),
        (
            "reflection",
            builtins::reflection(),
            3,
            Resolution::Width(rat(1, 128)),
        ),
    ] {
        let v = dlp_check_direct(&sys, n, &res, &limits).map_err(|e| e.to_string())?;
        ensure(v.is_refuted(), || format!("{name} n={n}: {v:?}"))?;
        verify_dlp(&sys, &v, limits.piece_cap).map_err(|e| format!("{name}: {e}"))?;
    }
    Ok("cycle:5 at n=5, identity at n=2, reflection at n=3".into())
}

fn finite_maps() -> Check {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let (mut cyclic, mut non_cyclic) = (0, 0);
    for trial in 0..100 {
        let m = rng.gen_range(1..=50);
        let table: Vec<usize> = if rng.gen_bool(0.3) {
            // a random single cycle, so both sides of the equivalence occur
            let mut order: Vec<usize> = (0..m).collect();
            for i in (1..m).rev() {
                order.swap(i, rng.gen_range(0..=i));
            }
            let mut t = vec![0; m];
            for i in 0..m {
                t[order[i]] = order[(i + 1) % m];
            }
            t
        } else {
            (0..m).map(|_| rng.gen_range(0..m)).collect()
        };
        let f = FiniteMap::new(m, table.clone()).map_err(|e| e.to_string())?;
        let a = ncycle_sup_reach(&System::Finite(f.clone())).map_err(|e| e.to_string())?;
        let ctx = || format!("trial {trial}, table {table:?}");
        ensure(a.k_star.is_some() == f.is_single_cycle(), || {
            format!("{}: k* = {:?}", ctx(), a.k_star)
        })?;
        if let Some(k) = a.k_star {
            ensure(m <= k + 1, || {
                format!("{}: |X| = {m} > k* + 1 = {}", ctx(), k + 1)
            })?;
            cyclic += 1;
        } else {
            non_cyclic += 1;
        }
        let oracle = finite_reach_matrix(&f).map_err(|e| e.to_string())?;
        ensure(a.reach == oracle, || {
            format!("{}: reach matrix differs from oracle", ctx())
        })?;
    }
    Ok(format!("{cyclic} single cycles, {non_cyclic} others"))
}

fn reach_times() -> Check {
    let sys = builtins::tent();
    let cap = Limits::default().reach_cap;
    let w = OpenRegion::interval(rat(9, 10), rat(1, 1));
    for k in 3..=10 {
        let v = OpenRegion::interval(rat(0, 1), rat(1, 1 << k));
        let t = reach_time(&sys, &v, &w, cap).map_err(|e| e.to_string())?;
        ensure(t == k as usize, || format!("tent k={k}: reach {t}"))?;
    }
    let sys = builtins::full_shift(2);
    for k in 1..=10 {
        let t = reach_time(
            &sys,
            &OpenRegion::cylinder(vec![0; k]),
            &OpenRegion::cylinder(vec![1]),
            cap,
        )
        .map_err(|e| e.to_string())?;
        ensure(t == k, || format!("shift k={k}: reach {t}"))?;
    }
    Ok("tent k = 3..10 and full 2-shift k = 1..10".into())
}

fn check_shared(
    sys: &System,
    regions: &[OpenRegion],
    limits: &Limits,
) -> Result<PeriodicOrbit, String> {
    let orbit =
        shared_periodic_orbit(sys, regions, limits).map_err(|e| format!("{regions:?}: {e}"))?;
    ensure(orbit.replays(sys), || {
        format!("{regions:?}: orbit does not replay")
    })?;
    ensure(orbit.minimal_period >= regions.len(), || {
        format!("{regions:?}: period {}", orbit.minimal_period)
    })?;
    for r in regions {
        ensure(
            orbit.orbit.iter().any(|x| sys.region_contains(r, x)),
            || format!("orbit misses {r}"),
        )?;
    }
    Ok(orbit)
}

fn shared_orbits() -> Check {
    let limits = Limits::default();
    let shift = builtins::full_shift(2);
    let cylinders: Vec<OpenRegion> = [[0, 0], [0, 1], [1, 0], [1, 1]]
        .iter()
        .map(|w| OpenRegion::cylinder(w.to_vec()))
        .collect();
    let orbit = check_shared(&shift, &cylinders, &limits)?;
    let first = orbit.minimal_period;

    // triples of the eight dyadic cells of width 1/8, each shrunk to its middle half
    let tent = builtins::tent();
    let cell = |i: i64| OpenRegion::interval(rat(4 * i + 1, 32), rat(4 * i + 3, 32));
    let mut triples = 0;
    for a in 0..8 {
        for b in a + 1..8 {
            for c in b + 1..8 {
                check_shared(&tent, &[cell(a), cell(b), cell(c)], &limits)?;
                triples += 1;
            }
        }
    }
    Ok(format!(
        "4 depth-2 cylinders (period {first}), {triples} tent triples"
    ))
}

fn dichotomy_detectors() -> Check {
    let cap = Limits::default().piece_cap;
    let refl = detect_identity_iterate(&builtins::reflection(), 10, cap);
    ensure(refl == Some(2), || format!("reflection: {refl:?}"))?;
    for m in 1..=12 {
        let k = detect_identity_iterate(&builtins::cycle(m), 24, cap);
        ensure(k == Some(m), || format!("cycle:{m}: {k:?}"))?;
    }
    let tent = detect_identity_iterate(&builtins::tent(), 10, cap);
    ensure(tent.is_none(), || format!("tent: {tent:?}"))?;
    let seg = detect_reflection_segment(affine(&builtins::reflection()), cap)
        .ok_or_else(|| "reflection: no segment".to_string())?;
    ensure(seg.lo == rat(0, 1) && seg.hi == rat(1, 1), || {
        format!("reflection segment ({}, {})", seg.lo, seg.hi)
    })?;
    for name in ["tent", "doubling"] {
        let sys = builtins::by_name(name).unwrap();
        let s = detect_reflection_segment(affine(&sys), cap);
        ensure(s.is_none(), || format!("{name}: unexpected segment"))?;
    }
    Ok("identity iterates 2, m, none; reflection segment (0, 1) only for reflection".into())
}

fn deterministic_reports() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut files = 0;
    for (name, sys, _, res) in dlp_cases() {
        for n in 1..=8 {
            let cmd = Command::Dlp {
                n,
                resolution: Some(res.into()),
                engine: EngineChoice::Both,
                search_cap: None,
            };
            let a = run_on(&sys, &cmd, Limits::default())
                .map_err(|e| e.to_string())?
                .to_json();
            let b = run_on(&sys, &cmd, Limits::default())
                .map_err(|e| e.to_string())?
                .to_json();
            ensure(a == b, || format!("{name} n={n}: reports differ"))?;
            let report: Report = serde_json::from_str(&a).map_err(|e| e.to_string())?;
            ensure(report.conclusive(), || {
                format!("{name} n={n}: inconclusive report")
            })?;
            for (tag, text) in [("a", &a), ("b", &b)] {
                let path = dir.path().join(format!("{name}-{n}-{tag}.json"));
                std::fs::write(&path, text).map_err(|e| e.to_string())?;
                let out = std::process::Command::new(env!("CARGO_BIN_EXE_dlp"))
                    .arg("--verify-report")
                    .arg(&path)
                    .output()
                    .map_err(|e| e.to_string())?;
                ensure(out.status.success(), || {
                    format!(
                        "{name} n={n}: {}",
                        String::from_utf8_lossy(&out.stderr).trim()
                    )
                })?;
                files += 1;
            }
        }
    }
    Ok(format!(
        "{files} reports: pairs byte-identical, each accepted by --verify-report"
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        (
            "fixed points of tent and doubling iterates",
            fixed_point_counts,
        ),
        (
            "minimal periodic counts of the full 2-shift",
            shift_minimal_counts,
        ),
        (
            "direct and Touhey engines verify and witnesses replay",
            both_engines_verify,
        ),
        ("refutation of non-DLP systems", refutations),
        (
            "finite maps: bounded reach iff cyclic permutation",
            finite_maps,
        ),
        ("exact reach times", reach_times),
        (
            "shared periodic orbits through disjoint regions",
            shared_orbits,
        ),
        (
            "identity iterates and reflection segments",
            dichotomy_detectors,
        ),
        (
            "deterministic self-verifying reports",
            deterministic_reports,
        ),
    ];
    let mut failed = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS criterion {}: {title} ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {title}: {why}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
