//! Verdicts on density of periodic points of large minimal period, by a
//! resolution basis of cells.
//!
//! A verdict at level `n` concerns the points of minimal period greater than
//! `n`. Every witness therefore has minimal period at least `n + 1`.

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::periodic::{
    affine_fixed_points, detect_identity_iterate, IterateCache, PeriodicOrbit, WitnessScanner,
};
use crate::rational::Rational;
use crate::region::OpenRegion;
use crate::system::{EventuallyPeriodicWord, Point, System};

use super::symbolic::Symbolic;

/// Largest number of cells a resolution may produce.
const MAX_CELLS: usize = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Resolution {
    /// Interval maps: cells of this width aligned at the left endpoint.
    Width(Rational),
    /// Subshifts: all admissible words of this length.
    Depth(usize),
    /// Finite systems: one cell per point.
    Singletons,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Direct,
    Touhey,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellWitness {
    pub cell: OpenRegion,
    pub point: Point,
    pub minimal_period: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellFailure {
    pub cell: OpenRegion,
    pub reason: String,
}

/// How a refuting region was shown to hold no point of minimal period above `n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Refutation {
    /// The region holds the single point `point`, whose minimal period is
    /// recorded (`None`: not periodic).
    FiniteExhaustion {
        point: Point,
        minimal_period: Option<usize>,
    },
    /// `f^iterate` is the identity on the region.
    IdentitySegment { iterate: usize },
    /// `f^iterate = id` on the whole space.
    IdentityIterate { iterate: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum DlpVerdict {
    Verified {
        engine: Engine,
        n: usize,
        resolution: Resolution,
        witnesses: Vec<CellWitness>,
    },
    Refuted {
        engine: Engine,
        n: usize,
        region: OpenRegion,
        method: Refutation,
    },
    Inconclusive {
        engine: Engine,
        n: usize,
        reason: String,
        failures: Vec<CellFailure>,
        search_cap: usize,
        depth_cap: usize,
    },
}

impl DlpVerdict {
    pub fn is_verified(&self) -> bool {
        matches!(self, DlpVerdict::Verified { .. })
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, DlpVerdict::Refuted { .. })
    }

    pub fn is_inconclusive(&self) -> bool {
        matches!(self, DlpVerdict::Inconclusive { .. })
    }

    pub fn witnesses(&self) -> &[CellWitness] {
        match self {
            DlpVerdict::Verified { witnesses, .. } => witnesses,
            _ => &[],
        }
    }
}

/// The basis cells of a resolution. Finite systems always use singletons.
pub fn resolution_cells(system: &System, resolution: &Resolution) -> Result<Vec<OpenRegion>> {
    match (system, resolution) {
        (System::Finite(f), _) => Ok((0..f.size()).map(|x| OpenRegion::points([x])).collect()),
        (System::Affine(m), Resolution::Width(w)) => {
            if w.is_negative() || w.is_zero() {
                return Err(Error::InvalidRegion(
                    "resolution width must be positive".into(),
                ));
            }
            let (a, b) = m.domain();
            let count = Rational::ceil_div(&(b - a), w)
                .to_usize()
                .filter(|&c| c <= MAX_CELLS)
                .ok_or_else(|| Error::SizeCap(format!("more than {MAX_CELLS} cells")))?;
            Ok((0..count)
                .map(|i| {
                    let lo = a + w * Rational::from_integer(i as i64);
                    let hi = (a + w * Rational::from_integer(i as i64 + 1)).min(b.clone());
                    OpenRegion::interval(lo, hi)
                })
                .collect())
        }
        (System::Shift(s), Resolution::Depth(d)) => {
            if *d == 0 {
                return Err(Error::InvalidRegion(
                    "cylinder depth must be positive".into(),
                ));
            }
            // admissible words ending in each symbol, saturating
            let mut ending = vec![1usize; s.alphabet()];
            for _ in 1..*d {
                let mut next = vec![0usize; s.alphabet()];
                for (a, &c) in ending.iter().enumerate() {
                    for b in s.successors(a) {
                        next[b] = next[b].saturating_add(c);
                    }
                }
                ending = next;
            }
            if ending.iter().fold(0usize, |t, &c| t.saturating_add(c)) > MAX_CELLS {
                return Err(Error::SizeCap(format!("more than {MAX_CELLS} cells")));
            }
            Ok(s.words(*d).into_iter().map(OpenRegion::cylinder).collect())
        }
        _ => Err(Error::Unsupported(format!(
            "resolution {resolution:?} does not fit a {} system",
            system.family()
        ))),
    }
}

/// The single point of a cell when the space is finite: a finite map, or a
/// subshift in which every symbol has one successor.
fn lone_point(system: &System, cell: &OpenRegion) -> Option<Point> {
    match (system, cell) {
        (System::Finite(_), OpenRegion::Points(p)) if p.len() == 1 => {
            p.iter().next().map(|&x| Point::Index(x))
        }
        (System::Shift(s), OpenRegion::Cylinders(c)) if c.words().len() == 1 => {
            if (0..s.alphabet()).any(|a| s.out_degree(a) != 1) {
                return None;
            }
            let w = c.words().iter().next()?;
            let mut cycle = vec![w[0]];
            loop {
                let next = s.successors(*cycle.last()?).next()?;
                if next == w[0] {
                    break;
                }
                cycle.push(next);
            }
            let x = Point::Sequence(EventuallyPeriodicWord::periodic(cycle));
            system.region_contains(cell, &x).then_some(x)
        }
        _ => None,
    }
}

fn exact_period(system: &System, x: &Point, bound: usize) -> Option<usize> {
    PeriodicOrbit::of(system, x, bound)
        .ok()
        .map(|o| o.minimal_period)
}

fn space_bound(system: &System) -> usize {
    match system {
        System::Finite(f) => f.size(),
        System::Shift(s) => s.alphabet(),
        System::Affine(_) => usize::MAX,
    }
}

/// Direct strategy: a periodic point of minimal period `> n` in each cell,
/// or an exact proof that some open region has none.
pub fn dlp_check_direct(
    system: &System,
    n: usize,
    resolution: &Resolution,
    limits: &Limits,
) -> Result<DlpVerdict> {
    let cells = resolution_cells(system, resolution)?;
    let engine = Engine::Direct;
    if let System::Affine(m) = system {
        let mut cache = IterateCache::new(m, limits.piece_cap);
        for k in 1..=n {
            let Ok(g) = cache.get(k) else { break };
            if let Some((a, b)) = affine_fixed_points(g).identity_segments.into_iter().next() {
                return Ok(DlpVerdict::Refuted {
                    engine,
                    n,
                    region: OpenRegion::interval(a, b),
                    method: Refutation::IdentitySegment { iterate: k },
                });
            }
        }
    }
    if let System::Shift(_) = system {
        if let Some(k) = detect_identity_iterate(system, 0, limits.piece_cap).filter(|&k| k <= n) {
            return Ok(DlpVerdict::Refuted {
                engine,
                n,
                region: system.whole_space(),
                method: Refutation::IdentityIterate { iterate: k },
            });
        }
    }
    let mut scanner = WitnessScanner::new(system, n + 1, limits);
    let mut witnesses = Vec::with_capacity(cells.len());
    let mut failures = Vec::new();
    for cell in cells {
        if let Some(x) = lone_point(system, &cell) {
            let period = exact_period(system, &x, space_bound(system));
            match period {
                Some(p) if p > n => witnesses.push(CellWitness {
                    cell,
                    point: x,
                    minimal_period: p,
                }),
                _ => {
                    return Ok(DlpVerdict::Refuted {
                        engine,
                        n,
                        region: cell,
                        method: Refutation::FiniteExhaustion {
                            point: x,
                            minimal_period: period,
                        },
                    })
                }
            }
            continue;
        }
        match scanner.find(&cell) {
            Ok(orbit) => witnesses.push(CellWitness {
                cell,
                point: orbit.representative,
                minimal_period: orbit.minimal_period,
            }),
            Err(e) => failures.push(CellFailure {
                cell,
                reason: e.to_string(),
            }),
        }
    }
    Ok(finish(
        engine,
        n,
        resolution,
        witnesses,
        failures,
        limits,
        "some cells have no witness within the caps",
    ))
}

fn finish(
    engine: Engine,
    n: usize,
    resolution: &Resolution,
    witnesses: Vec<CellWitness>,
    failures: Vec<CellFailure>,
    limits: &Limits,
    reason: &str,
) -> DlpVerdict {
    if failures.is_empty() {
        DlpVerdict::Verified {
            engine,
            n,
            resolution: resolution.clone(),
            witnesses,
        }
    } else {
        DlpVerdict::Inconclusive {
            engine,
            n,
            reason: reason.into(),
            failures,
            search_cap: limits.search_cap,
            depth_cap: limits.depth_cap,
        }
    }
}

/// `n + 1` pairwise disjoint nonempty open subsets of a cell.
fn disjoint_subregions(system: &System, cell: &OpenRegion, n: usize) -> Option<Vec<OpenRegion>> {
    let k = n + 1;
    match (system, cell) {
        (_, OpenRegion::Points(p)) => (k == 1 && !p.is_empty()).then(|| vec![cell.clone()]),
        (_, OpenRegion::Intervals(u)) => {
            let (a, b) = u.parts().first()?;
            let kr = Rational::from_integer(k as i64);
            let pitch = (b - a) / &kr;
            let shrink = &pitch / &(Rational::from_integer(4) * &kr);
            Some(
                (0..k)
                    .map(|i| {
                        let lo = a + &pitch * Rational::from_integer(i as i64);
                        OpenRegion::interval(&lo + &shrink, &lo + &pitch - &shrink)
                    })
                    .collect(),
            )
        }
        (System::Shift(s), OpenRegion::Cylinders(c)) => {
            let w = c.words().iter().next()?;
            (1..=64).find_map(|extra| {
                let ext = s.extensions(w, extra);
                (ext.len() >= k)
                    .then(|| ext.into_iter().take(k).map(OpenRegion::cylinder).collect())
            })
        }
        _ => None,
    }
}

/// Separation strategy: `n + 1` disjoint open sets inside each cell share a
/// periodic orbit, whose point in the first set has minimal period `> n`.
pub fn dlp_check_touhey(
    system: &System,
    n: usize,
    resolution: &Resolution,
    limits: &Limits,
) -> Result<DlpVerdict> {
    let cells = resolution_cells(system, resolution)?;
    let engine = Engine::Touhey;
    let symbolic = match Symbolic::new(system) {
        Ok(s) => s,
        Err(e) => {
            return Ok(DlpVerdict::Inconclusive {
                engine,
                n,
                reason: e.to_string(),
                failures: Vec::new(),
                search_cap: limits.search_cap,
                depth_cap: limits.depth_cap,
            })
        }
    };
    let results: Vec<std::result::Result<CellWitness, CellFailure>> = cells
        .into_par_iter()
        .map(|cell| {
            let fail = |reason: String| CellFailure {
                cell: cell.clone(),
                reason,
            };
            let subs = disjoint_subregions(system, &cell, n)
                .ok_or_else(|| fail(format!("cell cannot hold {} disjoint open sets", n + 1)))?;
            let orbit = symbolic
                .shared_orbit(&subs, limits)
                .map_err(|e| fail(e.to_string()))?;
            if orbit.minimal_period <= n {
                return Err(fail(format!(
                    "shared orbit has period {}",
                    orbit.minimal_period
                )));
            }
            Ok(CellWitness {
                cell,
                point: orbit.representative,
                minimal_period: orbit.minimal_period,
            })
        })
        .collect();
    let (mut witnesses, mut failures) = (Vec::new(), Vec::new());
    for r in results {
        match r {
            Ok(w) => witnesses.push(w),
            Err(f) => failures.push(f),
        }
    }
    Ok(finish(
        engine,
        n,
        resolution,
        witnesses,
        failures,
        limits,
        "shared-orbit construction failed",
    ))
}

/// Replays a verdict against the system by exact iteration.
pub fn verify_dlp(
    system: &System,
    verdict: &DlpVerdict,
    piece_cap: usize,
) -> std::result::Result<(), String> {
    match verdict {
        DlpVerdict::Verified {
            n,
            resolution,
            witnesses,
            ..
        } => {
            let cells = resolution_cells(system, resolution).map_err(|e| e.to_string())?;
            if cells.len() != witnesses.len() {
                return Err(format!(
                    "{} cells but {} witnesses",
                    cells.len(),
                    witnesses.len()
                ));
            }
            for (cell, w) in cells.iter().zip(witnesses) {
                if &w.cell != cell {
                    return Err(format!("witness for {} recorded under {}", cell, w.cell));
                }
                if !system.contains(&w.point) || !system.region_contains(cell, &w.point) {
                    return Err(format!("witness {} is not in cell {}", w.point, cell));
                }
                match exact_period(system, &w.point, w.minimal_period) {
                    Some(p) if p == w.minimal_period && p > *n => {}
                    other => {
                        return Err(format!(
                            "witness {} has period {:?}, recorded {}",
                            w.point, other, w.minimal_period
                        ))
                    }
                }
            }
            Ok(())
        }
        DlpVerdict::Refuted {
            n, region, method, ..
        } => {
            system.validate_region(region).map_err(|e| e.to_string())?;
            if region.is_empty() {
                return Err("refuting region is empty".into());
            }
            match method {
                Refutation::FiniteExhaustion {
                    point,
                    minimal_period,
                } => {
                    if lone_point(system, region).as_ref() != Some(point) {
                        return Err("refuting region is not a single point".into());
                    }
                    let p = exact_period(system, point, space_bound(system));
                    if p != *minimal_period || p.is_some_and(|p| p > *n) {
                        return Err(format!("point {point} has period {p:?}"));
                    }
                    Ok(())
                }
                Refutation::IdentitySegment { iterate } => {
                    let (System::Affine(m), OpenRegion::Intervals(u)) = (system, region) else {
                        return Err("identity segments need an interval map".into());
                    };
                    if *iterate > *n || *iterate == 0 {
                        return Err("iterate exceeds n".into());
                    }
                    let g = m
                        .iterate_map(*iterate, piece_cap)
                        .map_err(|e| e.to_string())?;
                    let ok = u.parts().iter().all(|(a, b)| {
                        g.pieces()
                            .iter()
                            .filter(|p| &p.lo < b && a < &p.hi)
                            .all(|p| p.is_identity())
                    });
                    ok.then_some(())
                        .ok_or_else(|| "iterate is not the identity on the region".into())
                }
                Refutation::IdentityIterate { iterate } => {
                    if *iterate > *n
                        || detect_identity_iterate(system, *iterate, piece_cap) != Some(*iterate)
                    {
                        return Err("identity iterate does not replay".into());
                    }
                    Ok(())
                }
            }
        }
        DlpVerdict::Inconclusive { .. } => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins;
    use crate::rational::rat;

    #[test]
    fn direct_examples() {
        let limits = Limits::default();
        let tent = builtins::tent();
        let v = dlp_check_direct(&tent, 8, &Resolution::Width(rat(1, 128)), &limits).unwrap();
        assert_eq!(v.witnesses().len(), 128);
        verify_dlp(&tent, &v, limits.piece_cap).unwrap();

        let c5 = builtins::cycle(5);
        let v = dlp_check_direct(&c5, 5, &Resolution::Singletons, &limits).unwrap();
        assert!(v.is_refuted());
        verify_dlp(&c5, &v, limits.piece_cap).unwrap();
        assert!(dlp_check_direct(&c5, 4, &Resolution::Singletons, &limits)
            .unwrap()
            .is_verified());

        let r = builtins::reflection();
        let v = dlp_check_direct(&r, 3, &Resolution::Width(rat(1, 8)), &limits).unwrap();
        assert!(matches!(
            &v,
            DlpVerdict::Refuted {
                method: Refutation::IdentitySegment { iterate: 2 },
                ..
            }
        ));
        verify_dlp(&r, &v, limits.piece_cap).unwrap();
        assert!(
            dlp_check_direct(&r, 1, &Resolution::Width(rat(1, 8)), &limits)
                .unwrap()
                .is_verified()
        );

        let id = builtins::identity();
        let v = dlp_check_direct(&id, 2, &Resolution::Width(rat(1, 8)), &limits).unwrap();
        assert!(matches!(
            &v,
            DlpVerdict::Refuted {
                method: Refutation::IdentitySegment { iterate: 1 },
                ..
            }
        ));
    }

    #[test]
    fn touhey_examples() {
        let limits = Limits::default();
        let tent = builtins::tent();
        let v = dlp_check_touhey(&tent, 4, &Resolution::Width(rat(1, 8)), &limits).unwrap();
        let w = &v.witnesses()[4];
        assert_eq!(w.cell, OpenRegion::interval(rat(1, 2), rat(5, 8)));
        assert!(w.minimal_period >= 5);
        verify_dlp(&tent, &v, limits.piece_cap).unwrap();

        let fs = builtins::full_shift(2);
        let v = dlp_check_touhey(&fs, 3, &Resolution::Depth(1), &limits).unwrap();
        let w = &v.witnesses()[1];
        assert_eq!(w.cell, OpenRegion::cylinder(vec![1]));
        assert!(w.minimal_period >= 4);
        verify_dlp(&fs, &v, limits.piece_cap).unwrap();

        let v =
            dlp_check_touhey(&builtins::golden_mean(), 0, &Resolution::Depth(3), &limits).unwrap();
        assert!(v.is_verified());
        let v = dlp_check_touhey(&builtins::cycle(3), 0, &Resolution::Singletons, &limits).unwrap();
        assert!(v.is_verified());
        let v = dlp_check_touhey(&builtins::cycle(3), 1, &Resolution::Singletons, &limits).unwrap();
        assert!(v.is_inconclusive());
        let v = dlp_check_touhey(
            &builtins::identity(),
            1,
            &Resolution::Width(rat(1, 2)),
            &limits,
        )
        .unwrap();
        assert!(v.is_inconclusive());
    }

    #[test]
    fn tampered_witness_fails() {
        let limits = Limits::default();
        let fs = builtins::full_shift(2);
        let mut v = dlp_check_direct(&fs, 2, &Resolution::Depth(2), &limits).unwrap();
        verify_dlp(&fs, &v, limits.piece_cap).unwrap();
        if let DlpVerdict::Verified { witnesses, .. } = &mut v {
            witnesses[0].point = Point::Sequence(EventuallyPeriodicWord::periodic(vec![0]));
        }
        assert!(verify_dlp(&fs, &v, limits.piece_cap).is_err());
    }

    #[test]
    fn resolution_mismatch() {
        assert!(resolution_cells(&builtins::tent(), &Resolution::Depth(3)).is_err());
        assert!(resolution_cells(&builtins::tent(), &Resolution::Width(rat(0, 1))).is_err());
        let cells = resolution_cells(&builtins::tent(), &Resolution::Width(rat(2, 5))).unwrap();
        assert_eq!(
            cells.last(),
            Some(&OpenRegion::interval(rat(4, 5), rat(1, 1)))
        );
    }
}
