use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::periodic::{affine_fixed_points, detect_identity_iterate};
use crate::rational::{rat, Rational};
use crate::region::OpenRegion;
use crate::system::{Point, System};

use super::transitivity::transitivity_certificate;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReachOutcome {
    Hit(usize),
    /// The image sequence became periodic without meeting `W`.
    Never,
    ExceedsCap,
}

/// Forward image of a region kept exactly: an open part plus the isolated
/// points left by constant branches, with their orbits.
#[derive(Clone, PartialEq, Eq, Hash)]
struct Image {
    open: OpenRegion,
    points: BTreeSet<Rational>,
}

impl Image {
    fn step(&self, system: &System) -> Image {
        let (open, mut points) = system.image_with_points(&self.open);
        for p in &self.points {
            if let Ok(Point::Real(y)) = system.evaluate(&Point::Real(p.clone())) {
                points.insert(y);
            }
        }
        points.retain(|p| !system.region_contains(&open, &Point::Real(p.clone())));
        Image { open, points }
    }

    fn meets(&self, system: &System, w: &OpenRegion) -> bool {
        self.open.intersects(w)
            || self
                .points
                .iter()
                .any(|p| system.region_contains(w, &Point::Real(p.clone())))
    }
}

/// Smallest `n` in `1..=cap` with `f^n(V) ∩ W ≠ ∅`, or why there is none.
pub fn reach_outcome(
    system: &System,
    v: &OpenRegion,
    w: &OpenRegion,
    cap: usize,
) -> Result<ReachOutcome> {
    system.validate_region(v)?;
    system.validate_region(w)?;
    if v.is_empty() || w.is_empty() {
        return Err(Error::InvalidRegion(
            "reach regions must be nonempty".into(),
        ));
    }
    let mut seen: HashSet<Image> = HashSet::new();
    let mut image = Image {
        open: v.clone(),
        points: BTreeSet::new(),
    };
    seen.insert(image.clone());
    for n in 1..=cap {
        image = image.step(system);
        if image.meets(system, w) {
            return Ok(ReachOutcome::Hit(n));
        }
        if !seen.insert(image.clone()) {
            return Ok(ReachOutcome::Never);
        }
    }
    Ok(ReachOutcome::ExceedsCap)
}

pub fn reach_time(system: &System, v: &OpenRegion, w: &OpenRegion, cap: usize) -> Result<usize> {
    match reach_outcome(system, v, w, cap)? {
        ReachOutcome::Hit(n) => Ok(n),
        _ => Err(Error::ExceedsCap { cap }),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NCycleAnalysis {
    pub size: usize,
    /// `None` stands for an infinite supremum.
    pub k_star: Option<usize>,
    /// A pair attaining `k_star`, or an unreachable pair.
    pub pair: (usize, usize),
    /// `reach[v][w]`, `None` when `w` is never reached from `v`.
    pub reach: Vec<Vec<Option<usize>>>,
    pub cyclic_permutation: bool,
    pub identity_iterate: Option<usize>,
    /// `|X| <= k_star + 1` and `f^{k_star} = id` when `k_star` is finite.
    pub bound_holds: bool,
    pub verdict: String,
}

/// Supremum over point pairs of the first reach time between singletons.
pub fn ncycle_sup_reach(system: &System) -> Result<NCycleAnalysis> {
    let System::Finite(f) = system else {
        return Err(Error::Unsupported(
            "ncycle analysis needs a finite system".into(),
        ));
    };
    let m = f.size();
    let mut reach = vec![vec![None; m]; m];
    for (v, row) in reach.iter_mut().enumerate() {
        for (w, cell) in row.iter_mut().enumerate() {
            // a singleton orbit revisits a set within m steps if ever
            if let ReachOutcome::Hit(n) = reach_outcome(
                system,
                &OpenRegion::points([v]),
                &OpenRegion::points([w]),
                m,
            )? {
                *cell = Some(n);
            }
        }
    }
    let mut unreachable = None;
    let mut best = (0, (0, 0));
    for (v, row) in reach.iter().enumerate() {
        for (w, cell) in row.iter().enumerate() {
            match cell {
                None if unreachable.is_none() => unreachable = Some((v, w)),
                Some(n) if *n > best.0 => best = (*n, (v, w)),
                _ => {}
            }
        }
    }
    let identity_iterate = detect_identity_iterate(system, m, usize::MAX);
    let cyclic_permutation = f.is_single_cycle();
    let (k_star, pair, bound_holds, verdict) = match unreachable {
        Some((v, w)) => (
            None,
            (v, w),
            true,
            format!("sup = infinity: {{{w}}} is never reached from {{{v}}}"),
        ),
        None => {
            let k = best.0;
            let holds = m <= k + 1 && cyclic_permutation && identity_iterate == Some(k);
            let verdict = if holds {
                format!("cyclic permutation, f^{k} = id")
            } else {
                format!("bound violated: |X| = {m}, k_star = {k}")
            };
            (Some(k), best.1, holds, verdict)
        }
    };
    Ok(NCycleAnalysis {
        size: m,
        k_star,
        pair,
        reach,
        cyclic_permutation,
        identity_iterate,
        bound_holds,
        verdict,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReachWitness {
    pub k: usize,
    pub v: OpenRegion,
    pub w: OpenRegion,
    pub reach: usize,
}

/// Open sets `V`, `W` whose first reach time is at least `k`, verified by
/// [`reach_time`]. Only infinite transitive systems admit these for every `k`.
pub fn unbounded_reach_witness(system: &System, k: usize, limits: &Limits) -> Result<ReachWitness> {
    if !transitivity_certificate(system).is_certified() {
        return Err(Error::NotCertified(
            "the system has no transitivity certificate".into(),
        ));
    }
    let candidates: Box<dyn Iterator<Item = (OpenRegion, OpenRegion)>> = match system {
        System::Finite(_) => {
            return Err(Error::Unsupported(
                "finite systems have bounded reach times".into(),
            ))
        }
        System::Affine(m) => {
            let (a, b) = (m.domain().0.clone(), m.domain().1.clone());
            let width = &b - &a;
            let fixed = affine_fixed_points(m);
            let p = fixed
                .points
                .iter()
                .filter_map(|x| x.as_real().cloned())
                .next()
                .ok_or_else(|| Error::NotCertified("no isolated fixed point".into()))?;
            let right = p < b;
            let w = if p <= a.midpoint(&b) {
                OpenRegion::interval(&a + &width * rat(9, 10), b.clone())
            } else {
                OpenRegion::interval(a.clone(), &a + &width * rat(1, 10))
            };
            let depth_cap = limits.depth_cap;
            Box::new((k..=k + depth_cap).map(move |j| {
                let d = &width * Rational::pow2(j as u32).recip();
                let v = if right {
                    OpenRegion::interval(p.clone(), &p + &d)
                } else {
                    OpenRegion::interval(&p - &d, p.clone())
                };
                (v, w.clone())
            }))
        }
        System::Shift(s) => {
            let u = (0..s.alphabet())
                .filter_map(|a| s.shortest_walk(a, a))
                .min_by_key(|c| c.len())
                .map(|c| c[..c.len() - 1].to_vec())
                .expect("irreducible shift has a cycle");
            let occurs = |word: &[usize]| {
                let rep: Vec<usize> = u
                    .iter()
                    .cycle()
                    .take(word.len() + u.len())
                    .copied()
                    .collect();
                (0..u.len()).any(|o| rep[o..].starts_with(word))
            };
            let w = (1..=limits.depth_cap)
                .flat_map(|len| s.words(len))
                .find(|word| !occurs(word))
                .ok_or_else(|| Error::NotCertified("every word is a factor of one cycle".into()))?;
            let len = k + w.len() - 1;
            let v: Vec<usize> = u.iter().cycle().take(len.max(1)).copied().collect();
            Box::new(std::iter::once((
                OpenRegion::cylinder(v),
                OpenRegion::cylinder(w),
            )))
        }
    };
    for (v, w) in candidates {
        if let ReachOutcome::Hit(n) = reach_outcome(system, &v, &w, limits.reach_cap)? {
            if n >= k {
                return Ok(ReachWitness { k, v, w, reach: n });
            }
        }
    }
    Err(Error::NotCertified(format!(
        "no witness pair with reach >= {k} found"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins;
    use crate::system::FiniteMap;

    fn iv(a: (i64, i64), b: (i64, i64)) -> OpenRegion {
        OpenRegion::interval(rat(a.0, a.1), rat(b.0, b.1))
    }

    #[test]
    fn reach_examples() {
        let tent = builtins::tent();
        assert_eq!(
            reach_time(&tent, &iv((0, 1), (1, 8)), &iv((9, 10), (1, 1)), 100).unwrap(),
            3
        );
        let c4 = builtins::cycle(4);
        assert_eq!(
            reach_time(&c4, &OpenRegion::points([0]), &OpenRegion::points([0]), 100).unwrap(),
            4
        );
        let fs = builtins::full_shift(2);
        assert_eq!(
            reach_time(
                &fs,
                &OpenRegion::cylinder(vec![0]),
                &OpenRegion::cylinder(vec![1]),
                10
            )
            .unwrap(),
            1
        );
        let id = builtins::identity();
        assert_eq!(
            reach_outcome(&id, &iv((0, 1), (1, 2)), &iv((3, 4), (1, 1)), 10).unwrap(),
            ReachOutcome::Never
        );
        assert!(matches!(
            reach_time(&id, &iv((0, 1), (1, 2)), &iv((3, 4), (1, 1)), 10),
            Err(Error::ExceedsCap { cap: 10 })
        ));
    }

    #[test]
    fn constant_branch_points_are_followed() {
        // f = 1/2 on [0, 1/2], then climbs to 1; the image of (0, 1/4) is the point 1/2
        let m = crate::system::PiecewiseAffineMap::new(
            rat(0, 1),
            rat(1, 1),
            vec![
                crate::system::Piece::new(rat(0, 1), rat(1, 2), rat(0, 1), rat(1, 2)),
                crate::system::Piece::new(rat(1, 2), rat(1, 1), rat(1, 1), rat(0, 1)),
            ],
            false,
        )
        .unwrap();
        let sys = System::Affine(m);
        let v = iv((0, 1), (1, 4));
        assert_eq!(
            reach_outcome(&sys, &v, &iv((1, 3), (2, 3)), 10).unwrap(),
            ReachOutcome::Hit(1)
        );
        assert_eq!(
            reach_outcome(&sys, &v, &iv((2, 3), (1, 1)), 10).unwrap(),
            ReachOutcome::Never
        );
    }

    #[test]
    fn ncycle_examples() {
        let a = ncycle_sup_reach(&builtins::cycle(4)).unwrap();
        assert_eq!(a.k_star, Some(4));
        assert!(a.bound_holds && a.cyclic_permutation);
        assert_eq!(a.verdict, "cyclic permutation, f^4 = id");
        assert_eq!(a.reach[1][3], Some(2));
        assert_eq!(a.reach[3][1], Some(2));
        assert_eq!(a.reach[2][2], Some(4));

        let id = ncycle_sup_reach(&System::Finite(FiniteMap::identity(3))).unwrap();
        assert_eq!(id.k_star, None);
        assert_eq!(id.pair, (0, 1));

        let two = ncycle_sup_reach(&System::Finite(
            FiniteMap::new(4, vec![1, 0, 3, 2]).unwrap(),
        ))
        .unwrap();
        assert_eq!(two.k_star, None);
        assert_eq!(two.pair, (0, 2));
    }

    #[test]
    fn unbounded_witnesses() {
        let limits = Limits::default();
        let tent = builtins::tent();
        let w = unbounded_reach_witness(&tent, 6, &limits).unwrap();
        assert_eq!(w.v, OpenRegion::interval(rat(0, 1), rat(1, 64)));
        assert_eq!(w.w, iv((9, 10), (1, 1)));
        assert_eq!(w.reach, 6);
        let fs = builtins::full_shift(2);
        let w = unbounded_reach_witness(&fs, 5, &limits).unwrap();
        assert_eq!(w.v, OpenRegion::cylinder(vec![0; 5]));
        assert_eq!(w.w, OpenRegion::cylinder(vec![1]));
        assert_eq!(w.reach, 5);
        let w = unbounded_reach_witness(&tent, 1, &limits).unwrap();
        assert!(w.reach >= 1);
        assert!(unbounded_reach_witness(&builtins::cycle(3), 2, &limits).is_err());
    }
}
