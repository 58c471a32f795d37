//! Periodic orbits through prescribed open sets, built from cell paths of a
//! Markov partition or from words of a subshift.

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::periodic::PeriodicOrbit;
use crate::rational::Rational;
use crate::region::{IntervalUnion, OpenRegion};
use crate::system::{EventuallyPeriodicWord, MarkovPartition, Piece, Point, System};

use super::transitivity::transitivity_certificate;

/// Presentation built once per system and reused across many calls.
pub(crate) enum Symbolic<'a> {
    Markov(&'a System, MarkovPartition),
    Shift(&'a System),
    Finite(&'a System),
}

impl<'a> Symbolic<'a> {
    /// Requires a transitivity certificate, which supplies strong
    /// connectivity and, for interval maps, shrinking cylinders.
    pub(crate) fn new(system: &'a System) -> Result<Self> {
        if !transitivity_certificate(system).is_certified() {
            return Err(Error::NotCertified(
                "the system has no transitivity certificate".into(),
            ));
        }
        Ok(match system {
            System::Affine(m) => Symbolic::Markov(system, MarkovPartition::build(m)?),
            System::Shift(_) => Symbolic::Shift(system),
            System::Finite(_) => Symbolic::Finite(system),
        })
    }

    /// A periodic orbit meeting every region, with its representative in
    /// `regions[0]`; checked by exact iteration before it is returned.
    pub(crate) fn shared_orbit(
        &self,
        regions: &[OpenRegion],
        limits: &Limits,
    ) -> Result<PeriodicOrbit> {
        let Some(first) = regions.first() else {
            return Err(Error::InvalidRegion("no regions given".into()));
        };
        let system = self.system();
        for r in regions {
            system.validate_region(r)?;
            if r.is_empty() {
                return Err(Error::InvalidRegion("regions must be nonempty".into()));
            }
        }
        let orbit = match self {
            Symbolic::Markov(_, part) => markov_orbit(system, part, regions, limits)?,
            Symbolic::Shift(_) => shift_orbit(system, regions)?,
            Symbolic::Finite(_) => {
                let OpenRegion::Points(p) = first else {
                    unreachable!("validated")
                };
                let System::Finite(f) = system else {
                    unreachable!()
                };
                let x = Point::Index(*p.iter().next().expect("nonempty"));
                PeriodicOrbit::of(system, &x, f.size())?
            }
        };
        let meets_all = regions
            .iter()
            .all(|r| orbit.orbit.iter().any(|x| system.region_contains(r, x)));
        if !system.region_contains(first, &orbit.representative) || !meets_all {
            return Err(Error::NotCertified(
                "constructed orbit failed exact verification".into(),
            ));
        }
        Ok(orbit)
    }

    fn system(&self) -> &'a System {
        match self {
            Symbolic::Markov(s, _) | Symbolic::Shift(s) | Symbolic::Finite(s) => s,
        }
    }
}

/// Periodic orbit meeting every region. The system must be certified
/// transitive; regions are refined to cell paths of depth at most
/// `limits.depth_cap`.
pub fn shared_periodic_orbit(
    system: &System,
    regions: &[OpenRegion],
    limits: &Limits,
) -> Result<PeriodicOrbit> {
    Symbolic::new(system)?.shared_orbit(regions, limits)
}

fn shift_orbit(system: &System, regions: &[OpenRegion]) -> Result<PeriodicOrbit> {
    let System::Shift(s) = system else {
        unreachable!()
    };
    let words: Vec<&Vec<usize>> = regions
        .iter()
        .map(|r| match r {
            OpenRegion::Cylinders(c) => c.words().iter().next().expect("nonempty"),
            _ => unreachable!("validated"),
        })
        .collect();
    let mut cycle: Vec<usize> = Vec::new();
    for (i, w) in words.iter().enumerate() {
        cycle.extend_from_slice(w);
        let next = words[(i + 1) % words.len()][0];
        let walk = s
            .shortest_walk(*w.last().expect("nonempty word"), next)
            .ok_or_else(|| Error::NotCertified("adjacency is not strongly connected".into()))?;
        cycle.extend_from_slice(&walk[1..walk.len() - 1]);
    }
    let x = Point::Sequence(EventuallyPeriodicWord::periodic(cycle.clone()));
    PeriodicOrbit::of(system, &x, cycle.len())
}

/// Cylinder of a cell path: the points following the path, with the affine
/// map `f^{len-1}` carrying it onto the last cell.
#[derive(Clone)]
struct Cylinder {
    path: Vec<usize>,
    lo: Rational,
    hi: Rational,
    slope: Rational,
    intercept: Rational,
}

impl Cylinder {
    fn cell(cells: &[Piece], i: usize) -> Self {
        Cylinder {
            path: vec![i],
            lo: cells[i].lo.clone(),
            hi: cells[i].hi.clone(),
            slope: Rational::one(),
            intercept: Rational::zero(),
        }
    }

    fn extend(&self, cells: &[Piece], j: usize) -> Self {
        let last = &cells[*self.path.last().expect("nonempty path")];
        // the part of the last cell that the branch sends onto cell j
        let a = last
            .preimage(&cells[j].lo)
            .expect("Markov cells have nonzero slope");
        let b = last
            .preimage(&cells[j].hi)
            .expect("Markov cells have nonzero slope");
        let back = |y: &Rational| (y - &self.intercept) / &self.slope;
        let (x, y) = (back(&a), back(&b));
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        let mut path = self.path.clone();
        path.push(j);
        Cylinder {
            path,
            lo,
            hi,
            slope: &last.slope * &self.slope,
            intercept: &last.slope * &self.intercept + &last.intercept,
        }
    }

    fn inside(&self, u: &IntervalUnion) -> bool {
        u.parts().iter().any(|(a, b)| a < &self.lo && &self.hi < b)
    }

    fn meets(&self, u: &IntervalUnion) -> bool {
        u.parts().iter().any(|(a, b)| a < &self.hi && &self.lo < b)
    }
}

/// Shallowest cell path whose closed cylinder lies inside `u`, leftmost first.
fn capture(
    part: &MarkovPartition,
    u: &IntervalUnion,
    depth_cap: usize,
    index: usize,
) -> Result<Vec<usize>> {
    let cells = &part.cells;
    let mut layer: Vec<Cylinder> = (0..cells.len())
        .map(|i| Cylinder::cell(cells, i))
        .filter(|c| c.meets(u))
        .collect();
    for _ in 0..depth_cap {
        if let Some(c) = layer
            .iter()
            .filter(|c| c.inside(u))
            .min_by(|a, b| a.lo.cmp(&b.lo))
        {
            return Ok(c.path.clone());
        }
        layer = layer
            .iter()
            .flat_map(|c| {
                let last = *c.path.last().expect("nonempty path");
                part.graph.successors[last]
                    .iter()
                    .map(move |&j| c.extend(cells, j))
            })
            .filter(|c| c.meets(u))
            .collect();
    }
    Err(Error::RefinementCapExceeded {
        region: index,
        depth: depth_cap,
    })
}

fn markov_orbit(
    system: &System,
    part: &MarkovPartition,
    regions: &[OpenRegion],
    limits: &Limits,
) -> Result<PeriodicOrbit> {
    let mut paths = Vec::with_capacity(regions.len());
    for (i, r) in regions.iter().enumerate() {
        let OpenRegion::Intervals(u) = r else {
            unreachable!("validated")
        };
        paths.push(capture(part, u, limits.depth_cap, i)?);
    }
    let mut cells_loop: Vec<usize> = Vec::new();
    for (i, p) in paths.iter().enumerate() {
        cells_loop.extend_from_slice(p);
        let next = paths[(i + 1) % paths.len()][0];
        let walk = part
            .graph
            .shortest_walk(*p.last().expect("nonempty path"), next)
            .ok_or_else(|| Error::NotCertified("cell graph is not strongly connected".into()))?;
        cells_loop.extend_from_slice(&walk[1..walk.len() - 1]);
    }
    // f^N along the loop; repeat it until the composite branch expands
    let (mut s, mut c) = (Rational::one(), Rational::zero());
    for &i in &cells_loop {
        let p = &part.cells[i];
        c = &p.slope * &c + &p.intercept;
        s = &p.slope * &s;
    }
    let (one_s, one_c) = (s.clone(), c.clone());
    let mut reps = 1;
    while s.abs() <= Rational::one() {
        if reps >= limits.depth_cap {
            return Err(Error::NotCertified("loop branch never expands".into()));
        }
        c = &one_s * &c + &one_c;
        s = &one_s * &s;
        reps += 1;
    }
    let x = &c / &(Rational::one() - &s);
    let x = system.normalize_point(&Point::Real(x));
    PeriodicOrbit::of(system, &x, cells_loop.len() * reps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins;
    use crate::rational::rat;

    #[test]
    fn shift_examples() {
        let fs = builtins::full_shift(2);
        let limits = Limits::default();
        let o = shared_periodic_orbit(
            &fs,
            &[OpenRegion::cylinder(vec![0]), OpenRegion::cylinder(vec![1])],
            &limits,
        )
        .unwrap();
        assert_eq!(o.minimal_period, 2);
        assert_eq!(
            o.representative,
            Point::Sequence(EventuallyPeriodicWord::periodic(vec![0, 1]))
        );
        let blocks: Vec<OpenRegion> = [[0, 0], [0, 1], [1, 0], [1, 1]]
            .iter()
            .map(|w| OpenRegion::cylinder(w.to_vec()))
            .collect();
        let o = shared_periodic_orbit(&fs, &blocks, &limits).unwrap();
        assert!(o.minimal_period >= 4);
        assert!(o.replays(&fs));
        let gm = builtins::golden_mean();
        let o = shared_periodic_orbit(
            &gm,
            &[
                OpenRegion::cylinder(vec![1]),
                OpenRegion::cylinder(vec![1, 0, 1]),
            ],
            &limits,
        )
        .unwrap();
        assert!(o.replays(&gm));
    }

    #[test]
    fn tent_example() {
        let tent = builtins::tent();
        let regions = [
            OpenRegion::interval(rat(0, 1), rat(1, 4)),
            OpenRegion::interval(rat(3, 4), rat(1, 1)),
        ];
        let o = shared_periodic_orbit(&tent, &regions, &Limits::default()).unwrap();
        assert!(o.replays(&tent));
        for r in &regions {
            assert!(o.orbit.iter().any(|x| tent.region_contains(r, x)));
        }
        assert!(tent.region_contains(&regions[0], &o.representative));
    }

    #[test]
    fn doubling_near_the_seam() {
        let d = builtins::doubling();
        let regions = [
            OpenRegion::interval(rat(127, 128), rat(1, 1)),
            OpenRegion::interval(rat(0, 1), rat(1, 128)),
            OpenRegion::interval(rat(1, 2), rat(129, 256)),
        ];
        let o = shared_periodic_orbit(&d, &regions, &Limits::default()).unwrap();
        assert!(o.minimal_period >= 3);
        assert!(o.replays(&d));
    }

    #[test]
    fn refinement_cap() {
        let tent = builtins::tent();
        let tiny = OpenRegion::interval(rat(1, 3), &rat(1, 3) + &Rational::pow2(40).recip());
        let limits = Limits {
            depth_cap: 8,
            ..Limits::default()
        };
        assert!(matches!(
            shared_periodic_orbit(&tent, &[tiny], &limits),
            Err(Error::RefinementCapExceeded {
                region: 0,
                depth: 8
            })
        ));
        assert!(matches!(
            shared_periodic_orbit(
                &builtins::identity(),
                &[OpenRegion::interval(rat(0, 1), rat(1, 2))],
                &limits
            ),
            Err(Error::NotCertified(_))
        ));
    }
}
