//! Exact enumeration of periodic and eventually periodic points.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::rational::{rat, Rational};
use crate::region::{IntervalUnion, OpenRegion};
use crate::system::{EventuallyPeriodicWord, PiecewiseAffineMap, Point, System};

/// A point count that may be infinite (identity segments).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Count {
    Finite(u64),
    Infinite,
}

impl Count {
    pub fn is_zero(self) -> bool {
        self == Count::Finite(0)
    }
}

impl std::ops::Add for Count {
    type Output = Count;
    fn add(self, rhs: Count) -> Count {
        match (self, rhs) {
            (Count::Finite(a), Count::Finite(b)) => Count::Finite(a + b),
            _ => Count::Infinite,
        }
    }
}

impl std::fmt::Display for Count {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Count::Finite(n) => write!(f, "{n}"),
            Count::Infinite => write!(f, "infinite"),
        }
    }
}

impl Serialize for Count {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Count::Finite(n) => s.serialize_u64(*n),
            Count::Infinite => s.serialize_str("infinite"),
        }
    }
}

impl<'de> Deserialize<'de> for Count {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(u64),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::N(n) => Ok(Count::Finite(n)),
            Raw::S(s) if s == "infinite" => Ok(Count::Infinite),
            Raw::S(s) => Err(serde::de::Error::custom(format!("bad count {s:?}"))),
        }
    }
}

/// Solution set of `f^n(x) = x`: isolated points plus closed segments on
/// which `f^n` is the identity. Isolated points never lie in a segment.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedPoints {
    pub points: Vec<Point>,
    pub identity_segments: Vec<(Rational, Rational)>,
}

impl FixedPoints {
    pub fn count(&self) -> Count {
        if self.identity_segments.is_empty() {
            Count::Finite(self.points.len() as u64)
        } else {
            Count::Infinite
        }
    }

    fn segment_union(&self) -> IntervalUnion {
        IntervalUnion::new(self.identity_segments.clone())
    }
}

/// Exact fixed points of a single piecewise-affine map.
pub fn affine_fixed_points(g: &PiecewiseAffineMap) -> FixedPoints {
    let mut segments: Vec<(Rational, Rational)> = Vec::new();
    let mut points: BTreeSet<Rational> = BTreeSet::new();
    let one = Rational::one();
    for p in g.pieces() {
        let in_piece = |x: &Rational| &p.lo <= x && x <= &p.hi;
        if p.slope.is_one() {
            let identity = if g.wrap_mod_one() {
                p.intercept.is_integer()
            } else {
                p.intercept.is_zero()
            };
            if identity {
                match segments.last_mut() {
                    Some(last) if last.1 == p.lo => last.1 = p.hi.clone(),
                    _ => segments.push((p.lo.clone(), p.hi.clone())),
                }
            }
            continue;
        }
        let denom = &p.slope - &one;
        let shifts: &[i64] = if g.wrap_mod_one() { &[-1, 0, 1] } else { &[0] };
        for &k in shifts {
            let x = (Rational::from_integer(k) - &p.intercept) / &denom;
            if in_piece(&x) {
                let x = g.reduce(x);
                if g.evaluate(&x).is_ok_and(|y| y == x) {
                    points.insert(x);
                }
            }
        }
    }
    let points = points
        .into_iter()
        .filter(|x| !segments.iter().any(|(a, b)| a <= x && x <= b))
        .map(Point::Real)
        .collect();
    FixedPoints {
        points,
        identity_segments: segments,
    }
}

/// Lazily computed iterates `f, f^2, ..` of an interval map.
pub(crate) struct IterateCache<'a> {
    base: &'a PiecewiseAffineMap,
    maps: Vec<PiecewiseAffineMap>,
    cap: usize,
    failed_at: Option<usize>,
}

impl<'a> IterateCache<'a> {
    pub(crate) fn new(base: &'a PiecewiseAffineMap, cap: usize) -> Self {
        IterateCache {
            base,
            maps: Vec::new(),
            cap,
            failed_at: None,
        }
    }

    pub(crate) fn get(&mut self, n: usize) -> Result<&PiecewiseAffineMap> {
        assert!(n >= 1);
        while self.maps.len() < n {
            let k = self.maps.len() + 1;
            if let Some(at) = self.failed_at {
                if k >= at {
                    return Err(self.cap_error(at));
                }
            }
            let next = match self.maps.last() {
                None => self.base.clone(),
                Some(prev) => self.base.compose_after(prev),
            };
            if next.pieces().len() > self.cap {
                self.failed_at = Some(k);
                return Err(Error::PieceCapExceeded {
                    iterate: k,
                    required: next.pieces().len(),
                    cap: self.cap,
                });
            }
            self.maps.push(next);
        }
        Ok(&self.maps[n - 1])
    }

    fn cap_error(&self, at: usize) -> Error {
        Error::PieceCapExceeded {
            iterate: at,
            required: self.cap + 1,
            cap: self.cap,
        }
    }
}

/// Exact solution set of `f^n(x) = x`.
pub fn fixed_points_of_iterate(system: &System, n: usize, piece_cap: usize) -> Result<FixedPoints> {
    assert!(n >= 1, "iterate index must be positive");
    match system {
        System::Finite(f) => {
            let points = (0..f.size())
                .filter(|&x| (0..n).fold(x, |y, _| f.apply(y)) == x)
                .map(Point::Index)
                .collect();
            Ok(FixedPoints {
                points,
                identity_segments: Vec::new(),
            })
        }
        System::Affine(m) => Ok(affine_fixed_points(&m.iterate_map(n, piece_cap)?)),
        System::Shift(s) => Ok(FixedPoints {
            points: s
                .cyclic_words_with_prefix(n, &[])
                .into_iter()
                .map(|w| Point::Sequence(EventuallyPeriodicWord::periodic(w)))
                .collect(),
            identity_segments: Vec::new(),
        }),
    }
}

/// Smallest `p >= 1` with `f^p(x) = x`, given that `f^known(x) = x`.
pub fn minimal_period(system: &System, x: &Point, known: usize) -> Result<usize> {
    let x = system.normalize_point(x);
    let mut y = system.evaluate(&x)?;
    for d in 1..=known {
        if y == x {
            // known is a multiple of d whenever f^known(x) = x
            return if known.is_multiple_of(d) {
                Ok(d)
            } else {
                Err(Error::NotPeriodic {
                    point: x.to_string(),
                    bound: known,
                })
            };
        }
        y = system.step(&y);
    }
    Err(Error::NotPeriodic {
        point: x.to_string(),
        bound: known,
    })
}

/// A periodic point with its orbit `x, f(x), .., f^{p-1}(x)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PeriodicOrbit {
    pub representative: Point,
    pub minimal_period: usize,
    pub orbit: Vec<Point>,
}

impl PeriodicOrbit {
    /// Follows the orbit of `x` until it returns, for at most `bound` steps.
    pub fn of(system: &System, x: &Point, bound: usize) -> Result<Self> {
        let x = system.normalize_point(x);
        let mut orbit = vec![x.clone()];
        let mut y = system.evaluate(&x)?;
        while y != x {
            if orbit.len() >= bound {
                return Err(Error::NotPeriodic {
                    point: x.to_string(),
                    bound,
                });
            }
            orbit.push(y.clone());
            y = system.step(&y);
        }
        Ok(PeriodicOrbit {
            representative: x,
            minimal_period: orbit.len(),
            orbit,
        })
    }

    /// Re-derives the orbit by exact iteration and compares.
    pub fn replays(&self, system: &System) -> bool {
        match PeriodicOrbit::of(system, &self.representative, self.minimal_period + 1) {
            Ok(o) => o == *self,
            Err(_) => false,
        }
    }

    /// The same orbit started at its `k`-th element.
    pub fn rotated(&self, k: usize) -> PeriodicOrbit {
        let mut orbit = self.orbit.clone();
        orbit.rotate_left(k % self.minimal_period);
        PeriodicOrbit {
            representative: orbit[0].clone(),
            minimal_period: self.minimal_period,
            orbit,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodicCensus {
    pub n_max: usize,
    /// Points of minimal period exactly `d`.
    pub counts: BTreeMap<usize, Count>,
    /// `|{x : f^n(x) = x}|`.
    pub fix_counts: BTreeMap<usize, Count>,
}

impl PeriodicCensus {
    /// `fix_counts[n] = Σ_{d | n} counts[d]` for every `n`.
    pub fn divisor_consistent(&self) -> bool {
        (1..=self.n_max).all(|n| {
            let sum = (1..=n)
                .filter(|d| n % d == 0)
                .fold(Count::Finite(0), |acc, d| acc + self.counts[&d]);
            sum == self.fix_counts[&n]
        })
    }
}

pub fn periodic_census(system: &System, n_max: usize, piece_cap: usize) -> Result<PeriodicCensus> {
    assert!(n_max >= 1);
    let mut fixed: Vec<FixedPoints> = Vec::with_capacity(n_max);
    match system {
        System::Affine(m) => {
            let mut cache = IterateCache::new(m, piece_cap);
            for n in 1..=n_max {
                fixed.push(affine_fixed_points(cache.get(n)?));
            }
        }
        _ => {
            for n in 1..=n_max {
                fixed.push(fixed_points_of_iterate(system, n, piece_cap)?);
            }
        }
    }
    let mut counts = BTreeMap::new();
    let mut fix_counts = BTreeMap::new();
    for n in 1..=n_max {
        let fp = &fixed[n - 1];
        fix_counts.insert(n, fp.count());
        let mut isolated = 0u64;
        for x in &fp.points {
            if minimal_period(system, x, n)? == n {
                isolated += 1;
            }
        }
        let segs = fp.segment_union();
        let smaller = (1..n)
            .filter(|d| n % d == 0)
            .fold(IntervalUnion::default(), |acc, d| {
                acc.union(&fixed[d - 1].segment_union())
            });
        let uncovered = segs.total_length() > segs.intersection(&smaller).total_length();
        counts.insert(
            n,
            if uncovered {
                Count::Infinite
            } else {
                Count::Finite(isolated)
            },
        );
    }
    Ok(PeriodicCensus {
        n_max,
        counts,
        fix_counts,
    })
}

/// Iterates scanned for witnesses of minimal period `>= min_period`: prime
/// `m` first (their fixed points have minimal period 1 or `m`), then the rest,
/// each group in increasing order.
pub fn witness_schedule(min_period: usize, search_cap: usize) -> Vec<usize> {
    let start = min_period.max(1);
    let is_prime = |m: usize| {
        m >= 2
            && (2..)
                .take_while(|d| d * d <= m)
                .all(|d| !m.is_multiple_of(d))
    };
    let mut out: Vec<usize> = Vec::new();
    if start == 1 && search_cap >= 1 {
        out.push(1);
    }
    out.extend((start.max(2)..=search_cap).filter(|&m| is_prime(m)));
    out.extend((start.max(2)..=search_cap).filter(|&m| !is_prime(m)));
    out
}

/// Sample positions used to pick points out of identity segments.
const SEGMENT_SAMPLES: [(i64, i64); 6] = [(1, 3), (2, 7), (1, 5), (3, 7), (2, 3), (1, 2)];

/// Reusable witness search: fixed points and minimal periods are cached per
/// iterate, so many regions can be served from one scan.
pub struct WitnessScanner<'a> {
    system: &'a System,
    min_period: usize,
    schedule: Vec<usize>,
    iterates: Option<IterateCache<'a>>,
    fixed: HashMap<usize, Option<FixedPoints>>,
    periods: HashMap<Point, usize>,
}

impl<'a> WitnessScanner<'a> {
    pub fn new(system: &'a System, min_period: usize, limits: &Limits) -> Self {
        let iterates = match system {
            System::Affine(m) => Some(IterateCache::new(m, limits.piece_cap)),
            _ => None,
        };
        WitnessScanner {
            system,
            min_period,
            schedule: witness_schedule(min_period, limits.search_cap),
            iterates,
            fixed: HashMap::new(),
            periods: HashMap::new(),
        }
    }

    fn period_of(&mut self, x: &Point, m: usize) -> usize {
        if let Some(&p) = self.periods.get(x) {
            return p;
        }
        let p = minimal_period(self.system, x, m).expect("fixed point of f^m");
        self.periods.insert(x.clone(), p);
        p
    }

    fn fixed_for(&mut self, m: usize) -> Option<&FixedPoints> {
        if !self.fixed.contains_key(&m) {
            let fp = match (self.system, self.iterates.as_mut()) {
                (System::Affine(_), Some(cache)) => cache.get(m).ok().map(affine_fixed_points),
                (System::Finite(_), _) => fixed_points_of_iterate(self.system, m, usize::MAX).ok(),
                _ => None,
            };
            self.fixed.insert(m, fp);
        }
        self.fixed[&m].as_ref()
    }

    /// First witness in schedule order, smallest by value within an iterate.
    pub fn find(&mut self, region: &OpenRegion) -> Result<PeriodicOrbit> {
        let schedule = self.schedule.clone();
        let mut last_m = 0;
        for m in schedule {
            match self.try_iterate(region, m) {
                Ok(Some(x)) => return PeriodicOrbit::of(self.system, &x, m),
                Ok(None) => last_m = m,
                Err(()) => break,
            }
        }
        Err(Error::NotFoundWithinCap {
            min_period: self.min_period,
            last_m,
        })
    }

    /// `Err(())` when the iterate could not be built (piece cap).
    fn try_iterate(
        &mut self,
        region: &OpenRegion,
        m: usize,
    ) -> std::result::Result<Option<Point>, ()> {
        match (self.system, region) {
            (System::Shift(s), OpenRegion::Cylinders(c)) => {
                for w in c.words() {
                    for cyc in s.cyclic_words_with_prefix(m, w) {
                        let x = Point::Sequence(EventuallyPeriodicWord::periodic(cyc));
                        if self.period_of(&x, m) >= self.min_period {
                            return Ok(Some(x));
                        }
                    }
                }
                Ok(None)
            }
            (System::Finite(_), OpenRegion::Points(_))
            | (System::Affine(_), OpenRegion::Intervals(_)) => {
                let Some(fp) = self.fixed_for(m).cloned() else {
                    return Err(());
                };
                for x in candidates_in(self.system, &fp, region) {
                    if self.period_of(&x, m) >= self.min_period {
                        return Ok(Some(x));
                    }
                }
                Ok(None)
            }
            _ => Ok(None),
        }
    }
}

fn candidates_in(system: &System, fp: &FixedPoints, region: &OpenRegion) -> Vec<Point> {
    let mut out: Vec<Point> = match region {
        OpenRegion::Intervals(u) => {
            let mut v = Vec::new();
            for (lo, hi) in u.parts() {
                let start = fp
                    .points
                    .partition_point(|p| p.as_real().is_some_and(|r| r <= lo));
                for p in &fp.points[start..] {
                    match p.as_real() {
                        Some(r) if r < hi => v.push(p.clone()),
                        _ => break,
                    }
                }
            }
            let segs = fp.segment_union().intersection(u);
            for (a, b) in segs.parts() {
                for &(num, den) in &SEGMENT_SAMPLES {
                    v.push(Point::Real(a + (b - a) * rat(num, den)));
                }
            }
            v
        }
        _ => fp
            .points
            .iter()
            .filter(|x| system.region_contains(region, x))
            .cloned()
            .collect(),
    };
    out.dedup();
    out
}

/// A periodic point in `R` with minimal period `>= n`.
pub fn large_periodic_witness(
    system: &System,
    region: &OpenRegion,
    n: usize,
    limits: &Limits,
) -> Result<PeriodicOrbit> {
    system.validate_region(region)?;
    if region.is_empty() {
        return Err(Error::InvalidRegion("region is empty".into()));
    }
    WitnessScanner::new(system, n, limits).find(region)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitInfo {
    pub preperiod: usize,
    pub period: usize,
    pub orbit_size: usize,
}

/// Preperiod and period of `x` by exact memoization of its orbit.
pub fn eventual_orbit_info(system: &System, x: &Point, cap: usize) -> Result<OrbitInfo> {
    let mut seen: HashMap<Point, usize> = HashMap::new();
    let mut y = system.normalize_point(x);
    system.evaluate(&y)?;
    for i in 0..=cap {
        if let Some(&j) = seen.get(&y) {
            return Ok(OrbitInfo {
                preperiod: j,
                period: i - j,
                orbit_size: i,
            });
        }
        seen.insert(y.clone(), i);
        y = system.step(&y);
    }
    Err(Error::CapExceeded { cap })
}

fn lcm_all(lens: &[usize]) -> Option<usize> {
    lens.iter().try_fold(1usize, |acc, &l| {
        let g = acc.gcd(&l);
        (acc / g).checked_mul(l)
    })
}

/// Smallest `n` with `f^n = id`. Finite maps and subshifts are decided
/// exactly from their cycle structure; interval maps are checked for
/// `n <= n_max`.
pub fn detect_identity_iterate(system: &System, n_max: usize, piece_cap: usize) -> Option<usize> {
    match system {
        System::Finite(f) => lcm_all(&f.cycle_lengths()?),
        System::Shift(s) => {
            if (0..s.alphabet()).any(|a| s.out_degree(a) != 1) {
                return None;
            }
            let next: Vec<usize> = (0..s.alphabet())
                .map(|a| s.successors(a).next().unwrap())
                .collect();
            let f = crate::system::FiniteMap::new(next.len(), next).ok()?;
            lcm_all(&f.cycle_lengths()?)
        }
        System::Affine(m) => {
            for (k, g) in m.iterates(piece_cap).take(n_max).enumerate() {
                match g {
                    Ok(g) if g.is_identity() => return Some(k + 1),
                    Ok(_) => {}
                    Err(_) => return None,
                }
            }
            None
        }
    }
}

/// An invariant open interval on which `f ∘ f = id` while `f` is not the identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReflectionSegment {
    pub lo: Rational,
    pub hi: Rational,
}

pub fn detect_reflection_segment(
    map: &PiecewiseAffineMap,
    piece_cap: usize,
) -> Option<ReflectionSegment> {
    let f2 = map.iterate_map(2, piece_cap).ok()?;
    let segments: Vec<(Rational, Rational)> = f2
        .pieces()
        .iter()
        .filter(|p| p.is_identity())
        .map(|p| (p.lo.clone(), p.hi.clone()))
        .collect();
    let system = System::Affine(map.clone());
    for (a, b) in segments {
        // maximal runs of non-identity branches of f inside [a, b]
        let mut runs: Vec<(Rational, Rational)> = Vec::new();
        for p in map.pieces() {
            let lo = (&p.lo).max(&a).clone();
            let hi = (&p.hi).min(&b).clone();
            if lo >= hi || p.is_identity() {
                continue;
            }
            match runs.last_mut() {
                Some(last) if last.1 == lo => last.1 = hi,
                _ => runs.push((lo, hi)),
            }
        }
        for (lo, hi) in runs {
            let j = OpenRegion::interval(lo.clone(), hi.clone());
            if system.image_of_region(&j).ok() == Some(j) {
                return Some(ReflectionSegment { lo, hi });
            }
        }
    }
    None
}
