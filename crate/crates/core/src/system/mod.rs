//! The three families of dynamical systems and their shared operations:
//! evaluation, iteration, region images and transition graphs.

pub mod affine;
pub mod finite;
pub mod markov;
pub mod sft;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{CellLabel, TransitionGraph};
use crate::rational::Rational;
use crate::region::{CylinderUnion, IntervalUnion, OpenRegion};

pub use affine::{Piece, PiecewiseAffineMap, DEFAULT_PIECE_CAP};
pub use finite::FiniteMap;
pub use markov::MarkovPartition;
pub use sft::{EventuallyPeriodicWord, Sft};

/// A point of one of the state spaces.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Point {
    Index(usize),
    Real(Rational),
    Sequence(EventuallyPeriodicWord),
}

impl Point {
    pub fn as_real(&self) -> Option<&Rational> {
        match self {
            Point::Real(r) => Some(r),
            _ => None,
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Index(i) => write!(f, "{i}"),
            Point::Real(r) => write!(f, "{r}"),
            Point::Sequence(w) => {
                let s = |v: &[usize]| {
                    v.iter()
                        .map(|x| x.to_string())
                        .collect::<Vec<_>>()
                        .join(".")
                };
                if w.prefix().is_empty() {
                    write!(f, "({})^∞", s(w.cycle()))
                } else {
                    write!(f, "{}({})^∞", s(w.prefix()), s(w.cycle()))
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum System {
    Finite(FiniteMap),
    Affine(PiecewiseAffineMap),
    Shift(Sft),
}

impl System {
    pub fn family(&self) -> &'static str {
        match self {
            System::Finite(_) => "finite",
            System::Affine(_) => "piecewise_affine",
            System::Shift(_) => "sft",
        }
    }

    pub fn contains(&self, x: &Point) -> bool {
        match (self, x) {
            (System::Finite(f), Point::Index(i)) => *i < f.size(),
            (System::Affine(m), Point::Real(r)) => m.contains(r),
            (System::Shift(s), Point::Sequence(w)) => w.is_admissible(s),
            _ => false,
        }
    }

    fn check_point(&self, x: &Point) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::OutOfDomain {
                point: x.to_string(),
            })
        }
    }

    /// `f(x)`, exactly; circle maps return a value in `[0, 1)`.
    pub fn evaluate(&self, x: &Point) -> Result<Point> {
        self.check_point(x)?;
        Ok(self.step(x))
    }

    /// `f(x)` for a point already known to be in the domain.
    pub(crate) fn step(&self, x: &Point) -> Point {
        match (self, x) {
            (System::Finite(f), Point::Index(i)) => Point::Index(f.apply(*i)),
            (System::Affine(m), Point::Real(r)) => {
                let p = &m.pieces()[m.piece_index(r)];
                Point::Real(m.reduce(p.value(r)))
            }
            (System::Shift(_), Point::Sequence(w)) => Point::Sequence(w.shift()),
            _ => unreachable!("point family checked by caller"),
        }
    }

    /// `f^n(x)` by repeated exact evaluation.
    pub fn iterate(&self, x: &Point, n: usize) -> Result<Point> {
        self.check_point(x)?;
        let mut y = x.clone();
        for _ in 0..n {
            y = self.step(&y);
        }
        Ok(y)
    }

    /// Canonical representative of `x` in the state space (circle maps identify 1 with 0).
    pub fn normalize_point(&self, x: &Point) -> Point {
        match (self, x) {
            (System::Affine(m), Point::Real(r)) if m.wrap_mod_one() => {
                Point::Real(r.fract_mod_one())
            }
            _ => x.clone(),
        }
    }

    pub fn validate_region(&self, region: &OpenRegion) -> Result<()> {
        match (self, region) {
            (System::Finite(f), OpenRegion::Points(p)) => {
                if let Some(x) = p.iter().find(|&&x| x >= f.size()) {
                    return Err(Error::InvalidRegion(format!("point {x} out of range")));
                }
                Ok(())
            }
            (System::Affine(m), OpenRegion::Intervals(u)) => {
                let (lo, hi) = m.domain();
                for (a, b) in u.parts() {
                    if a < lo || b > hi {
                        return Err(Error::InvalidRegion(format!(
                            "interval ({a}, {b}) leaves the domain [{lo}, {hi}]"
                        )));
                    }
                }
                Ok(())
            }
            (System::Shift(s), OpenRegion::Cylinders(c)) => {
                for w in c.words() {
                    if !s.is_admissible(w) {
                        return Err(Error::InvalidRegion(format!(
                            "word {w:?} is not admissible"
                        )));
                    }
                }
                Ok(())
            }
            _ => Err(Error::RegionMismatch),
        }
    }

    /// `x ∈ R`.
    pub fn region_contains(&self, region: &OpenRegion, x: &Point) -> bool {
        match (region, x) {
            (OpenRegion::Points(p), Point::Index(i)) => p.contains(i),
            (OpenRegion::Intervals(u), Point::Real(r)) => {
                u.contains_point(r) || (self.is_circle() && r.is_zero() && contains_circle_zero(u))
            }
            (OpenRegion::Cylinders(c), Point::Sequence(w)) => {
                c.contains_sequence_with(|i| w.symbol(i))
            }
            _ => false,
        }
    }

    fn is_circle(&self) -> bool {
        matches!(self, System::Affine(m) if m.wrap_mod_one())
    }

    /// Exact image `f(R)`. Constant branches of interval maps send an open
    /// interval to a single point, which is not open; such points are left out
    /// (see [`System::image_with_points`] for the full image).
    pub fn image_of_region(&self, region: &OpenRegion) -> Result<OpenRegion> {
        self.validate_region(region)?;
        Ok(self.image_with_points(region).0)
    }

    /// Image of `R` as its open part plus the isolated points contributed by
    /// constant branches.
    pub fn image_with_points(&self, region: &OpenRegion) -> (OpenRegion, BTreeSet<Rational>) {
        match (self, region) {
            (System::Finite(f), OpenRegion::Points(p)) => {
                (OpenRegion::Points(f.image(p)), BTreeSet::new())
            }
            (System::Affine(m), OpenRegion::Intervals(u)) => {
                let (open, points) = interval_image(m, u);
                (OpenRegion::Intervals(open), points)
            }
            (System::Shift(s), OpenRegion::Cylinders(c)) => (
                OpenRegion::Cylinders(CylinderUnion::new(s.shift_region(c.words()))),
                BTreeSet::new(),
            ),
            _ => (region.clone(), BTreeSet::new()),
        }
    }

    /// Transition graph: `i -> f(i)` for finite maps, the adjacency matrix for
    /// subshifts, and the Markov cell graph for interval maps.
    pub fn transition_graph(&self) -> Result<TransitionGraph> {
        match self {
            System::Finite(f) => Ok(TransitionGraph::new(
                (0..f.size()).map(CellLabel::Point).collect(),
                f.table().iter().map(|&y| vec![y]).collect(),
            )),
            System::Shift(s) => Ok(TransitionGraph::new(
                (0..s.alphabet()).map(CellLabel::Symbol).collect(),
                (0..s.alphabet())
                    .map(|a| s.successors(a).collect())
                    .collect(),
            )),
            System::Affine(m) => Ok(MarkovPartition::build(m)?.graph),
        }
    }

    /// The whole space as an open region.
    pub fn whole_space(&self) -> OpenRegion {
        match self {
            System::Finite(f) => OpenRegion::points(0..f.size()),
            System::Affine(m) => {
                let (lo, hi) = m.domain();
                OpenRegion::interval(lo.clone(), hi.clone())
            }
            System::Shift(s) => {
                OpenRegion::Cylinders(CylinderUnion::new((0..s.alphabet()).map(|a| vec![a])))
            }
        }
    }
}

fn contains_circle_zero(u: &IntervalUnion) -> bool {
    // on the circle, 0 ~ 1 is interior when intervals abut it from both sides
    let parts = u.parts();
    match (parts.first(), parts.last()) {
        (Some((a, _)), Some((_, b))) => a.is_zero() && b.is_one(),
        _ => false,
    }
}

fn interval_image(
    m: &PiecewiseAffineMap,
    u: &IntervalUnion,
) -> (IntervalUnion, BTreeSet<Rational>) {
    let mut parts = Vec::new();
    let mut points = BTreeSet::new();
    for (l, h) in u.parts() {
        let start = m.piece_index(l);
        for p in &m.pieces()[start..] {
            if &p.lo >= h {
                break;
            }
            if &p.hi <= l {
                continue;
            }
            let a = l.max(&p.lo);
            let b = h.min(&p.hi);
            if p.slope.is_zero() {
                points.insert(m.reduce(p.intercept.clone()));
                continue;
            }
            let (ya, yb) = (p.value(a), p.value(b));
            if ya < yb {
                parts.push((ya, yb));
            } else {
                parts.push((yb, ya));
            }
        }
    }
    let open = IntervalUnion::new(parts);
    points.retain(|x| !open.contains_point(x));
    (open, points)
}
