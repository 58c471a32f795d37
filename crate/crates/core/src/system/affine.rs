//! Piecewise-affine self-maps of a closed rational interval.
//!
//! Maps with `wrap_mod_one` set live on the circle `[0, 1]` with `0 ~ 1`.
//! Their pieces are stored normalized so that every piece maps its subinterval
//! into `[0, 1]` before reduction; evaluation then reduces `1` to `0`. Such a
//! map must be continuous as a circle map: adjacent pieces agree modulo one
//! at every breakpoint, and `f(0) = f(1)` modulo one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Default bound on the number of pieces an iterate may have.
pub const DEFAULT_PIECE_CAP: usize = 1 << 16;

/// One affine branch `x -> slope * x + intercept` on `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Piece {
    pub lo: Rational,
    pub hi: Rational,
    pub slope: Rational,
    pub intercept: Rational,
}

impl Piece {
    pub fn new(lo: Rational, hi: Rational, slope: Rational, intercept: Rational) -> Self {
        Piece {
            lo,
            hi,
            slope,
            intercept,
        }
    }

    /// Unreduced affine value.
    pub fn value(&self, x: &Rational) -> Rational {
        &self.slope * x + &self.intercept
    }

    pub fn is_identity(&self) -> bool {
        self.slope.is_one() && self.intercept.is_zero()
    }

    /// `(min, max)` of the unreduced values on `[lo, hi]`.
    pub fn image(&self) -> (Rational, Rational) {
        let a = self.value(&self.lo);
        let b = self.value(&self.hi);
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }

    /// Preimage of `y` under the affine branch; `None` for constant branches.
    pub fn preimage(&self, y: &Rational) -> Option<Rational> {
        if self.slope.is_zero() {
            None
        } else {
            Some((y - &self.intercept) / &self.slope)
        }
    }

    fn same_affine(&self, other: &Piece) -> bool {
        self.slope == other.slope && self.intercept == other.intercept
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PiecewiseAffineMap {
    lo: Rational,
    hi: Rational,
    pieces: Vec<Piece>,
    wrap_mod_one: bool,
}

impl PiecewiseAffineMap {
    /// Validates the partition, range and continuity conditions, normalizes
    /// circle maps, and merges adjacent collinear pieces.
    pub fn new(lo: Rational, hi: Rational, pieces: Vec<Piece>, wrap_mod_one: bool) -> Result<Self> {
        if lo >= hi {
            return Err(Error::invalid("domain", "domain must satisfy a < b"));
        }
        if pieces.is_empty() {
            return Err(Error::invalid("pieces", "at least one piece is required"));
        }
        for (i, p) in pieces.iter().enumerate() {
            if p.lo >= p.hi {
                return Err(Error::invalid(
                    format!("pieces[{i}].interval"),
                    format!("empty subinterval [{}, {}]", p.lo, p.hi),
                ));
            }
        }
        let partitions = pieces[0].lo == lo
            && pieces[pieces.len() - 1].hi == hi
            && pieces.windows(2).all(|w| w[0].hi == w[1].lo);
        if !partitions {
            return Err(Error::invalid("pieces", "pieces do not partition domain"));
        }

        if wrap_mod_one {
            if !lo.is_zero() || !hi.is_one() {
                return Err(Error::invalid(
                    "domain",
                    "wrap_mod_one requires the domain [0, 1]",
                ));
            }
            for (i, w) in pieces.windows(2).enumerate() {
                let t = &w[0].hi;
                if !(w[0].value(t) - w[1].value(t)).is_integer() {
                    return Err(Error::invalid(
                        format!("pieces[{}]", i + 1),
                        format!("map is discontinuous on the circle at {t}"),
                    ));
                }
            }
            let first = pieces[0].value(&lo);
            let last = pieces[pieces.len() - 1].value(&hi);
            if !(first - last).is_integer() {
                return Err(Error::invalid("pieces", "f(0) and f(1) differ modulo one"));
            }
        } else {
            for (i, p) in pieces.iter().enumerate() {
                let (a, b) = p.image();
                if a < lo || b > hi {
                    return Err(Error::invalid(
                        format!("pieces[{i}]"),
                        format!("piece maps [{}, {}] outside the domain", p.lo, p.hi),
                    ));
                }
            }
            for (i, w) in pieces.windows(2).enumerate() {
                let t = &w[0].hi;
                if w[0].value(t) != w[1].value(t) {
                    return Err(Error::invalid(
                        format!("pieces[{}]", i + 1),
                        format!("pieces disagree at breakpoint {t}"),
                    ));
                }
            }
        }

        let pieces = if wrap_mod_one {
            pieces
                .into_iter()
                .flat_map(normalize_circle_piece)
                .collect()
        } else {
            pieces
        };
        Ok(Self::from_trusted(lo, hi, pieces, wrap_mod_one))
    }

    fn from_trusted(lo: Rational, hi: Rational, pieces: Vec<Piece>, wrap_mod_one: bool) -> Self {
        PiecewiseAffineMap {
            lo,
            hi,
            pieces: merge_collinear(pieces),
            wrap_mod_one,
        }
    }

    pub fn domain(&self) -> (&Rational, &Rational) {
        (&self.lo, &self.hi)
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn wrap_mod_one(&self) -> bool {
        self.wrap_mod_one
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    /// Interior breakpoints followed by nothing else; endpoints excluded.
    pub fn interior_breakpoints(&self) -> Vec<Rational> {
        self.pieces[1..].iter().map(|p| p.lo.clone()).collect()
    }

    /// Index of a piece whose closed subinterval contains `x`.
    pub fn piece_index(&self, x: &Rational) -> usize {
        let i = self.pieces.partition_point(|p| &p.hi < x);
        i.min(self.pieces.len() - 1)
    }

    /// Reduces an unreduced branch value into the state space.
    pub fn reduce(&self, y: Rational) -> Rational {
        if self.wrap_mod_one {
            y.fract_mod_one()
        } else {
            y
        }
    }

    pub fn evaluate(&self, x: &Rational) -> Result<Rational> {
        if !self.contains(x) {
            return Err(Error::OutOfDomain {
                point: x.to_string(),
            });
        }
        let p = &self.pieces[self.piece_index(x)];
        Ok(self.reduce(p.value(x)))
    }

    pub fn is_identity(&self) -> bool {
        self.pieces.len() == 1 && self.pieces[0].is_identity()
    }

    /// `self ∘ inner`, i.e. `x -> self(inner(x))`.
    pub fn compose_after(&self, inner: &PiecewiseAffineMap) -> PiecewiseAffineMap {
        debug_assert_eq!(self.domain(), inner.domain());
        debug_assert_eq!(self.wrap_mod_one, inner.wrap_mod_one);
        let cuts = self.interior_breakpoints();
        let mut out = Vec::with_capacity(inner.pieces.len() * 2);
        for p in &inner.pieces {
            if p.slope.is_zero() {
                let q = &self.pieces[self.piece_index(&p.intercept)];
                out.push(Piece::new(
                    p.lo.clone(),
                    p.hi.clone(),
                    Rational::zero(),
                    q.value(&p.intercept),
                ));
                continue;
            }
            let (ya, yb) = p.image();
            let first = cuts.partition_point(|c| c <= &ya);
            let last = cuts.partition_point(|c| c < &yb);
            let mut xs: Vec<Rational> = cuts[first..last]
                .iter()
                .filter_map(|c| p.preimage(c))
                .collect();
            if p.slope.is_negative() {
                xs.reverse();
            }
            xs.insert(0, p.lo.clone());
            xs.push(p.hi.clone());
            for w in xs.windows(2) {
                let mid = w[0].midpoint(&w[1]);
                let q = &self.pieces[self.piece_index(&p.value(&mid))];
                out.push(Piece::new(
                    w[0].clone(),
                    w[1].clone(),
                    &q.slope * &p.slope,
                    &q.slope * &p.intercept + &q.intercept,
                ));
            }
        }
        Self::from_trusted(self.lo.clone(), self.hi.clone(), out, self.wrap_mod_one)
    }

    /// Explicit representation of `f^n`.
    pub fn iterate_map(&self, n: usize, cap: usize) -> Result<PiecewiseAffineMap> {
        assert!(n >= 1, "iterate_map needs n >= 1");
        let mut it = self.iterates(cap);
        let mut current = None;
        for _ in 0..n {
            current = Some(it.next().expect("iterates never ends")?);
        }
        Ok(current.expect("n >= 1"))
    }

    /// Successive iterates `f, f^2, f^3, ...`; yields a cap error once and then stops.
    pub fn iterates(&self, cap: usize) -> Iterates<'_> {
        Iterates {
            base: self,
            current: None,
            k: 0,
            cap,
            failed: false,
        }
    }

    pub fn all_slopes_expanding(&self) -> bool {
        self.pieces.iter().all(|p| p.slope.abs() > Rational::one())
    }
}

pub struct Iterates<'a> {
    base: &'a PiecewiseAffineMap,
    current: Option<PiecewiseAffineMap>,
    k: usize,
    cap: usize,
    failed: bool,
}

impl Iterator for Iterates<'_> {
    type Item = Result<PiecewiseAffineMap>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        let next = match &self.current {
            None => self.base.clone(),
            Some(prev) => self.base.compose_after(prev),
        };
        self.k += 1;
        if next.pieces.len() > self.cap {
            self.failed = true;
            return Some(Err(Error::PieceCapExceeded {
                iterate: self.k,
                required: next.pieces.len(),
                cap: self.cap,
            }));
        }
        self.current = Some(next.clone());
        Some(Ok(next))
    }
}

fn merge_collinear(pieces: Vec<Piece>) -> Vec<Piece> {
    let mut out: Vec<Piece> = Vec::with_capacity(pieces.len());
    for p in pieces {
        match out.last_mut() {
            Some(prev) if prev.same_affine(&p) => prev.hi = p.hi,
            _ => out.push(p),
        }
    }
    out
}

/// Splits a circle-map piece where its value crosses an integer and shifts
/// each part so its values lie in `[0, 1]`.
fn normalize_circle_piece(p: Piece) -> Vec<Piece> {
    if p.slope.is_zero() {
        let c = p.intercept.fract_mod_one();
        return vec![Piece::new(p.lo, p.hi, Rational::zero(), c)];
    }
    let (ya, yb) = p.image();
    let mut xs = Vec::new();
    let mut k = ya.floor() + Rational::one();
    while k < yb {
        xs.push(p.preimage(&k).expect("nonzero slope"));
        k = k + Rational::one();
    }
    if p.slope.is_negative() {
        xs.reverse();
    }
    xs.insert(0, p.lo.clone());
    xs.push(p.hi.clone());
    xs.windows(2)
        .map(|w| {
            let shift = p.value(&w[0].midpoint(&w[1])).floor();
            Piece::new(
                w[0].clone(),
                w[1].clone(),
                p.slope.clone(),
                &p.intercept - shift,
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn piece(lo: Rational, hi: Rational, s: i64, c: Rational) -> Piece {
        Piece::new(lo, hi, Rational::from_integer(s), c)
    }

    fn tent() -> PiecewiseAffineMap {
        PiecewiseAffineMap::new(
            rat(0, 1),
            rat(1, 1),
            vec![
                piece(rat(0, 1), rat(1, 2), 2, rat(0, 1)),
                piece(rat(1, 2), rat(1, 1), -2, rat(2, 1)),
            ],
            false,
        )
        .unwrap()
    }

    #[test]
    fn rejects_gap_between_pieces() {
        let err = PiecewiseAffineMap::new(
            rat(0, 1),
            rat(1, 1),
            vec![
                piece(rat(0, 1), rat(1, 2), 1, rat(0, 1)),
                piece(rat(2, 3), rat(1, 1), 1, rat(0, 1)),
            ],
            false,
        )
        .unwrap_err();
        assert!(
            err.to_string().contains("pieces do not partition domain"),
            "{err}"
        );
    }

    #[test]
    fn rejects_discontinuity_and_escape() {
        let err = PiecewiseAffineMap::new(
            rat(0, 1),
            rat(1, 1),
            vec![
                piece(rat(0, 1), rat(1, 2), 1, rat(0, 1)),
                piece(rat(1, 2), rat(1, 1), 1, rat(1, 4)),
            ],
            false,
        );
        assert!(err.is_err());
        let err = PiecewiseAffineMap::new(
            rat(0, 1),
            rat(1, 1),
            vec![piece(rat(0, 1), rat(1, 1), 2, rat(0, 1))],
            false,
        )
        .unwrap_err();
        assert!(err.to_string().contains("outside the domain"));
    }

    #[test]
    fn circle_normalization_splits_doubling() {
        let d = PiecewiseAffineMap::new(
            rat(0, 1),
            rat(1, 1),
            vec![piece(rat(0, 1), rat(1, 1), 2, rat(0, 1))],
            true,
        )
        .unwrap();
        assert_eq!(d.pieces().len(), 2);
        assert_eq!(d.pieces()[1].intercept, rat(-1, 1));
        assert_eq!(d.evaluate(&rat(2, 3)).unwrap(), rat(1, 3));
        assert_eq!(d.evaluate(&rat(1, 2)).unwrap(), rat(0, 1));
        assert_eq!(d.evaluate(&rat(1, 1)).unwrap(), rat(0, 1));
    }

    #[test]
    fn circle_discontinuity_rejected() {
        let err = PiecewiseAffineMap::new(
            rat(0, 1),
            rat(1, 1),
            vec![
                piece(rat(0, 1), rat(1, 2), 1, rat(0, 1)),
                piece(rat(1, 2), rat(1, 1), 1, rat(1, 3)),
            ],
            true,
        );
        assert!(err.is_err());
    }

    #[test]
    fn tent_evaluation_and_domain() {
        let t = tent();
        assert_eq!(t.evaluate(&rat(1, 3)).unwrap(), rat(2, 3));
        assert_eq!(t.evaluate(&rat(1, 2)).unwrap(), rat(1, 1));
        assert!(matches!(
            t.evaluate(&rat(3, 2)),
            Err(Error::OutOfDomain { .. })
        ));
    }

    #[test]
    fn tent_square_has_four_pieces() {
        let t2 = tent().iterate_map(2, DEFAULT_PIECE_CAP).unwrap();
        let slopes: Vec<_> = t2.pieces().iter().map(|p| p.slope.clone()).collect();
        assert_eq!(slopes, vec![rat(4, 1), rat(-4, 1), rat(4, 1), rat(-4, 1)]);
        let cuts: Vec<_> = t2.pieces().iter().map(|p| p.lo.clone()).collect();
        assert_eq!(cuts, vec![rat(0, 1), rat(1, 4), rat(1, 2), rat(3, 4)]);
    }

    #[test]
    fn piece_cap_is_loud() {
        let err = tent().iterate_map(5, 16).unwrap_err();
        assert_eq!(
            err,
            Error::PieceCapExceeded {
                iterate: 5,
                required: 32,
                cap: 16
            }
        );
    }
}
