use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::periodic::affine_fixed_points;
use crate::rational::Rational;
use crate::region::{CylinderUnion, IntervalUnion, OpenRegion};
use crate::system::{EventuallyPeriodicWord, Point, System};

use super::transitivity::{region_subset, transitivity_certificate};

/// A closed subset given exactly: points of a finite space, a finite union
/// of closed intervals (`[p, p]` is the point `p`), or a union of cylinders,
/// which are clopen.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosedSet {
    Points(BTreeSet<usize>),
    Intervals(Vec<(Rational, Rational)>),
    Cylinders(CylinderUnion),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum InvariantClass {
    Dense,
    NowhereDense,
    /// `point ∈ R` but `f(point) ∉ R`.
    NotInvariant {
        point: Point,
        image: Point,
    },
    /// A proper invariant closed set with interior; impossible under
    /// transitivity, so the certificate is contradicted.
    TransitivityViolation {
        interior: OpenRegion,
    },
}

/// Sorted, merged closed intervals.
fn merge_closed(mut v: Vec<(Rational, Rational)>) -> Vec<(Rational, Rational)> {
    v.sort();
    let mut out: Vec<(Rational, Rational)> = Vec::new();
    for (a, b) in v {
        match out.last_mut() {
            Some(last) if a <= last.1 => {
                if b > last.1 {
                    last.1 = b;
                }
            }
            _ => out.push((a, b)),
        }
    }
    out
}

fn in_closed(set: &[(Rational, Rational)], x: &Rational) -> bool {
    set.iter().any(|(a, b)| a <= x && x <= b)
}

/// A point of `[u, v]` outside the closed set, if any.
fn uncovered(set: &[(Rational, Rational)], u: &Rational, v: &Rational) -> Option<Rational> {
    let mut cur = u.clone();
    for (a, b) in set {
        if b < &cur {
            continue;
        }
        if a > &cur {
            // gap (cur, a) ∩ [u, v] is nonempty
            return Some(if &cur == u && !in_closed(set, u) {
                cur
            } else {
                cur.midpoint(&a.clone().min(v.clone()))
            });
        }
        cur = b.clone();
        if &cur >= v {
            return None;
        }
    }
    if &cur == u && !in_closed(set, u) {
        return Some(cur);
    }
    Some(cur.midpoint(v))
}

/// Decides `f(R) ⊆ R` exactly and, for invariant `R`, whether it is dense.
pub fn classify_invariant_region(system: &System, set: &ClosedSet) -> Result<InvariantClass> {
    if !transitivity_certificate(system).is_certified() {
        return Err(Error::NotCertified(
            "the system has no transitivity certificate".into(),
        ));
    }
    match (system, set) {
        (System::Finite(f), ClosedSet::Points(p)) => {
            if let Some(&x) = p.iter().find(|&&x| x >= f.size()) {
                return Err(Error::InvalidRegion(format!("point {x} out of range")));
            }
            if let Some(&x) = p.iter().find(|&&x| !p.contains(&f.apply(x))) {
                return Ok(InvariantClass::NotInvariant {
                    point: Point::Index(x),
                    image: Point::Index(f.apply(x)),
                });
            }
            Ok(if p.len() == f.size() {
                InvariantClass::Dense
            } else if p.is_empty() {
                InvariantClass::NowhereDense
            } else {
                InvariantClass::TransitivityViolation {
                    interior: OpenRegion::Points(p.clone()),
                }
            })
        }
        (System::Affine(m), ClosedSet::Intervals(parts)) => {
            let (lo, hi) = m.domain();
            for (a, b) in parts {
                if a > b || a < lo || b > hi {
                    return Err(Error::InvalidRegion(format!(
                        "[{a}, {b}] is not a subinterval of the domain"
                    )));
                }
            }
            let mut closed = parts.clone();
            if m.wrap_mod_one() {
                // the circle identifies 0 with 1
                if in_closed(parts, &Rational::zero()) {
                    closed.push((Rational::one(), Rational::one()));
                }
                if in_closed(parts, &Rational::one()) {
                    closed.push((Rational::zero(), Rational::zero()));
                }
            }
            let closed = merge_closed(closed);
            for (a, b) in merge_closed(parts.clone()) {
                for p in m.pieces() {
                    let x0 = (&a).max(&p.lo).clone();
                    let x1 = (&b).min(&p.hi).clone();
                    if x0 > x1 {
                        continue;
                    }
                    let (y0, y1) = (p.value(&x0), p.value(&x1));
                    let (u, v) = if y0 <= y1 { (y0, y1) } else { (y1, y0) };
                    if let Some(y) = uncovered(&closed, &u, &v) {
                        let x = p.preimage(&y).unwrap_or(x0);
                        return Ok(InvariantClass::NotInvariant {
                            point: Point::Real(x),
                            image: Point::Real(m.reduce(y)),
                        });
                    }
                }
            }
            let merged = merge_closed(parts.clone());
            if merged.len() == 1 && &merged[0].0 == lo && &merged[0].1 == hi {
                return Ok(InvariantClass::Dense);
            }
            let interior = IntervalUnion::new(merged.into_iter().filter(|(a, b)| a < b).collect());
            Ok(if interior.is_empty() {
                InvariantClass::NowhereDense
            } else {
                InvariantClass::TransitivityViolation {
                    interior: OpenRegion::Intervals(interior),
                }
            })
        }
        (System::Shift(s), ClosedSet::Cylinders(c)) => {
            let region = OpenRegion::Cylinders(c.clone());
            system.validate_region(&region)?;
            let depth = c.max_len();
            for w in c.words() {
                for e in s.extensions(w, depth + 1 - w.len()) {
                    if !c.words().iter().any(|p| e[1..].starts_with(p)) {
                        let x = infinite_extension(s, e);
                        let image = x.shift();
                        return Ok(InvariantClass::NotInvariant {
                            point: Point::Sequence(x),
                            image: Point::Sequence(image),
                        });
                    }
                }
            }
            if region_subset(system, &system.whole_space(), &region) {
                Ok(InvariantClass::Dense)
            } else if c.is_empty() {
                Ok(InvariantClass::NowhereDense)
            } else {
                Ok(InvariantClass::TransitivityViolation { interior: region })
            }
        }
        _ => Err(Error::RegionMismatch),
    }
}

/// `word` continued along first successors until a symbol repeats.
fn infinite_extension(s: &crate::system::Sft, mut word: Vec<usize>) -> EventuallyPeriodicWord {
    let start = word.len() - 1;
    loop {
        let last = *word.last().expect("nonempty");
        let next = s.successors(last).next().expect("no stranded symbols");
        if let Some(i) = word[start..].iter().position(|&a| a == next) {
            let cut = start + i;
            let cycle = word[cut..].to_vec();
            word.truncate(cut);
            return EventuallyPeriodicWord::new(word, cycle);
        }
        word.push(next);
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum InteriorVerdict {
    /// The set of periodic points has empty interior.
    CertifiedEmptyInterior {
        reason: String,
    },
    /// Every point of `region` is periodic.
    InteriorFound {
        region: OpenRegion,
        iterate: usize,
    },
    Unknown {
        reason: String,
    },
}

/// Whether the periodic points can contain an open set.
pub fn empty_interior_check(system: &System, n_max: usize, piece_cap: usize) -> InteriorVerdict {
    match system {
        System::Affine(m) => {
            if m.all_slopes_expanding() {
                return InteriorVerdict::CertifiedEmptyInterior {
                    reason: "every branch has |slope| > 1, so each iterate has finitely many fixed points".into(),
                };
            }
            for (k, g) in m.iterates(piece_cap).take(n_max).enumerate() {
                let Ok(g) = g else { break };
                if let Some((a, b)) = affine_fixed_points(&g).identity_segments.into_iter().next() {
                    return InteriorVerdict::InteriorFound {
                        region: OpenRegion::interval(a, b),
                        iterate: k + 1,
                    };
                }
            }
            InteriorVerdict::Unknown {
                reason: format!("no expansion and no identity segment up to iterate {n_max}"),
            }
        }
        System::Finite(f) => {
            let periodic: Vec<usize> = (0..f.size())
                .filter(|&x| (1..=f.size()).any(|k| (0..k).fold(x, |y, _| f.apply(y)) == x))
                .collect();
            let iterate = crate::periodic::detect_identity_iterate(system, 0, piece_cap);
            InteriorVerdict::InteriorFound {
                region: OpenRegion::points(periodic),
                iterate: iterate.unwrap_or(0),
            }
        }
        System::Shift(s) => {
            if let Some(k) = crate::periodic::detect_identity_iterate(system, 0, piece_cap) {
                return InteriorVerdict::InteriorFound {
                    region: system.whole_space(),
                    iterate: k,
                };
            }
            if transitivity_certificate(system).is_certified() {
                return InteriorVerdict::CertifiedEmptyInterior {
                    reason: format!(
                        "irreducible shift on {} symbols that is not a single cycle: cylinders are uncountable",
                        s.alphabet()
                    ),
                };
            }
            InteriorVerdict::Unknown {
                reason: "reducible shift".into(),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins;
    use crate::rational::rat;

    #[test]
    fn classify_examples() {
        let tent = builtins::tent();
        let c = |v: Vec<(Rational, Rational)>| {
            classify_invariant_region(&tent, &ClosedSet::Intervals(v)).unwrap()
        };
        assert_eq!(
            c(vec![(rat(0, 1), rat(0, 1))]),
            InvariantClass::NowhereDense
        );
        assert_eq!(c(vec![(rat(0, 1), rat(1, 1))]), InvariantClass::Dense);
        match c(vec![(rat(0, 1), rat(1, 2))]) {
            InvariantClass::NotInvariant {
                point: Point::Real(x),
                image: Point::Real(y),
            } => {
                assert!(x >= rat(0, 1) && x <= rat(1, 2) && y > rat(1, 2));
                assert_eq!(tent.evaluate(&Point::Real(x)).unwrap(), Point::Real(y));
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(
            c(vec![(rat(0, 1), rat(0, 1)), (rat(2, 3), rat(2, 3))]),
            InvariantClass::NowhereDense
        );
        // the period-2 orbit {2/5, 4/5} is invariant and nowhere dense
        assert_eq!(
            c(vec![(rat(2, 5), rat(2, 5)), (rat(4, 5), rat(4, 5))]),
            InvariantClass::NowhereDense
        );
    }

    #[test]
    fn shift_and_finite_classes() {
        let fs = builtins::full_shift(2);
        let r =
            classify_invariant_region(&fs, &ClosedSet::Cylinders(CylinderUnion::new([vec![0]])))
                .unwrap();
        let InvariantClass::NotInvariant { point, image } = r else {
            panic!()
        };
        assert!(matches!(point, Point::Sequence(ref w) if w.symbol(0) == 0 && w.symbol(1) == 1));
        assert!(matches!(image, Point::Sequence(ref w) if w.symbol(0) == 1));
        let all = ClosedSet::Cylinders(CylinderUnion::new([vec![0], vec![1]]));
        assert_eq!(
            classify_invariant_region(&fs, &all).unwrap(),
            InvariantClass::Dense
        );
        let c5 = builtins::cycle(5);
        assert_eq!(
            classify_invariant_region(&c5, &ClosedSet::Points((0..5).collect())).unwrap(),
            InvariantClass::Dense
        );
        assert!(matches!(
            classify_invariant_region(&c5, &ClosedSet::Points([1].into())).unwrap(),
            InvariantClass::NotInvariant { .. }
        ));
    }

    #[test]
    fn interior_examples() {
        let cap = crate::system::DEFAULT_PIECE_CAP;
        assert!(matches!(
            empty_interior_check(&builtins::tent(), 8, cap),
            InteriorVerdict::CertifiedEmptyInterior { .. }
        ));
        assert_eq!(
            empty_interior_check(&builtins::reflection(), 8, cap),
            InteriorVerdict::InteriorFound {
                region: OpenRegion::interval(rat(0, 1), rat(1, 1)),
                iterate: 2
            }
        );
        assert!(matches!(
            empty_interior_check(&builtins::identity(), 8, cap),
            InteriorVerdict::InteriorFound { iterate: 1, .. }
        ));
        assert!(matches!(
            empty_interior_check(&builtins::golden_mean(), 8, cap),
            InteriorVerdict::CertifiedEmptyInterior { .. }
        ));
    }
}
