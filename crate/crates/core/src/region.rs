//! Open subsets of the three state spaces.
//!
//! Interval unions are kept sorted and merged, and touching intervals are
//! joined: `(0, 1/2) ∪ (1/2, 1)` is stored as `(0, 1)`. Regions are therefore
//! regular open sets, which is the resolution at which images and
//! intersections with open sets are exact.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpenRegion {
    Points(BTreeSet<usize>),
    Intervals(IntervalUnion),
    Cylinders(CylinderUnion),
}

impl OpenRegion {
    pub fn points(points: impl IntoIterator<Item = usize>) -> Self {
        OpenRegion::Points(points.into_iter().collect())
    }

    pub fn interval(lo: Rational, hi: Rational) -> Self {
        OpenRegion::Intervals(IntervalUnion::new(vec![(lo, hi)]))
    }

    pub fn cylinder(word: Vec<usize>) -> Self {
        OpenRegion::Cylinders(CylinderUnion::new(vec![word]))
    }

    pub fn is_empty(&self) -> bool {
        match self {
            OpenRegion::Points(p) => p.is_empty(),
            OpenRegion::Intervals(u) => u.is_empty(),
            OpenRegion::Cylinders(c) => c.is_empty(),
        }
    }

    /// Exact test for a nonempty intersection. Mismatched variants never meet.
    pub fn intersects(&self, other: &OpenRegion) -> bool {
        match (self, other) {
            (OpenRegion::Points(a), OpenRegion::Points(b)) => !a.is_disjoint(b),
            (OpenRegion::Intervals(a), OpenRegion::Intervals(b)) => a.intersects(b),
            (OpenRegion::Cylinders(a), OpenRegion::Cylinders(b)) => a.intersects(b),
            _ => false,
        }
    }
}

impl fmt::Display for OpenRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpenRegion::Points(p) => {
                let items: Vec<String> = p.iter().map(|x| x.to_string()).collect();
                write!(f, "{{{}}}", items.join(", "))
            }
            OpenRegion::Intervals(u) => write!(f, "{u}"),
            OpenRegion::Cylinders(c) => write!(f, "{c}"),
        }
    }
}

/// Finite union of open intervals `(lo, hi)` with `lo < hi`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(from = "Vec<(Rational, Rational)>", into = "Vec<(Rational, Rational)>")]
pub struct IntervalUnion {
    parts: Vec<(Rational, Rational)>,
}

impl From<Vec<(Rational, Rational)>> for IntervalUnion {
    fn from(parts: Vec<(Rational, Rational)>) -> Self {
        IntervalUnion::new(parts)
    }
}

impl From<IntervalUnion> for Vec<(Rational, Rational)> {
    fn from(u: IntervalUnion) -> Self {
        u.parts
    }
}

impl IntervalUnion {
    /// Drops empty intervals, sorts, and joins overlapping or touching ones.
    pub fn new(mut parts: Vec<(Rational, Rational)>) -> Self {
        parts.retain(|(lo, hi)| lo < hi);
        parts.sort();
        let mut merged: Vec<(Rational, Rational)> = Vec::with_capacity(parts.len());
        for (lo, hi) in parts {
            match merged.last_mut() {
                Some(last) if lo <= last.1 => {
                    if hi > last.1 {
                        last.1 = hi;
                    }
                }
                _ => merged.push((lo, hi)),
            }
        }
        IntervalUnion { parts: merged }
    }

    pub fn parts(&self) -> &[(Rational, Rational)] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn contains_point(&self, x: &Rational) -> bool {
        let i = self.parts.partition_point(|(_, hi)| hi <= x);
        self.parts.get(i).is_some_and(|(lo, _)| lo < x)
    }

    pub fn intersects(&self, other: &IntervalUnion) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.parts.len() && j < other.parts.len() {
            let (a, b) = &self.parts[i];
            let (c, d) = &other.parts[j];
            if a.max(c) < b.min(d) {
                return true;
            }
            if b <= d {
                i += 1;
            } else {
                j += 1;
            }
        }
        false
    }

    pub fn intersection(&self, other: &IntervalUnion) -> IntervalUnion {
        let mut out = Vec::new();
        for (a, b) in &self.parts {
            for (c, d) in &other.parts {
                let lo = a.max(c);
                let hi = b.min(d);
                if lo < hi {
                    out.push((lo.clone(), hi.clone()));
                }
            }
        }
        IntervalUnion::new(out)
    }

    pub fn union(&self, other: &IntervalUnion) -> IntervalUnion {
        let mut parts = self.parts.clone();
        parts.extend(other.parts.iter().cloned());
        IntervalUnion::new(parts)
    }

    /// `other ⊆ self`.
    pub fn contains(&self, other: &IntervalUnion) -> bool {
        other.parts.iter().all(|(c, d)| {
            let i = self.parts.partition_point(|(_, hi)| hi <= c);
            self.parts.get(i).is_some_and(|(lo, hi)| lo <= c && d <= hi)
        })
    }

    pub fn total_length(&self) -> Rational {
        self.parts
            .iter()
            .fold(Rational::zero(), |acc, (lo, hi)| acc + (hi - lo))
    }
}

impl fmt::Display for IntervalUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "∅");
        }
        let items: Vec<String> = self
            .parts
            .iter()
            .map(|(a, b)| format!("({a}, {b})"))
            .collect();
        write!(f, "{}", items.join(" ∪ "))
    }
}

/// Finite union of cylinders; no stored word is a proper prefix of another.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(from = "Vec<Vec<usize>>", into = "Vec<Vec<usize>>")]
pub struct CylinderUnion {
    words: BTreeSet<Vec<usize>>,
}

impl From<Vec<Vec<usize>>> for CylinderUnion {
    fn from(words: Vec<Vec<usize>>) -> Self {
        CylinderUnion::new(words)
    }
}

impl From<CylinderUnion> for Vec<Vec<usize>> {
    fn from(c: CylinderUnion) -> Self {
        c.words.into_iter().collect()
    }
}

impl CylinderUnion {
    /// Empty words are dropped; a word with a stored prefix is redundant.
    pub fn new(words: impl IntoIterator<Item = Vec<usize>>) -> Self {
        let sorted: BTreeSet<Vec<usize>> = words.into_iter().filter(|w| !w.is_empty()).collect();
        let mut kept: BTreeSet<Vec<usize>> = BTreeSet::new();
        // lexicographic order visits every prefix before its extensions
        for w in sorted {
            let covered = (1..=w.len()).any(|l| kept.contains(&w[..l]));
            if !covered {
                kept.insert(w);
            }
        }
        CylinderUnion { words: kept }
    }

    pub fn words(&self) -> &BTreeSet<Vec<usize>> {
        &self.words
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn max_len(&self) -> usize {
        self.words.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Two cylinders meet iff one word is a prefix of the other; this relies
    /// on every admissible word extending to an infinite sequence.
    pub fn intersects(&self, other: &CylinderUnion) -> bool {
        self.words.iter().any(|u| {
            other
                .words
                .iter()
                .any(|v| u.starts_with(v) || v.starts_with(u))
        })
    }

    pub fn contains_sequence_with(&self, symbol: impl Fn(usize) -> usize) -> bool {
        self.words
            .iter()
            .any(|w| w.iter().enumerate().all(|(i, &s)| symbol(i) == s))
    }
}

fn word_string(w: &[usize]) -> String {
    if w.iter().all(|&s| s < 10) {
        w.iter().map(|s| s.to_string()).collect()
    } else {
        w.iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join(".")
    }
}

impl fmt::Display for CylinderUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self
            .words
            .iter()
            .map(|w| format!("[{}]", word_string(w)))
            .collect();
        if items.is_empty() {
            write!(f, "∅")
        } else {
            write!(f, "{}", items.join(" ∪ "))
        }
    }
}
