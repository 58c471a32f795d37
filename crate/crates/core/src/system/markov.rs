//! Markov partitions of piecewise-affine maps.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graph::{CellLabel, TransitionGraph};
use crate::rational::Rational;

use super::affine::{Piece, PiecewiseAffineMap};

/// Cells of a Markov partition; on each cell the map is a single affine
/// branch whose unreduced image is a union of whole cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkovPartition {
    pub cells: Vec<Piece>,
    pub graph: TransitionGraph,
    /// True when the breakpoint partition had to be refined by breakpoint orbits.
    pub refined: bool,
}

/// Bound on partition points produced by orbit refinement.
pub const REFINE_CAP: usize = 256;

impl MarkovPartition {
    /// Builds the partition on the breakpoints of `map`; if that is not Markov,
    /// refines it by the forward orbits of the breakpoints when those are finite.
    pub fn build(map: &PiecewiseAffineMap) -> Result<Self> {
        let cells = map.pieces().to_vec();
        match check(&cells) {
            Ok(graph) => Ok(MarkovPartition {
                cells,
                graph,
                refined: false,
            }),
            Err(original) => {
                let refined = refine(map).ok_or_else(|| original.clone())?;
                let graph = check(&refined).map_err(|_| original)?;
                Ok(MarkovPartition {
                    cells: refined,
                    graph,
                    refined: true,
                })
            }
        }
    }

    pub fn cell_of(&self, x: &Rational) -> usize {
        let i = self.cells.partition_point(|c| &c.hi < x);
        i.min(self.cells.len() - 1)
    }
}

fn check(cells: &[Piece]) -> Result<TransitionGraph> {
    let mut points: Vec<Rational> = cells.iter().map(|c| c.lo.clone()).collect();
    points.push(cells[cells.len() - 1].hi.clone());
    let index_of = |x: &Rational| points.binary_search(x).ok();
    let mut succ = Vec::with_capacity(cells.len());
    for (i, c) in cells.iter().enumerate() {
        let not_markov = || Error::NotMarkov {
            cell: i,
            lo: c.lo.to_string(),
            hi: c.hi.to_string(),
        };
        if c.slope.is_zero() {
            return Err(not_markov());
        }
        let (u, v) = c.image();
        let (Some(a), Some(b)) = (index_of(&u), index_of(&v)) else {
            return Err(not_markov());
        };
        succ.push((a..b).collect());
    }
    let labels = cells
        .iter()
        .map(|c| CellLabel::Interval(c.lo.clone(), c.hi.clone()))
        .collect();
    Ok(TransitionGraph::new(labels, succ))
}

fn refine(map: &PiecewiseAffineMap) -> Option<Vec<Piece>> {
    let (lo, hi) = map.domain();
    let mut set: BTreeSet<Rational> = map.pieces().iter().map(|p| p.lo.clone()).collect();
    set.insert(hi.clone());
    let mut frontier: Vec<Rational> = set.iter().cloned().collect();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for x in frontier {
            let y = map.evaluate(&x).ok()?;
            if set.insert(y.clone()) {
                next.push(y);
            }
        }
        if set.len() > REFINE_CAP {
            return None;
        }
        frontier = next;
    }
    debug_assert!(set.contains(lo));
    let pts: Vec<Rational> = set.into_iter().collect();
    Some(
        pts.windows(2)
            .map(|w| {
                let p = &map.pieces()[map.piece_index(&w[0].midpoint(&w[1]))];
                Piece::new(
                    w[0].clone(),
                    w[1].clone(),
                    p.slope.clone(),
                    p.intercept.clone(),
                )
            })
            .collect(),
    )
}
