use serde::{Deserialize, Serialize};

use crate::graph::TransitionGraph;
use crate::region::{CylinderUnion, IntervalUnion, OpenRegion};
use crate::system::{MarkovPartition, System, DEFAULT_PIECE_CAP};

/// Largest iterate tried when looking for uniform expansion.
const EXPANSION_SEARCH: usize = 8;

/// Replayable evidence of irreducibility: the transition graph with spanning
/// trees of it and its reverse, plus aperiodicity and expansion data for
/// interval maps.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitivityCertificate {
    pub graph: TransitionGraph,
    pub forward_tree: Vec<Option<usize>>,
    pub backward_tree: Vec<Option<usize>>,
    pub period: usize,
    /// `k` such that every branch of `f^k` has `|slope| > 1`.
    pub expanding_iterate: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum TransitivityVerdict {
    TransitiveCertified {
        certificate: TransitivityCertificate,
    },
    /// `V ⊆ I`, `f(I) ⊆ cl I` and `I ∩ W = ∅`, so no image of `V` meets `W`.
    NotTransitive {
        v: OpenRegion,
        w: OpenRegion,
        invariant: OpenRegion,
    },
    Unknown {
        reason: String,
    },
}

impl TransitivityVerdict {
    pub fn is_certified(&self) -> bool {
        matches!(self, TransitivityVerdict::TransitiveCertified { .. })
    }
}

pub fn transitivity_certificate(system: &System) -> TransitivityVerdict {
    let graph = match system.transition_graph() {
        Ok(g) => g,
        Err(e) => {
            return TransitivityVerdict::Unknown {
                reason: format!("no Markov partition: {e}"),
            }
        }
    };
    if let Some(verdict) = invariant_witness(system, &graph) {
        return verdict;
    }
    let period = graph.period().expect("strongly connected");
    let mut expanding_iterate = None;
    if let System::Affine(m) = system {
        if period != 1 {
            return TransitivityVerdict::Unknown {
                reason: format!("cell graph is strongly connected but has period {period}"),
            };
        }
        expanding_iterate = m
            .iterates(DEFAULT_PIECE_CAP)
            .take(EXPANSION_SEARCH)
            .position(|g| g.is_ok_and(|g| g.all_slopes_expanding()))
            .map(|k| k + 1);
        if expanding_iterate.is_none() {
            return TransitivityVerdict::Unknown {
                reason: format!("no iterate up to {EXPANSION_SEARCH} is uniformly expanding"),
            };
        }
    }
    TransitivityVerdict::TransitiveCertified {
        certificate: TransitivityCertificate {
            forward_tree: graph.bfs_tree(0),
            backward_tree: graph.reversed().bfs_tree(0),
            graph,
            period,
            expanding_iterate,
        },
    }
}

/// A proper nonempty set of nodes closed under successors, turned into a
/// witness pair. `None` when the graph is strongly connected.
fn invariant_witness(system: &System, graph: &TransitionGraph) -> Option<TransitivityVerdict> {
    let n = graph.node_count();
    for v in 0..n {
        let mut closed = graph.reachable_after_one_step(v);
        closed[v] = true;
        if let Some(w) = closed.iter().position(|&c| !c) {
            let nodes: Vec<usize> = (0..n).filter(|&i| closed[i]).collect();
            return Some(TransitivityVerdict::NotTransitive {
                v: node_region(system, &[v])?,
                w: node_region(system, &[w])?,
                invariant: node_region(system, &nodes)?,
            });
        }
    }
    None
}

fn node_region(system: &System, nodes: &[usize]) -> Option<OpenRegion> {
    Some(match system {
        System::Finite(_) => OpenRegion::points(nodes.iter().copied()),
        System::Shift(_) => {
            OpenRegion::Cylinders(CylinderUnion::new(nodes.iter().map(|&a| vec![a])))
        }
        System::Affine(m) => {
            let cells = MarkovPartition::build(m).ok()?.cells;
            OpenRegion::Intervals(IntervalUnion::new(
                nodes
                    .iter()
                    .map(|&i| (cells[i].lo.clone(), cells[i].hi.clone()))
                    .collect(),
            ))
        }
    })
}

/// Re-derives a verdict's evidence from the system alone.
pub fn verify_transitivity(system: &System, verdict: &TransitivityVerdict) -> Result<(), String> {
    match verdict {
        TransitivityVerdict::TransitiveCertified { certificate: c } => {
            let graph = system.transition_graph().map_err(|e| e.to_string())?;
            if graph != c.graph {
                return Err("transition graph differs from the system's".into());
            }
            if !graph.certifies_strong_connectivity(&c.forward_tree, &c.backward_tree) {
                return Err("spanning trees do not certify strong connectivity".into());
            }
            if graph.period() != Some(c.period) {
                return Err("recorded period is wrong".into());
            }
            if let System::Affine(m) = system {
                let k = c.expanding_iterate.ok_or("missing expanding iterate")?;
                let g = m
                    .iterate_map(k, DEFAULT_PIECE_CAP)
                    .map_err(|e| e.to_string())?;
                if c.period != 1 || !g.all_slopes_expanding() {
                    return Err("interval certificate needs aperiodicity and expansion".into());
                }
            }
            Ok(())
        }
        TransitivityVerdict::NotTransitive { v, w, invariant } => {
            for r in [v, w, invariant] {
                system.validate_region(r).map_err(|e| e.to_string())?;
            }
            if v.is_empty() || w.is_empty() {
                return Err("witness regions must be nonempty".into());
            }
            if !region_subset(system, v, invariant) || invariant.intersects(w) {
                return Err("V must lie in I and W must avoid I".into());
            }
            if !image_in_closure(system, invariant) {
                return Err("I is not forward invariant".into());
            }
            Ok(())
        }
        TransitivityVerdict::Unknown { .. } => Ok(()),
    }
}

pub(crate) fn region_subset(system: &System, a: &OpenRegion, b: &OpenRegion) -> bool {
    match (a, b) {
        (OpenRegion::Points(x), OpenRegion::Points(y)) => x.is_subset(y),
        (OpenRegion::Intervals(x), OpenRegion::Intervals(y)) => y.contains(x),
        (OpenRegion::Cylinders(x), OpenRegion::Cylinders(y)) => match system {
            System::Shift(s) => {
                let depth = x.max_len().max(y.max_len());
                x.words().iter().all(|u| {
                    s.extensions(u, depth - u.len())
                        .iter()
                        .all(|e| y.words().iter().any(|p| e.starts_with(p)))
                })
            }
            _ => false,
        },
        _ => false,
    }
}

/// `f(cl I) ⊆ cl I`, checked on the open image plus isolated image points.
fn image_in_closure(system: &System, region: &OpenRegion) -> bool {
    let (open, points) = system.image_with_points(region);
    match (&open, region) {
        (OpenRegion::Intervals(img), OpenRegion::Intervals(i)) => {
            i.contains(img)
                && points
                    .iter()
                    .all(|p| i.parts().iter().any(|(a, b)| a <= p && p <= b))
        }
        _ => region_subset(system, &open, region),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins;
    use crate::system::FiniteMap;

    #[test]
    fn examples() {
        for sys in [
            builtins::cycle(5),
            builtins::tent(),
            builtins::doubling(),
            builtins::full_shift(2),
            builtins::golden_mean(),
        ] {
            let v = transitivity_certificate(&sys);
            assert!(v.is_certified(), "{v:?}");
            verify_transitivity(&sys, &v).unwrap();
        }
        let TransitivityVerdict::TransitiveCertified { certificate } =
            transitivity_certificate(&builtins::tent())
        else {
            unreachable!()
        };
        assert_eq!(certificate.graph.successors, vec![vec![0, 1], vec![0, 1]]);

        let two = System::Finite(FiniteMap::new(4, vec![1, 0, 3, 2]).unwrap());
        let v = transitivity_certificate(&two);
        assert_eq!(
            v,
            TransitivityVerdict::NotTransitive {
                v: OpenRegion::points([0]),
                w: OpenRegion::points([2]),
                invariant: OpenRegion::points([0, 1]),
            }
        );
        verify_transitivity(&two, &v).unwrap();
    }

    #[test]
    fn identity_and_reflection_are_not_certified() {
        for sys in [builtins::identity(), builtins::reflection()] {
            assert!(matches!(
                transitivity_certificate(&sys),
                TransitivityVerdict::Unknown { .. }
            ));
        }
    }

    #[test]
    fn tampered_certificate_fails() {
        let mut v = transitivity_certificate(&builtins::full_shift(2));
        verify_transitivity(&builtins::golden_mean(), &v).unwrap_err();
        if let TransitivityVerdict::TransitiveCertified { certificate } = &mut v {
            certificate.backward_tree[1] = None;
        }
        verify_transitivity(&builtins::full_shift(2), &v).unwrap_err();
    }
}
