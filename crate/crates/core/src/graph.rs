//! Directed transition graphs over partition cells, symbols or points.

use std::collections::VecDeque;

use num_integer::Integer;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellLabel {
    Point(usize),
    Symbol(usize),
    Interval(Rational, Rational),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TransitionGraph {
    pub labels: Vec<CellLabel>,
    /// Sorted successor lists.
    pub successors: Vec<Vec<usize>>,
}

impl TransitionGraph {
    pub fn new(labels: Vec<CellLabel>, mut successors: Vec<Vec<usize>>) -> Self {
        assert_eq!(labels.len(), successors.len());
        for s in &mut successors {
            s.sort_unstable();
            s.dedup();
        }
        TransitionGraph { labels, successors }
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.successors.iter().map(Vec::len).sum()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.successors[a].binary_search(&b).is_ok()
    }

    pub fn reversed(&self) -> TransitionGraph {
        let mut preds = vec![Vec::new(); self.node_count()];
        for (a, succ) in self.successors.iter().enumerate() {
            for &b in succ {
                preds[b].push(a);
            }
        }
        TransitionGraph::new(self.labels.clone(), preds)
    }

    /// BFS tree from `root`: `parent[v]` for every visited `v != root`.
    pub fn bfs_tree(&self, root: usize) -> Vec<Option<usize>> {
        let mut parent = vec![None; self.node_count()];
        let mut seen = vec![false; self.node_count()];
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &w in &self.successors[v] {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(v);
                    queue.push_back(w);
                }
            }
        }
        parent
    }

    /// Nodes reachable from `start` by walks with at least one edge.
    pub fn reachable_after_one_step(&self, start: usize) -> Vec<bool> {
        let mut seen = vec![false; self.node_count()];
        let mut queue: VecDeque<usize> = VecDeque::new();
        for &w in &self.successors[start] {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
        while let Some(v) = queue.pop_front() {
            for &w in &self.successors[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    pub fn is_strongly_connected(&self) -> bool {
        let n = self.node_count();
        if n == 0 {
            return false;
        }
        let spans = |g: &TransitionGraph| {
            let parent = g.bfs_tree(0);
            (1..n).all(|v| parent[v].is_some())
        };
        spans(self) && spans(&self.reversed()) && !self.successors[0].is_empty()
    }

    /// Period of a strongly connected graph: the gcd of its cycle lengths.
    pub fn period(&self) -> Option<usize> {
        if !self.is_strongly_connected() {
            return None;
        }
        let mut level = vec![usize::MAX; self.node_count()];
        level[0] = 0;
        let mut queue = VecDeque::from([0usize]);
        let mut g = 0usize;
        while let Some(v) = queue.pop_front() {
            for &w in &self.successors[v] {
                if level[w] == usize::MAX {
                    level[w] = level[v] + 1;
                    queue.push_back(w);
                } else {
                    let diff = (level[v] + 1).abs_diff(level[w]);
                    g = g.gcd(&diff);
                }
            }
        }
        Some(if g == 0 { 1 } else { g })
    }

    /// Shortest walk `a -> .. -> b` using at least one edge, listing both ends.
    pub fn shortest_walk(&self, a: usize, b: usize) -> Option<Vec<usize>> {
        let n = self.node_count();
        let mut parent: Vec<Option<usize>> = vec![None; n];
        let mut queue = VecDeque::new();
        for &w in &self.successors[a] {
            if parent[w].is_none() {
                parent[w] = Some(a);
                queue.push_back(w);
            }
        }
        while let Some(v) = queue.pop_front() {
            if v == b {
                let mut path = vec![b];
                let mut cur = b;
                loop {
                    let p = parent[cur].expect("visited node has a parent");
                    path.push(p);
                    if p == a {
                        break;
                    }
                    cur = p;
                }
                path.reverse();
                return Some(path);
            }
            for &w in &self.successors[v] {
                if parent[w].is_none() {
                    parent[w] = Some(v);
                    queue.push_back(w);
                }
            }
        }
        None
    }

    /// Strongly connected components, each sorted, in an arbitrary but fixed order.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut g: DiGraph<(), ()> = DiGraph::new();
        let nodes: Vec<_> = (0..self.node_count()).map(|_| g.add_node(())).collect();
        for (a, succ) in self.successors.iter().enumerate() {
            for &b in succ {
                g.add_edge(nodes[a], nodes[b], ());
            }
        }
        let mut comps: Vec<Vec<usize>> = petgraph::algo::tarjan_scc(&g)
            .into_iter()
            .map(|c| {
                let mut v: Vec<usize> = c.into_iter().map(|n| n.index()).collect();
                v.sort_unstable();
                v
            })
            .collect();
        comps.sort();
        comps
    }

    /// Checks that `forward` and `backward` are BFS-style spanning trees rooted
    /// at node 0 in this graph and its reverse, which certifies strong connectivity.
    pub fn certifies_strong_connectivity(
        &self,
        forward: &[Option<usize>],
        backward: &[Option<usize>],
    ) -> bool {
        let n = self.node_count();
        if forward.len() != n || backward.len() != n || n == 0 {
            return false;
        }
        let tree_ok = |parent: &[Option<usize>], edge: &dyn Fn(usize, usize) -> bool| {
            (1..n).all(|v| {
                // every non-root node must reach the root by following parents
                let mut cur = v;
                for _ in 0..n {
                    match parent[cur] {
                        Some(p) if edge(p, cur) => {
                            if p == 0 {
                                return true;
                            }
                            cur = p;
                        }
                        _ => return false,
                    }
                }
                false
            })
        };
        let has_out = !self.successors[0].is_empty();
        has_out
            && tree_ok(forward, &|p, c| self.has_edge(p, c))
            && tree_ok(backward, &|p, c| self.has_edge(c, p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(succ: Vec<Vec<usize>>) -> TransitionGraph {
        let labels = (0..succ.len()).map(CellLabel::Symbol).collect();
        TransitionGraph::new(labels, succ)
    }

    #[test]
    fn connectivity_and_period() {
        let g = graph(vec![vec![0, 1], vec![0]]);
        assert!(g.is_strongly_connected());
        assert_eq!(g.period(), Some(1));
        let c = graph(vec![vec![1], vec![2], vec![0]]);
        assert_eq!(c.period(), Some(3));
        let split = graph(vec![vec![1], vec![0], vec![3], vec![2]]);
        assert!(!split.is_strongly_connected());
        assert_eq!(split.components(), vec![vec![0, 1], vec![2, 3]]);
    }

    #[test]
    fn walks_and_certificates() {
        let g = graph(vec![vec![1], vec![2], vec![0, 1]]);
        assert_eq!(g.shortest_walk(0, 0), Some(vec![0, 1, 2, 0]));
        assert_eq!(g.shortest_walk(1, 1), Some(vec![1, 2, 1]));
        let fwd = g.bfs_tree(0);
        let bwd = g.reversed().bfs_tree(0);
        assert!(g.certifies_strong_connectivity(&fwd, &bwd));
        let mut broken = fwd.clone();
        broken[2] = Some(0);
        assert!(!g.certifies_strong_connectivity(&broken, &bwd));
    }
}
