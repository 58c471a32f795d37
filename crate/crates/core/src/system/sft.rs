//! One-sided subshifts of finite type over the alphabet `{0, .., q-1}`.
//!
//! A word `w = w_0 .. w_{L-1}` names the cylinder of sequences `s` with
//! `s_i = w_i` for `i < L`; the shift drops `s_0`.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Sft {
    adjacency: Vec<Vec<bool>>,
}

impl Sft {
    pub fn new(alphabet: usize, adjacency: Vec<Vec<bool>>) -> Result<Self> {
        if alphabet == 0 {
            return Err(Error::invalid("alphabet", "alphabet size must be positive"));
        }
        if adjacency.len() != alphabet {
            return Err(Error::invalid(
                "adjacency",
                format!("expected {alphabet} rows, found {}", adjacency.len()),
            ));
        }
        for (i, row) in adjacency.iter().enumerate() {
            if row.len() != alphabet {
                return Err(Error::invalid(
                    format!("adjacency[{i}]"),
                    format!("expected {alphabet} columns, found {}", row.len()),
                ));
            }
            if !row.iter().any(|&b| b) {
                return Err(Error::invalid(
                    format!("adjacency[{i}]"),
                    format!("stranded symbol {i}: no out-edge"),
                ));
            }
        }
        for j in 0..alphabet {
            if !adjacency.iter().any(|row| row[j]) {
                return Err(Error::invalid(
                    "adjacency",
                    format!("stranded symbol {j}: no in-edge"),
                ));
            }
        }
        Ok(Sft { adjacency })
    }

    pub fn full_shift(q: usize) -> Self {
        Sft {
            adjacency: vec![vec![true; q]; q],
        }
    }

    pub fn golden_mean() -> Self {
        Sft {
            adjacency: vec![vec![true, true], vec![true, false]],
        }
    }

    pub fn alphabet(&self) -> usize {
        self.adjacency.len()
    }

    pub fn adjacency(&self) -> &[Vec<bool>] {
        &self.adjacency
    }

    pub fn allows(&self, a: usize, b: usize) -> bool {
        self.adjacency[a][b]
    }

    pub fn successors(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency[a]
            .iter()
            .enumerate()
            .filter_map(|(b, &e)| e.then_some(b))
    }

    pub fn out_degree(&self, a: usize) -> usize {
        self.successors(a).count()
    }

    pub fn is_admissible(&self, word: &[usize]) -> bool {
        word.iter().all(|&s| s < self.alphabet())
            && word.windows(2).all(|w| self.allows(w[0], w[1]))
    }

    /// All admissible words of length `len`, lexicographically.
    pub fn words(&self, len: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        if len == 0 {
            out.push(Vec::new());
            return out;
        }
        for s in 0..self.alphabet() {
            self.extend_words(vec![s], len - 1, &mut out);
        }
        out
    }

    /// Admissible words `prefix ++ tail` with `tail` of length `extra`, lexicographically.
    pub fn extensions(&self, prefix: &[usize], extra: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        self.extend_words(prefix.to_vec(), extra, &mut out);
        out
    }

    fn extend_words(&self, word: Vec<usize>, extra: usize, out: &mut Vec<Vec<usize>>) {
        if extra == 0 {
            out.push(word);
            return;
        }
        let last = *word.last().expect("nonempty word");
        for b in self.successors(last) {
            let mut next = word.clone();
            next.push(b);
            self.extend_words(next, extra - 1, out);
        }
    }

    /// Words `c` of length `m` such that `c^∞` is admissible and begins with
    /// `prefix`, lexicographically. With an empty prefix these are exactly the
    /// fixed points of the `m`-th iterate of the shift.
    pub fn cyclic_words_with_prefix(&self, m: usize, prefix: &[usize]) -> Vec<Vec<usize>> {
        assert!(m >= 1);
        if prefix.len() >= m {
            let cycle = &prefix[..m];
            let periodic = prefix.iter().enumerate().all(|(i, &s)| s == cycle[i % m]);
            if periodic && self.is_admissible(prefix) && self.allows(cycle[m - 1], cycle[0]) {
                return vec![cycle.to_vec()];
            }
            return Vec::new();
        }
        let starts: Vec<Vec<usize>> = if prefix.is_empty() {
            (0..self.alphabet()).map(|s| vec![s]).collect()
        } else if self.is_admissible(prefix) {
            vec![prefix.to_vec()]
        } else {
            Vec::new()
        };
        let mut out = Vec::new();
        for start in starts {
            let remaining = m - start.len();
            for w in self.extensions(&start, remaining) {
                if self.allows(w[m - 1], w[0]) {
                    out.push(w);
                }
            }
        }
        out
    }

    /// Shortest walk `a = v_0 -> v_1 -> .. -> v_k = b` with `k >= 1`.
    pub fn shortest_walk(&self, a: usize, b: usize) -> Option<Vec<usize>> {
        let q = self.alphabet();
        let mut parent = vec![None; q];
        let mut queue = VecDeque::new();
        for s in self.successors(a) {
            if parent[s].is_none() {
                parent[s] = Some(a);
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            if v == b {
                let mut path = vec![b];
                let mut cur = b;
                loop {
                    let p = parent[cur].expect("visited");
                    path.push(p);
                    if p == a {
                        break;
                    }
                    cur = p;
                }
                path.reverse();
                return Some(path);
            }
            for s in self.successors(v) {
                if parent[s].is_none() {
                    parent[s] = Some(v);
                    queue.push_back(s);
                }
            }
        }
        None
    }

    /// Image of a cylinder union under the shift.
    pub fn shift_region(&self, words: &BTreeSet<Vec<usize>>) -> BTreeSet<Vec<usize>> {
        let mut out = BTreeSet::new();
        for w in words {
            if w.len() >= 2 {
                out.insert(w[1..].to_vec());
            } else if let Some(&a) = w.first() {
                out.extend(self.successors(a).map(|b| vec![b]));
            }
        }
        out
    }
}

/// A point `prefix ++ cycle ++ cycle ++ ..` of the sequence space, kept in a
/// canonical form: the cycle is primitive and the prefix cannot be absorbed
/// into the cycle.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EventuallyPeriodicWord {
    prefix: Vec<usize>,
    cycle: Vec<usize>,
}

impl EventuallyPeriodicWord {
    pub fn new(prefix: Vec<usize>, cycle: Vec<usize>) -> Self {
        assert!(!cycle.is_empty(), "cycle must be nonempty");
        let mut prefix = prefix;
        let mut cycle = primitive_root(cycle);
        while let (Some(&p), Some(&c)) = (prefix.last(), cycle.last()) {
            if p != c {
                break;
            }
            prefix.pop();
            cycle.rotate_right(1);
        }
        EventuallyPeriodicWord { prefix, cycle }
    }

    pub fn periodic(cycle: Vec<usize>) -> Self {
        Self::new(Vec::new(), cycle)
    }

    pub fn prefix(&self) -> &[usize] {
        &self.prefix
    }

    pub fn cycle(&self) -> &[usize] {
        &self.cycle
    }

    pub fn symbol(&self, i: usize) -> usize {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.cycle[(i - self.prefix.len()) % self.cycle.len()]
        }
    }

    pub fn first_symbols(&self, len: usize) -> Vec<usize> {
        (0..len).map(|i| self.symbol(i)).collect()
    }

    pub fn starts_with(&self, word: &[usize]) -> bool {
        word.iter().enumerate().all(|(i, &s)| self.symbol(i) == s)
    }

    pub fn shift(&self) -> Self {
        if self.prefix.is_empty() {
            let mut cycle = self.cycle.clone();
            cycle.rotate_left(1);
            EventuallyPeriodicWord {
                prefix: Vec::new(),
                cycle,
            }
        } else {
            Self::new(self.prefix[1..].to_vec(), self.cycle.clone())
        }
    }

    /// Admissible as an infinite sequence of `sft`.
    pub fn is_admissible(&self, sft: &Sft) -> bool {
        let n = self.prefix.len() + self.cycle.len() + 1;
        let w = self.first_symbols(n);
        sft.is_admissible(&w)
    }
}

fn primitive_root(cycle: Vec<usize>) -> Vec<usize> {
    let n = cycle.len();
    for d in 1..=n {
        if n.is_multiple_of(d) && (0..n).all(|i| cycle[i] == cycle[i % d]) {
            return cycle[..d].to_vec();
        }
    }
    cycle
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stranded_symbols_rejected() {
        let err = Sft::new(2, vec![vec![true, false], vec![false, false]]).unwrap_err();
        assert!(err.to_string().contains("stranded symbol 1"), "{err}");
        let err = Sft::new(2, vec![vec![true, false], vec![true, false]]).unwrap_err();
        assert!(err.to_string().contains("no in-edge"), "{err}");
    }

    #[test]
    fn canonical_words() {
        let w = EventuallyPeriodicWord::new(vec![1], vec![0, 1]);
        assert_eq!(w, EventuallyPeriodicWord::periodic(vec![1, 0]));
        let w = EventuallyPeriodicWord::periodic(vec![0, 1, 0, 1]);
        assert_eq!(w.cycle(), &[0, 1]);
        let w = EventuallyPeriodicWord::new(vec![1, 1, 0], vec![0]);
        assert_eq!(w.prefix(), &[1, 1]);
        assert_eq!(w.shift().shift(), EventuallyPeriodicWord::periodic(vec![0]));
    }

    #[test]
    fn golden_mean_cyclic_words() {
        let g = Sft::golden_mean();
        let words = g.cyclic_words_with_prefix(3, &[]);
        assert_eq!(
            words,
            vec![vec![0, 0, 0], vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]
        );
        assert_eq!(
            g.cyclic_words_with_prefix(2, &[0, 1, 0, 1]),
            vec![vec![0, 1]]
        );
        assert!(g.cyclic_words_with_prefix(2, &[1, 1]).is_empty());
    }

    #[test]
    fn walks() {
        let g = Sft::golden_mean();
        assert_eq!(g.shortest_walk(1, 1), Some(vec![1, 0, 1]));
        assert_eq!(g.shortest_walk(0, 0), Some(vec![0, 0]));
        assert_eq!(g.shortest_walk(1, 0), Some(vec![1, 0]));
    }
}
