use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// A total self-map of `{0, .., m-1}` with the discrete topology.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteMap {
    table: Vec<usize>,
}

impl FiniteMap {
    pub fn new(size: usize, table: Vec<usize>) -> Result<Self> {
        if size == 0 {
            return Err(Error::invalid("size", "size must be positive"));
        }
        if table.len() != size {
            return Err(Error::invalid(
                "table",
                format!("table has {} entries, expected {size}", table.len()),
            ));
        }
        if let Some((i, &v)) = table.iter().enumerate().find(|(_, &v)| v >= size) {
            return Err(Error::invalid(
                format!("table[{i}]"),
                format!("entry {v} out of range"),
            ));
        }
        Ok(FiniteMap { table })
    }

    /// The cyclic permutation `i -> i + 1 mod m`.
    pub fn cycle(m: usize) -> Self {
        assert!(m > 0);
        FiniteMap {
            table: (0..m).map(|i| (i + 1) % m).collect(),
        }
    }

    pub fn identity(m: usize) -> Self {
        assert!(m > 0);
        FiniteMap {
            table: (0..m).collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.table.len()
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn apply(&self, x: usize) -> usize {
        self.table[x]
    }

    pub fn image(&self, points: &BTreeSet<usize>) -> BTreeSet<usize> {
        points.iter().map(|&x| self.table[x]).collect()
    }

    pub fn is_permutation(&self) -> bool {
        let mut seen = vec![false; self.size()];
        for &v in &self.table {
            if std::mem::replace(&mut seen[v], true) {
                return false;
            }
        }
        true
    }

    /// Lengths of the cycles of a permutation, in order of their smallest element.
    pub fn cycle_lengths(&self) -> Option<Vec<usize>> {
        if !self.is_permutation() {
            return None;
        }
        let mut seen = vec![false; self.size()];
        let mut lens = Vec::new();
        for start in 0..self.size() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.table[x];
                len += 1;
            }
            lens.push(len);
        }
        Some(lens)
    }

    pub fn is_single_cycle(&self) -> bool {
        self.cycle_lengths().is_some_and(|l| l.len() == 1)
    }
}
