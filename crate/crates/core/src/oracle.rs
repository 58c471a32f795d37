//! Brute-force cross-checks. Nothing here calls into the engines: words are
//! enumerated as base-`q` integers, maps are evaluated in `f64`, and finite
//! orbits are walked on the raw table.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::system::{FiniteMap, PiecewiseAffineMap, Sft};

/// One engine value set against its oracle value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub quantity: String,
    pub engine_value: serde_json::Value,
    pub oracle_value: serde_json::Value,
    pub agreement: bool,
    pub method: String,
}

impl OracleReport {
    /// Agreement is exact equality of the two values.
    pub fn exact<T: Serialize + PartialEq>(
        quantity: impl Into<String>,
        engine: &T,
        oracle: &T,
        method: &str,
    ) -> Self {
        OracleReport {
            quantity: quantity.into(),
            engine_value: serde_json::to_value(engine).expect("serializable"),
            oracle_value: serde_json::to_value(oracle).expect("serializable"),
            agreement: engine == oracle,
            method: method.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleCensus {
    pub n: usize,
    /// Words `w` of length `n` with `w^∞` admissible.
    pub fixed_words: u64,
    /// Minimal rotation period `d` -> number of such words.
    pub by_period: BTreeMap<usize, u64>,
}

/// Largest word space `q^n` the census will enumerate.
pub const CENSUS_CAP: u64 = 1 << 24;

pub fn exhaustive_cycle_census(sft: &Sft, n: usize) -> Result<CycleCensus> {
    assert!(n >= 1);
    let adj = sft.adjacency();
    let q = adj.len() as u64;
    let total = (0..n)
        .try_fold(1u64, |acc, _| acc.checked_mul(q))
        .filter(|&t| t <= CENSUS_CAP)
        .ok_or_else(|| Error::SizeCap(format!("{q}^{n} words exceed {CENSUS_CAP}")))?;
    let mut digits = vec![0usize; n];
    let mut census = CycleCensus {
        n,
        fixed_words: 0,
        by_period: BTreeMap::new(),
    };
    for code in 0..total {
        let mut c = code;
        for d in digits.iter_mut().rev() {
            *d = (c % q) as usize;
            c /= q;
        }
        if !(0..n).all(|i| adj[digits[i]][digits[(i + 1) % n]]) {
            continue;
        }
        census.fixed_words += 1;
        let period = (1..=n)
            .find(|&d| n.is_multiple_of(d) && (0..n).all(|i| digits[i] == digits[(i + d) % n]))
            .expect("n itself is a period");
        *census.by_period.entry(period).or_insert(0) += 1;
    }
    Ok(census)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootScan {
    pub n: usize,
    pub grid: usize,
    /// Exact zeros at samples plus sign changes between samples.
    pub count: u64,
    /// Two consecutive zero samples: `f^n - id` vanishes on an interval.
    pub degenerate: bool,
}

/// Approximate number of solutions of `f^n(x) = x`, by sampling `f^n(x) - x`
/// in floating point on `grid` equal steps of the domain.
pub fn float_root_scan(map: &PiecewiseAffineMap, n: usize, grid: usize) -> Result<RootScan> {
    let need = 1usize.checked_shl((n + 4) as u32).unwrap_or(usize::MAX);
    if grid < need {
        return Err(Error::SizeCap(format!(
            "grid {grid} below 2^{} samples",
            n + 4
        )));
    }
    let pieces: Vec<(f64, f64, f64, f64)> = map
        .pieces()
        .iter()
        .map(|p| {
            (
                p.lo.to_f64(),
                p.hi.to_f64(),
                p.slope.to_f64(),
                p.intercept.to_f64(),
            )
        })
        .collect();
    let circle = map.wrap_mod_one();
    let apply = |x: f64| {
        let &(_, _, s, c) = pieces
            .iter()
            .find(|&&(_, hi, _, _)| x <= hi)
            .unwrap_or(pieces.last().expect("nonempty"));
        let y = s * x + c;
        if circle {
            y - y.floor()
        } else {
            y
        }
    };
    let (a, b) = (map.domain().0.to_f64(), map.domain().1.to_f64());
    let g = |x: f64| {
        let y = (0..n).fold(x, |y, _| apply(y));
        let d = y - x;
        if circle {
            d - d.round()
        } else {
            d
        }
    };
    // the circle's last sample wraps around to the first
    let samples: Vec<f64> = if circle {
        (0..grid)
            .map(|i| g(a + (b - a) * i as f64 / grid as f64))
            .collect()
    } else {
        (0..=grid)
            .map(|i| g(a + (b - a) * i as f64 / grid as f64))
            .collect()
    };
    let mut count = samples.iter().filter(|&&v| v == 0.0).count() as u64;
    let mut degenerate = false;
    let pairs = if circle {
        samples.len()
    } else {
        samples.len() - 1
    };
    for i in 0..pairs {
        let (u, v) = (samples[i], samples[(i + 1) % samples.len()]);
        if u == 0.0 && v == 0.0 {
            degenerate = true;
        }
        let crosses = u * v < 0.0 && (!circle || (u.abs() < 0.25 && v.abs() < 0.25));
        if crosses {
            count += 1;
        }
    }
    Ok(RootScan {
        n,
        grid,
        count,
        degenerate,
    })
}

/// Largest finite system the reach matrix accepts.
pub const REACH_MATRIX_CAP: usize = 10_000;

/// `m[v][w]`: first `n >= 1` with `f^n(v) = w`, by walking each orbit `|X|` steps.
pub fn finite_reach_matrix(map: &FiniteMap) -> Result<Vec<Vec<Option<usize>>>> {
    let table = map.table();
    let m = table.len();
    if m > REACH_MATRIX_CAP {
        return Err(Error::SizeCap(format!(
            "{m} points exceed {REACH_MATRIX_CAP}"
        )));
    }
    let mut out = vec![vec![None; m]; m];
    for (v, row) in out.iter_mut().enumerate() {
        let mut x = v;
        for step in 1..=m {
            x = table[x];
            if row[x].is_none() {
                row[x] = Some(step);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins;
    use crate::system::System;

    fn affine(s: System) -> PiecewiseAffineMap {
        match s {
            System::Affine(m) => m,
            _ => unreachable!(),
        }
    }

    #[test]
    fn census_examples() {
        let c = exhaustive_cycle_census(&Sft::full_shift(2), 3).unwrap();
        assert_eq!(c.fixed_words, 8);
        assert_eq!(c.by_period[&3], 6);
        assert_eq!(c.by_period[&1], 2);
        assert_eq!(
            exhaustive_cycle_census(&Sft::golden_mean(), 3)
                .unwrap()
                .fixed_words,
            4
        );
        let gm = exhaustive_cycle_census(&Sft::golden_mean(), 1).unwrap();
        assert_eq!(gm.fixed_words, 1);
        assert!(exhaustive_cycle_census(&Sft::full_shift(2), 30).is_err());
    }

    #[test]
    fn root_scan_examples() {
        let tent = affine(builtins::tent());
        assert_eq!(float_root_scan(&tent, 3, 4096).unwrap().count, 8);
        let d = affine(builtins::doubling());
        let r = float_root_scan(&d, 2, 4096).unwrap();
        assert_eq!((r.count, r.degenerate), (3, false));
        let id = affine(builtins::identity());
        assert!(float_root_scan(&id, 4, 1 << 10).unwrap().degenerate);
        assert!(float_root_scan(&tent, 10, 1000).is_err());
    }

    #[test]
    fn reach_matrix_examples() {
        let m = finite_reach_matrix(&FiniteMap::cycle(4)).unwrap();
        for v in 0..4 {
            for w in 0..4 {
                let d = (w + 4 - v) % 4;
                assert_eq!(m[v][w], Some(if d == 0 { 4 } else { d }));
            }
        }
        let id = finite_reach_matrix(&FiniteMap::identity(3)).unwrap();
        assert_eq!(id[1], vec![None, Some(1), None]);
        let two = finite_reach_matrix(&FiniteMap::new(4, vec![1, 0, 3, 2]).unwrap()).unwrap();
        assert_eq!(two[0], vec![Some(2), Some(1), None, None]);
    }
}
