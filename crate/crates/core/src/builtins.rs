//! Named example systems: `tent`, `doubling`, `reflection`, `identity`,
//! `cycle:m`, `fullshift:q` and `goldenmean`.

use crate::error::{Error, Result};
use crate::rational::{rat, Rational};
use crate::system::{FiniteMap, Piece, PiecewiseAffineMap, Sft, System};

fn affine(pieces: Vec<(Rational, Rational, Rational, Rational)>, wrap: bool) -> System {
    let pieces = pieces
        .into_iter()
        .map(|(lo, hi, s, c)| Piece::new(lo, hi, s, c))
        .collect();
    System::Affine(
        PiecewiseAffineMap::new(rat(0, 1), rat(1, 1), pieces, wrap).expect("builtin map is valid"),
    )
}

/// `T(x) = 2x` on `[0, 1/2]`, `2 - 2x` on `[1/2, 1]`.
pub fn tent() -> System {
    affine(
        vec![
            (rat(0, 1), rat(1, 2), rat(2, 1), rat(0, 1)),
            (rat(1, 2), rat(1, 1), rat(-2, 1), rat(2, 1)),
        ],
        false,
    )
}

/// `x -> 2x mod 1` on the circle.
pub fn doubling() -> System {
    affine(
        vec![
            (rat(0, 1), rat(1, 2), rat(2, 1), rat(0, 1)),
            (rat(1, 2), rat(1, 1), rat(2, 1), rat(-1, 1)),
        ],
        true,
    )
}

/// `x -> 1 - x` on `[0, 1]`.
pub fn reflection() -> System {
    affine(vec![(rat(0, 1), rat(1, 1), rat(-1, 1), rat(1, 1))], false)
}

pub fn identity() -> System {
    affine(vec![(rat(0, 1), rat(1, 1), rat(1, 1), rat(0, 1))], false)
}

pub fn cycle(m: usize) -> System {
    System::Finite(FiniteMap::cycle(m))
}

pub fn full_shift(q: usize) -> System {
    System::Shift(Sft::full_shift(q))
}

pub fn golden_mean() -> System {
    System::Shift(Sft::golden_mean())
}

pub fn by_name(name: &str) -> Result<System> {
    let bad = || Error::Unsupported(format!("unknown builtin system {name:?}"));
    let count = |arg: &str| -> Result<usize> {
        match arg.parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(bad()),
        }
    };
    match name.split_once(':') {
        None => match name {
            "tent" => Ok(tent()),
            "doubling" => Ok(doubling()),
            "reflection" => Ok(reflection()),
            "identity" => Ok(identity()),
            "goldenmean" => Ok(golden_mean()),
            _ => Err(bad()),
        },
        Some(("cycle", m)) => Ok(cycle(count(m)?)),
        Some(("fullshift", q)) => Ok(full_shift(count(q)?)),
        Some(_) => Err(bad()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_resolve() {
        for name in [
            "tent",
            "doubling",
            "reflection",
            "identity",
            "goldenmean",
            "cycle:5",
            "fullshift:3",
        ] {
            by_name(name).unwrap();
        }
        assert!(by_name("cycle:0").is_err());
        assert!(by_name("logistic").is_err());
    }
}
