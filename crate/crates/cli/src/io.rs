//! System definition files, and the text syntax for regions and points.
//!
//! A definition is a JSON object tagged by `type`:
//!
//! ```json
//! {"type": "finite", "size": 3, "table": [1, 2, 0]}
//! {"type": "piecewise_affine", "domain": ["0", "1"], "wrap_mod_one": false,
//!  "pieces": [{"interval": ["0", "1/2"], "slope": "2", "intercept": "0"},
//!             {"interval": ["1/2", "1"], "slope": "-2", "intercept": "2"}]}
//! {"type": "sft", "alphabet": 2, "adjacency": [[true, true], [true, false]]}
//! ```
//!
//! Rationals are always strings. Serializing a parsed system yields its
//! canonical form: adjacent collinear pieces merged, circle pieces normalized.

use std::path::Path;

use dlp_core::system::{EventuallyPeriodicWord, FiniteMap, Piece, PiecewiseAffineMap, Sft};
use dlp_core::{CylinderUnion, Error, IntervalUnion, OpenRegion, Point, Rational, Result, System};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Deserialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
enum Family {
    Finite,
    PiecewiseAffine,
    Sft,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawPiece {
    interval: (Rational, Rational),
    slope: Rational,
    intercept: Rational,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    #[serde(rename = "type")]
    family: Family,
    size: Option<usize>,
    table: Option<Vec<usize>>,
    domain: Option<(Rational, Rational)>,
    wrap_mod_one: Option<bool>,
    pieces: Option<Vec<RawPiece>>,
    alphabet: Option<usize>,
    adjacency: Option<Vec<Vec<bool>>>,
}

fn invalid(path: &str, message: impl Into<String>) -> Error {
    Error::InvalidSystem {
        path: path.into(),
        message: message.into(),
    }
}

fn required<T>(v: Option<T>, field: &str) -> Result<T> {
    v.ok_or_else(|| invalid(field, "missing field"))
}

fn forbid<T>(v: &Option<T>, field: &str, family: &str) -> Result<()> {
    match v {
        Some(_) => Err(invalid(
            field,
            format!("field does not apply to {family} systems"),
        )),
        None => Ok(()),
    }
}

/// Parses and validates a system definition.
pub fn parse_system(text: &str) -> Result<System> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawSystem = serde_path_to_error::deserialize(de).map_err(|e| {
        let inner = e.inner();
        if inner.is_syntax() || inner.is_eof() {
            Error::Syntax {
                line: inner.line(),
                column: inner.column(),
                message: inner.to_string(),
            }
        } else {
            let path = e.path().to_string();
            invalid(if path == "." { "" } else { &path }, inner.to_string())
        }
    })?;
    match raw.family {
        Family::Finite => {
            forbid(&raw.domain, "domain", "finite")?;
            forbid(&raw.wrap_mod_one, "wrap_mod_one", "finite")?;
            forbid(&raw.pieces, "pieces", "finite")?;
            forbid(&raw.alphabet, "alphabet", "finite")?;
            forbid(&raw.adjacency, "adjacency", "finite")?;
            let size = required(raw.size, "size")?;
            let table = required(raw.table, "table")?;
            Ok(System::Finite(FiniteMap::new(size, table)?))
        }
        Family::PiecewiseAffine => {
            forbid(&raw.size, "size", "piecewise_affine")?;
            forbid(&raw.table, "table", "piecewise_affine")?;
            forbid(&raw.alphabet, "alphabet", "piecewise_affine")?;
            forbid(&raw.adjacency, "adjacency", "piecewise_affine")?;
            let (lo, hi) = required(raw.domain, "domain")?;
            let pieces = required(raw.pieces, "pieces")?
                .into_iter()
                .map(|p| Piece::new(p.interval.0, p.interval.1, p.slope, p.intercept))
                .collect();
            Ok(System::Affine(PiecewiseAffineMap::new(
                lo,
                hi,
                pieces,
                raw.wrap_mod_one.unwrap_or(false),
            )?))
        }
        Family::Sft => {
            forbid(&raw.size, "size", "sft")?;
            forbid(&raw.table, "table", "sft")?;
            forbid(&raw.domain, "domain", "sft")?;
            forbid(&raw.wrap_mod_one, "wrap_mod_one", "sft")?;
            forbid(&raw.pieces, "pieces", "sft")?;
            let alphabet = required(raw.alphabet, "alphabet")?;
            let adjacency = required(raw.adjacency, "adjacency")?;
            Ok(System::Shift(Sft::new(alphabet, adjacency)?))
        }
    }
}

pub fn parse_system_file(path: &Path) -> Result<System> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_system(&text)
}

#[derive(Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum Canonical<'a> {
    Finite {
        size: usize,
        table: &'a [usize],
    },
    PiecewiseAffine {
        domain: (&'a Rational, &'a Rational),
        wrap_mod_one: bool,
        pieces: Vec<RawPiece>,
    },
    Sft {
        alphabet: usize,
        adjacency: &'a [Vec<bool>],
    },
}

fn canonical(system: &System) -> Canonical<'_> {
    match system {
        System::Finite(f) => Canonical::Finite {
            size: f.size(),
            table: f.table(),
        },
        System::Affine(m) => Canonical::PiecewiseAffine {
            domain: m.domain(),
            wrap_mod_one: m.wrap_mod_one(),
            pieces: m
                .pieces()
                .iter()
                .map(|p| RawPiece {
                    interval: (p.lo.clone(), p.hi.clone()),
                    slope: p.slope.clone(),
                    intercept: p.intercept.clone(),
                })
                .collect(),
        },
        System::Shift(s) => Canonical::Sft {
            alphabet: s.alphabet(),
            adjacency: s.adjacency(),
        },
    }
}

/// Canonical definition as a JSON value.
pub fn system_to_json(system: &System) -> serde_json::Value {
    serde_json::to_value(canonical(system)).expect("serializable")
}

/// Canonical definition, pretty-printed.
pub fn serialize_system(system: &System) -> String {
    serde_json::to_string_pretty(&canonical(system)).expect("serializable")
}

/// `sha256:` digest of the compact canonical definition.
pub fn system_digest(system: &System) -> String {
    let compact = serde_json::to_string(&canonical(system)).expect("serializable");
    format!("sha256:{}", hex::encode(Sha256::digest(compact.as_bytes())))
}

fn parse_word(s: &str) -> Result<Vec<usize>> {
    let bad = || Error::InvalidRegion(format!("bad word {s:?}"));
    if s.is_empty() {
        return Ok(Vec::new());
    }
    if s.contains('.') {
        s.split('.')
            .map(|t| t.trim().parse().map_err(|_| bad()))
            .collect()
    } else {
        s.chars()
            .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(bad))
            .collect()
    }
}

fn parse_rational(s: &str) -> Result<Rational> {
    s.trim()
        .parse()
        .map_err(|_| Error::InvalidRegion(format!("bad rational {s:?}")))
}

/// Region syntax, items separated by `;`: point indices (`0;2`), open
/// intervals (`0..1/8;3/4..1`) or cylinder words (`01;10`, or `0.12` for
/// symbols above 9).
pub fn parse_region(system: &System, text: &str) -> Result<OpenRegion> {
    let items: Vec<&str> = text
        .split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if items.is_empty() {
        return Err(Error::InvalidRegion("empty region".into()));
    }
    let region = match system {
        System::Finite(_) => OpenRegion::points(
            items
                .iter()
                .map(|s| {
                    s.parse()
                        .map_err(|_| Error::InvalidRegion(format!("bad point {s:?}")))
                })
                .collect::<Result<Vec<usize>>>()?,
        ),
        System::Affine(_) => {
            let mut parts = Vec::new();
            for item in items {
                let (a, b) = item.split_once("..").ok_or_else(|| {
                    Error::InvalidRegion(format!("expected lo..hi, got {item:?}"))
                })?;
                let (a, b) = (parse_rational(a)?, parse_rational(b)?);
                if a >= b {
                    return Err(Error::InvalidRegion(format!("empty interval ({a}, {b})")));
                }
                parts.push((a, b));
            }
            OpenRegion::Intervals(IntervalUnion::new(parts))
        }
        System::Shift(_) => OpenRegion::Cylinders(CylinderUnion::new(
            items
                .iter()
                .map(|s| parse_word(s))
                .collect::<Result<Vec<_>>>()?,
        )),
    };
    system.validate_region(&region)?;
    Ok(region)
}

/// Point syntax: an index, a rational, or `prefix(cycle)` for a sequence.
pub fn parse_point(system: &System, text: &str) -> Result<Point> {
    let text = text.trim();
    let point = match system {
        System::Finite(_) => Point::Index(
            text.parse()
                .map_err(|_| Error::InvalidRegion(format!("bad point {text:?}")))?,
        ),
        System::Affine(_) => Point::Real(parse_rational(text)?),
        System::Shift(_) => {
            let (prefix, rest) = text.split_once('(').ok_or_else(|| {
                Error::InvalidRegion(format!("expected prefix(cycle), got {text:?}"))
            })?;
            let cycle = rest
                .strip_suffix(')')
                .ok_or_else(|| Error::InvalidRegion(format!("unclosed cycle in {text:?}")))?;
            let cycle = parse_word(cycle)?;
            if cycle.is_empty() {
                return Err(Error::InvalidRegion("empty cycle".into()));
            }
            Point::Sequence(EventuallyPeriodicWord::new(parse_word(prefix)?, cycle))
        }
    };
    if !system.contains(&point) {
        return Err(Error::OutOfDomain {
            point: point.to_string(),
        });
    }
    Ok(point)
}
