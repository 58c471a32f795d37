//! Commands, the report they produce, and report verification.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Subcommand, ValueEnum};
use dlp_core::oracle::{self, OracleReport};
use dlp_core::periodic::{
    detect_identity_iterate, detect_reflection_segment, eventual_orbit_info, periodic_census,
    OrbitInfo, PeriodicCensus, PeriodicOrbit, ReflectionSegment,
};
use dlp_core::topology::{
    dlp_check_direct, dlp_check_touhey, empty_interior_check, ncycle_sup_reach, reach_outcome,
    shared_periodic_orbit, transitivity_certificate, verify_dlp, verify_transitivity, DlpVerdict,
    InteriorVerdict, NCycleAnalysis, ReachOutcome, Resolution, TransitivityVerdict,
};
use dlp_core::{builtins, Error, Limits, OpenRegion, Point, Rational, Result, System};
use serde::{Deserialize, Serialize};

use crate::io::{parse_point, parse_region, parse_system_file, system_digest, system_to_json};

pub const TOOL: &str = "dlp";
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum EngineChoice {
    Direct,
    Touhey,
    Both,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Subcommand)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Periodic-point counts for n = 1..n_max
    Census {
        #[arg(long = "n-max", default_value_t = 8)]
        n_max: usize,
    },
    /// Density of points of minimal period above n, cell by cell
    Dlp {
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// Cell width for interval maps (e.g. 1/128), cylinder depth for subshifts
        #[arg(long)]
        resolution: Option<String>,
        #[arg(long, value_enum, default_value_t = EngineChoice::Direct)]
        engine: EngineChoice,
        #[arg(long = "search-cap")]
        search_cap: Option<usize>,
    },
    /// Transitivity certificate or counterexample
    Transitive,
    /// First n >= 1 with f^n(V) meeting W
    Reach {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// One periodic orbit meeting every given region
    SharedOrbit {
        #[arg(long = "region", required = true)]
        regions: Vec<String>,
    },
    /// Supremum of pairwise reach times on a finite system
    Ncycle,
    /// Preperiod and period of a point
    EventuallyPeriodic {
        #[arg(long)]
        point: String,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Identity iterates, reflection segments and interior of the periodic set
    Dichotomy {
        #[arg(long = "n-max", default_value_t = 10)]
        n_max: usize,
    },
    /// Engine values against the brute-force oracles
    Crosscheck {
        #[arg(long = "n-max", default_value_t = 8)]
        n_max: usize,
        #[arg(long)]
        grid: Option<usize>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SystemSource {
    File(PathBuf),
    Builtin(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Text,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub system: SystemSource,
    pub command: Command,
    pub limits: Limits,
    pub output: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let l = &self.limits;
        if [
            l.piece_cap,
            l.search_cap,
            l.reach_cap,
            l.depth_cap,
            l.orbit_cap,
        ]
        .contains(&0)
        {
            return Err(Error::Unsupported("caps must be positive".into()));
        }
        Ok(())
    }
}

/// Limits echoed into reports so that replays use the same bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LimitsEcho {
    pub piece_cap: usize,
    pub search_cap: usize,
    pub reach_cap: usize,
    pub depth_cap: usize,
    pub orbit_cap: usize,
}

impl From<Limits> for LimitsEcho {
    fn from(l: Limits) -> Self {
        LimitsEcho {
            piece_cap: l.piece_cap,
            search_cap: l.search_cap,
            reach_cap: l.reach_cap,
            depth_cap: l.depth_cap,
            orbit_cap: l.orbit_cap,
        }
    }
}

impl From<LimitsEcho> for Limits {
    fn from(l: LimitsEcho) -> Self {
        Limits {
            piece_cap: l.piece_cap,
            search_cap: l.search_cap,
            reach_cap: l.reach_cap,
            depth_cap: l.depth_cap,
            orbit_cap: l.orbit_cap,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommandEcho {
    pub command: Command,
    pub limits: LimitsEcho,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Results {
    Census(PeriodicCensus),
    Dlp {
        verdicts: Vec<DlpVerdict>,
        /// Every witness of every verdict replayed by exact iteration.
        cross_validated: bool,
    },
    Transitivity(TransitivityVerdict),
    Reach {
        v: OpenRegion,
        w: OpenRegion,
        cap: usize,
        outcome: ReachOutcome,
    },
    SharedOrbit {
        regions: Vec<OpenRegion>,
        orbit: PeriodicOrbit,
    },
    Ncycle(NCycleAnalysis),
    EventuallyPeriodic {
        point: Point,
        info: OrbitInfo,
    },
    Dichotomy {
        n_max: usize,
        identity_iterate: Option<usize>,
        reflection_segment: Option<ReflectionSegment>,
        interior: InteriorVerdict,
    },
    Crosscheck {
        all_agree: bool,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub schema_version: u32,
    pub input_digest: String,
    pub system: serde_json::Value,
    pub command: CommandEcho,
    pub results: Results,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<Vec<OracleReport>>,
}

impl Report {
    /// Whether the results carry a definite verdict (exit code 0 rather than 2).
    pub fn conclusive(&self) -> bool {
        match &self.results {
            Results::Dlp { verdicts, .. } => verdicts.iter().all(|v| !v.is_inconclusive()),
            Results::Transitivity(v) => !matches!(v, TransitivityVerdict::Unknown { .. }),
            Results::Reach { outcome, .. } => *outcome != ReachOutcome::ExceedsCap,
            Results::Dichotomy { interior, .. } => {
                !matches!(interior, InteriorVerdict::Unknown { .. })
            }
            _ => true,
        }
    }

    /// Deterministic JSON: fixed field order, no timestamps, trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }
}

pub fn load_system(source: &SystemSource) -> Result<System> {
    match source {
        SystemSource::File(p) => parse_system_file(p),
        SystemSource::Builtin(name) => builtins::by_name(name),
    }
}

/// Resolution string for a system: `p/q` width for interval maps, depth for
/// subshifts; finite systems always use singletons.
pub fn parse_resolution(system: &System, text: Option<&str>) -> Result<Resolution> {
    let bad = |t: &str| Error::Unsupported(format!("bad resolution {t:?}"));
    match system {
        System::Finite(_) => Ok(Resolution::Singletons),
        System::Affine(_) => {
            let t = text.unwrap_or("1/128");
            let w: Rational = t.parse().map_err(|_| bad(t))?;
            if w.is_negative() || w.is_zero() {
                return Err(bad(t));
            }
            Ok(Resolution::Width(w))
        }
        System::Shift(_) => {
            let t = text.unwrap_or("7");
            match t.parse::<usize>() {
                Ok(d) if d > 0 => Ok(Resolution::Depth(d)),
                _ => Err(bad(t)),
            }
        }
    }
}

fn dlp_verdicts(
    system: &System,
    n: usize,
    resolution: &Resolution,
    engine: EngineChoice,
    limits: &Limits,
) -> Result<Vec<DlpVerdict>> {
    let mut out = Vec::new();
    if engine != EngineChoice::Touhey {
        out.push(dlp_check_direct(system, n, resolution, limits)?);
    }
    if engine != EngineChoice::Direct {
        out.push(dlp_check_touhey(system, n, resolution, limits)?);
    }
    Ok(out)
}

fn crosscheck(
    system: &System,
    n_max: usize,
    grid: Option<usize>,
    limits: &Limits,
) -> Result<Vec<OracleReport>> {
    let mut reports = Vec::new();
    match system {
        System::Shift(s) => {
            let census = periodic_census(system, n_max, limits.piece_cap)?;
            for n in 1..=n_max {
                let Ok(o) = oracle::exhaustive_cycle_census(s, n) else {
                    break;
                };
                let exact = census.fix_counts[&n];
                let engine_min = census.counts[&n];
                let oracle_min = o.by_period.get(&n).copied().unwrap_or(0);
                reports.push(OracleReport::exact(
                    format!("fix_count[{n}]"),
                    &serde_json::to_value(exact).expect("serializable"),
                    &serde_json::to_value(o.fixed_words).expect("serializable"),
                    "exhaustive_cycle_census",
                ));
                reports.push(OracleReport::exact(
                    format!("minimal_period_count[{n}]"),
                    &serde_json::to_value(engine_min).expect("serializable"),
                    &serde_json::to_value(oracle_min).expect("serializable"),
                    "exhaustive_cycle_census",
                ));
            }
        }
        System::Affine(m) => {
            let census = periodic_census(system, n_max, limits.piece_cap)?;
            for n in 1..=n_max {
                let g = grid.unwrap_or(0).max(1 << (n + 4).max(12));
                let scan = oracle::float_root_scan(m, n, g)?;
                let exact = census.fix_counts[&n];
                let (oracle_value, agreement) = if scan.degenerate {
                    (
                        serde_json::json!("degenerate"),
                        exact == dlp_core::periodic::Count::Infinite,
                    )
                } else {
                    let v = serde_json::json!(scan.count);
                    (
                        v.clone(),
                        serde_json::to_value(exact).expect("serializable") == v,
                    )
                };
                reports.push(OracleReport {
                    quantity: format!("fix_count[{n}]"),
                    engine_value: serde_json::to_value(exact).expect("serializable"),
                    oracle_value,
                    agreement,
                    method: format!("float_root_scan(grid = {g})"),
                });
            }
        }
        System::Finite(f) => {
            let analysis = ncycle_sup_reach(system)?;
            let matrix = oracle::finite_reach_matrix(f)?;
            reports.push(OracleReport::exact(
                "reach_matrix",
                &analysis.reach,
                &matrix,
                "finite_reach_matrix",
            ));
        }
    }
    Ok(reports)
}

/// Runs one command against the configured system.
pub fn run_command(config: &RunConfig) -> Result<Report> {
    config.validate()?;
    let system = load_system(&config.system)?;
    run_on(&system, &config.command, config.limits)
}

pub fn run_on(system: &System, command: &Command, limits: Limits) -> Result<Report> {
    let mut limits = limits;
    let mut oracle_section = None;
    let results = match command {
        Command::Census { n_max } => {
            if *n_max == 0 {
                return Err(Error::Unsupported("n-max must be positive".into()));
            }
            Results::Census(periodic_census(system, *n_max, limits.piece_cap)?)
        }
        Command::Dlp {
            n,
            resolution,
            engine,
            search_cap,
        } => {
            if let Some(c) = search_cap {
                limits.search_cap = *c;
            }
            let res = parse_resolution(system, resolution.as_deref())?;
            let verdicts = dlp_verdicts(system, *n, &res, *engine, &limits)?;
            let cross_validated = verdicts
                .iter()
                .all(|v| verify_dlp(system, v, limits.piece_cap).is_ok());
            Results::Dlp {
                verdicts,
                cross_validated,
            }
        }
        Command::Transitive => Results::Transitivity(transitivity_certificate(system)),
        Command::Reach { from, to, cap } => {
            if let Some(c) = cap {
                limits.reach_cap = *c;
            }
            let v = parse_region(system, from)?;
            let w = parse_region(system, to)?;
            let outcome = reach_outcome(system, &v, &w, limits.reach_cap)?;
            Results::Reach {
                v,
                w,
                cap: limits.reach_cap,
                outcome,
            }
        }
        Command::SharedOrbit { regions } => {
            let regions = regions
                .iter()
                .map(|r| parse_region(system, r))
                .collect::<Result<Vec<_>>>()?;
            let orbit = shared_periodic_orbit(system, &regions, &limits)?;
            Results::SharedOrbit { regions, orbit }
        }
        Command::Ncycle => Results::Ncycle(ncycle_sup_reach(system)?),
        Command::EventuallyPeriodic { point, cap } => {
            if let Some(c) = cap {
                limits.orbit_cap = *c;
            }
            let point = parse_point(system, point)?;
            let info = eventual_orbit_info(system, &point, limits.orbit_cap)?;
            Results::EventuallyPeriodic { point, info }
        }
        Command::Dichotomy { n_max } => Results::Dichotomy {
            n_max: *n_max,
            identity_iterate: detect_identity_iterate(system, *n_max, limits.piece_cap),
            reflection_segment: match system {
                System::Affine(m) => detect_reflection_segment(m, limits.piece_cap),
                _ => None,
            },
            interior: empty_interior_check(system, *n_max, limits.piece_cap),
        },
        Command::Crosscheck { n_max, grid } => {
            if *n_max == 0 {
                return Err(Error::Unsupported("n-max must be positive".into()));
            }
            let reports = crosscheck(system, *n_max, *grid, &limits)?;
            let all_agree = reports.iter().all(|r| r.agreement);
            oracle_section = Some(reports);
            Results::Crosscheck { all_agree }
        }
    };
    Ok(Report {
        tool: TOOL.into(),
        version: env!("CARGO_PKG_VERSION").into(),
        schema_version: SCHEMA_VERSION,
        input_digest: system_digest(system),
        system: system_to_json(system),
        command: CommandEcho {
            command: command.clone(),
            limits: limits.into(),
        },
        results,
        oracle: oracle_section,
    })
}

/// Checks a report against its embedded system: the digest must match,
/// witnesses and certificates must replay by exact iteration, and every
/// recomputable quantity must come out the same.
pub fn verify_report(report: &Report) -> std::result::Result<(), String> {
    if report.tool != TOOL || report.schema_version != SCHEMA_VERSION {
        return Err(format!(
            "unsupported report {} v{}",
            report.tool, report.schema_version
        ));
    }
    let text = serde_json::to_string(&report.system).map_err(|e| e.to_string())?;
    let system = crate::io::parse_system(&text).map_err(|e| format!("embedded system: {e}"))?;
    if system_digest(&system) != report.input_digest {
        return Err("input digest does not match the embedded system".into());
    }
    if system_to_json(&system) != report.system {
        return Err("embedded system is not in canonical form".into());
    }
    let limits: Limits = report.command.limits.into();
    match &report.results {
        Results::Dlp {
            verdicts,
            cross_validated,
        } => {
            for v in verdicts {
                verify_dlp(&system, v, limits.piece_cap)?;
            }
            if !cross_validated {
                return Err("report records a failed cross-validation".into());
            }
            Ok(())
        }
        Results::Transitivity(v) => verify_transitivity(&system, v),
        Results::SharedOrbit { regions, orbit } => {
            if !orbit.replays(&system) {
                return Err("orbit does not replay".into());
            }
            for r in regions {
                if !orbit.orbit.iter().any(|x| system.region_contains(r, x)) {
                    return Err(format!("orbit misses region {r}"));
                }
            }
            Ok(())
        }
        _ => {
            let fresh =
                run_on(&system, &report.command.command, limits).map_err(|e| e.to_string())?;
            if fresh.results != report.results || fresh.oracle != report.oracle {
                return Err("recomputed results differ from the report".into());
            }
            if let Results::Crosscheck { all_agree: false } = fresh.results {
                return Err("oracle disagreement".into());
            }
            Ok(())
        }
    }
}

/// Exit status for an error: 2 when a search ran out of room, 1 otherwise.
pub fn exit_code_for(error: &Error) -> i32 {
    match error {
        Error::PieceCapExceeded { .. }
        | Error::NotFoundWithinCap { .. }
        | Error::CapExceeded { .. }
        | Error::ExceedsCap { .. }
        | Error::RefinementCapExceeded { .. }
        | Error::NotPeriodic { .. } => 2,
        _ => 1,
    }
}

/// Short human-readable summary.
pub fn render_text(report: &Report) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{} {}  system {}",
        report.tool, report.version, report.input_digest
    );
    match &report.results {
        Results::Census(c) => {
            let _ = writeln!(s, "{:>4} {:>12} {:>12}", "n", "fix(f^n)", "minimal");
            for n in 1..=c.n_max {
                let _ = writeln!(
                    s,
                    "{:>4} {:>12} {:>12}",
                    n,
                    c.fix_counts[&n].to_string(),
                    c.counts[&n].to_string()
                );
            }
        }
        Results::Dlp {
            verdicts,
            cross_validated,
        } => {
            for v in verdicts {
                let line = match v {
                    DlpVerdict::Verified {
                        engine,
                        n,
                        witnesses,
                        ..
                    } => {
                        format!("{engine:?} n={n}: Verified, {} witnesses", witnesses.len())
                    }
                    DlpVerdict::Refuted {
                        engine,
                        n,
                        region,
                        method,
                    } => {
                        format!("{engine:?} n={n}: Refuted on {region} ({method:?})")
                    }
                    DlpVerdict::Inconclusive {
                        engine,
                        n,
                        reason,
                        failures,
                        ..
                    } => {
                        format!(
                            "{engine:?} n={n}: Inconclusive, {reason} ({} cells)",
                            failures.len()
                        )
                    }
                };
                let _ = writeln!(s, "{line}");
            }
            let _ = writeln!(s, "witnesses replayed: {cross_validated}");
        }
        Results::Transitivity(v) => {
            let _ = match v {
                TransitivityVerdict::TransitiveCertified { certificate } => writeln!(
                    s,
                    "TransitiveCertified: {} nodes, {} edges, period {}",
                    certificate.graph.node_count(),
                    certificate.graph.edge_count(),
                    certificate.period
                ),
                TransitivityVerdict::NotTransitive { v, w, invariant } => {
                    writeln!(s, "NotTransitive: V = {v}, W = {w}, invariant {invariant}")
                }
                TransitivityVerdict::Unknown { reason } => writeln!(s, "Unknown: {reason}"),
            };
        }
        Results::Reach { v, w, outcome, cap } => {
            let outcome = match outcome {
                ReachOutcome::Hit(n) => format!("first meets after {n} steps"),
                ReachOutcome::Never => "never meets (images repeat)".to_string(),
                ReachOutcome::ExceedsCap => format!("not within {cap} steps"),
            };
            let _ = writeln!(s, "reach {v} -> {w}: {outcome}");
        }
        Results::SharedOrbit { orbit, .. } => {
            let _ = writeln!(
                s,
                "orbit of {} with period {}",
                orbit.representative, orbit.minimal_period
            );
        }
        Results::Ncycle(a) => {
            let k = a.k_star.map_or("infinity".to_string(), |k| k.to_string());
            let _ = writeln!(s, "k_star = {k}: {}", a.verdict);
        }
        Results::EventuallyPeriodic { point, info } => {
            let _ = writeln!(
                s,
                "{point}: preperiod {}, period {}",
                info.preperiod, info.period
            );
        }
        Results::Dichotomy {
            identity_iterate,
            reflection_segment,
            interior,
            ..
        } => {
            let _ = writeln!(
                s,
                "identity iterate: {}",
                identity_iterate.map_or("none".to_string(), |k| format!("f^{k} = id"))
            );
            let _ = writeln!(
                s,
                "reflection segment: {}",
                reflection_segment
                    .as_ref()
                    .map_or("none".to_string(), |r| format!("({}, {})", r.lo, r.hi))
            );
            let interior = match interior {
                InteriorVerdict::CertifiedEmptyInterior { reason } => format!("empty ({reason})"),
                InteriorVerdict::InteriorFound { region, iterate } => {
                    format!("f^{iterate} = id on {region}")
                }
                InteriorVerdict::Unknown { reason } => format!("unknown ({reason})"),
            };
            let _ = writeln!(s, "interior of P: {interior}");
        }
        Results::Crosscheck { all_agree } => {
            for r in report.oracle.iter().flatten() {
                let _ = writeln!(
                    s,
                    "{:<28} engine {:<10} oracle {:<12} {}",
                    r.quantity,
                    r.engine_value.to_string(),
                    r.oracle_value.to_string(),
                    if r.agreement { "ok" } else { "MISMATCH" }
                );
            }
            let _ = writeln!(s, "all agree: {all_agree}");
        }
    }
    s
}
