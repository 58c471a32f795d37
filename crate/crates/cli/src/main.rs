use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{ArgGroup, Parser};
use dlp_cli::app::{
    exit_code_for, render_text, run_command, verify_report, Format, Report, RunConfig, SystemSource,
};
use dlp_cli::Command;
use dlp_core::Limits;

/// Exact periodic-point and transitivity analysis of finite maps,
/// piecewise-affine interval maps and subshifts of finite type.
#[derive(Parser, Debug)]
#[command(name = "dlp", version, about)]
#[command(group(ArgGroup::new("source").args(["system", "builtin"])))]
struct Cli {
    /// System definition file (JSON)
    #[arg(long, global = true)]
    system: Option<PathBuf>,
    /// Named system: tent, doubling, reflection, identity, goldenmean, cycle:M, fullshift:Q
    #[arg(long, global = true)]
    builtin: Option<String>,
    /// Write the report here instead of standard output
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Replay a report file and exit 0 if every witness checks out
    #[arg(long = "verify-report", value_name = "REPORT")]
    verify_report: Option<PathBuf>,
    #[arg(long = "piece-cap", env = "DLP_PIECE_CAP", global = true)]
    piece_cap: Option<usize>,
    #[arg(
        long = "search-cap-default",
        env = "DLP_SEARCH_CAP",
        global = true,
        hide = true
    )]
    search_cap: Option<usize>,
    #[arg(long = "reach-cap", env = "DLP_REACH_CAP", global = true)]
    reach_cap: Option<usize>,
    #[arg(long = "depth-cap", env = "DLP_DEPTH_CAP", global = true)]
    depth_cap: Option<usize>,
    #[command(subcommand)]
    command: Option<Command>,
}

impl Cli {
    fn limits(&self) -> Limits {
        let d = Limits::default();
        Limits {
            piece_cap: self.piece_cap.unwrap_or(d.piece_cap),
            search_cap: self.search_cap.unwrap_or(d.search_cap),
            reach_cap: self.reach_cap.unwrap_or(d.reach_cap),
            depth_cap: self.depth_cap.unwrap_or(d.depth_cap),
            orbit_cap: d.orbit_cap,
        }
    }
}

fn verify(path: &PathBuf) -> anyhow::Result<ExitCode> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let report: Report =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    match verify_report(&report) {
        Ok(()) => {
            println!("report verified: {}", path.display());
            Ok(ExitCode::SUCCESS)
        }
        Err(e) => {
            eprintln!("report verification failed: {e}");
            Ok(ExitCode::from(1))
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    if let Some(path) = &cli.verify_report {
        return verify(path);
    }
    let limits = cli.limits();
    let Some(command) = cli.command else {
        anyhow::bail!("a subcommand is required unless --verify-report is given");
    };
    let system = match (cli.system, cli.builtin) {
        (Some(p), None) => SystemSource::File(p),
        (None, Some(b)) => SystemSource::Builtin(b),
        _ => anyhow::bail!("exactly one of --system or --builtin is required"),
    };
    let config = RunConfig {
        system,
        command,
        limits,
        output: cli.output,
        format: cli.format,
    };
    let report = match run_command(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(ExitCode::from(exit_code_for(&e) as u8));
        }
    };
    let body = match config.format {
        Format::Json => report.to_json(),
        Format::Text => render_text(&report),
    };
    match &config.output {
        Some(path) => {
            std::fs::write(path, body).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{body}"),
    }
    if let dlp_cli::app::Results::Crosscheck { all_agree: false } = report.results {
        eprintln!("oracle disagreement");
        return Ok(ExitCode::from(1));
    }
    Ok(if report.conclusive() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn main() -> ExitCode {
    // usage errors are input errors (1); 2 is reserved for inconclusive runs
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
