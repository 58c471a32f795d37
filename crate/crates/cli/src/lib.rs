//! Library side of the `dlp` command-line tool: system definition files,
//! commands and self-certifying reports.

pub mod app;
pub mod io;

pub use app::{run_command, verify_report, Command, Format, Report, RunConfig, SystemSource};
