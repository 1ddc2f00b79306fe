//! Command-line front end: domain files in, projections, expected-utility
//! intervals, plan elimination, abstraction and the property suite out.

pub mod commands;
pub mod domain;
pub mod error;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use domain::Domain;
pub use error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Parser)]
#[command(name = "affine-planner", version, about = "Project, evaluate and abstract plans over affine-tree worlds")]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct DomainArgs {
    /// Domain file; repeat to merge fragments in order.
    #[arg(long = "domain", short = 'd', required = true)]
    pub domains: Vec<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load and validate domain files.
    Validate {
        #[command(flatten)]
        domain: DomainArgs,
        /// Print the merged domain in canonical form.
        #[arg(long)]
        canonical: bool,
    },
    /// Project a world through a plan.
    Project {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long)]
        plan: String,
        #[arg(long)]
        world: String,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        rule: u8,
    },
    /// Expected-utility interval of a plan.
    Eui {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long)]
        plan: String,
        #[arg(long)]
        world: String,
        #[arg(long, value_parser = clap::value_parser!(u8).range(2..=3))]
        rule: u8,
    },
    /// Drop plans whose interval lies wholly below another's.
    Eliminate {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        plans: Vec<String>,
        #[arg(long)]
        world: String,
        #[arg(long, value_parser = clap::value_parser!(u8).range(2..=3))]
        rule: u8,
    },
    /// Build an abstract action and print it as a domain fragment.
    Abstract {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long, value_enum)]
        op: AbstractOp,
        /// Operand actions: one for bundle, two or more otherwise.
        #[arg(long, value_delimiter = ',', required = true)]
        actions: Vec<String>,
        /// Branch groups for bundle, e.g. `0,1;2`; unlisted branches stay as they are.
        #[arg(long)]
        groups: Option<String>,
        /// Name of the new action.
        #[arg(long)]
        name: Option<String>,
    },
    /// Run the seeded property suite.
    Check {
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
        /// Cases per property; defaults to each property's own count.
        #[arg(long)]
        cases: Option<usize>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AbstractOp {
    Bundle,
    Combine,
    Compose,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Lemmas,
    Theorems,
    All,
}

/// Runs the command line and returns the exit code. Reports go to `out`
/// (or `--output`), diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 { out.write_all(rendered.as_bytes()) } else { err.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    match commands::execute(&cli) {
        Ok(outcome) => {
            let written = match &cli.output {
                Some(path) => std::fs::write(path, &outcome.text)
                    .map_err(|e| format!("{}: cannot write: {e}", path.display())),
                None => out.write_all(outcome.text.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(message) = written {
                let _ = writeln!(err, "error: {message}");
                return 1;
            }
            outcome.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
