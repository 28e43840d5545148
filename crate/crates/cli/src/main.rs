//! Command-line front end for rewriting string diagrams modulo commutative
//! monoid structure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

mod commands;
mod error;
mod files;

use error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Structured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    /// Explore every rewrite breadth-first and report all normal forms.
    Bfs,
    /// Follow the first available rewrite.
    Leftmost,
}

#[derive(Debug, Parser)]
#[command(name = "cmonrw", version, about = "Rewriting string diagrams modulo commutative monoid structure")]
pub struct Cli {
    /// Output format; structured output is JSON.
    #[arg(long, value_enum, global = true, default_value = "text")]
    pub format: Format,

    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

/// A diagram given inline as a term, as a term file or as a cospan document.
#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct Diagram {
    /// Term expression.
    #[arg(long)]
    pub term: Option<String>,
    /// File holding a term expression.
    #[arg(long)]
    pub term_file: Option<PathBuf>,
    /// Cospan document.
    #[arg(long)]
    pub cospan: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Report right-monogamy, acyclicity and interface sizes.
    Check {
        #[command(flatten)]
        input: Diagram,
        #[arg(long)]
        sig: Option<PathBuf>,
    },
    /// Evaluate a term into a cospan document.
    Translate {
        #[arg(long)]
        sig: Option<PathBuf>,
        #[arg(long, required_unless_present = "term_file", conflicts_with = "term_file")]
        term: Option<String>,
        #[arg(long)]
        term_file: Option<PathBuf>,
        /// Also write a DOT drawing of the result.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Factorise a cospan into alternating monogamous and discrete stages.
    Factorize {
        #[command(flatten)]
        input: Diagram,
        #[arg(long)]
        sig: Option<PathBuf>,
    },
    /// Read a cospan back as a term.
    Readback {
        #[command(flatten)]
        input: Diagram,
        #[arg(long)]
        sig: Option<PathBuf>,
    },
    /// List the matches of every rule in a host.
    Match {
        #[arg(long)]
        rules: PathBuf,
        /// Term file or cospan document.
        #[arg(long)]
        host: PathBuf,
        #[arg(long)]
        sig: Option<PathBuf>,
    },
    /// Rewrite a host with a set of rules.
    Rewrite {
        #[arg(long)]
        rules: PathBuf,
        /// Term file or cospan document.
        #[arg(long)]
        host: PathBuf,
        #[arg(long)]
        sig: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "bfs")]
        strategy: StrategyArg,
        #[arg(long, default_value_t = 16)]
        max_steps: usize,
        /// List every one-step rewrite of the host instead of normalising.
        #[arg(long)]
        all: bool,
        /// Directory receiving one DOT file per reported diagram.
        #[arg(long)]
        dot_dir: Option<PathBuf>,
    },
    /// Compare graph rewriting with the brute-force term oracle.
    OracleCompare {
        #[arg(long)]
        rules: PathBuf,
        /// Term file.
        #[arg(long)]
        host: PathBuf,
        #[arg(long)]
        sig: Option<PathBuf>,
        /// Term size bound for the oracle; defaults to the host size plus 6.
        #[arg(long)]
        bound: Option<usize>,
    },
    /// Draw a diagram or a hypergraph document as DOT.
    #[command(group(ArgGroup::new("source").required(true).args(["term", "term_file", "cospan", "graph"])))]
    Export {
        #[arg(long)]
        term: Option<String>,
        #[arg(long)]
        term_file: Option<PathBuf>,
        #[arg(long)]
        cospan: Option<PathBuf>,
        /// Graph document.
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long)]
        sig: Option<PathBuf>,
    },
}

fn report(err: &CliError) -> ExitCode {
    eprintln!("{}", err.record());
    ExitCode::from(err.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return report(&CliError::usage(e.render().to_string().trim_end())),
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report(&e),
    }
}
