//! Command-line front end: file formats, named covers and states, and JSON
//! reports with schema `contexta/1`.

pub mod commands;
pub mod error;
pub mod input;
pub mod report;

use clap::{Parser, Subcommand, ValueEnum};
use contexta::decision::{HiddenVariables, Rationalization};
use contexta::topology::GroupChoice;

pub use commands::Options;
pub use error::{CliError, CliResult};
pub use report::Report;

#[derive(Debug, Parser)]
#[command(name = "contexta", version, about = "Contextuality, Wigner negativity and topology of Pauli observables")]
pub struct Cli {
    /// Write the JSON report here ("-" for stdout instead of the summary).
    #[arg(long, global = true)]
    pub json: Option<String>,
    /// Seed for random states that do not fix their own.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Numerical tolerance for eigenstate detection and marginal checks.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tolerance: f64,
    /// Include wall-clock timing in the report.
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Global sections, the cocycle class and homology of a cover.
    AnalyzeCover { cover: String },
    /// Empirical model of a state on a cover and its contextuality verdict.
    AnalyzeState {
        state: String,
        cover: String,
        #[arg(long, value_enum, default_value_t = Policy::Auto)]
        rationalize: Policy,
        #[arg(long, value_enum, default_value_t = Hidden::CoverSections)]
        hidden: Hidden,
    },
    /// Coset poset, Euler characteristic and sphere count.
    Topology {
        cover: String,
        #[arg(long, value_enum, default_value_t = Group::Auto)]
        group: Group,
    },
    /// The eigenvalue functional against the correlator bound.
    Inequality {
        state: String,
        cover: String,
        /// 1-based index of a listed context, or generators such as "x1+x2,z1+z2".
        #[arg(long)]
        context: String,
        /// "auto" or comma-separated values on the basis of J.
        #[arg(long, default_value = "auto")]
        s0: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Policy {
    Auto,
    Snap,
    Dyadic,
}

impl From<Policy> for Rationalization {
    fn from(p: Policy) -> Self {
        match p {
            Policy::Auto => Rationalization::Auto,
            Policy::Snap => Rationalization::Snap,
            Policy::Dyadic => Rationalization::Dyadic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Hidden {
    CoverSections,
    PhasePoints,
}

impl From<Hidden> for HiddenVariables {
    fn from(h: Hidden) -> Self {
        match h {
            Hidden::CoverSections => HiddenVariables::CoverSections,
            Hidden::PhasePoints => HiddenVariables::PhasePoints,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Group {
    Auto,
    FullExtension,
    Abelian,
}

impl From<Group> for GroupChoice {
    fn from(g: Group) -> Self {
        match g {
            Group::Auto => GroupChoice::Auto,
            Group::FullExtension => GroupChoice::FullExtension,
            Group::Abelian => GroupChoice::Abelian,
        }
    }
}

impl Cli {
    pub fn options(&self) -> Options {
        Options { tolerance: self.tolerance, seed: self.seed, timing: self.timing }
    }
}

pub fn run(cli: &Cli) -> CliResult<Report> {
    let opts = cli.options();
    match &cli.command {
        Command::AnalyzeCover { cover } => commands::analyze_cover(cover, &opts),
        Command::AnalyzeState { state, cover, rationalize, hidden } => {
            commands::analyze_state(state, cover, (*rationalize).into(), (*hidden).into(), &opts)
        }
        Command::Topology { cover, group } => commands::topology(cover, (*group).into(), &opts),
        Command::Inequality { state, cover, context, s0 } => commands::inequality(state, cover, context, s0, &opts),
    }
}

/// Runs a command line given as words, as the binary would.
pub fn run_args<I, T>(args: I) -> CliResult<Report>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::parse("command line", e.to_string()))?;
    run(&cli)
}
