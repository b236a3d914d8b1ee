mod commands;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cofix_core::{parse_scalar, Scalar};

/// Exact common-fixed-point checks for piecewise Möbius maps.
#[derive(Debug, Parser)]
#[command(name = "cofix", version)]
pub struct Cli {
    /// Directory searched for fixtures given by name.
    #[arg(long, env = "COFIX_FIXTURE_DIR", global = true)]
    pub fixture_dir: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Strict,
    Advisory,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the hypotheses of a scenario, or a single named condition.
    Verify(VerifyArgs),
    /// Run the iteration and the common-fixed-point pipeline.
    Iterate(IterateArgs),
    /// Build a continuous monotone ψ dominating a control function.
    Synthesize(SynthesizeArgs),
    /// Probe compatibility, reciprocal continuity and weak compatibility.
    Compat(CompatArgs),
    /// Run every bundled scenario against its expected outcomes.
    Corpus(CorpusArgs),
}

fn scalar(s: &str) -> Result<Scalar, String> {
    parse_scalar(s).map_err(|e| e.to_string())
}

#[derive(Debug, Args)]
pub struct SamplingArgs {
    /// Sample points per interval component.
    #[arg(long)]
    pub resolution: Option<usize>,
    /// Distance kept from open endpoints, as a fraction of the interval length.
    #[arg(long, value_parser = scalar)]
    pub edge_offset: Option<Scalar>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Fixture name or path to a fixture file.
    pub fixture: String,
    /// Condition variant, e.g. main, two_map_max, jungck. A matching
    /// declaration in the fixture is used unless --coeff, --m or --j is given.
    #[arg(long)]
    pub condition: Option<String>,
    /// Control function of the fixture used as φ or ψ.
    #[arg(long)]
    pub control: Option<String>,
    /// Coefficient r or c1.
    #[arg(long, value_parser = scalar)]
    pub coeff: Option<Scalar>,
    /// Power of T for the iterated condition.
    #[arg(long)]
    pub m: Option<usize>,
    /// Family index for the family condition.
    #[arg(long)]
    pub j: Option<usize>,
    /// Maps as a comma-separated list, e.g. T,f,g or T_1,f.
    #[arg(long, value_delimiter = ',')]
    pub maps: Vec<String>,
    #[command(flatten)]
    pub sampling: SamplingArgs,
}

#[derive(Debug, Args)]
pub struct IterateArgs {
    pub fixture: String,
    #[arg(long, value_parser = scalar)]
    pub x0: Option<Scalar>,
    /// Run the pipeline on T^m and f, then check commuting on the fixed set.
    #[arg(long, visible_alias = "m")]
    pub power: Option<usize>,
    /// Family indices, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub indices: Vec<usize>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long, value_parser = scalar)]
    pub tol: Option<Scalar>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long, value_delimiter = ',')]
    pub maps: Vec<String>,
    #[command(flatten)]
    pub sampling: SamplingArgs,
}

#[derive(Debug, Args)]
pub struct SynthesizeArgs {
    /// `fixture.control`, a control-function JSON file, or `linear:r` for φ(t) = r t.
    pub source: String,
    /// Right end of the grid. Defaults to twice the last breakpoint, at least 3
    /// and at least the largest distance used by the fixture's condition checks.
    #[arg(long, value_parser = scalar)]
    pub upper: Option<Scalar>,
    #[arg(long, default_value_t = 1000)]
    pub grid: usize,
    /// Write ψ as JSON to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompatArgs {
    pub fixture: String,
    /// Witness sequence of the fixture; defaults to the first one.
    #[arg(long)]
    pub witness: Option<String>,
    /// The pair as T,f.
    #[arg(long, value_delimiter = ',')]
    pub maps: Vec<String>,
    /// Point for reciprocal continuity; defaults to lim T x_n.
    #[arg(long, value_parser = scalar)]
    pub t: Option<Scalar>,
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    /// Run only these scenarios.
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(out) => {
            // A closed pipe (e.g. `| head`) is not an error of ours.
            let _ = std::io::stdout().write_all(out.text.as_bytes());
            ExitCode::from(out.status)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
