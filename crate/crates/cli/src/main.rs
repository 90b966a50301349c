use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use deckgroup_cli::config::tolerance;
use deckgroup_cli::{run, Format, MapSpec, Mode, RunConfig, SuiteConfig};

/// Deck groups of iterates of bicritical rational maps.
#[derive(Parser)]
#[command(name = "deckgroup", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Largest iterate k to compute.
    #[arg(long, global = true, default_value_t = 4)]
    k_max: usize,

    /// Base tolerance; comparisons use ten times this value.
    #[arg(long, global = true, env = "DECK_EPS")]
    eps: Option<f64>,

    /// Seed for sampling, both inside the engine and in `suite`.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Json,
    Table,
}

#[derive(Args)]
struct MapArgs {
    /// Coefficients a,b,c,d of (a z^d + b)/(c z^d + d); complex values as
    /// `re+imi`, `i` or `[re,im]`.
    #[arg(long)]
    normal_form: Option<String>,

    /// Degree d >= 2.
    #[arg(long)]
    degree: Option<u32>,

    /// Möbius map applied before z^d, as {"a","b","c","d"} JSON or a file.
    #[arg(long)]
    pre: Option<String>,

    /// Möbius map applied after z^d.
    #[arg(long)]
    post: Option<String>,

    /// A whole map as JSON or a file: {"pre","d","post"} or {"normal_form": …}.
    #[arg(long)]
    map: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Identify Deck(f^k) for k = 1..k_max and check the classification.
    Classify(MapArgs),
    /// Print the deck groups with their elements and generators.
    Deck(MapArgs),
    /// Recompute each level by brute force and compare with the engine.
    Verify(MapArgs),
    /// Classify and audit many seeded random maps.
    Suite {
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, value_delimiter = ',', default_value = "2,3,4,5,6,7")]
        degrees: Vec<u32>,
        /// Sample critically coalescing maps (z^d - a)/(z^d + a), conjugated.
        #[arg(long)]
        coalescing: bool,
    },
}

impl From<MapArgs> for MapSpec {
    fn from(a: MapArgs) -> Self {
        MapSpec { normal_form: a.normal_form, degree: a.degree, pre: a.pre, post: a.post, map: a.map }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let tol = match tolerance(cli.eps, cli.seed) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let (mode, map) = match cli.command {
        Command::Classify(m) => (Mode::Classify, m.into()),
        Command::Deck(m) => (Mode::Deck, m.into()),
        Command::Verify(m) => (Mode::Verify, m.into()),
        Command::Suite { count, degrees, coalescing } => {
            let seed = cli.seed.unwrap_or(tol.rng_seed);
            (Mode::Suite(SuiteConfig { count, degrees, seed, coalescing, k_max: cli.k_max }), MapSpec::default())
        }
    };
    let format = match cli.format {
        OutputFormat::Json => Format::Json,
        OutputFormat::Table => Format::Table,
    };
    let config = RunConfig { mode, map, k_max: cli.k_max, tol, format };
    match run(&config) {
        Ok(outcome) => {
            let mut stdout = std::io::stdout().lock();
            // A closed pipe is not worth a panic.
            let _ = stdout.write_all(outcome.output.as_bytes());
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
