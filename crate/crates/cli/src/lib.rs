//! Command-line front end for the deck group engine: map parsing, the four
//! run modes and their output.

pub mod config;
pub mod error;
pub mod oracle;
pub mod output;
pub mod suite;

use deckgroup_core::{classify_map, deck_chain, Tolerance};

pub use config::{parse_complex, MapSpec};
pub use error::{CliError, Result, EXIT_INPUT, EXIT_VIOLATION};
pub use oracle::{oracle_group, run_verify, VerifyReport};
pub use output::Format;
pub use suite::{run_random_suite, SuiteConfig, SuiteReport};

#[derive(Debug, Clone, PartialEq)]
pub enum Mode {
    Classify,
    Deck,
    Verify,
    Suite(SuiteConfig),
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub mode: Mode,
    /// Unused by the suite, which samples its own maps.
    pub map: MapSpec,
    pub k_max: usize,
    pub tol: Tolerance,
    pub format: Format,
}

/// What a run prints and how the process should exit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub output: String,
    pub exit_code: i32,
}

fn render<T: serde::Serialize>(format: Format, value: &T, table: impl FnOnce(&T) -> String) -> String {
    match format {
        Format::Json => output::json(value),
        Format::Table => table(value),
    }
}

pub fn run(config: &RunConfig) -> Result<Outcome> {
    if config.k_max == 0 {
        return Err(CliError::input("--k-max", "must be at least 1"));
    }
    let tol = &config.tol;
    let status = |ok: bool| if ok { 0 } else { EXIT_VIOLATION };
    let outcome = match &config.mode {
        Mode::Classify => {
            let report = classify_map(&config.map.build()?, config.k_max, tol)?;
            Outcome {
                exit_code: status(report.verdict.is_consistent()),
                output: render(config.format, &report, output::classification_table),
            }
        }
        Mode::Deck => {
            let chain = deck_chain(&config.map.build()?, config.k_max, tol)?;
            Outcome { exit_code: 0, output: render(config.format, &chain, output::chain_table) }
        }
        Mode::Verify => {
            let report = run_verify(&config.map.build()?, config.k_max, tol)?;
            Outcome { exit_code: status(report.matched), output: render(config.format, &report, output::verify_table) }
        }
        Mode::Suite(suite) => {
            let report = run_random_suite(suite, tol)?;
            Outcome { exit_code: status(report.all_passed()), output: render(config.format, &report, output::suite_table) }
        }
    };
    Ok(outcome)
}
