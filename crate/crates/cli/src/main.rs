mod commands;
mod fixtures;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use algebroid_core::io::{parse_document, to_json, Document};
use clap::{Parser, Subcommand};
use serde_json::json;

use report::{digest, CliError, Outcome, RunReport};

/// Exact computations with Lie-Rinehart extensions.
///
/// Every command prints a JSON report on stdout. Exit status is 0 on success,
/// 1 when a mathematical check fails and 2 for unusable input.
#[derive(Parser)]
#[command(name = "algebroid", version)]
struct Cli {
    /// Seed for randomized fixtures.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check every structural identity of an algebra, coupling or extension.
    Validate { file: PathBuf },
    /// Cohomology dimensions and representative classes.
    Cohomology { file: PathBuf },
    /// Obstruction class of a coupling or of couplings over a nerve.
    Obstruction { file: PathBuf },
    /// Existence and classification of extensions.
    Classify {
        file: PathBuf,
        /// Second extension to compare with.
        #[arg(long)]
        against: Option<PathBuf>,
    },
    /// Pages of the spectral sequence of an extension.
    Spectral {
        file: PathBuf,
        /// Last page to print.
        #[arg(long, default_value_t = 3)]
        pages: usize,
    },
    /// The Atiyah algebroid of O(n) on the projective line.
    #[command(name = "atiyah-p1")]
    AtiyahP1 {
        #[arg(long, allow_hyphen_values = true)]
        degree: i64,
        #[arg(long)]
        truncation: usize,
    },
    /// Print a built-in input document (`fixture list` names them).
    Fixture { name: String },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Cohomology { .. } => "cohomology",
            Command::Obstruction { .. } => "obstruction",
            Command::Classify { .. } => "classify",
            Command::Spectral { .. } => "spectral",
            Command::AtiyahP1 { .. } => "atiyah-p1",
            Command::Fixture { .. } => "fixture",
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn parse(bytes: &[u8]) -> Result<Document, CliError> {
    let text = std::str::from_utf8(bytes).map_err(|_| CliError::input("input is not UTF-8"))?;
    Ok(parse_document(text)?)
}

fn fixture(name: &str, seed: u64) -> ExitCode {
    if name == "list" {
        println!("{}", fixtures::NAMES.join("\n"));
        return ExitCode::SUCCESS;
    }
    match fixtures::named(name, seed) {
        Some(doc) => {
            println!("{}", to_json(&doc));
            ExitCode::SUCCESS
        }
        None => {
            eprintln!("unknown fixture {name:?}; known: {}", fixtures::NAMES.join(", "));
            ExitCode::from(2)
        }
    }
}

fn run(command: &Command, input_digest: &mut Option<String>) -> Result<Outcome, CliError> {
    let mut load = |path: &Path| -> Result<Document, CliError> {
        let bytes = read(path)?;
        let d = digest(&bytes);
        *input_digest = Some(match input_digest.take() {
            Some(prev) => format!("{prev}+{d}"),
            None => d,
        });
        parse(&bytes)
    };
    match command {
        Command::Validate { file } => commands::validate(&load(file)?),
        Command::Cohomology { file } => commands::cohomology_cmd(&load(file)?),
        Command::Obstruction { file } => commands::obstruction(&load(file)?),
        Command::Classify { file, against } => {
            let doc = load(file)?;
            let other = against.as_deref().map(&mut load).transpose()?;
            commands::classify(&doc, other.as_ref())
        }
        Command::Spectral { file, pages } => commands::spectral(&load(file)?, *pages),
        Command::AtiyahP1 { degree, truncation } => {
            *input_digest = Some(digest(format!("atiyah-p1 degree={degree} truncation={truncation}").as_bytes()));
            commands::atiyah_p1(*degree, *truncation)
        }
        Command::Fixture { .. } => unreachable!("handled before dispatch"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Command::Fixture { name } = &cli.command {
        return fixture(name, cli.seed);
    }
    let mut input_digest = None;
    let (status, results, code) = match run(&cli.command, &mut input_digest) {
        Ok(Outcome { results, ok: true }) => ("ok", results, 0),
        Ok(Outcome { results, ok: false }) => ("failed", results, 1),
        Err(CliError::Math(e)) => ("failed", json!({ "error": e }), 1),
        Err(CliError::Input(e)) => ("input_error", json!({ "error": e }), 2),
    };
    let report = RunReport { command: cli.command.name().to_string(), input_digest, status, results };
    println!("{}", report.render());
    ExitCode::from(code)
}
