//! `ghl`: command-line front end for the certification and sieve pipelines.

mod commands;
mod config;
mod render;
mod sieve_cmd;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use commands::{BuildArgs, CertifyArgs, ExcludeArgs, Outcome, PolygonArgs};
use config::{CliConfig, CliError, CliResult, FileConfig, FlagValues, SIEVE_LIMIT_ENV};
use render::Format;
use sieve_cmd::SieveQuery;

#[derive(Debug, Parser)]
#[command(name = "ghl", version, about = "Newton-polygon irreducibility certificates and sieve checks")]
struct Cli {
    /// Output format; json unless the command has a native format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads for sieves and batches.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Report elapsed_ms (in the JSON body, or on stderr for other formats).
    #[arg(long, global = true)]
    timing: bool,
    /// Default limit for sieve queries; overrides the config file and the environment.
    #[arg(long, global = true)]
    sieve_limit: Option<u64>,
    /// Turn seed hypothesis violations into errors.
    #[arg(long, global = true)]
    strict: bool,
    /// Primes for the Newton-polygon stages, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    primes: Option<Vec<u64>>,
    /// TOML file with the keys format, threads, timing, sieve_limit, gap_limit, strict, primes.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the result here instead of stdout.
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the coefficients of G(x^delta), lowest power first.
    Build(BuildArgs),
    /// Newton polygon of a coefficient file.
    Polygon(PolygonArgs),
    /// Certificate for one n or a batch.
    Certify(CertifyArgs),
    /// Degree exclusions from the generic criteria only.
    Exclude(ExcludeArgs),
    /// Range verifications.
    #[command(subcommand)]
    Sieve(SieveQuery),
}

fn run(cli: Cli) -> CliResult<u8> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let flags = FlagValues {
        format: cli.format,
        threads: cli.threads,
        timing: cli.timing,
        sieve_limit: cli.sieve_limit,
        strict: cli.strict,
        primes: cli.primes,
    };
    let config = CliConfig::resolve(flags, file, std::env::var(SIEVE_LIMIT_ENV).ok())?;
    if let Some(threads) = config.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Internal(e.to_string()))?;
    }

    let start = Instant::now();
    let (Outcome { output, status }, default_format) = match &cli.command {
        Command::Build(args) => (plain(commands::build(args)?), Format::Text),
        Command::Polygon(args) => (plain(commands::polygon(args)?), Format::Tsv),
        Command::Certify(args) => (commands::certify(args, &config)?, Format::Json),
        Command::Exclude(args) => (plain(commands::exclude(args, &config)?), Format::Json),
        Command::Sieve(query) => (plain(sieve_cmd::run(query, &config)?), Format::Json),
    };
    let elapsed = config.timing.then(|| start.elapsed().as_millis() as u64);
    let rendered = output.render(config.format_or(default_format), elapsed);
    render::write_out(&rendered, cli.out.as_deref())?;
    Ok(status)
}

fn plain(output: render::Output) -> Outcome {
    Outcome { output, status: 0 }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(status) => ExitCode::from(status),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
