use std::fmt;
use std::path::Path;

use serde::Deserialize;

use crate::render::Format;

pub const DEFAULT_SIEVE_LIMIT: u64 = 1_000_000;
pub const DEFAULT_GAP_LIMIT: u64 = 11_000_000;
pub const SIEVE_LIMIT_ENV: &str = "GHL_SIEVE_LIMIT";

/// Failure modes with their exit codes.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Internal(msg) => f.write_str(msg),
        }
    }
}

impl From<ghl_core::Error> for CliError {
    fn from(e: ghl_core::Error) -> Self {
        if e.is_internal() {
            CliError::Internal(e.to_string())
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Keys accepted in a `--config` file. Command-line flags take precedence.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub format: Option<Format>,
    pub threads: Option<usize>,
    pub timing: Option<bool>,
    pub sieve_limit: Option<u64>,
    pub gap_limit: Option<u64>,
    pub strict: Option<bool>,
    pub primes: Option<Vec<u64>>,
}

impl FileConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
    }
}

/// Resolved global settings: flag, then config file, then environment, then default.
#[derive(Debug, Clone)]
pub struct CliConfig {
    pub format: Option<Format>,
    pub threads: Option<usize>,
    pub timing: bool,
    pub sieve_limit: u64,
    pub gap_limit: u64,
    pub strict: bool,
    pub primes: Option<Vec<u64>>,
}

pub struct FlagValues {
    pub format: Option<Format>,
    pub threads: Option<usize>,
    pub timing: bool,
    pub sieve_limit: Option<u64>,
    pub strict: bool,
    pub primes: Option<Vec<u64>>,
}

impl CliConfig {
    pub fn resolve(flags: FlagValues, file: FileConfig, env_limit: Option<String>) -> CliResult<Self> {
        let env_limit = match env_limit {
            Some(raw) => Some(
                raw.trim()
                    .parse::<u64>()
                    .map_err(|_| usage(format!("{SIEVE_LIMIT_ENV}={raw:?} is not a positive integer")))?,
            ),
            None => None,
        };
        let sieve_limit = flags.sieve_limit.or(file.sieve_limit).or(env_limit);
        let config = CliConfig {
            format: flags.format.or(file.format),
            threads: flags.threads.or(file.threads),
            timing: flags.timing || file.timing.unwrap_or(false),
            sieve_limit: sieve_limit.unwrap_or(DEFAULT_SIEVE_LIMIT),
            gap_limit: flags.sieve_limit.or(file.gap_limit).or(env_limit).unwrap_or(DEFAULT_GAP_LIMIT),
            strict: flags.strict || file.strict.unwrap_or(false),
            primes: flags.primes.or(file.primes),
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> CliResult<()> {
        if self.threads == Some(0) {
            return Err(usage("--threads must be at least 1"));
        }
        if self.sieve_limit == 0 || self.gap_limit == 0 {
            return Err(usage("sieve limits must be positive"));
        }
        Ok(())
    }

    pub fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }
}
