//! Experiment runner for `afc-core`.
//!
//! A run reads a TOML config (see [`config::SCHEMA`]), executes one of six
//! experiments and writes data files, a summary and a manifest into the
//! output directory. Identical config and seed give byte-identical data
//! files; only the manifest carries a timestamp.

// Range checks are written `!(x > 0.0)` so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod experiments;
pub mod output;

pub use config::{Config, ConfigError, Experiment};
pub use experiments::{prepare, run_experiment, Artifact, CliError, Outcome, RunOutput};
pub use output::{output_dir, run, sweep, Written, MANIFEST, OUTPUT_ROOT_ENV};

/// Parse a comma-separated list of numbers, as given to `--values`.
pub fn parse_values(list: &str) -> Result<Vec<f64>, ConfigError> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>().map_err(|_| ConfigError { key: "--values".into(), reason: format!("`{s}` is not a number") })
        })
        .collect()
}

/// Read and parse a config file.
pub fn load(path: &std::path::Path) -> Result<Config, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::Config(ConfigError { key: "<file>".into(), reason: format!("cannot read {}: {e}", path.display()) })
    })?;
    Ok(Config::parse(&text)?)
}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
mod book_cli {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_lists() {
        assert_eq!(parse_values("1e-9, 2e-9,3").unwrap(), vec![1e-9, 2e-9, 3.0]);
        assert_eq!(parse_values("1,x").unwrap_err().key, "--values");
    }
}
