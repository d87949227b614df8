//! Optional TOML configuration for tolerances and seeds. Command-line flags
//! take precedence over every key.

use std::path::Path;

use serde::Deserialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Seed for `elin` restarts and random phase tuples.
    pub seed: u64,
    /// Multistart count for `elin`.
    pub restarts: usize,
    /// Largest `|d·Σx − 1|` that inline `--x` input is silently rescaled by.
    pub renorm_tol: f64,
    /// Surface grid subdivisions for Schmidt upper bounds; `None` picks a
    /// default by `d`.
    pub subdivisions: Option<usize>,
    /// Worker threads for grid scans; `AXISYM_THREADS` caps this.
    pub threads: Option<usize>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            seed: 42,
            restarts: 32,
            renorm_tol: 1e-4,
            subdivisions: None,
            threads: None,
        }
    }
}

impl Config {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let cfg: Config = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> CliResult<()> {
        if !(self.renorm_tol >= 0.0 && self.renorm_tol.is_finite()) {
            return Err(CliError::Config(format!("renorm_tol must be finite and >= 0, got {}", self.renorm_tol)));
        }
        if self.restarts == 0 {
            return Err(CliError::Config("restarts must be at least 1".into()));
        }
        if self.subdivisions == Some(0) {
            return Err(CliError::Config("subdivisions must be at least 1".into()));
        }
        if self.threads == Some(0) {
            return Err(CliError::Config("threads must be at least 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(Config::parse("").unwrap(), Config::default());
    }

    #[test]
    fn keys_override_defaults() {
        let cfg = Config::parse("seed = 7\nrestarts = 4\nsubdivisions = 16\n").unwrap();
        assert_eq!((cfg.seed, cfg.restarts, cfg.subdivisions), (7, 4, Some(16)));
        assert_eq!(cfg.renorm_tol, 1e-4);
    }

    #[test]
    fn rejects_unknown_and_bad_values() {
        assert!(Config::parse("sede = 1").is_err());
        assert!(Config::parse("restarts = 0").is_err());
        assert!(Config::parse("renorm_tol = -1.0").is_err());
        assert!(Config::parse("seed = \"x\"").is_err());
    }
}
