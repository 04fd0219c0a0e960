//! Settings: command-line flags over a flat TOML file over built-in defaults.

use std::path::Path;
use std::time::Duration;

use anyhow::Context;
use matching_ekr::cycle::DEFAULT_ORDER_CAP;
use matching_ekr::extremal::{SolverOptions, VerdictOptions, DEFAULT_GRAPH_CAP};
use serde::Deserialize;

use crate::cli::{Format, GlobalArgs};

/// Keys accepted in the config file; all optional.
#[derive(Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub format: Option<Format>,
    pub threads: Option<usize>,
    pub row_threads: Option<usize>,
    pub node_limit: Option<u64>,
    pub time_limit: Option<f64>,
    pub order_cap: Option<u64>,
    pub graph_cap: Option<usize>,
    pub max_families: Option<usize>,
    pub witnesses: Option<usize>,
    pub seed: Option<u64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> anyhow::Result<FileConfig> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub format: Format,
    pub threads: usize,
    pub row_threads: usize,
    pub node_limit: Option<u64>,
    pub time_limit: Option<f64>,
    pub order_cap: u128,
    pub graph_cap: usize,
    pub max_families: Option<usize>,
    pub witnesses: usize,
    pub seed: u64,
}

pub const DEFAULT_SEED: u64 = 1;

impl Settings {
    pub fn resolve(args: &GlobalArgs, file: &FileConfig) -> Settings {
        Settings {
            format: args.format.or(file.format).unwrap_or(Format::Text),
            threads: args.threads.or(file.threads).unwrap_or(1),
            row_threads: args.row_threads.or(file.row_threads).unwrap_or(1),
            node_limit: args.node_limit.or(file.node_limit),
            time_limit: args.time_limit.or(file.time_limit),
            order_cap: args.order_cap.or(file.order_cap).map_or(DEFAULT_ORDER_CAP, u128::from),
            graph_cap: args.graph_cap.or(file.graph_cap).unwrap_or(DEFAULT_GRAPH_CAP),
            max_families: args.max_families.or(file.max_families),
            witnesses: args.witnesses.or(file.witnesses).unwrap_or(4),
            seed: args.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
        }
    }

    pub fn load(args: &GlobalArgs) -> anyhow::Result<Settings> {
        let file = match &args.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        Ok(Settings::resolve(args, &file))
    }

    pub fn solver(&self) -> SolverOptions {
        SolverOptions {
            threads: self.threads,
            node_limit: self.node_limit,
            time_limit: self.time_limit.map(Duration::from_secs_f64),
        }
    }

    pub fn verdict(&self) -> VerdictOptions {
        VerdictOptions {
            cap: self.max_families,
            witness_limit: self.witnesses,
            solver: self.solver(),
            graph_cap: self.graph_cap,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let file: FileConfig = toml::from_str("threads = 4\nseed = 9\nformat = \"json\"\n").unwrap();
        let args = GlobalArgs {
            threads: Some(2),
            ..GlobalArgs::default()
        };
        let s = Settings::resolve(&args, &file);
        assert_eq!(s.threads, 2);
        assert_eq!(s.seed, 9);
        assert_eq!(s.format, Format::Json);
        assert_eq!(s.order_cap, DEFAULT_ORDER_CAP);

        let s = Settings::resolve(&GlobalArgs::default(), &FileConfig::default());
        assert_eq!((s.threads, s.seed, s.format), (1, DEFAULT_SEED, Format::Text));
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(toml::from_str::<FileConfig>("thread = 4").is_err());
    }
}
