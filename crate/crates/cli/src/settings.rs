//! Flag and config-file composition. Flags win over `--config` entries,
//! which win over built-in defaults.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};

pub struct Settings {
    flags: BTreeMap<&'static str, String>,
    config: BTreeMap<String, String>,
}

impl Settings {
    pub fn new(flags: BTreeMap<&'static str, String>, config: BTreeMap<String, String>) -> Self {
        Settings { flags, config }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.flags
            .get(key)
            .or_else(|| self.config.get(key))
            .map(String::as_str)
    }

    pub fn parse<T>(&self, key: &str, default: T) -> Result<T>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|e| anyhow!("invalid value `{v}` for --{}: {e}", flag_name(key))),
        }
    }

    pub fn opt<T>(&self, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .map(|v| {
                v.parse()
                    .map_err(|e| anyhow!("invalid value `{v}` for --{}: {e}", flag_name(key)))
            })
            .transpose()
    }

    /// Comma-separated list; empty when unset.
    pub fn list(&self, key: &str) -> Result<Vec<usize>> {
        match self.get(key) {
            None => Ok(Vec::new()),
            Some(v) => v
                .split(',')
                .map(|x| {
                    x.trim()
                        .parse()
                        .with_context(|| format!("invalid list entry `{x}` for --{}", flag_name(key)))
                })
                .collect(),
        }
    }

    /// A single value from a list-capable knob.
    pub fn single(&self, key: &str, default: usize) -> Result<usize> {
        match self.list(key)?.as_slice() {
            [] => Ok(default),
            [v] => Ok(*v),
            _ => bail!("--{} takes a single value for this command", flag_name(key)),
        }
    }

    pub fn path(&self, key: &str) -> Option<PathBuf> {
        self.get(key).map(PathBuf::from)
    }

    pub fn require_path(&self, key: &str) -> Result<PathBuf> {
        self.path(key)
            .ok_or_else(|| anyhow!("missing required flag --{}", flag_name(key)))
    }
}

fn flag_name(key: &str) -> String {
    key.replace('_', "-")
}
