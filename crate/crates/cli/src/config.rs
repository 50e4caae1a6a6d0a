//! Run configuration and environment overrides for resource caps.

use mcld::{Caps, Error, Result};
use serde::Serialize;
use std::collections::BTreeMap;

/// Environment variables that override the default caps, with the field each sets.
pub const CAP_ENV_VARS: [&str; 7] = [
    "MCLD_MAX_CLASS_SIZE",
    "MCLD_MAX_FAMILY_SIZE",
    "MCLD_MAX_NODES",
    "MCLD_MAX_DEPTH",
    "MCLD_MAX_ITERATIONS",
    "MCLD_MAX_GAME_LEAVES",
    "MCLD_MAX_OUTCOMES",
];

/// Everything that determines a run's output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub flags: BTreeMap<String, String>,
    pub seed: u64,
    pub caps: Caps,
    pub output: Option<String>,
}

impl RunConfig {
    pub fn new(command: &str, seed: u64, caps: Caps) -> Self {
        RunConfig { command: command.to_string(), flags: BTreeMap::new(), seed, caps, output: None }
    }

    pub fn flag(mut self, name: &str, value: impl ToString) -> Self {
        self.flags.insert(name.to_string(), value.to_string());
        self
    }
}

/// Default caps with any `MCLD_MAX_*` overrides applied from `lookup`.
pub fn caps_from(lookup: impl Fn(&str) -> Option<String>) -> Result<Caps> {
    let mut caps = Caps::default();
    for var in CAP_ENV_VARS {
        let Some(raw) = lookup(var) else { continue };
        let v: u64 = raw
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("{var} must be a positive integer, got {raw:?}")))?;
        match var {
            "MCLD_MAX_CLASS_SIZE" => caps.max_class_size = v as usize,
            "MCLD_MAX_FAMILY_SIZE" => caps.max_family_size = v as usize,
            "MCLD_MAX_NODES" => caps.max_nodes = v,
            "MCLD_MAX_DEPTH" => caps.max_depth = v as usize,
            "MCLD_MAX_ITERATIONS" => caps.max_iterations = v,
            "MCLD_MAX_GAME_LEAVES" => caps.max_game_leaves = v,
            _ => caps.max_outcomes = v as usize,
        }
    }
    caps.validate()?;
    Ok(caps)
}

pub fn caps_from_env() -> Result<Caps> {
    caps_from(|k| std::env::var(k).ok())
}
