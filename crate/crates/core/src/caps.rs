//! Resource caps shared by the exhaustive procedures.
//!
//! Exceeding a cap is always reported as [`Error::CapExceeded`]; no search is
//! ever silently truncated.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    /// Maximum number of rows in any class handled by the recursions.
    pub max_class_size: usize,
    /// Maximum number of collapsing maps in a family (bounds 3^(k+1) for the full family).
    pub max_family_size: usize,
    /// Maximum number of recursion nodes visited by one top-level call.
    pub max_nodes: u64,
    /// Maximum tree depth for explicit tree searches and covers.
    pub max_depth: usize,
    /// Iteration cap for the multiplicative-weights game solver.
    pub max_iterations: u64,
    /// Maximum number of leaves explored by an adversary search.
    pub max_game_leaves: u64,
    /// Maximum number of outcomes an enumerated product distribution may have.
    pub max_outcomes: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_class_size: 4096,
            max_family_size: 1 << 14,
            max_nodes: 50_000_000,
            max_depth: 12,
            max_iterations: 1_000_000,
            max_game_leaves: 50_000_000,
            max_outcomes: 1 << 20,
        }
    }
}

impl Caps {
    pub fn check_class_size(&self, n: usize) -> Result<()> {
        if n > self.max_class_size {
            return Err(Error::cap("class size", n as u128, self.max_class_size as u128));
        }
        Ok(())
    }

    pub fn check_depth(&self, depth: usize) -> Result<()> {
        if depth > self.max_depth {
            return Err(Error::cap("tree depth", depth as u128, self.max_depth as u128));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let all_positive = self.max_class_size > 0
            && self.max_family_size > 0
            && self.max_nodes > 0
            && self.max_depth > 0
            && self.max_iterations > 0
            && self.max_game_leaves > 0
            && self.max_outcomes > 0;
        if all_positive {
            Ok(())
        } else {
            Err(Error::InvalidParameter("resource caps must be positive".into()))
        }
    }
}
