//! Assignment of data vertices `U` to `k` partitions.
//!
//! The production path grows the partitions one vertex at a time, always
//! feeding the partition picked by the balance rule with its cheapest
//! remaining vertex (see [`partition_block`]), over a stream of subgraph
//! blocks ([`run_sequential`]). The [`reference`] module holds the exact,
//! exponential-time variant used to check the approximation bound on tiny
//! instances.

mod greedy;
pub mod reference;
mod sets;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use greedy::{
    global_initialization, partition_block, partition_block_traced, run_sequential, vertex_cost, Step,
};
pub(crate) use greedy::{pick_partition, UNASSIGNED};
pub use reference::{reference_round, run_reference, ReferenceOutcome, Round};
pub use sets::{NeighborSets, ScopedSets, UPartition};

/// How the next partition to grow is chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BalanceRule {
    /// Smallest neighbor set `|S_j|`.
    #[default]
    NeighborSetSize,
    /// Fewest assigned vertices `|U_j|`.
    PartitionSize,
}

impl fmt::Display for BalanceRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BalanceRule::NeighborSetSize => "neighbor-set-size",
            BalanceRule::PartitionSize => "partition-size",
        })
    }
}

impl FromStr for BalanceRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "neighbor-set-size" => Ok(BalanceRule::NeighborSetSize),
            "partition-size" => Ok(BalanceRule::PartitionSize),
            other => Err(Error::invalid(format!("unknown balance rule `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GreedyConfig {
    pub k: usize,
    /// Number of initialization passes.
    pub a: usize,
    /// Number of subgraph blocks.
    pub b: usize,
    pub seed: u64,
    pub balance_rule: BalanceRule,
}

impl Default for GreedyConfig {
    fn default() -> Self {
        Self {
            k: 16,
            a: 16,
            b: 16,
            seed: 0,
            balance_rule: BalanceRule::default(),
        }
    }
}

impl GreedyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::invalid("k must be >= 1"));
        }
        if self.b == 0 {
            return Err(Error::invalid("b must be >= 1"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balance_rule_names() {
        for rule in [BalanceRule::NeighborSetSize, BalanceRule::PartitionSize] {
            assert_eq!(rule.to_string().parse::<BalanceRule>().unwrap(), rule);
        }
        assert!("smallest".parse::<BalanceRule>().is_err());
        assert_eq!(
            serde_json::to_string(&BalanceRule::PartitionSize).unwrap(),
            "\"partition-size\""
        );
    }

    #[test]
    fn config_validation() {
        assert!(GreedyConfig::default().validate().is_ok());
        assert!(GreedyConfig {
            k: 0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(GreedyConfig {
            b: 0,
            ..Default::default()
        }
        .validate()
        .is_err());
    }
}
