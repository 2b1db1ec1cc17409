use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::partition::Partition;
use crate::error::{FcabError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PolicyId {
    #[serde(rename = "ucbf")]
    Ucbf,
    /// UCBF with the continuum-armed bin count `floor(sqrt(T) / ln T)`.
    #[serde(rename = "ucbf-cab-k")]
    UcbfCabK,
    #[serde(rename = "oracle-star")]
    OracleStar,
    #[serde(rename = "oracle-discrete")]
    OracleDiscrete,
    #[serde(rename = "random")]
    Random,
}

impl PolicyId {
    pub const ALL: [PolicyId; 5] = [
        PolicyId::Ucbf,
        PolicyId::UcbfCabK,
        PolicyId::OracleStar,
        PolicyId::OracleDiscrete,
        PolicyId::Random,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PolicyId::Ucbf => "ucbf",
            PolicyId::UcbfCabK => "ucbf-cab-k",
            PolicyId::OracleStar => "oracle-star",
            PolicyId::OracleDiscrete => "oracle-discrete",
            PolicyId::Random => "random",
        }
    }

    /// Small stable code used when deriving per-policy seeds.
    pub fn code(self) -> u64 {
        match self {
            PolicyId::Ucbf => 1,
            PolicyId::UcbfCabK => 2,
            PolicyId::OracleStar => 3,
            PolicyId::OracleDiscrete => 4,
            PolicyId::Random => 5,
        }
    }
}

impl fmt::Display for PolicyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PolicyId {
    type Err = FcabError;

    fn from_str(s: &str) -> Result<Self> {
        PolicyId::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| FcabError::param("policy", format!("unknown policy '{s}'")))
    }
}

/// Arms pulled by one policy run, in order, with the observed rewards.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyTrace {
    pub policy: PolicyId,
    pub seed: u64,
    pub pulled: Vec<usize>,
    pub rewards: Vec<f64>,
}

/// One line of a trace in JSON Lines form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PullRecord {
    /// 1-based round.
    pub t: usize,
    pub bin: usize,
    pub arm: usize,
    pub reward: f64,
}

impl PolicyTrace {
    pub fn len(&self) -> usize {
        self.pulled.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pulled.is_empty()
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn total_reward(&self) -> f64 {
        self.rewards.iter().sum()
    }

    pub fn records<'a>(
        &'a self,
        partition: &'a Partition,
    ) -> impl Iterator<Item = PullRecord> + 'a {
        self.pulled
            .iter()
            .zip(&self.rewards)
            .enumerate()
            .map(|(i, (&arm, &reward))| PullRecord {
                t: i + 1,
                bin: partition.bin_of(arm),
                arm,
                reward,
            })
    }

    pub fn write_jsonl<W: Write>(&self, partition: &Partition, mut out: W) -> Result<()> {
        for rec in self.records(partition) {
            serde_json::to_writer(&mut out, &rec)
                .map_err(|e| FcabError::Inconsistent(e.to_string()))?;
            out.write_all(b"\n")
                .map_err(|e| FcabError::Inconsistent(e.to_string()))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::grid_arms;

    #[test]
    fn ids_round_trip() {
        for p in PolicyId::ALL {
            assert_eq!(p.as_str().parse::<PolicyId>().unwrap(), p);
            assert_eq!(serde_json::to_string(&p).unwrap(), format!("\"{p}\""));
        }
        assert!("ucb".parse::<PolicyId>().is_err());
    }

    #[test]
    fn jsonl_lines() {
        let part = Partition::build(&grid_arms(10).unwrap(), 2).unwrap();
        let trace = PolicyTrace {
            policy: PolicyId::Random,
            seed: 3,
            pulled: vec![9, 0],
            rewards: vec![1.0, 0.0],
        };
        let mut buf = Vec::new();
        trace.write_jsonl(&part, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<PullRecord> = text
            .lines()
            .map(|l| serde_json::from_str(l).unwrap())
            .collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(
            lines[0],
            PullRecord {
                t: 1,
                bin: 1,
                arm: 9,
                reward: 1.0
            }
        );
        assert_eq!(lines[1].bin, 0);
    }
}
