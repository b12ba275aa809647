//! Recorded constants for the `constant_tracked` scenarios.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{find, Params};
use crate::error::{Error, Result};

/// A tracked constant may grow to this multiple of its baseline.
pub const SLACK: f64 = 2.0;

const SCHEMA: &str = "fflab-baselines/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaselineEntry {
    pub constant: f64,
    pub oracle: String,
    pub params: Params,
    pub seed: u64,
    pub oracle_hash: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaselineStore {
    pub schema: String,
    pub slack: f64,
    pub entries: BTreeMap<String, BaselineEntry>,
}

impl Default for BaselineStore {
    fn default() -> Self {
        BaselineStore {
            schema: SCHEMA.into(),
            slack: SLACK,
            entries: BTreeMap::new(),
        }
    }
}

impl BaselineStore {
    /// The store compiled into the library.
    pub fn embedded() -> Result<BaselineStore> {
        Ok(serde_json::from_str(include_str!("../../baselines.json"))?)
    }

    pub fn load(path: &Path) -> Result<BaselineStore> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn get(&self, id: &str) -> Option<&BaselineEntry> {
        self.entries.get(id)
    }

    pub fn insert(&mut self, id: &str, entry: BaselineEntry) {
        self.entries.insert(id.to_string(), entry);
    }

    /// Every entry's hash must match the oracle currently registered under
    /// its id, so a changed oracle cannot be judged against stale numbers.
    pub fn verify(&self) -> Result<()> {
        for (id, entry) in &self.entries {
            let scenario = find(id)?;
            let current = scenario.oracle.map(|o| o.hash(scenario.id)).unwrap_or_default();
            if current != entry.oracle_hash {
                return Err(Error::OracleHashMismatch {
                    id: id.clone(),
                    stored: entry.oracle_hash.clone(),
                    current,
                });
            }
        }
        Ok(())
    }
}
