//! Append-only JSONL results ledger.

use std::collections::BTreeMap;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use wallseries::eigen::EigenLevel;
use wallseries::oracles::OracleReport;

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LedgerRecord {
    pub timestamp: String,
    pub command: String,
    pub config_hash: String,
    pub tool_version: String,
    pub levels: Vec<EigenLevel>,
    pub oracle_reports: Vec<OracleReport>,
}

/// SHA-256 of the command name and the `key=value` lines of the settings
/// that affect results.
pub fn config_hash(command: &str, canonical: &BTreeMap<String, String>) -> String {
    let mut h = Sha256::new();
    h.update(command.as_bytes());
    h.update(b"\n");
    for (k, v) in canonical {
        h.update(format!("{k}={v}\n").as_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

impl LedgerRecord {
    pub fn new(
        command: &str,
        canonical: &BTreeMap<String, String>,
        levels: Vec<EigenLevel>,
        oracle_reports: Vec<OracleReport>,
    ) -> Self {
        Self {
            timestamp: chrono::Utc::now().to_rfc3339(),
            command: command.to_string(),
            config_hash: config_hash(command, canonical),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            levels,
            oracle_reports,
        }
    }

    pub fn append(&self, path: &Path) -> Result<(), CliError> {
        let mut line = serde_json::to_string(self).map_err(CliError::io)?;
        line.push('\n');
        let mut f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(CliError::io)?;
        f.write_all(line.as_bytes()).map_err(CliError::io)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_depends_on_command_and_values() {
        let mut m = BTreeMap::new();
        m.insert("L".to_string(), "8".to_string());
        let a = config_hash("solve", &m);
        assert_eq!(a.len(), 64);
        assert_eq!(a, config_hash("solve", &m));
        assert_ne!(a, config_hash("scan", &m));
        m.insert("I".to_string(), "250".to_string());
        assert_ne!(a, config_hash("solve", &m));
    }

    #[test]
    fn appends_one_line_per_record() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ledger.jsonl");
        let rec = LedgerRecord::new("solve", &BTreeMap::new(), Vec::new(), Vec::new());
        rec.append(&path).unwrap();
        rec.append(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 2);
        let back: LedgerRecord = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        assert_eq!(back.config_hash, rec.config_hash);
    }
}
