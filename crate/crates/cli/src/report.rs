//! Deterministic experiment reports: schema-stable rows plus a config echo
//! and content hash. Wall-clock timing is recorded outside the deterministic
//! payload.

use crate::config::{ExperimentConfig, Kind};
use crate::{HResult, HarnessError};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

/// The deterministic payload: identical configs produce identical `data`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ReportData {
    pub kind: String,
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub summary: BTreeMap<String, String>,
    pub warnings: Vec<String>,
}

/// Full report: payload plus timing metadata.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub data: ReportData,
    pub wall_ms: u128,
    pub rows_per_second: Option<f64>,
}

impl ExperimentReport {
    pub fn new(
        kind: Kind,
        config: &ExperimentConfig,
        columns: Vec<String>,
        rows: Vec<Vec<String>>,
        summary: BTreeMap<String, String>,
        warnings: Vec<String>,
        wall_ms: u128,
    ) -> Self {
        let config_hash = hash_config(config);
        let rows_per_second = if wall_ms > 0 {
            Some(rows.len() as f64 / (wall_ms as f64 / 1000.0))
        } else {
            None
        };
        ExperimentReport {
            data: ReportData {
                kind: kind.name().to_string(),
                schema_version: SCHEMA_VERSION,
                config: config.clone(),
                config_hash,
                columns,
                rows,
                summary,
                warnings,
            },
            wall_ms,
            rows_per_second,
        }
    }

    /// Canonical JSON bytes of the deterministic payload.
    pub fn data_bytes(&self) -> Vec<u8> {
        serde_json::to_vec_pretty(&self.data).expect("report serializes")
    }

    pub fn write_json(&self, path: &Path) -> HResult<()> {
        let mut f = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(&mut f, self)
            .map_err(|e| HarnessError::Internal(e.to_string()))?;
        f.write_all(b"\n")?;
        Ok(())
    }

    pub fn write_csv(&self, path: &Path) -> HResult<()> {
        let mut f = std::fs::File::create(path)?;
        write!(f, "{}", self.csv_string())?;
        Ok(())
    }

    /// CSV with a versioned schema comment line; data rows only (summary and
    /// warnings live in the JSON form).
    pub fn csv_string(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "#schema {}.v{} hash={}\n",
            self.data.kind, self.data.schema_version, self.data.config_hash
        ));
        out.push_str(&self.data.columns.join(","));
        out.push('\n');
        for row in &self.data.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn read_json(path: &Path) -> HResult<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| HarnessError::Config(format!("{path:?}: {e}")))
    }
}

/// SHA-256 of the canonical JSON of the config.
pub fn hash_config(config: &ExperimentConfig) -> String {
    let canon = serde_json::to_vec(config).expect("config serializes");
    let mut h = Sha256::new();
    h.update(&canon);
    let out = h.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}

/// Deterministic float formatting for report rows.
pub fn fmt_f64(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v:.12e}")
    }
}

/// Exact rational as `num/den` (or plain integer when the denominator is 1).
pub fn fmt_rat(r: &num_rational::BigRational) -> String {
    use num_traits::One;
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = ExperimentConfig { m: Some(1), ..Default::default() };
        let b = ExperimentConfig { m: Some(1), ..Default::default() };
        let c = ExperimentConfig { m: Some(2), ..Default::default() };
        assert_eq!(hash_config(&a), hash_config(&b));
        assert_ne!(hash_config(&a), hash_config(&c));
    }

    #[test]
    fn json_round_trip() {
        let rep = ExperimentReport::new(
            Kind::Enumerate,
            &ExperimentConfig { m: Some(1), ..Default::default() },
            vec!["a".into(), "b".into()],
            vec![vec!["1".into(), "2".into()]],
            BTreeMap::new(),
            vec![],
            5,
        );
        let dir = std::env::temp_dir().join("quadrics-report-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("r.json");
        rep.write_json(&path).unwrap();
        let back = ExperimentReport::read_json(&path).unwrap();
        assert_eq!(rep.data, back.data);
    }

    #[test]
    fn empty_report_has_header_only_csv() {
        let rep = ExperimentReport::new(
            Kind::Halfdim,
            &ExperimentConfig::default(),
            vec!["x".into()],
            vec![],
            BTreeMap::new(),
            vec![],
            0,
        );
        let csv = rep.csv_string();
        assert_eq!(csv.lines().count(), 2); // schema comment + header
    }
}
