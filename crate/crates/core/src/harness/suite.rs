//! Running the whole catalog from a TOML configuration.

use std::collections::BTreeMap;
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{run_check_id, CheckContext, CheckId, CheckReport, Verdict};
use crate::error::{Error, Result};

/// Suite configuration. Every field is optional in the TOML form:
///
/// ```toml
/// max_degree = 8192
/// grid_degree = 512
/// seed = 7
/// checks = ["non_factoring", "rational_example"]
///
/// [params.d_in_hinf]
/// samples = "20"
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub max_degree: usize,
    pub grid_degree: usize,
    pub seed: u64,
    /// Checks to run, in order; all of them when absent.
    pub checks: Option<Vec<String>>,
    pub params: BTreeMap<String, BTreeMap<String, String>>,
    /// Drop wall-clock fields so repeated runs produce identical output.
    pub no_timestamp: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        let ctx = CheckContext::default();
        Self {
            max_degree: ctx.max_degree,
            grid_degree: ctx.grid_degree,
            seed: ctx.seed,
            checks: None,
            params: BTreeMap::new(),
            no_timestamp: false,
        }
    }
}

impl SuiteConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: SuiteConfig = toml::from_str(s).map_err(|e| Error::Config(e.message().to_string()))?;
        cfg.check_ids()?;
        if let Some(k) = cfg.params.keys().find(|k| k.parse::<CheckId>().is_err()) {
            return Err(Error::Config(format!("parameters given for unknown check `{k}`")));
        }
        Ok(cfg)
    }

    pub fn context(&self) -> CheckContext {
        CheckContext {
            max_degree: self.max_degree,
            grid_degree: self.grid_degree,
            seed: self.seed,
        }
    }

    pub fn check_ids(&self) -> Result<Vec<CheckId>> {
        match &self.checks {
            None => Ok(CheckId::ALL.to_vec()),
            Some(names) => names.iter().map(|n| n.parse()).collect(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub total: usize,
    pub passed: usize,
    /// Includes checks that stopped with an error.
    pub failed: usize,
    pub inconclusive: usize,
    pub errors: usize,
}

impl SuiteSummary {
    /// Every check ran and passed at full resolution.
    pub fn success(&self) -> bool {
        self.failed == 0 && self.inconclusive == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteError {
    pub check_id: String,
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated_at: Option<u64>,
    pub checks: Vec<CheckReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<SuiteError>,
    pub summary: SuiteSummary,
}

/// Runs the configured checks in parallel; reports keep configuration order.
pub fn full_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    let ids = config.check_ids()?;
    let ctx = config.context();
    let empty = BTreeMap::new();
    let results: Vec<(CheckId, Result<CheckReport>)> = ids
        .par_iter()
        .map(|&id| (id, run_check_id(id, config.params.get(id.name()).unwrap_or(&empty), &ctx)))
        .collect();
    let mut summary = SuiteSummary { total: ids.len(), ..Default::default() };
    let mut checks = Vec::new();
    let mut errors = Vec::new();
    for (id, r) in results {
        match r {
            Ok(mut rep) => {
                match rep.verdict {
                    Verdict::Pass => summary.passed += 1,
                    Verdict::Fail => summary.failed += 1,
                    Verdict::Inconclusive => summary.inconclusive += 1,
                }
                if config.no_timestamp {
                    rep.runtime_ms = None;
                }
                checks.push(rep);
            }
            Err(e) => {
                summary.failed += 1;
                summary.errors += 1;
                errors.push(SuiteError { check_id: id.name().to_string(), error: e.to_string() });
            }
        }
    }
    let generated_at = (!config.no_timestamp)
        .then(|| SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()));
    Ok(SuiteReport { generated_at, checks, errors, summary })
}
