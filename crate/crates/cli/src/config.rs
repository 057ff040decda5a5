//! Runtime configuration: core limits plus cache/report locations.
//! Every field can be overridden by an `NBHD_`-prefixed environment
//! variable, and command-line flags override both.

use std::path::PathBuf;

use nbhd_core::Limits;
use serde::Serialize;

/// Deterministic solver steps granted per configured millisecond.
pub const STEPS_PER_MS: u64 = 50_000;

#[derive(Debug, Clone, Serialize)]
pub struct Config {
    pub vertex_budget: usize,
    pub face_budget: usize,
    pub solver_budget_ms: u64,
    pub seed: u64,
    pub cache_dir: PathBuf,
    pub report_dir: PathBuf,
}

#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub vertex_budget: Option<usize>,
    pub face_budget: Option<usize>,
    pub solver_budget_ms: Option<u64>,
    pub seed: Option<u64>,
    pub cache_dir: Option<PathBuf>,
    pub report_dir: Option<PathBuf>,
}

fn env_parse<T: std::str::FromStr>(key: &str) -> Option<T> {
    std::env::var(key).ok().and_then(|v| v.parse().ok())
}

impl Config {
    pub fn load(flags: &Overrides) -> Config {
        let defaults = Limits::default();
        Config {
            vertex_budget: flags
                .vertex_budget
                .or_else(|| env_parse("NBHD_VERTEX_BUDGET"))
                .unwrap_or(defaults.vertex_budget),
            face_budget: flags
                .face_budget
                .or_else(|| env_parse("NBHD_FACE_BUDGET"))
                .unwrap_or(defaults.face_budget),
            solver_budget_ms: flags
                .solver_budget_ms
                .or_else(|| env_parse("NBHD_SOLVER_BUDGET_MS"))
                .unwrap_or(4000),
            seed: flags
                .seed
                .or_else(|| env_parse("NBHD_SEED"))
                .unwrap_or(defaults.seed),
            cache_dir: flags
                .cache_dir
                .clone()
                .or_else(|| env_parse::<PathBuf>("NBHD_CACHE_DIR"))
                .unwrap_or_else(|| PathBuf::from(".nbhd-cache")),
            report_dir: flags
                .report_dir
                .clone()
                .or_else(|| env_parse::<PathBuf>("NBHD_REPORT_DIR"))
                .unwrap_or_else(|| PathBuf::from("reports")),
        }
    }

    pub fn limits(&self) -> Limits {
        Limits {
            vertex_budget: self.vertex_budget,
            face_budget: self.face_budget,
            solver_steps: self.solver_budget_ms.saturating_mul(STEPS_PER_MS),
            seed: self.seed,
            ..Limits::default()
        }
    }

    /// Hash of the budget-relevant fields; cache keys include it so a
    /// config change is a cache miss.
    pub fn fingerprint(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut h = Sha256::new();
        h.update(nbhd_core::VERSION.as_bytes());
        h.update(self.vertex_budget.to_le_bytes());
        h.update(self.face_budget.to_le_bytes());
        h.update(self.solver_budget_ms.to_le_bytes());
        h.update(self.seed.to_le_bytes());
        hex_encode(&h.finalize())
    }
}

pub fn hex_encode(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
