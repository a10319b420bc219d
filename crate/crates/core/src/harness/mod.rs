//! Configured verification suites and their JSON reports.
//!
//! Reports carry no timing, so two runs with the same configuration and seed
//! serialise to identical bytes. Wall-clock time is available from
//! [`SuiteReport::timing`] but is never written.

mod distribution;
mod example;
mod space;
mod suite;

use std::collections::BTreeMap;
use std::time::Duration;

use rand::SeedableRng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::relativisation::SampleRng;

pub use distribution::{distribution_command, DistributionReport, StateSpec};
pub use example::{example_sn, permuted_tensor, ExampleConfig};
pub use space::{builtin, load_group_file, resolve, Space, BUILTIN_NAMES};
pub use suite::{run_suite, CheckId, SuiteConfig};

pub const SCHEMA: &str = "qrf-report/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub suite: String,
    /// SHA-256 of the canonical JSON of `parameters`, seed, tolerance and
    /// sample count.
    pub spec_hash: String,
    pub seed: u64,
    pub tolerance: f64,
    pub samples: usize,
    pub parameters: serde_json::Value,
    pub versions: BTreeMap<String, String>,
}

impl Metadata {
    fn new(suite: &str, seed: u64, tolerance: f64, samples: usize, parameters: serde_json::Value) -> Self {
        let run = serde_json::json!({
            "parameters": parameters,
            "seed": seed,
            "tolerance": tolerance,
            "samples": samples,
        });
        let canonical = serde_json::to_string(&run).expect("value serialises");
        let spec_hash = hex::encode(Sha256::digest(canonical.as_bytes()));
        let versions = BTreeMap::from([("qrf-core".to_string(), env!("CARGO_PKG_VERSION").to_string())]);
        Metadata {
            suite: suite.to_string(),
            spec_hash,
            seed,
            tolerance,
            samples,
            parameters,
            versions,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub id: String,
    /// The identity being checked, as a formula.
    pub anchor: String,
    pub samples: usize,
    pub max_deviation: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub detail: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema: String,
    pub metadata: Metadata,
    pub verdicts: Vec<Verdict>,
    pub pass: bool,
    #[serde(skip)]
    pub timing: Vec<(String, Duration)>,
}

impl SuiteReport {
    fn new(metadata: Metadata, timed: Vec<(Verdict, Duration)>) -> Self {
        let pass = timed.iter().all(|(v, _)| v.pass);
        let timing = timed.iter().map(|(v, d)| (v.id.clone(), *d)).collect();
        SuiteReport {
            schema: SCHEMA.to_string(),
            metadata,
            verdicts: timed.into_iter().map(|(v, _)| v).collect(),
            pass,
            timing,
        }
    }

    pub fn verdict(&self, id: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.id == id)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }
}

/// Each check draws from its own ChaCha8 stream of the configured seed, so
/// its numbers do not depend on which other checks run.
fn stream(seed: u64, id: u64) -> SampleRng {
    let mut rng = SampleRng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}
