//! Newline-delimited structured output.
//!
//! Every command prints one record per logical result. Records are single
//! JSON lines with object keys in sorted order, so a parsed record
//! re-serializes to the identical bytes. Passing `--no-timestamp` drops the
//! only nondeterministic field.

use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA_VERSION: &str = "1";

/// One self-describing output line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub schema_version: String,
    /// Subcommand that produced the record, e.g. `"profile"`.
    pub command: String,
    /// Echo of the effective inputs after defaulting.
    pub inputs: Value,
    pub results: Value,
    /// Outcome of a requested cross-check; absent when none ran.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verified: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unix_time: Option<u64>,
}

/// Builds and prints records with the session's timestamp policy.
pub struct Emitter {
    no_timestamp: bool,
}

impl Emitter {
    pub fn new(no_timestamp: bool) -> Self {
        Self { no_timestamp }
    }

    pub fn make(
        &self,
        command: &str,
        inputs: Value,
        results: Value,
        verified: Option<bool>,
    ) -> OutputRecord {
        let unix_time = (!self.no_timestamp).then(|| {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .unwrap_or_default()
                .as_secs()
        });
        OutputRecord {
            schema_version: SCHEMA_VERSION.to_owned(),
            command: command.to_owned(),
            inputs,
            results,
            verified,
            unix_time,
        }
    }

    pub fn emit(&self, record: &OutputRecord) {
        // Reserializing through Value sorts the top-level keys, so a parsed
        // record writes back to the identical bytes.
        let canonical = serde_json::to_value(record).expect("records hold only JSON-safe values");
        println!("{canonical}");
    }

    pub fn emit_now(&self, command: &str, inputs: Value, results: Value, verified: Option<bool>) {
        self.emit(&self.make(command, inputs, results, verified));
    }
}
