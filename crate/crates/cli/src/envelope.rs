use serde::Serialize;
use sha2::{Digest, Sha256};

/// Bumped whenever a payload schema changes incompatibly.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct ReportEnvelope<T: Serialize> {
    pub tool_version: String,
    pub schema_version: u32,
    pub command: String,
    /// `sha256:` over the canonical (re-serialized, compact) input JSON.
    pub input_digest: String,
    pub payload: T,
}

impl<T: Serialize> ReportEnvelope<T> {
    pub fn new(command: &str, input_digest: String, payload: T) -> Self {
        ReportEnvelope {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            input_digest,
            payload,
        }
    }
}

pub fn canonical_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("report types serialize")
}

pub fn digest<T: Serialize>(value: &T) -> String {
    let hash = Sha256::digest(canonical_json(value).as_bytes());
    format!("sha256:{}", hex::encode(hash))
}
