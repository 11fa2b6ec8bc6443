use std::collections::BTreeMap;
use std::time::SystemTime;

use anyhow::{Context, Result};
use serde::Serialize;
use time::format_description::well_known::Rfc3339;
use time::OffsetDateTime;

/// Provenance embedded in every artifact the CLI writes.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub seed: Option<u64>,
    pub version: &'static str,
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(command: &str, parameters: BTreeMap<String, String>, seed: Option<u64>) -> Result<Self> {
        Ok(RunManifest {
            command: command.to_string(),
            parameters,
            seed,
            version: env!("CARGO_PKG_VERSION"),
            timestamp: timestamp()?,
        })
    }

    /// Single comment line for text and CSV outputs.
    pub fn header(&self) -> String {
        format!("# manifest: {}\n", serde_json::to_string(self).expect("manifest serializes"))
    }
}

/// `SOURCE_DATE_EPOCH` when set, so repeated runs are byte-identical.
fn timestamp() -> Result<String> {
    let secs = match std::env::var("SOURCE_DATE_EPOCH") {
        Ok(v) => v.trim().parse::<i64>().context("SOURCE_DATE_EPOCH is not an integer")?,
        Err(_) => {
            SystemTime::now().duration_since(SystemTime::UNIX_EPOCH).context("system clock before 1970")?.as_secs()
                as i64
        }
    };
    let t = OffsetDateTime::from_unix_timestamp(secs).context("SOURCE_DATE_EPOCH out of range")?;
    Ok(t.format(&Rfc3339)?)
}

/// `{"manifest": ..., key: body}` as pretty JSON with a trailing newline.
pub fn json_artifact<T: Serialize>(manifest: &RunManifest, key: &str, body: &T) -> Result<String> {
    let mut map = serde_json::Map::new();
    map.insert("manifest".into(), serde_json::to_value(manifest)?);
    map.insert(key.into(), serde_json::to_value(body)?);
    let mut out = serde_json::to_string_pretty(&serde_json::Value::Object(map))?;
    out.push('\n');
    Ok(out)
}
