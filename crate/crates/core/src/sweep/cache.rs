//! One JSON document per prime, keyed by `(p, precision, version)`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lfunc::write_atomic;
use crate::precision::Precision;

use super::record::PrimeRecord;

/// Bumped whenever the record layout or its computation changes.
pub const CODE_VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "+r1");

#[derive(Debug, Serialize, Deserialize)]
struct Entry {
    version: String,
    p: u64,
    precision: Precision,
    fingerprint: String,
    record: PrimeRecord,
}

pub fn entry_path(dir: &Path, p: u64, precision: Precision) -> PathBuf {
    dir.join("records")
        .join(format!("p{p}-{precision}-{CODE_VERSION}.json"))
}

/// Returns the stored record if it was produced by this version, precision
/// and configuration fingerprint. Corrupt entries are reported and ignored.
pub fn load_cache(dir: &Path, p: u64, precision: Precision, fingerprint: &str) -> Option<PrimeRecord> {
    let path = entry_path(dir, p, precision);
    let text = fs::read_to_string(&path).ok()?;
    let entry: Entry = match serde_json::from_str(&text) {
        Ok(e) => e,
        Err(e) => {
            log::warn!("ignoring corrupt cache entry {}: {e}", path.display());
            return None;
        }
    };
    (entry.version == CODE_VERSION
        && entry.p == p
        && entry.precision == precision
        && entry.fingerprint == fingerprint
        && entry.record.p == p)
        .then_some(entry.record)
}

pub fn store_cache(
    dir: &Path,
    precision: Precision,
    fingerprint: &str,
    record: &PrimeRecord,
) -> Result<()> {
    let path = entry_path(dir, record.p, precision);
    let entry = Entry {
        version: CODE_VERSION.to_string(),
        p: record.p,
        precision,
        fingerprint: fingerprint.to_string(),
        record: PrimeRecord {
            runtime_ms: None,
            ..record.clone()
        },
    };
    let text = serde_json::to_string(&entry).map_err(|e| Error::io(&path, e))?;
    write_atomic(&path, text.as_bytes())
}
