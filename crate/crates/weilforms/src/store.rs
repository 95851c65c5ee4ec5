//! On-disk cache of local density records.
//!
//! One JSON file per key under `<dir>/v<SCHEMA_VERSION>/`, named by the key
//! fingerprint. Each file repeats the schema version and the canonical key;
//! entries with another version or a colliding key are ignored and left in
//! place. Reads go through an in-memory map behind an `RwLock`; writes take
//! the write lock and replace the file atomically.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::RwLock;

use serde::{Deserialize, Serialize};
use weilforms_core::arith::{format_rational, parse_rational};
use weilforms_core::exec::{DensityKey, DensityStore, LocalDensityRecord};

pub const SCHEMA_VERSION: u32 = 1;
pub const CACHE_ENV: &str = "WEILFORMS_CACHE_DIR";
pub const DEFAULT_CACHE_DIR: &str = ".weilforms-cache";

/// `$WEILFORMS_CACHE_DIR`, else `./.weilforms-cache`.
pub fn default_cache_dir() -> PathBuf {
    std::env::var_os(CACHE_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE_DIR))
}

#[derive(Debug, Serialize, Deserialize)]
struct Entry {
    schema: u32,
    key: String,
    prime: u64,
    stabilized_at: u32,
    value: String,
    levels: Vec<String>,
}

impl Entry {
    fn record(&self) -> Option<LocalDensityRecord> {
        Some(LocalDensityRecord {
            prime: self.prime,
            stabilized_at: self.stabilized_at,
            value: parse_rational(&self.value).ok()?,
            levels: self.levels.iter().map(|s| parse_rational(s).ok()).collect::<Option<_>>()?,
        })
    }
}

#[derive(Debug)]
pub struct DiskStore {
    dir: PathBuf,
    memo: RwLock<HashMap<String, LocalDensityRecord>>,
}

impl DiskStore {
    pub fn open(root: &Path) -> std::io::Result<Self> {
        let dir = root.join(format!("v{SCHEMA_VERSION}"));
        fs::create_dir_all(&dir)?;
        Ok(Self { dir, memo: RwLock::new(HashMap::new()) })
    }

    fn path(&self, key: &DensityKey) -> PathBuf {
        self.dir.join(format!("{:016x}.json", key.fingerprint()))
    }

    fn read_file(&self, key: &DensityKey, canonical: &str) -> Option<LocalDensityRecord> {
        let text = fs::read_to_string(self.path(key)).ok()?;
        let entry: Entry = serde_json::from_str(&text).ok()?;
        if entry.schema != SCHEMA_VERSION || entry.key != canonical {
            return None;
        }
        entry.record()
    }
}

impl DensityStore for DiskStore {
    fn load(&self, key: &DensityKey) -> Option<LocalDensityRecord> {
        let canonical = key.canonical();
        if let Some(r) = self.memo.read().ok()?.get(&canonical) {
            return Some(r.clone());
        }
        let r = self.read_file(key, &canonical)?;
        if let Ok(mut m) = self.memo.write() {
            m.insert(canonical, r.clone());
        }
        Some(r)
    }

    fn save(&self, key: &DensityKey, record: &LocalDensityRecord) {
        let canonical = key.canonical();
        let Ok(mut memo) = self.memo.write() else { return };
        let entry = Entry {
            schema: SCHEMA_VERSION,
            key: canonical.clone(),
            prime: record.prime,
            stabilized_at: record.stabilized_at,
            value: format_rational(&record.value),
            levels: record.levels.iter().map(format_rational).collect(),
        };
        // a failed write only costs a recomputation later
        if let Ok(text) = serde_json::to_string(&entry) {
            let path = self.path(key);
            let tmp = path.with_extension(format!("tmp{}", std::process::id()));
            if fs::write(&tmp, text).is_ok() && fs::rename(&tmp, &path).is_err() {
                let _ = fs::remove_file(&tmp);
            }
        }
        memo.insert(canonical, record.clone());
    }
}
