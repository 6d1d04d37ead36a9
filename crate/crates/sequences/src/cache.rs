//! On-disk cache of computed sequences.
//!
//! One JSON file holds every entry. Reads parse the whole file; writes go
//! through a single lock, a temporary file and a rename, so readers never see
//! a partial file. A file that fails to parse, or carries another schema
//! version, is treated as empty.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::table::{MethodChoice, SequenceKey, SequenceRecord};

pub const CACHE_VERSION: u32 = 1;
pub const CACHE_FILE: &str = "sequences.json";
pub const CACHE_DIR_ENV: &str = "COMBX_CACHE_DIR";

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("cache io at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("no cache directory configured")]
    NoDirectory,
}

#[derive(Serialize)]
struct FileOut<'a> {
    version: u32,
    entries: &'a [SequenceRecord],
}

#[derive(Deserialize)]
struct FileIn {
    version: u32,
    #[serde(default)]
    entries: serde_json::Value,
}

#[derive(Debug)]
pub struct Cache {
    path: PathBuf,
    writer: Mutex<()>,
}

impl Cache {
    /// Cache stored in `dir`, which is created on first write.
    pub fn new(dir: impl AsRef<Path>) -> Self {
        Cache {
            path: dir.as_ref().join(CACHE_FILE),
            writer: Mutex::new(()),
        }
    }

    /// `$COMBX_CACHE_DIR`, else the platform cache directory.
    pub fn from_env() -> Result<Self, CacheError> {
        let dir = match std::env::var_os(CACHE_DIR_ENV) {
            Some(d) if !d.is_empty() => PathBuf::from(d),
            _ => dirs::cache_dir()
                .ok_or(CacheError::NoDirectory)?
                .join("combx"),
        };
        Ok(Cache::new(dir))
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    fn load(&self) -> Vec<SequenceRecord> {
        let text = match fs::read_to_string(&self.path) {
            Ok(t) => t,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Vec::new(),
            Err(e) => {
                tracing::warn!(path = %self.path.display(), error = %e, "cache unreadable; ignoring it");
                return Vec::new();
            }
        };
        let file: FileIn = match serde_json::from_str(&text) {
            Ok(f) => f,
            Err(e) => {
                tracing::warn!(path = %self.path.display(), error = %e, "cache corrupt; ignoring it");
                return Vec::new();
            }
        };
        if file.version != CACHE_VERSION {
            tracing::debug!(
                found = file.version,
                expected = CACHE_VERSION,
                "cache schema differs; ignoring it"
            );
            return Vec::new();
        }
        match serde_json::from_value(file.entries) {
            Ok(entries) => entries,
            Err(e) => {
                tracing::warn!(path = %self.path.display(), error = %e, "cache entries corrupt; ignoring them");
                Vec::new()
            }
        }
    }

    pub fn get(&self, key: &SequenceKey, method: MethodChoice) -> Option<SequenceRecord> {
        self.load()
            .into_iter()
            .find(|r| &r.key == key && r.method == method)
    }

    pub fn entries(&self) -> Vec<SequenceRecord> {
        self.load()
    }

    /// Inserts or replaces the entry for the record's key and method.
    pub fn put(&self, record: &SequenceRecord) -> Result<(), CacheError> {
        let _guard = self.writer.lock().unwrap_or_else(|e| e.into_inner());
        let mut entries = self.load();
        entries.retain(|r| !(r.key == record.key && r.method == record.method));
        entries.push(record.clone());
        entries.sort_by_key(|a| (a.key.canonical(), a.method));
        self.write(&entries)
    }

    fn write(&self, entries: &[SequenceRecord]) -> Result<(), CacheError> {
        let io_err = |source| CacheError::Io {
            path: self.path.clone(),
            source,
        };
        let dir = self.path.parent().expect("cache file has a directory");
        fs::create_dir_all(dir).map_err(io_err)?;
        let mut body = serde_json::to_string_pretty(&FileOut {
            version: CACHE_VERSION,
            entries,
        })
        .expect("records always serialize");
        body.push('\n');
        let tmp = self
            .path
            .with_extension(format!("json.{}.tmp", std::process::id()));
        let mut f = fs::File::create(&tmp).map_err(io_err)?;
        f.write_all(body.as_bytes()).map_err(io_err)?;
        f.sync_all().map_err(io_err)?;
        drop(f);
        fs::rename(&tmp, &self.path).map_err(io_err)
    }
}
