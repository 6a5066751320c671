//! Content-addressed on-disk cache of serialized results.
//!
//! Keys hash the operation name, its inputs and the tool version, so a
//! version bump invalidates everything. Entries are written to a temporary
//! file and renamed into place; readers never see a partial entry.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Result;

/// Environment variable overriding the cache directory.
pub const CACHE_DIR_ENV: &str = "EULERCONG_CACHE_DIR";

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

static TMP_COUNTER: AtomicU64 = AtomicU64::new(0);

#[derive(Clone, Debug, Default)]
pub struct DiskCache {
    dir: Option<PathBuf>,
}

impl DiskCache {
    /// A cache that stores nothing.
    pub fn disabled() -> Self {
        Self { dir: None }
    }

    pub fn at(dir: impl Into<PathBuf>) -> Self {
        Self { dir: Some(dir.into()) }
    }

    /// The directory named by [`CACHE_DIR_ENV`], or `default` when unset.
    pub fn from_env_or(default: Option<PathBuf>) -> Self {
        match std::env::var_os(CACHE_DIR_ENV) {
            Some(d) if !d.is_empty() => Self::at(d),
            _ => Self { dir: default },
        }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn key(op: &str, parts: &[String]) -> String {
        let mut h = Sha256::new();
        h.update(TOOL_VERSION.as_bytes());
        h.update([0]);
        h.update(op.as_bytes());
        for part in parts {
            h.update([0]);
            h.update(part.as_bytes());
        }
        format!("{op}-{}", hex::encode(h.finalize()))
    }

    pub fn get<T: DeserializeOwned>(&self, op: &str, parts: &[String]) -> Option<T> {
        let path = self.dir.as_ref()?.join(Self::key(op, parts) + ".json");
        let text = std::fs::read_to_string(path).ok()?;
        serde_json::from_str(&text).ok()
    }

    pub fn put<T: Serialize>(&self, op: &str, parts: &[String], value: &T) -> Result<()> {
        let Some(dir) = &self.dir else { return Ok(()) };
        std::fs::create_dir_all(dir)?;
        let name = Self::key(op, parts);
        let tmp = dir.join(format!(
            ".{name}.{}.{}.tmp",
            std::process::id(),
            TMP_COUNTER.fetch_add(1, Ordering::Relaxed)
        ));
        std::fs::write(&tmp, serde_json::to_vec(value)?)?;
        std::fs::rename(&tmp, dir.join(name + ".json"))?;
        Ok(())
    }

    /// Cached value, or `compute()` stored for next time. Unreadable entries
    /// are recomputed.
    pub fn get_or_compute<T, F>(&self, op: &str, parts: &[String], compute: F) -> Result<T>
    where
        T: Serialize + DeserializeOwned,
        F: FnOnce() -> Result<T>,
    {
        if let Some(v) = self.get(op, parts) {
            return Ok(v);
        }
        let v = compute()?;
        self.put(op, parts, &v)?;
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let cache = DiskCache::at(dir.path());
        let parts = vec!["a".to_string(), "b".to_string()];
        let mut calls = 0;
        let v: Vec<u32> = cache.get_or_compute("op", &parts, || { calls += 1; Ok(vec![1, 2]) }).unwrap();
        let w: Vec<u32> = cache.get_or_compute("op", &parts, || { calls += 1; Ok(vec![9]) }).unwrap();
        assert_eq!((v, w, calls), (vec![1, 2], vec![1, 2], 1));
        std::fs::write(dir.path().join(DiskCache::key("op", &parts) + ".json"), "{").unwrap();
        let x: Vec<u32> = cache.get_or_compute("op", &parts, || Ok(vec![3])).unwrap();
        assert_eq!(x, vec![3]);
        assert_ne!(DiskCache::key("op", &parts), DiskCache::key("op", &["ab".into()]));
    }

    #[test]
    fn disabled_cache_always_computes() {
        let cache = DiskCache::disabled();
        let a: u8 = cache.get_or_compute("op", &[], || Ok(1)).unwrap();
        let b: u8 = cache.get_or_compute("op", &[], || Ok(2)).unwrap();
        assert_eq!((a, b), (1, 2));
    }
}
