//! On-disk cache for computed tables.
//!
//! Each entry is stored under the SHA-256 of its key. The first line of the
//! file holds the SHA-256 of the payload; entries whose payload no longer
//! matches are discarded.

use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::Result;

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

fn digest(data: &[u8]) -> String {
    hex::encode(Sha256::digest(data))
}

impl Cache {
    pub fn new(dir: impl AsRef<Path>) -> Result<Self> {
        fs::create_dir_all(dir.as_ref())?;
        Ok(Self { dir: dir.as_ref().to_path_buf() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, key: &str) -> PathBuf {
        let full = format!("{key};v={CODE_VERSION}");
        self.dir.join(format!("{}.cache", digest(full.as_bytes())))
    }

    /// Payload for `key`, if present and intact.
    pub fn get(&self, key: &str) -> Option<String> {
        let path = self.path(key);
        let text = fs::read_to_string(&path).ok()?;
        let (head, body) = text.split_once('\n')?;
        if head.strip_prefix("sha256=")? == digest(body.as_bytes()) {
            Some(body.to_string())
        } else {
            let _ = fs::remove_file(path);
            None
        }
    }

    pub fn put(&self, key: &str, payload: &str) -> Result<()> {
        let path = self.path(key);
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, format!("sha256={}\n{payload}", digest(payload.as_bytes())))?;
        fs::rename(tmp, path)?;
        Ok(())
    }
}
