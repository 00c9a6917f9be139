//! Content-addressed response cache: one file per request hash, fanned
//! out under two-hex-digit subdirectories.

use std::fs;
use std::path::{Path, PathBuf};

use super::ClientError;

#[derive(Debug, Clone)]
pub struct DiskCache {
    dir: PathBuf,
}

impl DiskCache {
    pub fn new(dir: impl AsRef<Path>) -> Result<Self, ClientError> {
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(&dir).map_err(|source| ClientError::CacheIo {
            path: dir.display().to_string(),
            source,
        })?;
        Ok(DiskCache { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path_for(&self, key: &str) -> PathBuf {
        let shard = &key[..2.min(key.len())];
        self.dir.join(shard).join(format!("{key}.txt"))
    }

    /// Lookups never mutate the store.
    pub fn get(&self, key: &str) -> Result<Option<String>, ClientError> {
        let path = self.path_for(key);
        match fs::read_to_string(&path) {
            Ok(text) => Ok(Some(text)),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(source) => Err(ClientError::CacheIo {
                path: path.display().to_string(),
                source,
            }),
        }
    }

    pub fn put(&self, key: &str, value: &str) -> Result<(), ClientError> {
        let path = self.path_for(key);
        let parent = path.parent().expect("cache paths have parents");
        fs::create_dir_all(parent).map_err(|source| ClientError::CacheIo {
            path: parent.display().to_string(),
            source,
        })?;
        fs::write(&path, value).map_err(|source| ClientError::CacheIo {
            path: path.display().to_string(),
            source,
        })
    }
}
