//! Replay cache: a content-addressed directory of JSON records. A hit
//! returns the stored text; a miss delegates to the inner backend and stores
//! the result. No entry is written when the inner call fails.

use std::path::PathBuf;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::{cache_key, Backend, BackendKind, CompletionRequest, CompletionResult, GatewayError};

#[derive(Serialize, Deserialize)]
struct CacheRecord {
    key: String,
    request: CompletionRequest,
    response: CompletionResult,
    stored_at_unix: u64,
}

pub struct CacheBackend {
    dir: PathBuf,
    inner: Box<dyn Backend>,
    write_lock: Mutex<()>,
}

impl CacheBackend {
    pub fn new(dir: impl Into<PathBuf>, inner: Box<dyn Backend>) -> Result<Self, GatewayError> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir).map_err(|e| GatewayError::CacheIo(e.to_string()))?;
        Ok(CacheBackend {
            dir,
            inner,
            write_lock: Mutex::new(()),
        })
    }

    fn path_for(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{}.json", key))
    }

    fn lookup(&self, key: &str) -> Option<CompletionResult> {
        let raw = std::fs::read_to_string(self.path_for(key)).ok()?;
        let record: CacheRecord = serde_json::from_str(&raw).ok()?;
        Some(CompletionResult {
            backend: BackendKind::Cache,
            ..record.response
        })
    }

    fn store(&self, key: &str, req: &CompletionRequest, res: &CompletionResult) -> Result<(), GatewayError> {
        let record = CacheRecord {
            key: key.to_string(),
            request: req.clone(),
            response: res.clone(),
            stored_at_unix: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        };
        let _guard = self.write_lock.lock().unwrap();
        let tmp = self.path_for(&format!("{}.tmp", key));
        let body = serde_json::to_string_pretty(&record)
            .map_err(|e| GatewayError::CacheIo(e.to_string()))?;
        std::fs::write(&tmp, body).map_err(|e| GatewayError::CacheIo(e.to_string()))?;
        std::fs::rename(&tmp, self.path_for(key)).map_err(|e| GatewayError::CacheIo(e.to_string()))?;
        Ok(())
    }

    pub fn len(&self) -> usize {
        std::fs::read_dir(&self.dir)
            .map(|entries| {
                entries
                    .flatten()
                    .filter(|e| e.path().extension().is_some_and(|x| x == "json"))
                    .count()
            })
            .unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl Backend for CacheBackend {
    fn complete(&self, req: &CompletionRequest) -> Result<CompletionResult, GatewayError> {
        let key = cache_key(req);
        if let Some(hit) = self.lookup(&key) {
            return Ok(hit);
        }
        let result = self.inner.complete(req)?;
        self.store(&key, req, &result)?;
        Ok(result)
    }

    fn kind(&self) -> BackendKind {
        BackendKind::Cache
    }
}
