use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use super::DecodingParams;
use crate::error::ClientError;

/// One cached model call, stored as a single JSONL line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub key: String,
    pub model: String,
    pub params: DecodingParams,
    pub prompt: String,
    pub response: String,
    pub latency_ms: u64,
    pub timestamp: String,
    pub backend: String,
}

/// Append-only JSONL response cache.
///
/// A partial final line (from a crash mid-write) is dropped on open. Any
/// other unparsable line is an error. Later entries for a key win.
#[derive(Debug)]
pub struct ResponseCache {
    path: PathBuf,
    entries: Mutex<HashMap<String, CacheEntry>>,
    file: Mutex<Option<File>>,
}

impl ResponseCache {
    /// Opens (creating if needed) a cache for appending.
    pub fn open(path: &Path) -> Result<Self, ClientError> {
        let io = |source| ClientError::CacheIo { path: path.to_path_buf(), source };
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(io)?;
        }
        let mut file = OpenOptions::new().read(true).append(true).create(true).open(path).map_err(io)?;
        let mut text = String::new();
        file.read_to_string(&mut text).map_err(io)?;
        let (entries, valid_len) = parse(path, &text)?;
        if valid_len < text.len() {
            file.set_len(valid_len as u64).map_err(io)?;
            file.seek(SeekFrom::End(0)).map_err(io)?;
        }
        Ok(ResponseCache { path: path.to_path_buf(), entries: Mutex::new(entries), file: Mutex::new(Some(file)) })
    }

    /// Loads a cache without ever writing to it.
    pub fn read_only(path: &Path) -> Result<Self, ClientError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ClientError::CacheIo { path: path.to_path_buf(), source })?;
        let (entries, _) = parse(path, &text)?;
        Ok(ResponseCache { path: path.to_path_buf(), entries: Mutex::new(entries), file: Mutex::new(None) })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn len(&self) -> usize {
        self.entries.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, key: &str) -> Option<CacheEntry> {
        self.entries.lock().expect("cache lock").get(key).cloned()
    }

    /// Appends one entry with a single write. Read-only caches only update
    /// their in-memory map.
    pub fn append(&self, entry: CacheEntry) -> Result<(), ClientError> {
        let mut line = serde_json::to_string(&entry).expect("cache entries serialize");
        line.push('\n');
        {
            let mut file = self.file.lock().expect("cache file lock");
            if let Some(f) = file.as_mut() {
                f.write_all(line.as_bytes())
                    .and_then(|_| f.flush())
                    .map_err(|source| ClientError::CacheIo { path: self.path.clone(), source })?;
            }
        }
        self.entries.lock().expect("cache lock").insert(entry.key.clone(), entry);
        Ok(())
    }
}

/// Parses cache text; returns the entries and the byte length of the
/// complete lines.
fn parse(path: &Path, text: &str) -> Result<(HashMap<String, CacheEntry>, usize), ClientError> {
    let mut entries = HashMap::new();
    let mut offset = 0;
    for (i, line) in text.split_inclusive('\n').enumerate() {
        let complete = line.ends_with('\n');
        let body = line.trim_end();
        if !body.is_empty() {
            match serde_json::from_str::<CacheEntry>(body) {
                Ok(e) => {
                    entries.insert(e.key.clone(), e);
                }
                Err(_) if !complete => break,
                Err(err) => {
                    return Err(ClientError::CacheCorrupt { path: path.to_path_buf(), line: i + 1, reason: err.to_string() })
                }
            }
        } else if !complete {
            break;
        }
        offset += line.len();
    }
    Ok((entries, offset))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(key: &str) -> CacheEntry {
        CacheEntry {
            key: key.into(),
            model: "m".into(),
            params: DecodingParams { temperature: 0.0, max_tokens: 16 },
            prompt: "p".into(),
            response: format!("Answer: {key}"),
            latency_ms: 1,
            timestamp: "2026-01-01T00:00:00Z".into(),
            backend: "mock:oracle".into(),
        }
    }

    #[test]
    fn round_trip_and_truncated_tail() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.jsonl");
        {
            let c = ResponseCache::open(&path).unwrap();
            c.append(entry("a")).unwrap();
            c.append(entry("b")).unwrap();
        }
        let mut text = std::fs::read_to_string(&path).unwrap();
        text.push_str("{\"key\":\"c\",\"mod");
        std::fs::write(&path, &text).unwrap();

        let c = ResponseCache::open(&path).unwrap();
        assert_eq!(c.len(), 2);
        c.append(entry("d")).unwrap();
        drop(c);
        let c = ResponseCache::read_only(&path).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.get("d").unwrap().response, "Answer: d");
    }

    #[test]
    fn corrupt_middle_line_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.jsonl");
        let good = serde_json::to_string(&entry("a")).unwrap();
        std::fs::write(&path, format!("{good}\nnot json\n{good}\n")).unwrap();
        assert!(matches!(ResponseCache::open(&path), Err(ClientError::CacheCorrupt { line: 2, .. })));
    }
}
