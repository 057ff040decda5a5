//! Content-addressed result cache. Keys combine the library version and
//! config fingerprint with an operation id and the canonical key of the
//! input graph, so stale entries are never returned. Writes go through a
//! temporary file and an atomic rename.

use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use sha2::{Digest, Sha256};

use crate::config::{hex_encode, Config};

pub struct Cache {
    dir: PathBuf,
    fingerprint: String,
}

impl Cache {
    pub fn new(config: &Config) -> Cache {
        Cache {
            dir: config.cache_dir.clone(),
            fingerprint: config.fingerprint(),
        }
    }

    fn path_for(&self, op_id: &str, graph_key: &[u8]) -> PathBuf {
        let mut h = Sha256::new();
        h.update(self.fingerprint.as_bytes());
        h.update(op_id.as_bytes());
        h.update(graph_key);
        self.dir.join(format!("{}.json", hex_encode(&h.finalize())))
    }

    pub fn lookup(&self, op_id: &str, graph_key: &[u8]) -> Result<Option<serde_json::Value>> {
        let path = self.path_for(op_id, graph_key);
        match fs::read_to_string(&path) {
            Ok(text) => Ok(Some(
                serde_json::from_str(&text)
                    .with_context(|| format!("corrupt cache entry {}", path.display()))?,
            )),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e).with_context(|| format!("reading cache entry {}", path.display())),
        }
    }

    pub fn store(&self, op_id: &str, graph_key: &[u8], value: &serde_json::Value) -> Result<()> {
        fs::create_dir_all(&self.dir)
            .with_context(|| format!("creating cache dir {}", self.dir.display()))?;
        let path = self.path_for(op_id, graph_key);
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, serde_json::to_vec_pretty(value)?)
            .with_context(|| format!("writing {}", tmp.display()))?;
        fs::rename(&tmp, &path)
            .with_context(|| format!("committing cache entry {}", path.display()))?;
        Ok(())
    }

    pub fn entries(&self) -> Result<Vec<(String, u64)>> {
        let mut out = Vec::new();
        match fs::read_dir(&self.dir) {
            Ok(rd) => {
                for entry in rd {
                    let entry = entry?;
                    if entry.path().extension().is_some_and(|e| e == "json") {
                        out.push((
                            entry.file_name().to_string_lossy().into_owned(),
                            entry.metadata()?.len(),
                        ));
                    }
                }
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
            Err(e) => {
                return Err(e).with_context(|| format!("listing cache {}", self.dir.display()))
            }
        }
        out.sort();
        Ok(out)
    }

    pub fn clear(&self) -> Result<usize> {
        let entries = self.entries()?;
        for (name, _) in &entries {
            fs::remove_file(self.dir.join(name))
                .with_context(|| format!("removing cache entry {name}"))?;
        }
        Ok(entries.len())
    }
}
