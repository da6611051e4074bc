//! Trained-model cache keyed by a content hash of the token stream and the
//! training config. The corpus id is not part of the key: identical streams
//! train to identical vectors under any id.

use std::collections::HashMap;
use std::fs;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use langtree_core::{train_embedding, EmbeddingModel, TokenStream, TrainConfig};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Stage};
use crate::formats::{read_model, write_model};

pub fn cache_key(stream: &TokenStream, config: &TrainConfig) -> String {
    let mut h = Sha256::new();
    h.update(b"langtree-embed 1\n");
    h.update(serde_json::to_vec(config).expect("config serializes"));
    for t in stream.tokens() {
        h.update(b"\n");
        h.update(t.as_bytes());
    }
    hex::encode(h.finalize())
}

#[derive(Debug, Default)]
pub struct EmbeddingCache {
    dir: Option<PathBuf>,
    memory: Mutex<HashMap<String, Arc<EmbeddingModel>>>,
    trained: Mutex<u64>,
}

impl EmbeddingCache {
    /// In-memory only.
    pub fn memory() -> Self {
        EmbeddingCache::default()
    }

    /// In memory and persisted as model files under `dir`.
    pub fn on_disk(dir: impl Into<PathBuf>) -> Self {
        EmbeddingCache {
            dir: Some(dir.into()),
            ..EmbeddingCache::default()
        }
    }

    /// Number of models actually trained (cache misses) so far.
    pub fn trained(&self) -> u64 {
        *self.trained.lock().expect("cache lock")
    }

    pub fn get_or_train(
        &self,
        stream: &TokenStream,
        config: &TrainConfig,
    ) -> Result<EmbeddingModel, CliError> {
        let key = cache_key(stream, config);
        let relabel = |m: &EmbeddingModel| {
            let mut m = m.clone();
            m.corpus_id = stream.corpus_id.clone();
            m
        };
        if let Some(m) = self.memory.lock().expect("cache lock").get(&key) {
            return Ok(relabel(m));
        }
        let file = self.dir.as_ref().map(|d| d.join(format!("{key}.model")));
        if let Some(path) = &file {
            if let Ok(text) = fs::read_to_string(path) {
                match read_model(&text) {
                    Ok(m) if m.train_config == *config => {
                        let m = Arc::new(m);
                        self.memory
                            .lock()
                            .expect("cache lock")
                            .insert(key, m.clone());
                        return Ok(relabel(&m));
                    }
                    _ => eprintln!("[cache] ignoring unreadable entry {}", path.display()),
                }
            }
        }

        let model = Arc::new(train_embedding(stream, config)?);
        *self.trained.lock().expect("cache lock") += 1;
        if let Some(path) = &file {
            let dir = path.parent().expect("cache file has a directory");
            fs::create_dir_all(dir).map_err(|e| CliError::io(Stage::Cache, dir, e))?;
            let tmp = path.with_extension(format!("tmp{}", std::process::id()));
            fs::write(&tmp, write_model(&model))
                .map_err(|e| CliError::io(Stage::Cache, &tmp, e))?;
            fs::rename(&tmp, path).map_err(|e| CliError::io(Stage::Cache, path, e))?;
        }
        self.memory
            .lock()
            .expect("cache lock")
            .insert(key, model.clone());
        Ok(relabel(&model))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stream(id: &str) -> TokenStream {
        let words = ["a", "b", "c", "d"]
            .iter()
            .cycle()
            .take(80)
            .map(|w| w.to_string())
            .collect();
        TokenStream::from_tokens(id, words).unwrap()
    }

    #[test]
    fn hits_skip_training_and_keep_ids() {
        let cache = EmbeddingCache::memory();
        let cfg = TrainConfig {
            dim: 4,
            ..TrainConfig::default()
        };
        let a = cache.get_or_train(&stream("x"), &cfg).unwrap();
        let b = cache.get_or_train(&stream("y"), &cfg).unwrap();
        assert_eq!(cache.trained(), 1);
        assert_eq!((a.corpus_id.as_str(), b.corpus_id.as_str()), ("x", "y"));
        assert_eq!(a.lookup("a"), b.lookup("a"));
        cache
            .get_or_train(&stream("x"), &TrainConfig { window: 2, ..cfg })
            .unwrap();
        assert_eq!(cache.trained(), 2);
    }

    #[test]
    fn disk_entries_survive_a_new_cache() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = TrainConfig {
            dim: 3,
            ..TrainConfig::default()
        };
        let first = EmbeddingCache::on_disk(dir.path());
        let a = first.get_or_train(&stream("x"), &cfg).unwrap();
        let second = EmbeddingCache::on_disk(dir.path());
        let b = second.get_or_train(&stream("x"), &cfg).unwrap();
        assert_eq!(second.trained(), 0);
        assert_eq!(a, b);
    }
}
