//! The synthetic drift suite: seeded corpora with a known timeline and the
//! training knobs used to check that trees recover it.

use std::path::{Path, PathBuf};

use langtree_core::{
    generate, tokenize, DriftSpec, Linkage, SelectionRule, TokenizerConfig, TrainConfig,
};

use crate::error::CliError;
use crate::formats::write_file;
use crate::manifest;
use crate::pipeline::{AnalysisConfig, Corpus};

/// Unevenly spaced, like real publication years.
pub const TIMELINE: [i64; 5] = [1800, 1830, 1850, 1900, 1920];
pub const VOCAB: usize = 300;
pub const TOKENS: usize = 50_000;
pub const K: usize = 20;
pub const DIM: usize = 16;
pub const LEARNING_RATE: f64 = 0.005;

pub fn spec(seed: u64) -> DriftSpec {
    DriftSpec {
        vocab_size: VOCAB,
        timeline: TIMELINE.to_vec(),
        tokens_per_corpus: TOKENS,
        drift_rate: 1.0,
        seed,
    }
}

/// Word2vec defaults except a lower learning rate and no down-sampling,
/// which keep training noise below the drift signal on 50k-token corpora.
pub fn train_config(dim: usize, seed: u64) -> TrainConfig {
    TrainConfig {
        dim,
        initial_learning_rate: LEARNING_RATE,
        subsample_threshold: 0.0,
        seed,
        ..TrainConfig::default()
    }
}

pub fn analysis_config(dim: usize, seed: u64) -> AnalysisConfig {
    AnalysisConfig {
        k: K,
        rule: SelectionRule::SumRank,
        train: train_config(dim, seed),
        linkage: Linkage::Complete,
    }
}

/// Generated corpora, tokenized in memory.
pub fn corpora(spec: &DriftSpec) -> Result<Vec<Corpus>, CliError> {
    let tokenizer = TokenizerConfig::default();
    Ok(generate(spec)?
        .into_iter()
        .map(|c| {
            let mut stream = tokenize(&c.text, &tokenizer);
            stream.corpus_id = c.id;
            Corpus::new(c.year, Vec::new(), stream)
        })
        .collect())
}

/// Writes one `<id>.txt` per corpus plus `manifest.txt` into `dir`; returns
/// the manifest path.
pub fn write(spec: &DriftSpec, dir: &Path) -> Result<PathBuf, CliError> {
    let mut entries = Vec::new();
    for c in generate(spec)? {
        let file = format!("{}.txt", c.id);
        write_file(&dir.join(&file), &c.text)?;
        entries.push((c.id, c.year, file));
    }
    let path = dir.join("manifest.txt");
    write_file(&path, &manifest::render(&entries))?;
    Ok(path)
}
