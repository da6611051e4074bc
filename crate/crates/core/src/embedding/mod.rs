//! Per-corpus word embeddings trained by skip-gram with negative sampling.

mod sgns;
mod train;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub use sgns::{
    log_sigmoid, pair_coefficient, pair_loss, sgns_gradient, sigmoid, Label, SgnsGradient,
};
pub use train::{train_embedding, train_embedding_with_report, TrainReport};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrainConfig {
    pub dim: usize,
    pub window: usize,
    pub epochs: usize,
    pub negative_samples: usize,
    pub initial_learning_rate: f64,
    pub min_count: u64,
    /// Frequent-word down-sampling threshold; 0 disables it.
    pub subsample_threshold: f64,
    /// Top-level seed. Initial vectors are keyed by `(seed, word)` and the
    /// sampling stream by `seed` alone, so identical streams train identically.
    pub seed: u64,
    pub deterministic: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dim: 100,
            window: 5,
            epochs: 5,
            negative_samples: 5,
            initial_learning_rate: 0.025,
            min_count: 5,
            subsample_threshold: 1e-3,
            seed: 1,
            deterministic: true,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        let bad = |field: &'static str| Err(TrainError::InvalidConfig { field });
        if self.dim == 0 {
            return bad("dim");
        }
        if self.window == 0 {
            return bad("window");
        }
        if self.epochs == 0 {
            return bad("epochs");
        }
        if self.negative_samples == 0 {
            return bad("negative_samples");
        }
        if !(self.initial_learning_rate.is_finite() && self.initial_learning_rate > 0.0) {
            return bad("initial_learning_rate");
        }
        if self.min_count == 0 {
            return bad("min_count");
        }
        if !(self.subsample_threshold.is_finite() && self.subsample_threshold >= 0.0) {
            return bad("subsample_threshold");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrainError {
    InvalidConfig { field: &'static str },
    EmptyVocabulary,
    StreamTooShort { tokens: usize, required: usize },
    NonFiniteLoss { epoch: usize, step: u64 },
}

impl core::error::Error for TrainError {}

impl fmt::Display for TrainError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrainError::InvalidConfig { field } => write!(f, "invalid training config: {field}"),
            TrainError::EmptyVocabulary => {
                f.write_str("no word reaches min_count; vocabulary is empty")
            }
            TrainError::StreamTooShort { tokens, required } => write!(
                f,
                "{tokens} tokens survive min_count filtering, need at least {required}"
            ),
            TrainError::NonFiniteLoss { epoch, step } => {
                write!(f, "non-finite loss at epoch {epoch}, step {step}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelError {
    ZeroDim,
    WrongLength {
        word: String,
        expected: usize,
        found: usize,
    },
    NonFinite {
        word: String,
    },
    DuplicateWord {
        word: String,
    },
}

impl core::error::Error for ModelError {}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::ZeroDim => f.write_str("dimension must be at least 1"),
            ModelError::WrongLength {
                word,
                expected,
                found,
            } => write!(
                f,
                "vector for {word:?} has {found} components, expected {expected}"
            ),
            ModelError::NonFinite { word } => write!(f, "vector for {word:?} is not finite"),
            ModelError::DuplicateWord { word } => write!(f, "word {word:?} appears twice"),
        }
    }
}

/// Trained word vectors of one corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingModel {
    pub corpus_id: String,
    dim: usize,
    words: Vec<String>,
    index: BTreeMap<String, usize>,
    vectors: Vec<f64>,
    pub train_config: TrainConfig,
}

impl EmbeddingModel {
    /// Builds a model from `(word, vector)` records, checking every vector has
    /// `dim` finite components. Record order is kept.
    pub fn from_parts(
        corpus_id: impl Into<String>,
        dim: usize,
        records: Vec<(String, Vec<f64>)>,
        train_config: TrainConfig,
    ) -> Result<Self, ModelError> {
        if dim == 0 {
            return Err(ModelError::ZeroDim);
        }
        let mut words = Vec::with_capacity(records.len());
        let mut index = BTreeMap::new();
        let mut vectors = Vec::with_capacity(records.len() * dim);
        for (word, v) in records {
            if v.len() != dim {
                return Err(ModelError::WrongLength {
                    word,
                    expected: dim,
                    found: v.len(),
                });
            }
            if !v.iter().all(|x| x.is_finite()) {
                return Err(ModelError::NonFinite { word });
            }
            if index.insert(word.clone(), words.len()).is_some() {
                return Err(ModelError::DuplicateWord { word });
            }
            words.push(word);
            vectors.extend_from_slice(&v);
        }
        Ok(EmbeddingModel {
            corpus_id: corpus_id.into(),
            dim,
            words,
            index,
            vectors,
            train_config,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Vocabulary in model order (descending corpus count for trained models).
    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn vocab_size(&self) -> usize {
        self.words.len()
    }

    pub fn lookup(&self, word: &str) -> Option<&[f64]> {
        self.index
            .get(word)
            .map(|&i| &self.vectors[i * self.dim..(i + 1) * self.dim])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.words
            .iter()
            .zip(self.vectors.chunks_exact(self.dim))
            .map(|(w, v)| (w.as_str(), v))
    }
}
