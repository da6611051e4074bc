//! Corpus loading and the embed → combine → matrix → tree chain.

use std::path::PathBuf;

use langtree_core::cluster::ConsistencyReport;
use langtree_core::{
    agglomerate, combine, count_frequencies, distance_matrix, select_shared_vocab,
    temporal_consistency, Dendrogram, DistanceMatrix, EmbeddingModel, FrequencyTable, Linkage,
    SelectionRule, SharedVocabulary, TokenStream, TokenizerConfig, TrainConfig,
};
use rayon::prelude::*;

use crate::cache::EmbeddingCache;
use crate::error::CliError;
use crate::formats::read_corpus;
use crate::manifest::Manifest;

#[derive(Debug, Clone)]
pub struct Corpus {
    pub id: String,
    pub year: i64,
    pub files: Vec<PathBuf>,
    pub stream: TokenStream,
    pub table: FrequencyTable,
}

impl Corpus {
    pub fn new(year: i64, files: Vec<PathBuf>, stream: TokenStream) -> Self {
        let table = count_frequencies(&stream);
        Corpus {
            id: stream.corpus_id.clone(),
            year,
            files,
            stream,
            table,
        }
    }
}

/// Reads every manifest entry, one corpus per thread.
pub fn load_corpora(
    manifest: &Manifest,
    tokenizer: &TokenizerConfig,
) -> Result<Vec<Corpus>, CliError> {
    let corpora = manifest
        .corpora
        .par_iter()
        .map(|entry| {
            let stream = read_corpus(entry, tokenizer)?;
            Ok(Corpus::new(entry.year, entry.paths.clone(), stream))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    for c in &corpora {
        eprintln!(
            "[read] {}: {} file(s), {} tokens, {} types",
            c.id,
            c.files.len(),
            c.stream.token_count(),
            c.table.len()
        );
    }
    Ok(corpora)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisConfig {
    pub k: usize,
    pub rule: SelectionRule,
    pub train: TrainConfig,
    pub linkage: Linkage,
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub vocab: SharedVocabulary,
    pub models: Vec<EmbeddingModel>,
    pub combined_length: usize,
    pub matrix: DistanceMatrix,
    pub tree: Dendrogram,
    pub consistency: ConsistencyReport,
}

pub fn shared_vocab(
    corpora: &[Corpus],
    k: usize,
    min_count: u64,
    rule: SelectionRule,
) -> Result<SharedVocabulary, CliError> {
    let tables: Vec<FrequencyTable> = corpora.iter().map(|c| c.table.clone()).collect();
    Ok(select_shared_vocab(&tables, k, min_count, rule)?)
}

pub fn train_all(
    corpora: &[Corpus],
    train: &TrainConfig,
    cache: &EmbeddingCache,
) -> Result<Vec<EmbeddingModel>, CliError> {
    corpora
        .par_iter()
        .map(|c| cache.get_or_train(&c.stream, train))
        .collect()
}

pub fn analyze(
    corpora: &[Corpus],
    config: &AnalysisConfig,
    cache: &EmbeddingCache,
) -> Result<Analysis, CliError> {
    let vocab = shared_vocab(corpora, config.k, config.train.min_count, config.rule)?;
    eprintln!(
        "[vocab] {} shared words ({})",
        vocab.k(),
        config.rule.name()
    );
    let models = train_all(corpora, &config.train, cache)?;
    eprintln!("[embed] {} models, dim {}", models.len(), config.train.dim);
    let combined = models
        .iter()
        .map(|m| combine(m, &vocab))
        .collect::<Result<Vec<_>, _>>()?;
    let combined_length = combined.first().map_or(0, |c| c.data.len());
    let years = corpora.iter().map(|c| c.year).collect();
    let matrix = distance_matrix(&combined, Some(years))?;
    eprintln!(
        "[geometry] {0}x{0} matrix, combined length {combined_length}",
        matrix.len()
    );
    let tree = agglomerate(&matrix, config.linkage)?;
    let consistency = temporal_consistency(&tree)?;
    eprintln!(
        "[cluster] {} linkage, {} merges",
        config.linkage,
        tree.merges().len()
    );
    Ok(Analysis {
        vocab,
        models,
        combined_length,
        matrix,
        tree,
        consistency,
    })
}
