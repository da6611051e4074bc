//! JSON records and the artifact set written by a run.

use std::collections::BTreeSet;
use std::path::Path;

use langtree_core::cluster::{to_ascii, to_newick};
use langtree_core::{cut, Dendrogram, Linkage, SelectionRule, TrainConfig};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::formats::{write_file, write_matrix_csv, Precision};
use crate::pipeline::{Analysis, Corpus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Newick,
    Ascii,
    Json,
}

pub const ALL_FORMATS: [Format; 4] = [Format::Csv, Format::Newick, Format::Ascii, Format::Json];

/// Every knob that affects a run's output.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfigRecord {
    pub manifest: String,
    pub k: usize,
    pub vocab_rule: SelectionRule,
    pub linkage: Linkage,
    pub formats: BTreeSet<Format>,
    pub full_precision: bool,
    pub keep_apostrophes: bool,
    pub stopwords: Vec<String>,
    pub train: TrainConfig,
}

/// Labels of each group of the 2-cluster cut.
pub fn two_cut_labels(tree: &Dendrogram) -> Vec<Vec<String>> {
    cut(tree, 2)
        .map(|groups| tree.partition_labels(&groups))
        .unwrap_or_default()
}

pub fn merges_json(tree: &Dendrogram) -> Value {
    let labels = |node| {
        tree.members(node)
            .into_iter()
            .map(|i| tree.labels()[i].clone())
            .collect::<Vec<_>>()
    };
    Value::Array(
        tree.merges()
            .iter()
            .map(
                |m| json!({ "left": labels(m.left), "right": labels(m.right), "height": m.height }),
            )
            .collect(),
    )
}

pub fn run_metadata(config: &RunConfigRecord, corpora: &[Corpus], analysis: &Analysis) -> Value {
    json!({
        "config": config,
        "derived": {
            "corpora": corpora.iter().map(|c| json!({
                "id": c.id,
                "year": c.year,
                "files": c.files.iter().map(|f| f.display().to_string()).collect::<Vec<_>>(),
                "tokens": c.stream.token_count(),
                "types": c.table.len(),
                "model_vocab": analysis.models.iter().find(|m| m.corpus_id == c.id).map(|m| m.vocab_size()),
            })).collect::<Vec<_>>(),
            "shared_words": analysis.vocab.words(),
            "combined_length": analysis.combined_length,
            "merges": merges_json(&analysis.tree),
            "two_cut": two_cut_labels(&analysis.tree),
            "spearman_rho": analysis.consistency.spearman_rho,
        },
        "version": env!("CARGO_PKG_VERSION"),
    })
}

pub fn to_json(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("records serialize");
    s.push('\n');
    s
}

/// Writes the requested artifacts into `dir`. Returns the paths written.
pub fn write_tree_artifacts(
    dir: &Path,
    analysis_matrix: &langtree_core::DistanceMatrix,
    tree: &Dendrogram,
    consistency: Option<&langtree_core::ConsistencyReport>,
    formats: &BTreeSet<Format>,
    precision: Precision,
) -> Result<Vec<String>, CliError> {
    let mut written = Vec::new();
    let mut put = |name: &str, contents: String| -> Result<(), CliError> {
        write_file(&dir.join(name), &contents)?;
        written.push(name.to_string());
        Ok(())
    };
    if formats.contains(&Format::Csv) {
        put("matrix.csv", write_matrix_csv(analysis_matrix, precision))?;
    }
    if formats.contains(&Format::Newick) {
        put("tree.nwk", to_newick(tree) + "\n")?;
    }
    if formats.contains(&Format::Ascii) {
        put("tree.txt", to_ascii(tree))?;
    }
    if let (true, Some(c)) = (formats.contains(&Format::Json), consistency) {
        put("consistency.json", to_json(c))?;
    }
    Ok(written)
}
