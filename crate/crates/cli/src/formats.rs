//! On-disk formats: corpus text, embedding models and distance matrices.

use std::fs;
use std::path::Path;

use langtree_core::embedding::TrainConfig;
use langtree_core::geometry::{GeometryError, SYMMETRY_TOLERANCE};
use langtree_core::{decode, DistanceMatrix, EmbeddingModel, TokenStream, TokenizerConfig};

use crate::error::{CliError, Stage};
use crate::manifest::CorpusEntry;

/// Reads and tokenizes every file of a manifest entry, in listed order.
pub fn read_corpus(
    entry: &CorpusEntry,
    tokenizer: &TokenizerConfig,
) -> Result<TokenStream, CliError> {
    let mut stream = TokenStream::new(entry.id.clone());
    for path in &entry.paths {
        let bytes = fs::read(path).map_err(|e| CliError::io(Stage::Read, path, e))?;
        let text = decode(&bytes, entry.encoding)
            .map_err(|e| CliError::data(Stage::Read, format!("{}: {e}", path.display())))?;
        stream.push_text(&text, tokenizer);
    }
    Ok(stream)
}

const MODEL_MAGIC: &str = "langtree-model 1";

/// Text model format:
///
/// ```text
/// langtree-model 1
/// corpus_id <rest of line>
/// dim <D>
/// vocab <N>
/// config <TrainConfig as one-line JSON>
/// <word> <x1> ... <xD>        (N lines)
/// ```
///
/// Values use the shortest decimal form that parses back to the same `f64`,
/// so a save/load cycle is exact.
pub fn write_model(model: &EmbeddingModel) -> String {
    let config = serde_json::to_string(&model.train_config).expect("config serializes");
    let mut out = format!(
        "{MODEL_MAGIC}\ncorpus_id {}\ndim {}\nvocab {}\nconfig {config}\n",
        model.corpus_id,
        model.dim(),
        model.vocab_size()
    );
    for (word, v) in model.iter() {
        out.push_str(word);
        for x in v {
            out.push(' ');
            out.push_str(&x.to_string());
        }
        out.push('\n');
    }
    out
}

pub fn read_model(text: &str) -> Result<EmbeddingModel, String> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut header = |key: &str| -> Result<(usize, String), String> {
        let (n, line) = lines.next().ok_or_else(|| format!("missing {key} line"))?;
        if key == "magic" {
            return if line == MODEL_MAGIC {
                Ok((n, String::new()))
            } else {
                Err(format!("line {n}: not a langtree model"))
            };
        }
        line.strip_prefix(key)
            .and_then(|r| r.strip_prefix(' '))
            .map(|r| (n, r.to_string()))
            .ok_or_else(|| format!("line {n}: expected {key}"))
    };
    header("magic")?;
    let (_, corpus_id) = header("corpus_id")?;
    let (n, dim) = header("dim")?;
    let dim: usize = dim.parse().map_err(|_| format!("line {n}: bad dim"))?;
    let (n, vocab) = header("vocab")?;
    let vocab: usize = vocab
        .parse()
        .map_err(|_| format!("line {n}: bad vocab size"))?;
    let (n, config) = header("config")?;
    let config: TrainConfig =
        serde_json::from_str(&config).map_err(|e| format!("line {n}: {e}"))?;

    let mut records = Vec::with_capacity(vocab);
    for (n, line) in lines {
        let mut fields = line.split(' ');
        let word = fields
            .next()
            .filter(|w| !w.is_empty())
            .ok_or_else(|| format!("line {n}: empty record"))?;
        let v = fields
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| format!("line {n}: bad value {f:?}"))
            })
            .collect::<Result<Vec<f64>, String>>()?;
        records.push((word.to_string(), v));
    }
    if records.len() != vocab {
        return Err(format!(
            "header says {vocab} words, found {}",
            records.len()
        ));
    }
    EmbeddingModel::from_parts(corpus_id, dim, records, config).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    /// Three decimals, the layout of printed similarity tables.
    Table,
    /// Shortest exact representation.
    Full,
}

/// Square CSV: a header row of labels after an empty corner cell, then one
/// row per label.
pub fn write_matrix_csv(m: &DistanceMatrix, precision: Precision) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let header = std::iter::once("").chain(m.labels().iter().map(String::as_str));
    w.write_record(header).expect("in-memory write");
    for (i, label) in m.labels().iter().enumerate() {
        let cells = m.row(i).iter().map(|x| match precision {
            Precision::Table => format!("{x:.3}"),
            Precision::Full => x.to_string(),
        });
        w.write_record(std::iter::once(label.clone()).chain(cells))
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
}

/// A cell pair that was averaged to make a matrix symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct Symmetrized {
    pub row: String,
    pub col: String,
    pub upper: f64,
    pub lower: f64,
}

/// Years parsed from the labels, when every label is an integer.
pub fn years_from_labels(labels: &[String]) -> Option<Vec<i64>> {
    labels.iter().map(|l| l.trim().parse().ok()).collect()
}

/// Reads a matrix CSV. Pairs whose two cells differ by more than the strict
/// symmetry tolerance but no more than `lenience` are replaced by their mean
/// and reported; anything beyond that is an error.
pub fn read_matrix_csv(
    text: &str,
    lenience: f64,
) -> Result<(DistanceMatrix, Vec<Symmetrized>), String> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(text.as_bytes());
    let mut rows = r.records();
    let header = rows
        .next()
        .ok_or("empty matrix file")?
        .map_err(|e| e.to_string())?;
    let labels: Vec<String> = header
        .iter()
        .skip(1)
        .map(|s| s.trim().to_string())
        .collect();
    let n = labels.len();
    let mut values = Vec::with_capacity(n * n);
    for (i, row) in rows.enumerate() {
        let row = row.map_err(|e| e.to_string())?;
        let line = i + 2;
        if row.len() != n + 1 {
            return Err(format!(
                "line {line}: expected {} cells, found {}",
                n + 1,
                row.len()
            ));
        }
        if labels.get(i).map(String::as_str) != Some(row[0].trim()) {
            return Err(format!(
                "line {line}: row label {:?} does not match the header",
                &row[0]
            ));
        }
        for cell in row.iter().skip(1) {
            values.push(
                cell.trim()
                    .parse::<f64>()
                    .map_err(|_| format!("line {line}: bad value {cell:?}"))?,
            );
        }
    }
    if values.len() != n * n {
        return Err(format!(
            "expected {n} rows, found {}",
            values.len() / n.max(1)
        ));
    }
    let mut fixed = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (values[i * n + j], values[j * n + i]);
            let gap = (a - b).abs();
            if gap > SYMMETRY_TOLERANCE && gap <= lenience {
                let mean = (a + b) / 2.0;
                values[i * n + j] = mean;
                values[j * n + i] = mean;
                fixed.push(Symmetrized {
                    row: labels[i].clone(),
                    col: labels[j].clone(),
                    upper: a,
                    lower: b,
                });
            }
        }
    }
    let years = years_from_labels(&labels);
    let m = DistanceMatrix::new(labels, years, values).map_err(|e: GeometryError| e.to_string())?;
    Ok((m, fixed))
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| CliError::io(Stage::Write, dir, e))?;
    }
    fs::write(path, contents).map_err(|e| CliError::io(Stage::Write, path, e))
}
