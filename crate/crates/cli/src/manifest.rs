//! Corpus manifests.
//!
//! A manifest is line-oriented text. Blank lines and lines starting with `#`
//! are ignored. Settings before the first block apply to every corpus; each
//! `[corpus]` line opens a block of `key = value` lines:
//!
//! ```text
//! encoding = utf-8
//!
//! [corpus]
//! id = 1836
//! year = 1836
//! paths = pickwick.txt, sketches.txt
//!
//! [corpus]
//! id = 1838
//! year = 1838
//! path = twist.txt
//! encoding = latin-1
//! ```
//!
//! `paths` takes a comma-separated list and `path` may repeat; both append.
//! Relative paths resolve against the manifest's directory. Recognised
//! encodings are `utf-8`, `latin-1` and `ascii`.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use langtree_core::Encoding;

use crate::error::{CliError, Stage};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusEntry {
    pub id: String,
    pub year: i64,
    pub paths: Vec<PathBuf>,
    pub encoding: Encoding,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manifest {
    pub path: PathBuf,
    pub corpora: Vec<CorpusEntry>,
}

#[derive(Default)]
struct Block {
    line: usize,
    id: Option<String>,
    year: Option<i64>,
    paths: Vec<PathBuf>,
    encoding: Option<Encoding>,
}

fn parse_encoding(value: &str, line: usize) -> Result<Encoding, String> {
    Encoding::from_name(value).ok_or_else(|| format!("line {line}: unknown encoding {value:?}"))
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(Stage::Manifest, path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let corpora = parse(&text, base)
            .map_err(|m| CliError::data(Stage::Manifest, format!("{}: {m}", path.display())))?;
        for c in &corpora {
            for p in &c.paths {
                if !p.is_file() {
                    return Err(CliError::data(
                        Stage::Manifest,
                        format!(
                            "{}: corpus {}: missing file {}",
                            path.display(),
                            c.id,
                            p.display()
                        ),
                    ));
                }
            }
        }
        Ok(Manifest {
            path: path.to_path_buf(),
            corpora,
        })
    }
}

/// Parses manifest text; relative paths are joined onto `base`.
pub fn parse(text: &str, base: &Path) -> Result<Vec<CorpusEntry>, String> {
    let mut default_encoding = Encoding::Utf8;
    let mut blocks: Vec<Block> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line == "[corpus]" {
            blocks.push(Block {
                line: line_no,
                ..Block::default()
            });
            continue;
        }
        if line.starts_with('[') {
            return Err(format!("line {line_no}: unknown section {line}"));
        }
        let (key, value) = line
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| format!("line {line_no}: expected key = value"))?;
        if value.is_empty() {
            return Err(format!("line {line_no}: empty value for {key}"));
        }
        let Some(block) = blocks.last_mut() else {
            match key {
                "encoding" => default_encoding = parse_encoding(value, line_no)?,
                _ => return Err(format!("line {line_no}: {key} outside a [corpus] block")),
            }
            continue;
        };
        match key {
            "id" if block.id.is_some() => return Err(format!("line {line_no}: repeated id")),
            "id" => block.id = Some(value.to_string()),
            "year" if block.year.is_some() => return Err(format!("line {line_no}: repeated year")),
            "year" => {
                block.year = Some(
                    value
                        .parse()
                        .map_err(|_| format!("line {line_no}: year {value:?} is not an integer"))?,
                )
            }
            "path" => block.paths.push(base.join(value)),
            "paths" => {
                for p in value.split(',').map(str::trim) {
                    if p.is_empty() {
                        return Err(format!("line {line_no}: empty entry in paths"));
                    }
                    block.paths.push(base.join(p));
                }
            }
            "encoding" => block.encoding = Some(parse_encoding(value, line_no)?),
            _ => return Err(format!("line {line_no}: unknown key {key}")),
        }
    }

    if blocks.is_empty() {
        return Err("no [corpus] blocks".into());
    }
    let mut seen = BTreeSet::new();
    blocks
        .into_iter()
        .map(|b| {
            let id =
                b.id.ok_or_else(|| format!("line {}: corpus block has no id", b.line))?;
            let year = b
                .year
                .ok_or_else(|| format!("line {}: corpus {id} has no year", b.line))?;
            if b.paths.is_empty() {
                return Err(format!("line {}: corpus {id} has no paths", b.line));
            }
            if !seen.insert(id.clone()) {
                return Err(format!("line {}: duplicate corpus id {id}", b.line));
            }
            Ok(CorpusEntry {
                id,
                year,
                paths: b.paths,
                encoding: b.encoding.unwrap_or(default_encoding),
            })
        })
        .collect()
}

/// Manifest text for corpora stored as `<id>.txt` next to the manifest.
pub fn render(entries: &[(String, i64, String)]) -> String {
    let mut out = String::from("encoding = utf-8\n");
    for (id, year, file) in entries {
        out.push_str(&format!(
            "\n[corpus]\nid = {id}\nyear = {year}\npath = {file}\n"
        ));
    }
    out
}
