//! Tokenization and word counting.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

/// Text encodings accepted for corpus files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Encoding {
    #[default]
    Utf8,
    /// ISO-8859-1; every byte maps to the code point of the same value.
    Latin1,
    /// 7-bit ASCII; any byte above 0x7f is an error.
    Ascii,
}

impl Encoding {
    pub fn name(self) -> &'static str {
        match self {
            Encoding::Utf8 => "utf-8",
            Encoding::Latin1 => "latin-1",
            Encoding::Ascii => "ascii",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name.trim().to_ascii_lowercase().as_str() {
            "utf-8" | "utf8" => Some(Encoding::Utf8),
            "latin-1" | "latin1" | "iso-8859-1" => Some(Encoding::Latin1),
            "ascii" | "us-ascii" => Some(Encoding::Ascii),
            _ => None,
        }
    }
}

impl fmt::Display for Encoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecodeError {
    pub encoding: Encoding,
    /// Offset of the first byte that could not be decoded.
    pub offset: usize,
}

impl core::error::Error for DecodeError {}

impl fmt::Display for DecodeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "invalid {} input at byte offset {}",
            self.encoding, self.offset
        )
    }
}

/// Decodes raw bytes. Undecodable input is an error, never replaced.
/// A leading UTF-8 byte-order mark is dropped.
pub fn decode(bytes: &[u8], encoding: Encoding) -> Result<String, DecodeError> {
    match encoding {
        Encoding::Utf8 => {
            let body = bytes.strip_prefix(b"\xef\xbb\xbf").unwrap_or(bytes);
            let skipped = bytes.len() - body.len();
            core::str::from_utf8(body)
                .map(ToString::to_string)
                .map_err(|e| DecodeError {
                    encoding,
                    offset: skipped + e.valid_up_to(),
                })
        }
        Encoding::Latin1 => Ok(bytes.iter().map(|&b| char::from(b)).collect()),
        Encoding::Ascii => match bytes.iter().position(|b| !b.is_ascii()) {
            Some(offset) => Err(DecodeError { encoding, offset }),
            None => Ok(bytes.iter().map(|&b| char::from(b)).collect()),
        },
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizerConfig {
    /// Keep apostrophes that sit between two letters (`don't`).
    pub keep_apostrophes: bool,
    /// Lowercase words dropped after tokenization. Empty by default.
    pub stopwords: BTreeSet<String>,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        TokenizerConfig {
            keep_apostrophes: true,
            stopwords: BTreeSet::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenError {
    EmptyToken { position: usize },
    Whitespace { position: usize },
}

impl core::error::Error for TokenError {}

impl fmt::Display for TokenError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenError::EmptyToken { position } => write!(f, "token {position} is empty"),
            TokenError::Whitespace { position } => {
                write!(f, "token {position} contains whitespace")
            }
        }
    }
}

/// The normalized token sequence of one corpus.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TokenStream {
    pub corpus_id: String,
    tokens: Vec<String>,
}

impl TokenStream {
    pub fn new(corpus_id: impl Into<String>) -> Self {
        TokenStream {
            corpus_id: corpus_id.into(),
            tokens: Vec::new(),
        }
    }

    /// Wraps pre-split tokens, rejecting empty tokens and tokens with whitespace.
    pub fn from_tokens(
        corpus_id: impl Into<String>,
        tokens: Vec<String>,
    ) -> Result<Self, TokenError> {
        for (position, t) in tokens.iter().enumerate() {
            if t.is_empty() {
                return Err(TokenError::EmptyToken { position });
            }
            if t.chars().any(char::is_whitespace) {
                return Err(TokenError::Whitespace { position });
            }
        }
        Ok(TokenStream {
            corpus_id: corpus_id.into(),
            tokens,
        })
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn token_count(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Appends the tokens of another text to this stream. Used to build one
    /// stream from several files of the same corpus.
    pub fn push_text(&mut self, raw_text: &str, config: &TokenizerConfig) {
        tokenize_into(raw_text, config, &mut self.tokens);
    }
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

fn tokenize_into(raw_text: &str, config: &TokenizerConfig, out: &mut Vec<String>) {
    let mut current = String::new();
    let flush = |current: &mut String, out: &mut Vec<String>| {
        if !current.is_empty() {
            if !config.stopwords.contains(current.as_str()) {
                out.push(core::mem::take(current));
            } else {
                current.clear();
            }
        }
    };

    let mut chars = raw_text.chars().peekable();
    while let Some(c) = chars.next() {
        if c.is_alphabetic() {
            current.extend(c.to_lowercase());
        } else if config.keep_apostrophes
            && is_apostrophe(c)
            && !current.is_empty()
            && !current.ends_with('\'')
            && chars.peek().is_some_and(|n| n.is_alphabetic())
        {
            current.push('\'');
        } else {
            flush(&mut current, out);
        }
    }
    flush(&mut current, out);
}

/// Splits text into lowercase letter runs. Digits, punctuation, hyphens and
/// whitespace all separate tokens; an apostrophe survives only between two
/// letters when `keep_apostrophes` is set (`’` is folded to `'`).
pub fn tokenize(raw_text: &str, config: &TokenizerConfig) -> TokenStream {
    let mut stream = TokenStream::default();
    stream.push_text(raw_text, config);
    stream
}

/// Word counts of one corpus.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FrequencyTable {
    pub corpus_id: String,
    counts: BTreeMap<String, u64>,
    total: u64,
}

impl FrequencyTable {
    pub fn counts(&self) -> &BTreeMap<String, u64> {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn count(&self, word: &str) -> u64 {
        self.counts.get(word).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Words by descending count, ties in ascending lexicographic order.
    pub fn ranked(&self) -> Vec<(&str, u64)> {
        let mut words: Vec<(&str, u64)> =
            self.counts.iter().map(|(w, &c)| (w.as_str(), c)).collect();
        words.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        words
    }
}

pub fn count_frequencies(stream: &TokenStream) -> FrequencyTable {
    let mut counts = BTreeMap::new();
    for token in stream.tokens() {
        *counts.entry(token.clone()).or_insert(0u64) += 1;
    }
    FrequencyTable {
        corpus_id: stream.corpus_id.clone(),
        counts,
        total: stream.token_count() as u64,
    }
}
