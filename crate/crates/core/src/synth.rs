//! Seeded synthetic corpora whose bigram statistics drift over a timeline.
//!
//! Every corpus is sampled from a bigram chain over one shared vocabulary.
//! The chain at time `t` is the row-wise mixture
//! `(1 - f) * START + f * END` with `f = drift_rate * (t - t0) / (t_last - t0)`,
//! so any divergence between two time points grows linearly with their gap.
//! Both end-point matrices weight word `j` by a Zipf(1) prior and a
//! log-normal word factor, and score each (previous, next) pair through a
//! few latent factors of decreasing strength. The prior keeps the frequent
//! head stable; the latent factors give contexts a learnable structure.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::seed::derive_seed;

pub const MIN_VOCAB: usize = 50;
pub const TOKENS_PER_WORD: usize = 10;
/// Spread of the per-word popularity factor in each end-point matrix.
const WORD_SIGMA: f64 = 0.3;
/// Strength of each latent factor linking a word to its successor.
const LATENT_SCALES: [f64; 4] = [1.2, 0.9, 0.6, 0.4];
const TOKENS_PER_LINE: usize = 12;
const SYLLABLES: [&str; 10] = ["ka", "lo", "mi", "nu", "pe", "ra", "si", "to", "vu", "ze"];

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DriftSpec {
    pub vocab_size: usize,
    pub timeline: Vec<i64>,
    pub tokens_per_corpus: usize,
    pub drift_rate: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthCorpus {
    pub id: String,
    pub year: i64,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SynthError {
    VocabTooSmall { vocab_size: usize },
    TooFewTokens { tokens: usize, required: usize },
    EmptyTimeline,
    TimelineNotIncreasing { index: usize },
    DriftRate { value: f64 },
}

impl core::error::Error for SynthError {}

impl fmt::Display for SynthError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SynthError::VocabTooSmall { vocab_size } => {
                write!(
                    f,
                    "vocab_size {vocab_size} is below the minimum of {MIN_VOCAB}"
                )
            }
            SynthError::TooFewTokens { tokens, required } => {
                write!(
                    f,
                    "tokens_per_corpus {tokens} is below 10 x vocab_size = {required}"
                )
            }
            SynthError::EmptyTimeline => f.write_str("timeline is empty"),
            SynthError::TimelineNotIncreasing { index } => {
                write!(f, "timeline is not strictly increasing at position {index}")
            }
            SynthError::DriftRate { value } => write!(f, "drift_rate {value} is outside [0, 1]"),
        }
    }
}

/// Pronounceable, letter-only name for word `i`; distinct for distinct `i`.
pub fn word_name(i: usize) -> String {
    let digits = format!("{i:02}");
    digits
        .bytes()
        .map(|d| SYLLABLES[usize::from(d - b'0')])
        .collect()
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; 1 - u keeps the log argument in (0, 1].
    let u1 = 1.0 - rng.random::<f64>();
    let u2 = rng.random::<f64>();
    libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(core::f64::consts::TAU * u2)
}

fn endpoint_matrix(zipf: &[f64], seed: u64) -> Vec<f64> {
    let v = zipf.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let word: Vec<f64> = (0..v)
        .map(|_| libm::exp(WORD_SIGMA * standard_normal(&mut rng)))
        .collect();
    let r = LATENT_SCALES.len();
    let mut latent = || -> Vec<f64> { (0..v * r).map(|_| standard_normal(&mut rng)).collect() };
    let (prev, next) = (latent(), latent());
    let mut m = Vec::with_capacity(v * v);
    for i in 0..v {
        let row_start = m.len();
        for j in 0..v {
            let logit: f64 = (0..r)
                .map(|f| LATENT_SCALES[f] * prev[i * r + f] * next[j * r + f])
                .sum();
            m.push(zipf[j] * word[j] * libm::exp(logit));
        }
        let total: f64 = m[row_start..].iter().sum();
        for x in &mut m[row_start..] {
            *x /= total;
        }
    }
    m
}

/// Total variation distance between two discrete distributions.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

#[derive(Debug, Clone)]
pub struct DriftModel {
    spec: DriftSpec,
    words: Vec<String>,
    zipf: Vec<f64>,
    start: Vec<f64>,
    end: Vec<f64>,
}

impl DriftModel {
    pub fn new(spec: DriftSpec) -> Result<Self, SynthError> {
        if spec.vocab_size < MIN_VOCAB {
            return Err(SynthError::VocabTooSmall {
                vocab_size: spec.vocab_size,
            });
        }
        let required = TOKENS_PER_WORD * spec.vocab_size;
        if spec.tokens_per_corpus < required {
            return Err(SynthError::TooFewTokens {
                tokens: spec.tokens_per_corpus,
                required,
            });
        }
        if spec.timeline.is_empty() {
            return Err(SynthError::EmptyTimeline);
        }
        if let Some(index) =
            (1..spec.timeline.len()).find(|&i| spec.timeline[i] <= spec.timeline[i - 1])
        {
            return Err(SynthError::TimelineNotIncreasing { index });
        }
        if !(0.0..=1.0).contains(&spec.drift_rate) {
            return Err(SynthError::DriftRate {
                value: spec.drift_rate,
            });
        }
        let v = spec.vocab_size;
        let zipf: Vec<f64> = (0..v).map(|i| 1.0 / (i + 1) as f64).collect();
        let start = endpoint_matrix(&zipf, derive_seed(spec.seed, "start"));
        let end = endpoint_matrix(&zipf, derive_seed(spec.seed, "end"));
        Ok(DriftModel {
            words: (0..v).map(word_name).collect(),
            spec,
            zipf,
            start,
            end,
        })
    }

    pub fn spec(&self) -> &DriftSpec {
        &self.spec
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    /// Weight of the end matrix at timeline position `index`.
    pub fn mix_fraction(&self, index: usize) -> f64 {
        let t = &self.spec.timeline;
        let (first, last) = (t[0], t[t.len() - 1]);
        if last == first {
            return 0.0;
        }
        self.spec.drift_rate * (t[index] - first) as f64 / (last - first) as f64
    }

    /// Row-stochastic `V x V` transition matrix at timeline position `index`.
    pub fn transition(&self, index: usize) -> Vec<f64> {
        let f = self.mix_fraction(index);
        self.start
            .iter()
            .zip(&self.end)
            .map(|(a, b)| (1.0 - f) * a + f * b)
            .collect()
    }

    /// Mean total-variation distance between matching rows of the chains at
    /// two timeline positions.
    pub fn transition_divergence(&self, a: usize, b: usize) -> f64 {
        let v = self.spec.vocab_size;
        let (ta, tb) = (self.transition(a), self.transition(b));
        (0..v)
            .map(|i| total_variation(&ta[i * v..(i + 1) * v], &tb[i * v..(i + 1) * v]))
            .sum::<f64>()
            / v as f64
    }

    /// Samples the corpus at timeline position `index`.
    pub fn sample(&self, index: usize) -> SynthCorpus {
        let v = self.spec.vocab_size;
        let year = self.spec.timeline[index];
        let id = year.to_string();
        let mut cumulative = self.transition(index);
        for row in cumulative.chunks_exact_mut(v) {
            let mut acc = 0.0;
            for x in row.iter_mut() {
                acc += *x;
                *x = acc;
            }
        }
        let mut zipf_cdf = self.zipf.clone();
        let mut acc = 0.0;
        for x in &mut zipf_cdf {
            acc += *x;
            *x = acc;
        }

        let draw = |cdf: &[f64], rng: &mut ChaCha8Rng| {
            let u = rng.random::<f64>() * cdf[cdf.len() - 1];
            cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
        };

        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(self.spec.seed, &id));
        let mut text = String::new();
        let mut word = draw(&zipf_cdf, &mut rng);
        for n in 0..self.spec.tokens_per_corpus {
            if n > 0 {
                text.push(if n % TOKENS_PER_LINE == 0 { '\n' } else { ' ' });
                word = draw(&cumulative[word * v..(word + 1) * v], &mut rng);
            }
            text.push_str(&self.words[word]);
        }
        text.push('\n');
        SynthCorpus { id, year, text }
    }
}

/// One corpus per timeline point, labelled by its year.
pub fn generate(spec: &DriftSpec) -> Result<Vec<SynthCorpus>, SynthError> {
    let model = DriftModel::new(spec.clone())?;
    Ok((0..spec.timeline.len()).map(|i| model.sample(i)).collect())
}
