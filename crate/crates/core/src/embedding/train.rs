use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::sgns::{pair_coefficient, pair_loss, Label};
use super::{EmbeddingModel, TrainConfig, TrainError};
use crate::corpus::{count_frequencies, TokenStream};
use crate::seed::derive_seed;

const NOISE_POWER: f64 = 0.75;
const LR_FLOOR: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    /// Mean logistic loss per term, one entry per epoch (0 for an epoch with
    /// no pairs left after down-sampling).
    pub epoch_mean_loss: Vec<f64>,
    pub epoch_pairs: Vec<u64>,
    pub vocab_size: usize,
    pub train_tokens: usize,
}

pub fn train_embedding(
    stream: &TokenStream,
    config: &TrainConfig,
) -> Result<EmbeddingModel, TrainError> {
    train_embedding_with_report(stream, config).map(|(m, _)| m)
}

/// Unigram^0.75 noise distribution, sampled by inverse CDF.
struct NoiseTable {
    cumulative: Vec<f64>,
}

impl NoiseTable {
    fn new(counts: &[u64]) -> Self {
        let mut acc = 0.0;
        let cumulative = counts
            .iter()
            .map(|&c| {
                acc += libm::pow(c as f64, NOISE_POWER);
                acc
            })
            .collect();
        NoiseTable { cumulative }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> usize {
        let total = *self.cumulative.last().expect("non-empty vocabulary");
        let u = rng.random::<f64>() * total;
        self.cumulative
            .partition_point(|&c| c <= u)
            .min(self.cumulative.len() - 1)
    }
}

/// Probability of keeping one occurrence of a word with `count` occurrences
/// out of `total` (the word2vec down-sampling formula).
fn keep_probability(count: u64, total: usize, threshold: f64) -> f64 {
    if threshold <= 0.0 {
        return 1.0;
    }
    let scaled = threshold * total as f64;
    let c = count as f64;
    ((libm::sqrt(c / scaled) + 1.0) * scaled / c).min(1.0)
}

/// Trains skip-gram vectors over the words of `stream` that occur at least
/// `min_count` times.
#[allow(clippy::needless_range_loop)]
pub fn train_embedding_with_report(
    stream: &TokenStream,
    config: &TrainConfig,
) -> Result<(EmbeddingModel, TrainReport), TrainError> {
    config.validate()?;
    let table = count_frequencies(stream);
    let vocab: Vec<(&str, u64)> = table
        .ranked()
        .into_iter()
        .filter(|&(_, c)| c >= config.min_count)
        .collect();
    if vocab.is_empty() {
        return Err(TrainError::EmptyVocabulary);
    }
    let index: BTreeMap<&str, u32> = vocab
        .iter()
        .enumerate()
        .map(|(i, (w, _))| (*w, i as u32))
        .collect();
    let ids: Vec<u32> = stream
        .tokens()
        .iter()
        .filter_map(|t| index.get(t.as_str()).copied())
        .collect();
    let required = 2 * config.window + 1;
    if ids.len() < required {
        return Err(TrainError::StreamTooShort {
            tokens: ids.len(),
            required,
        });
    }

    let dim = config.dim;
    let n_words = vocab.len();
    let init_seed = derive_seed(config.seed, "init");
    let mut input = Vec::with_capacity(n_words * dim);
    for (word, _) in &vocab {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(init_seed, word));
        input.extend((0..dim).map(|_| (rng.random::<f64>() - 0.5) / dim as f64));
    }
    let mut output = vec![0.0f64; n_words * dim];

    let counts: Vec<u64> = vocab.iter().map(|&(_, c)| c).collect();
    let noise = NoiseTable::new(&counts);
    let keep: Vec<f64> = counts
        .iter()
        .map(|&c| keep_probability(c, ids.len(), config.subsample_threshold))
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, "sample"));
    let lr0 = config.initial_learning_rate;
    let total_work = (config.epochs * ids.len()) as f64;
    let mut neu1e = vec![0.0f64; dim];
    let mut kept: Vec<(usize, usize)> = Vec::with_capacity(ids.len());
    let mut report = TrainReport {
        epoch_mean_loss: Vec::with_capacity(config.epochs),
        epoch_pairs: Vec::with_capacity(config.epochs),
        vocab_size: n_words,
        train_tokens: ids.len(),
    };

    for epoch in 0..config.epochs {
        kept.clear();
        for (pos, &w) in ids.iter().enumerate() {
            let p = keep[w as usize];
            if p >= 1.0 || rng.random::<f64>() < p {
                kept.push((w as usize, pos));
            }
        }

        let mut loss_sum = 0.0f64;
        let mut terms = 0u64;
        let mut step = 0u64;
        for p in 0..kept.len() {
            let (center, pos) = kept[p];
            let progress = (epoch * ids.len() + pos) as f64 / total_work;
            let lr = (lr0 * (1.0 - progress)).max(lr0 * LR_FLOOR);
            let reach = config.window - rng.random_range(0..config.window);
            let lo = p.saturating_sub(reach);
            let hi = (p + reach).min(kept.len() - 1);

            for q in lo..=hi {
                if q == p {
                    continue;
                }
                let context = kept[q].0;
                neu1e.fill(0.0);
                let c_vec = &input[center * dim..(center + 1) * dim];
                for s in 0..=config.negative_samples {
                    let (target, label) = if s == 0 {
                        (context, Label::Observed)
                    } else {
                        let t = noise.sample(&mut rng);
                        if t == context {
                            continue;
                        }
                        (t, Label::Noise)
                    };
                    let o_vec = &mut output[target * dim..(target + 1) * dim];
                    let x: f64 = c_vec.iter().zip(o_vec.iter()).map(|(a, b)| a * b).sum();
                    loss_sum += pair_loss(x, label);
                    terms += 1;
                    let g = pair_coefficient(x, label) * lr;
                    for ((e, o), c) in neu1e.iter_mut().zip(o_vec.iter_mut()).zip(c_vec) {
                        *e += g * *o;
                        *o += g * c;
                    }
                }
                for (v, e) in input[center * dim..(center + 1) * dim]
                    .iter_mut()
                    .zip(&neu1e)
                {
                    *v += e;
                }
                if !loss_sum.is_finite() {
                    return Err(TrainError::NonFiniteLoss { epoch, step });
                }
                step += 1;
            }
        }
        report.epoch_mean_loss.push(if terms == 0 {
            0.0
        } else {
            loss_sum / terms as f64
        });
        report.epoch_pairs.push(step);
    }

    if !input.iter().all(|v| v.is_finite()) {
        return Err(TrainError::NonFiniteLoss {
            epoch: config.epochs - 1,
            step: report.epoch_pairs.last().copied().unwrap_or(0),
        });
    }

    let records: Vec<(String, Vec<f64>)> = vocab
        .iter()
        .zip(input.chunks_exact(dim))
        .map(|((w, _), v)| (String::from(*w), v.to_vec()))
        .collect();
    let model = EmbeddingModel::from_parts(stream.corpus_id.clone(), dim, records, config.clone())
        .expect("trained vectors are finite and well-formed");
    Ok((model, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn stream(words: &[&str]) -> TokenStream {
        TokenStream::from_tokens("t", words.iter().map(|w| w.to_string()).collect()).unwrap()
    }

    #[test]
    fn keep_probability_matches_formula() {
        assert_eq!(keep_probability(10, 100, 0.0), 1.0);
        // count/total = 0.5, threshold 1e-3: sqrt(1e-3/0.5)+1e-3/0.5
        let p = keep_probability(500, 1000, 1e-3);
        let expected = (1e-3f64 / 0.5).sqrt() + 1e-3 / 0.5;
        assert!((p - expected).abs() < 1e-15);
        assert_eq!(keep_probability(1, 1_000_000, 1e-3), 1.0);
    }

    #[test]
    fn noise_table_follows_powered_counts() {
        let table = NoiseTable::new(&[16, 1]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 40_000;
        let hits = (0..n).filter(|_| table.sample(&mut rng) == 0).count();
        let expected = 8.0 / 9.0; // 16^0.75 = 8
        assert!(((hits as f64 / n as f64) - expected).abs() < 0.01);
    }

    #[test]
    fn short_stream_is_rejected() {
        let cfg = TrainConfig {
            dim: 4,
            window: 3,
            min_count: 1,
            ..TrainConfig::default()
        };
        let err = train_embedding(&stream(&["a", "b", "a", "b"]), &cfg).unwrap_err();
        assert_eq!(
            err,
            TrainError::StreamTooShort {
                tokens: 4,
                required: 7
            }
        );
    }

    #[test]
    fn min_count_filter_applies_before_length_check() {
        let cfg = TrainConfig {
            dim: 4,
            window: 1,
            min_count: 2,
            ..TrainConfig::default()
        };
        // only "a" survives, twice
        let err = train_embedding(&stream(&["a", "b", "c", "a", "d"]), &cfg).unwrap_err();
        assert_eq!(
            err,
            TrainError::StreamTooShort {
                tokens: 2,
                required: 3
            }
        );
        let err = train_embedding(&stream(&["a", "b", "c"]), &cfg).unwrap_err();
        assert_eq!(err, TrainError::EmptyVocabulary);
    }

    #[test]
    fn invalid_config_is_rejected() {
        let cfg = TrainConfig {
            dim: 0,
            ..TrainConfig::default()
        };
        assert_eq!(
            train_embedding(&stream(&["a"]), &cfg).unwrap_err(),
            TrainError::InvalidConfig { field: "dim" }
        );
    }

    #[test]
    fn vocabulary_is_min_count_filtered_and_ranked() {
        let words: Vec<&str> = ["x", "y", "y", "z", "z", "z"]
            .iter()
            .copied()
            .cycle()
            .take(60)
            .collect();
        let cfg = TrainConfig {
            dim: 3,
            window: 2,
            min_count: 15,
            ..TrainConfig::default()
        };
        let model = train_embedding(&stream(&words), &cfg).unwrap();
        assert_eq!(model.words(), ["z", "y"]);
        assert_eq!(model.lookup("z").unwrap().len(), 3);
        assert!(model.lookup("x").is_none());
    }
}
