use std::collections::HashMap;

use langtree_core::synth::{total_variation, word_name};
use langtree_core::{
    count_frequencies, generate, select_shared_vocab, tokenize, DriftModel, DriftSpec,
    SelectionRule, TokenizerConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn zipf_sample_recount_matches() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let words: Vec<String> = (0..400).map(word_name).collect();
    let weights: Vec<f64> = (1..=words.len()).map(|r| 1.0 / r as f64).collect();
    let total: f64 = weights.iter().sum();
    let mut expected: HashMap<&str, u64> = HashMap::new();
    let mut text = String::new();
    for n in 0..10_000 {
        let mut u = rng.random::<f64>() * total;
        let mut pick = words.len() - 1;
        for (i, w) in weights.iter().enumerate() {
            if u < *w {
                pick = i;
                break;
            }
            u -= w;
        }
        let word = words[pick].as_str();
        *expected.entry(word).or_default() += 1;
        text.push_str(if n % 3 == 0 { "\n" } else { ", " });
        text.push_str(&word.to_uppercase());
    }
    let table = count_frequencies(&tokenize(&text, &TokenizerConfig::default()));
    assert_eq!(table.total(), 10_000);
    assert_eq!(table.len(), expected.len());
    for (w, c) in &expected {
        assert_eq!(table.count(w), *c, "{w}");
    }
    let ranked = table.ranked();
    assert!(ranked
        .windows(2)
        .all(|p| p[0].1 > p[1].1 || (p[0].1 == p[1].1 && p[0].0 < p[1].0)));
}

fn unigram(text: &str, words: &[String]) -> Vec<f64> {
    let table = count_frequencies(&tokenize(text, &TokenizerConfig::default()));
    let total = table.total() as f64;
    words
        .iter()
        .map(|w| table.count(w) as f64 / total)
        .collect()
}

#[test]
fn sampled_unigram_drift_grows_with_year_gap() {
    let spec = DriftSpec {
        vocab_size: 300,
        timeline: vec![1800, 1850, 1900, 1950, 2000],
        tokens_per_corpus: 50_000,
        drift_rate: 1.0,
        seed: 21,
    };
    let model = DriftModel::new(spec.clone()).unwrap();
    let corpora = generate(&spec).unwrap();
    let dists: Vec<Vec<f64>> = corpora
        .iter()
        .map(|c| unigram(&c.text, model.words()))
        .collect();
    let from_first: Vec<f64> = (1..5)
        .map(|j| total_variation(&dists[0], &dists[j]))
        .collect();
    assert!(from_first.windows(2).all(|w| w[0] < w[1]), "{from_first:?}");
    let from_last: Vec<f64> = (0..4)
        .rev()
        .map(|j| total_variation(&dists[4], &dists[j]))
        .collect();
    assert!(from_last.windows(2).all(|w| w[0] < w[1]), "{from_last:?}");
}

#[test]
fn no_drift_gives_exchangeable_corpora() {
    let spec = DriftSpec {
        vocab_size: 100,
        timeline: vec![1, 2, 3, 4],
        tokens_per_corpus: 20_000,
        drift_rate: 0.0,
        seed: 4,
    };
    let model = DriftModel::new(spec.clone()).unwrap();
    let dists: Vec<Vec<f64>> = generate(&spec)
        .unwrap()
        .iter()
        .map(|c| unigram(&c.text, model.words()))
        .collect();
    let mut tvs = Vec::new();
    for i in 0..4 {
        for j in i + 1..4 {
            tvs.push(total_variation(&dists[i], &dists[j]));
        }
    }
    let (lo, hi) = tvs
        .iter()
        .fold((f64::MAX, 0.0f64), |(lo, hi), &t| (lo.min(t), hi.max(t)));
    assert!(hi < 0.05 && hi < 2.0 * lo, "{tvs:?}");
}

#[test]
fn head_words_satisfy_vocabulary_selection() {
    let spec = DriftSpec {
        vocab_size: 300,
        timeline: vec![1800, 1830, 1850, 1900, 1920],
        tokens_per_corpus: 3000,
        drift_rate: 1.0,
        seed: 2,
    };
    let tables: Vec<_> = generate(&spec)
        .unwrap()
        .iter()
        .map(|c| count_frequencies(&tokenize(&c.text, &TokenizerConfig::default())))
        .collect();
    let vocab = select_shared_vocab(&tables, 20, 5, SelectionRule::SumRank).unwrap();
    assert_eq!(vocab.k(), 20);
}
