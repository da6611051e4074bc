use langtree_core::geometry::{dot, norm, GeometryError};
use langtree_core::{
    combine, cosine_similarity, count_frequencies, distance_matrix, generate, matrix_delta,
    select_shared_vocab, tokenize, train_embedding, CombinedVector, DriftSpec, EmbeddingModel,
    SelectionRule, TokenizerConfig, TrainConfig,
};
use proptest::prelude::*;

fn model(id: &str, words: &[&str], vectors: &[Vec<f64>]) -> EmbeddingModel {
    let dim = vectors[0].len();
    let records = words
        .iter()
        .map(|w| w.to_string())
        .zip(vectors.iter().cloned())
        .collect();
    EmbeddingModel::from_parts(
        id,
        dim,
        records,
        TrainConfig {
            dim,
            ..TrainConfig::default()
        },
    )
    .unwrap()
}

fn vectors(k: usize, dim: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-2.0f64..2.0, dim), k)
}

const WORDS: [&str; 5] = ["and", "of", "the", "to", "was"];

fn vocab_for(models: &[&EmbeddingModel], k: usize) -> langtree_core::SharedVocabulary {
    let text: String = WORDS[..k]
        .iter()
        .map(|w| format!("{w} "))
        .collect::<String>()
        .repeat(5);
    let tables: Vec<_> = models
        .iter()
        .map(|_| count_frequencies(&tokenize(&text, &TokenizerConfig::default())))
        .collect();
    select_shared_vocab(&tables, k, 5, SelectionRule::SumRank).unwrap()
}

proptest! {
    #[test]
    fn cosine_recomposes_from_word_slices(a in vectors(5, 4), b in vectors(5, 4)) {
        let (ma, mb) = (model("a", &WORDS, &a), model("b", &WORDS, &b));
        let vocab = vocab_for(&[&ma, &mb], 5);
        let (ca, cb) = (combine(&ma, &vocab).unwrap(), combine(&mb, &vocab).unwrap());
        prop_assume!(norm(&ca.data) > 1e-3 && norm(&cb.data) > 1e-3);
        prop_assert_eq!(ca.data.len(), 5 * 4);
        let mut num = 0.0;
        let (mut na, mut nb) = (0.0, 0.0);
        for (i, w) in vocab.words().iter().enumerate() {
            prop_assert_eq!(ca.slice(i), ma.lookup(w).unwrap());
            num += dot(ca.slice(i), cb.slice(i));
            na += dot(ca.slice(i), ca.slice(i));
            nb += dot(cb.slice(i), cb.slice(i));
        }
        let recomposed = num / (na * nb).sqrt();
        let direct = cosine_similarity(&ca.data, &cb.data).unwrap();
        prop_assert!((recomposed - direct).abs() < 1e-12);
    }

    #[test]
    fn word_order_does_not_change_distances(
        a in vectors(5, 3), b in vectors(5, 3), c in vectors(5, 3),
        order in Just((0..5).collect::<Vec<usize>>()).prop_shuffle(),
    ) {
        let models = [model("a", &WORDS, &a), model("b", &WORDS, &b), model("c", &WORDS, &c)];
        let vocab = vocab_for(&models.iter().collect::<Vec<_>>(), 5);
        let shuffled = vocab.reordered(&order).unwrap();
        let build = |v: &langtree_core::SharedVocabulary| -> Vec<CombinedVector> {
            models.iter().map(|m| combine(m, v).unwrap()).collect()
        };
        let (x, y) = (build(&vocab), build(&shuffled));
        prop_assume!(x.iter().all(|c| norm(&c.data) > 1e-3));
        let dx = distance_matrix(&x, None).unwrap();
        let dy = distance_matrix(&y, None).unwrap();
        prop_assert!(matrix_delta(&dx, &dy).unwrap().max_abs < 1e-12);
    }

    #[test]
    fn distances_are_a_valid_matrix(vs in prop::collection::vec(vectors(3, 4), 2..6)) {
        let combined: Vec<CombinedVector> = vs
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let m = model(&format!("c{i}"), &WORDS[..3], v);
                combine(&m, &vocab_for(&[&m, &m], 3)).unwrap()
            })
            .collect();
        prop_assume!(combined.iter().all(|c| norm(&c.data) > 1e-3));
        let d = distance_matrix(&combined, None).unwrap();
        for i in 0..d.len() {
            prop_assert_eq!(d.get(i, i), 0.0);
            for j in 0..d.len() {
                prop_assert_eq!(d.get(i, j), d.get(j, i));
                prop_assert!((0.0..=2.0).contains(&d.get(i, j)));
            }
        }
    }
}

#[test]
fn identical_vectors_are_at_distance_zero() {
    let v = vec![vec![0.3, -1.2, 0.7], vec![2.0, 0.1, -0.4]];
    let (a, b) = (model("a", &WORDS[..2], &v), model("b", &WORDS[..2], &v));
    let vocab = vocab_for(&[&a, &b], 2);
    let d = distance_matrix(
        &[combine(&a, &vocab).unwrap(), combine(&b, &vocab).unwrap()],
        None,
    )
    .unwrap();
    assert_eq!(d.get(0, 1), 0.0);
}

#[test]
fn zero_corpus_vector_is_an_error() {
    let zero = model("z", &WORDS[..2], &[vec![0.0; 3], vec![0.0; 3]]);
    let other = model("o", &WORDS[..2], &[vec![1.0; 3], vec![0.5; 3]]);
    let vocab = vocab_for(&[&zero, &other], 2);
    let err = distance_matrix(
        &[
            combine(&zero, &vocab).unwrap(),
            combine(&other, &vocab).unwrap(),
        ],
        None,
    )
    .unwrap_err();
    assert!(
        matches!(err, GeometryError::ZeroNormCorpus { .. }),
        "{err:?}"
    );
}

#[test]
fn duplicate_corpus_merges_first_at_distance_zero() {
    let spec = DriftSpec {
        vocab_size: 60,
        timeline: vec![1900, 1950, 2000],
        tokens_per_corpus: 4000,
        drift_rate: 1.0,
        seed: 3,
    };
    let corpora = generate(&spec).unwrap();
    let cfg = TokenizerConfig::default();
    let mut streams: Vec<_> = corpora.iter().map(|c| tokenize(&c.text, &cfg)).collect();
    streams.push(tokenize(&corpora[1].text, &cfg));
    for (i, s) in streams.iter_mut().enumerate() {
        s.corpus_id = format!("c{i}");
    }
    let tables: Vec<_> = streams.iter().map(count_frequencies).collect();
    let train = TrainConfig {
        dim: 8,
        ..TrainConfig::default()
    };
    let vocab = select_shared_vocab(&tables, 10, train.min_count, SelectionRule::SumRank).unwrap();
    let combined: Vec<_> = streams
        .iter()
        .map(|s| combine(&train_embedding(s, &train).unwrap(), &vocab).unwrap())
        .collect();
    let d = distance_matrix(&combined, None).unwrap();
    assert_eq!(d.get(1, 3), 0.0);
    let tree = langtree_core::agglomerate(&d, langtree_core::Linkage::Complete).unwrap();
    let first = &tree.merges()[0];
    assert_eq!(first.height, 0.0);
    let mut pair = tree.members(langtree_core::NodeRef::Merge(0));
    pair.sort();
    assert_eq!(pair, [1, 3]);
}
