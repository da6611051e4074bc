//! Selection of the high-frequency words shared by every corpus.
//!
//! The selected list fixes the slice order of every combined vector, so the
//! ranking is total: ties always fall back to ascending lexicographic order.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Reverse;
use core::fmt;

use crate::corpus::FrequencyTable;

/// How shared words are ranked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum SelectionRule {
    /// Descending total count summed over all corpora.
    #[default]
    SumRank,
    /// Ascending worst per-corpus frequency rank.
    MinRank,
}

impl SelectionRule {
    pub fn name(self) -> &'static str {
        match self {
            SelectionRule::SumRank => "sum-rank",
            SelectionRule::MinRank => "min-rank",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SharedVocabulary {
    words: Vec<String>,
    pub min_count: u64,
    pub rule: SelectionRule,
}

impl SharedVocabulary {
    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn k(&self) -> usize {
        self.words.len()
    }

    /// The same vocabulary with its words in a different order. Used to
    /// check that slice order does not affect corpus distances.
    pub fn reordered(&self, order: &[usize]) -> Option<Self> {
        if order.len() != self.words.len() {
            return None;
        }
        let mut seen = alloc::vec![false; order.len()];
        for &i in order {
            if i >= order.len() || core::mem::replace(&mut seen[i], true) {
                return None;
            }
        }
        Some(SharedVocabulary {
            words: order.iter().map(|&i| self.words[i].clone()).collect(),
            ..self.clone()
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VocabError {
    TooFewTables { found: usize },
    ZeroK,
    ZeroMinCount,
    InsufficientShared { requested: usize, available: usize },
}

impl core::error::Error for VocabError {}

impl fmt::Display for VocabError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VocabError::TooFewTables { found } => {
                write!(f, "need at least 2 frequency tables, got {found}")
            }
            VocabError::ZeroK => f.write_str("k must be at least 1"),
            VocabError::ZeroMinCount => f.write_str("min_count must be at least 1"),
            VocabError::InsufficientShared {
                requested,
                available,
            } => write!(f, "only {available} shared words (requested {requested})"),
        }
    }
}

/// Competition rank of every count: 1 + number of strictly larger counts.
fn competition_rank(sorted_desc: &[u64], count: u64) -> usize {
    1 + sorted_desc.partition_point(|&c| c > count)
}

/// Picks the top `k` words present in every table with at least `min_count`
/// occurrences each.
pub fn select_shared_vocab(
    tables: &[FrequencyTable],
    k: usize,
    min_count: u64,
    rule: SelectionRule,
) -> Result<SharedVocabulary, VocabError> {
    if tables.len() < 2 {
        return Err(VocabError::TooFewTables {
            found: tables.len(),
        });
    }
    if k == 0 {
        return Err(VocabError::ZeroK);
    }
    if min_count == 0 {
        return Err(VocabError::ZeroMinCount);
    }

    let shared: Vec<&str> = tables[0]
        .counts()
        .keys()
        .map(String::as_str)
        .filter(|w| tables.iter().all(|t| t.count(w) >= min_count))
        .collect();
    if shared.len() < k {
        return Err(VocabError::InsufficientShared {
            requested: k,
            available: shared.len(),
        });
    }

    let mut ranked: Vec<(u64, &str)> = match rule {
        SelectionRule::SumRank => shared
            .iter()
            .map(|w| (tables.iter().map(|t| t.count(w)).sum::<u64>(), *w))
            .collect(),
        SelectionRule::MinRank => {
            let sorted: Vec<Vec<u64>> = tables
                .iter()
                .map(|t| {
                    let mut c: Vec<u64> = t.counts().values().copied().collect();
                    c.sort_unstable_by_key(|&c| Reverse(c));
                    c
                })
                .collect();
            // Negated so both rules sort descending on the score.
            shared
                .iter()
                .map(|w| {
                    let worst = tables
                        .iter()
                        .zip(&sorted)
                        .map(|(t, s)| competition_rank(s, t.count(w)))
                        .max()
                        .unwrap_or(0);
                    (u64::MAX - worst as u64, *w)
                })
                .collect()
        }
    };
    ranked.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(b.1)));

    Ok(SharedVocabulary {
        words: ranked.into_iter().take(k).map(|(_, w)| w.into()).collect(),
        min_count,
        rule,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{count_frequencies, TokenStream};
    use alloc::string::ToString;
    use alloc::vec;
    use proptest::prelude::*;

    fn table(id: &str, counts: &[(&str, usize)]) -> FrequencyTable {
        let mut tokens = Vec::new();
        for (w, c) in counts {
            tokens.extend(core::iter::repeat_n(w.to_string(), *c));
        }
        count_frequencies(&TokenStream::from_tokens(id, tokens).unwrap())
    }

    fn hand_tables() -> Vec<FrequencyTable> {
        vec![
            table("A", &[("the", 10), ("cat", 5), ("dog", 1)]),
            table("B", &[("the", 8), ("cat", 2), ("fox", 7)]),
        ]
    }

    #[test]
    fn hand_example_sum_rank() {
        let v = select_shared_vocab(&hand_tables(), 2, 1, SelectionRule::SumRank).unwrap();
        assert_eq!(v.words(), ["the", "cat"]);
    }

    #[test]
    fn hand_example_insufficient() {
        let err = select_shared_vocab(&hand_tables(), 3, 1, SelectionRule::SumRank).unwrap_err();
        assert_eq!(
            err,
            VocabError::InsufficientShared {
                requested: 3,
                available: 2
            }
        );
        assert!(err.to_string().contains("only 2 shared words"));
    }

    #[test]
    fn min_count_filters_per_corpus() {
        let err = select_shared_vocab(&hand_tables(), 2, 3, SelectionRule::SumRank).unwrap_err();
        assert_eq!(
            err,
            VocabError::InsufficientShared {
                requested: 2,
                available: 1
            }
        );
    }

    #[test]
    fn rejects_degenerate_arguments() {
        let t = hand_tables();
        assert_eq!(
            select_shared_vocab(&t[..1], 1, 1, SelectionRule::SumRank),
            Err(VocabError::TooFewTables { found: 1 })
        );
        assert_eq!(
            select_shared_vocab(&t, 0, 1, SelectionRule::SumRank),
            Err(VocabError::ZeroK)
        );
        assert_eq!(
            select_shared_vocab(&t, 1, 0, SelectionRule::SumRank),
            Err(VocabError::ZeroMinCount)
        );
    }

    #[test]
    fn min_rank_prefers_consistently_frequent_words() {
        // "x" is huge in A but rare in B; "y" is middling in both.
        let tables = vec![
            table("A", &[("x", 100), ("y", 10), ("z", 5)]),
            table("B", &[("x", 1), ("y", 10), ("z", 20)]),
        ];
        let sum = select_shared_vocab(&tables, 3, 1, SelectionRule::SumRank).unwrap();
        assert_eq!(sum.words(), ["x", "z", "y"]);
        // worst ranks: x=3, y=2, z=3 -> y first, then x/z tie broken lexicographically
        let min = select_shared_vocab(&tables, 3, 1, SelectionRule::MinRank).unwrap();
        assert_eq!(min.words(), ["y", "x", "z"]);
    }

    #[test]
    fn ties_break_lexicographically() {
        let tables = vec![
            table("A", &[("b", 2), ("a", 2), ("c", 2)]),
            table("B", &[("c", 2), ("b", 2), ("a", 2)]),
        ];
        for rule in [SelectionRule::SumRank, SelectionRule::MinRank] {
            let v = select_shared_vocab(&tables, 3, 1, rule).unwrap();
            assert_eq!(v.words(), ["a", "b", "c"]);
        }
    }

    #[test]
    fn reordered_checks_permutation() {
        let v = select_shared_vocab(&hand_tables(), 2, 1, SelectionRule::SumRank).unwrap();
        assert_eq!(v.reordered(&[1, 0]).unwrap().words(), ["cat", "the"]);
        assert!(v.reordered(&[0, 0]).is_none());
        assert!(v.reordered(&[0]).is_none());
    }

    fn tables_strategy() -> impl Strategy<Value = Vec<FrequencyTable>> {
        let words = ["a", "b", "c", "d", "e", "f", "g", "h"];
        proptest::collection::vec(proptest::collection::vec(0usize..6, words.len()), 2..5).prop_map(
            move |rows| {
                rows.iter()
                    .enumerate()
                    .map(|(i, counts)| {
                        let pairs: Vec<(&str, usize)> =
                            words.iter().copied().zip(counts.iter().copied()).collect();
                        table(&i.to_string(), &pairs)
                    })
                    .collect()
            },
        )
    }

    proptest! {
        #[test]
        fn selection_invariants(tables in tables_strategy(), min_count in 1u64..3, rot in 0usize..5) {
            for rule in [SelectionRule::SumRank, SelectionRule::MinRank] {
                let full = select_shared_vocab(&tables, 1, min_count, rule);
                let Ok(_) = full else { continue };
                let available = tables[0].counts().keys()
                    .filter(|w| tables.iter().all(|t| t.count(w) >= min_count)).count();
                let all = select_shared_vocab(&tables, available, min_count, rule).unwrap();
                for w in all.words() {
                    for t in &tables {
                        prop_assert!(t.count(w) >= min_count);
                    }
                }
                for k in 1..=available {
                    let v = select_shared_vocab(&tables, k, min_count, rule).unwrap();
                    prop_assert_eq!(v.words(), &all.words()[..k]);
                }
                let mut rotated = tables.clone();
                rotated.rotate_left(rot % tables.len());
                let again = select_shared_vocab(&rotated, available, min_count, rule).unwrap();
                prop_assert_eq!(again.words(), all.words());
            }
        }
    }
}
