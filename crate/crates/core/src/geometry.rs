//! Combined corpus vectors and the `1 - cosine` distance matrix.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::embedding::EmbeddingModel;
use crate::vocab::SharedVocabulary;

/// Largest tolerated `|d[i][j] - d[j][i]|`.
pub const SYMMETRY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum GeometryError {
    MissingWord {
        corpus_id: String,
        word: String,
    },
    LengthMismatch {
        left: usize,
        right: usize,
    },
    ZeroNorm,
    ZeroNormCorpus {
        corpus_id: String,
    },
    TooFewCorpora {
        found: usize,
    },
    YearCount {
        expected: usize,
        found: usize,
    },
    Shape {
        labels: usize,
        values: usize,
    },
    DuplicateLabel {
        label: String,
    },
    NonZeroDiagonal {
        label: String,
        value: f64,
    },
    Asymmetric {
        row: String,
        col: String,
        diff: f64,
    },
    OutOfRange {
        row: String,
        col: String,
        value: f64,
    },
    LabelMismatch,
}

impl core::error::Error for GeometryError {}

impl fmt::Display for GeometryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use GeometryError::*;
        match self {
            MissingWord { corpus_id, word } => {
                write!(f, "corpus {corpus_id:?} has no vector for {word:?}")
            }
            LengthMismatch { left, right } => {
                write!(f, "vector lengths differ ({left} vs {right})")
            }
            ZeroNorm => f.write_str("cosine of a zero vector is undefined"),
            ZeroNormCorpus { corpus_id } => {
                write!(f, "combined vector of corpus {corpus_id:?} is zero")
            }
            TooFewCorpora { found } => write!(f, "need at least 2 corpora, got {found}"),
            YearCount { expected, found } => {
                write!(f, "expected {expected} years, got {found}")
            }
            Shape { labels, values } => {
                write!(f, "{labels} labels do not fit {values} matrix values")
            }
            DuplicateLabel { label } => write!(f, "label {label:?} appears twice"),
            NonZeroDiagonal { label, value } => {
                write!(f, "diagonal entry for {label:?} is {value}, expected 0")
            }
            Asymmetric { row, col, diff } => {
                write!(
                    f,
                    "entries ({row},{col}) and ({col},{row}) differ by {diff}"
                )
            }
            OutOfRange { row, col, value } => {
                write!(f, "entry ({row},{col}) = {value} outside [0, 2]")
            }
            LabelMismatch => f.write_str("matrices have different labels"),
        }
    }
}

/// Concatenation of one corpus's vectors for the shared words, in vocabulary order.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinedVector {
    pub corpus_id: String,
    pub data: Vec<f64>,
    pub k: usize,
    pub dim: usize,
    pub words: Vec<String>,
}

impl CombinedVector {
    pub fn slice(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CombineOptions {
    /// Scale every word vector to unit length before concatenating. Off by
    /// default; plain concatenation is the reference method.
    pub normalize_words: bool,
}

pub fn combine(
    model: &EmbeddingModel,
    vocab: &SharedVocabulary,
) -> Result<CombinedVector, GeometryError> {
    combine_with(model, vocab, CombineOptions::default())
}

pub fn combine_with(
    model: &EmbeddingModel,
    vocab: &SharedVocabulary,
    options: CombineOptions,
) -> Result<CombinedVector, GeometryError> {
    let dim = model.dim();
    let mut data = Vec::with_capacity(vocab.k() * dim);
    for word in vocab.words() {
        let v = model
            .lookup(word)
            .ok_or_else(|| GeometryError::MissingWord {
                corpus_id: model.corpus_id.clone(),
                word: word.clone(),
            })?;
        let n = norm(v);
        if options.normalize_words && n > 0.0 {
            data.extend(v.iter().map(|x| x / n));
        } else {
            data.extend_from_slice(v);
        }
    }
    Ok(CombinedVector {
        corpus_id: model.corpus_id.clone(),
        data,
        k: vocab.k(),
        dim,
        words: vocab.words().to_vec(),
    })
}

pub fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

pub fn norm(u: &[f64]) -> f64 {
    libm::sqrt(dot(u, u))
}

/// `u·v / (|u| |v|)`, clamped to `[-1, 1]`.
pub fn cosine_similarity(u: &[f64], v: &[f64]) -> Result<f64, GeometryError> {
    if u.len() != v.len() {
        return Err(GeometryError::LengthMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    let (uu, vv) = (dot(u, u), dot(v, v));
    if uu == 0.0 || vv == 0.0 {
        return Err(GeometryError::ZeroNorm);
    }
    // sqrt(uu * vv) rather than |u| |v|: identical inputs then give exactly 1.
    Ok((dot(u, v) / libm::sqrt(uu * vv)).clamp(-1.0, 1.0))
}

/// Symmetric corpus-by-corpus distances with an exactly zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    labels: Vec<String>,
    years: Option<Vec<i64>>,
    values: Vec<f64>,
}

impl DistanceMatrix {
    /// Validates and wraps a row-major `n × n` matrix.
    pub fn new(
        labels: Vec<String>,
        years: Option<Vec<i64>>,
        values: Vec<f64>,
    ) -> Result<Self, GeometryError> {
        let n = labels.len();
        if values.len() != n * n {
            return Err(GeometryError::Shape {
                labels: n,
                values: values.len(),
            });
        }
        if let Some(y) = &years {
            if y.len() != n {
                return Err(GeometryError::YearCount {
                    expected: n,
                    found: y.len(),
                });
            }
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(GeometryError::DuplicateLabel { label: l.clone() });
            }
        }
        for i in 0..n {
            let diag = values[i * n + i];
            if diag != 0.0 {
                return Err(GeometryError::NonZeroDiagonal {
                    label: labels[i].clone(),
                    value: diag,
                });
            }
            for j in 0..n {
                let v = values[i * n + j];
                if !(v.is_finite() && (0.0..=2.0).contains(&v)) {
                    return Err(GeometryError::OutOfRange {
                        row: labels[i].clone(),
                        col: labels[j].clone(),
                        value: v,
                    });
                }
                let diff = (v - values[j * n + i]).abs();
                if diff > SYMMETRY_TOLERANCE {
                    return Err(GeometryError::Asymmetric {
                        row: labels[i].clone(),
                        col: labels[j].clone(),
                        diff,
                    });
                }
            }
        }
        Ok(DistanceMatrix {
            labels,
            years,
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn years(&self) -> Option<&[i64]> {
        self.years.as_deref()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.labels.len() + j]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.labels.len();
        &self.values[i * n..(i + 1) * n]
    }

    /// Same matrix with rows and columns reordered: new index `a` holds old index `order[a]`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self, GeometryError> {
        let n = self.len();
        let mut values = Vec::with_capacity(n * n);
        for &i in order {
            for &j in order {
                values.push(self.get(i, j));
            }
        }
        DistanceMatrix::new(
            order.iter().map(|&i| self.labels[i].clone()).collect(),
            self.years
                .as_ref()
                .map(|y| order.iter().map(|&i| y[i]).collect()),
            values,
        )
    }
}

/// `d[i][j] = 1 - cos(v_i, v_j)`; the diagonal is set to 0, not computed.
pub fn distance_matrix(
    combined: &[CombinedVector],
    years: Option<Vec<i64>>,
) -> Result<DistanceMatrix, GeometryError> {
    let n = combined.len();
    if n < 2 {
        return Err(GeometryError::TooFewCorpora { found: n });
    }
    let len = combined[0].data.len();
    for c in combined {
        if c.data.len() != len {
            return Err(GeometryError::LengthMismatch {
                left: len,
                right: c.data.len(),
            });
        }
        if norm(&c.data) == 0.0 {
            return Err(GeometryError::ZeroNormCorpus {
                corpus_id: c.corpus_id.clone(),
            });
        }
    }
    let mut values = alloc::vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let d = 1.0 - cosine_similarity(&combined[i].data, &combined[j].data)?;
            values[i * n + j] = d;
            values[j * n + i] = d;
        }
    }
    DistanceMatrix::new(
        combined.iter().map(|c| c.corpus_id.clone()).collect(),
        years,
        values,
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MatrixDelta {
    pub max_abs: f64,
    pub mean_abs: f64,
}

/// Absolute-difference statistics over the off-diagonal cells `i < j`.
pub fn matrix_delta(a: &DistanceMatrix, b: &DistanceMatrix) -> Result<MatrixDelta, GeometryError> {
    if a.labels != b.labels {
        return Err(GeometryError::LabelMismatch);
    }
    let n = a.len();
    let mut max_abs = 0.0f64;
    let mut sum = 0.0;
    let mut cells = 0usize;
    for i in 0..n {
        for j in i + 1..n {
            let d = (a.get(i, j) - b.get(i, j)).abs();
            max_abs = max_abs.max(d);
            sum += d;
            cells += 1;
        }
    }
    Ok(MatrixDelta {
        max_abs,
        mean_abs: if cells == 0 { 0.0 } else { sum / cells as f64 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{count_frequencies, TokenStream};
    use crate::embedding::TrainConfig;
    use crate::vocab::{select_shared_vocab, SelectionRule};
    use alloc::string::ToString;
    use alloc::vec;
    use proptest::prelude::*;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| i.to_string()).collect()
    }

    fn model(id: &str, records: &[(&str, &[f64])]) -> EmbeddingModel {
        let dim = records[0].1.len();
        EmbeddingModel::from_parts(
            id,
            dim,
            records
                .iter()
                .map(|(w, v)| (w.to_string(), v.to_vec()))
                .collect(),
            TrainConfig::default(),
        )
        .unwrap()
    }

    fn vocab_ab() -> SharedVocabulary {
        let t = |id: &str| {
            count_frequencies(
                &TokenStream::from_tokens(id, vec!["a".into(), "a".into(), "b".into()]).unwrap(),
            )
        };
        select_shared_vocab(&[t("x"), t("y")], 2, 1, SelectionRule::SumRank).unwrap()
    }

    #[test]
    fn combine_concatenates_in_vocab_order() {
        let m = model("c", &[("b", &[0.0, 1.0]), ("a", &[1.0, 0.0])]);
        let c = combine(&m, &vocab_ab()).unwrap();
        assert_eq!(c.data, [1.0, 0.0, 0.0, 1.0]);
        assert_eq!(c.slice(1), [0.0, 1.0]);
    }

    #[test]
    fn combine_reports_missing_word() {
        let m = model("c", &[("a", &[1.0, 0.0])]);
        let err = combine(&m, &vocab_ab()).unwrap_err();
        assert_eq!(
            err,
            GeometryError::MissingWord {
                corpus_id: "c".into(),
                word: "b".into()
            }
        );
    }

    #[test]
    fn combine_can_normalize_words() {
        let m = model("c", &[("a", &[3.0, 4.0]), ("b", &[0.0, 2.0])]);
        let opts = CombineOptions {
            normalize_words: true,
        };
        let c = combine_with(&m, &vocab_ab(), opts).unwrap();
        assert_eq!(c.data, [0.6, 0.8, 0.0, 1.0]);
    }

    #[test]
    fn cosine_examples() {
        assert_eq!(cosine_similarity(&[2.0, 3.0], &[2.0, 3.0]).unwrap(), 1.0);
        assert_eq!(cosine_similarity(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        let c = cosine_similarity(&[1.0, 1.0], &[1.0, 0.0]).unwrap();
        assert!((c - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(
            cosine_similarity(&[0.0, 0.0], &[1.0, 0.0]),
            Err(GeometryError::ZeroNorm)
        );
        assert!(matches!(
            cosine_similarity(&[1.0], &[1.0, 0.0]),
            Err(GeometryError::LengthMismatch { .. })
        ));
    }

    fn cv(id: &str, data: &[f64]) -> CombinedVector {
        CombinedVector {
            corpus_id: id.into(),
            data: data.to_vec(),
            k: 1,
            dim: data.len(),
            words: vec!["w".into()],
        }
    }

    #[test]
    fn distance_examples() {
        let m = distance_matrix(&[cv("a", &[1.0, 2.0]), cv("b", &[1.0, 2.0])], None).unwrap();
        assert_eq!(m.get(0, 1), 0.0);
        let m = distance_matrix(
            &[cv("a", &[1.0, 2.0]), cv("b", &[-1.0, -2.0])],
            Some(vec![1, 2]),
        )
        .unwrap();
        assert_eq!(m.get(0, 1), 2.0);
        assert_eq!(m.get(1, 0), 2.0);
        assert_eq!(m.get(0, 0), 0.0);
        assert_eq!(m.years(), Some(&[1, 2][..]));
    }

    #[test]
    fn distance_errors() {
        assert_eq!(
            distance_matrix(&[cv("a", &[1.0])], None),
            Err(GeometryError::TooFewCorpora { found: 1 })
        );
        assert!(matches!(
            distance_matrix(&[cv("a", &[1.0]), cv("b", &[1.0, 2.0])], None),
            Err(GeometryError::LengthMismatch { .. })
        ));
        assert!(matches!(
            distance_matrix(&[cv("a", &[1.0]), cv("b", &[0.0])], None),
            Err(GeometryError::ZeroNormCorpus { .. })
        ));
        assert!(matches!(
            distance_matrix(&[cv("a", &[1.0]), cv("b", &[1.0])], Some(vec![1])),
            Err(GeometryError::YearCount { .. })
        ));
    }

    #[test]
    fn matrix_validation() {
        let ok = DistanceMatrix::new(labels(2), None, vec![0.0, 0.3, 0.3, 0.0]);
        assert!(ok.is_ok());
        assert!(matches!(
            DistanceMatrix::new(labels(2), None, vec![0.0, 0.3, 0.31, 0.0]),
            Err(GeometryError::Asymmetric { .. })
        ));
        assert!(matches!(
            DistanceMatrix::new(labels(2), None, vec![0.1, 0.3, 0.3, 0.0]),
            Err(GeometryError::NonZeroDiagonal { .. })
        ));
        assert!(matches!(
            DistanceMatrix::new(labels(2), None, vec![0.0, 2.5, 2.5, 0.0]),
            Err(GeometryError::OutOfRange { .. })
        ));
        assert!(matches!(
            DistanceMatrix::new(labels(2), None, vec![0.0, f64::NAN, f64::NAN, 0.0]),
            Err(GeometryError::OutOfRange { .. })
        ));
        assert!(matches!(
            DistanceMatrix::new(vec!["a".into(), "a".into()], None, vec![0.0; 4]),
            Err(GeometryError::DuplicateLabel { .. })
        ));
        assert!(matches!(
            DistanceMatrix::new(labels(2), None, vec![0.0; 3]),
            Err(GeometryError::Shape { .. })
        ));
    }

    #[test]
    fn delta_examples() {
        let a = DistanceMatrix::new(
            labels(3),
            None,
            vec![0.0, 0.2, 0.4, 0.2, 0.0, 0.3, 0.4, 0.3, 0.0],
        )
        .unwrap();
        assert_eq!(
            matrix_delta(&a, &a).unwrap(),
            MatrixDelta {
                max_abs: 0.0,
                mean_abs: 0.0
            }
        );
        let b = DistanceMatrix::new(
            labels(3),
            None,
            vec![0.0, 0.21, 0.4, 0.21, 0.0, 0.3, 0.4, 0.3, 0.0],
        )
        .unwrap();
        let d = matrix_delta(&a, &b).unwrap();
        assert!((d.max_abs - 0.01).abs() < 1e-12);
        assert!((d.mean_abs - 0.01 / 3.0).abs() < 1e-12);
        let other =
            DistanceMatrix::new(vec!["x".into(), "y".into(), "z".into()], None, vec![0.0; 9])
                .unwrap();
        assert_eq!(matrix_delta(&a, &other), Err(GeometryError::LabelMismatch));
    }

    fn nonzero_vec(len: usize) -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-10.0f64..10.0, len).prop_filter("nonzero", |v| norm(v) > 1e-3)
    }

    proptest! {
        #[test]
        fn cosine_properties(u in nonzero_vec(6), v in nonzero_vec(6), s in 0.01f64..100.0, t in 0.01f64..100.0) {
            prop_assert!((cosine_similarity(&u, &u).unwrap() - 1.0).abs() < 1e-12);
            let uv = cosine_similarity(&u, &v).unwrap();
            prop_assert!((uv - cosine_similarity(&v, &u).unwrap()).abs() < 1e-12);
            let su: Vec<f64> = u.iter().map(|x| x * s).collect();
            let tv: Vec<f64> = v.iter().map(|x| x * t).collect();
            prop_assert!((uv - cosine_similarity(&su, &tv).unwrap()).abs() < 1e-12);
            prop_assert!((-1.0..=1.0).contains(&uv));
        }
    }
}
