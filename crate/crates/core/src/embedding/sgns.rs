//! Skip-gram negative-sampling loss for a single (center, context) pair.

use alloc::vec::Vec;

/// Whether a pair was observed in the text or drawn from the noise distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    Observed,
    Noise,
}

impl Label {
    pub fn target(self) -> f64 {
        match self {
            Label::Observed => 1.0,
            Label::Noise => 0.0,
        }
    }
}

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + libm::exp(-x))
    } else {
        let e = libm::exp(x);
        e / (1.0 + e)
    }
}

/// `ln σ(x)` without overflow for large `|x|`.
#[inline]
pub fn log_sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        -libm::log1p(libm::exp(-x))
    } else {
        x - libm::log1p(libm::exp(x))
    }
}

/// Loss of one logistic term given the score `x = center · context`.
#[inline]
pub fn pair_loss(x: f64, label: Label) -> f64 {
    match label {
        Label::Observed => -log_sigmoid(x),
        Label::Noise => -log_sigmoid(-x),
    }
}

/// `label - σ(x)`, the negated derivative of [`pair_loss`] with respect to `x`.
#[inline]
pub fn pair_coefficient(x: f64, label: Label) -> f64 {
    label.target() - sigmoid(x)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SgnsGradient {
    pub grad_center: Vec<f64>,
    pub grad_context: Vec<f64>,
    pub loss: f64,
}

/// Loss `-ln σ(±c·o)` and its exact partials with respect to both vectors.
///
/// Panics if the vectors differ in length.
pub fn sgns_gradient(center: &[f64], context: &[f64], label: Label) -> SgnsGradient {
    assert_eq!(center.len(), context.len(), "vector lengths differ");
    let x: f64 = center.iter().zip(context).map(|(a, b)| a * b).sum();
    let g = -pair_coefficient(x, label);
    SgnsGradient {
        grad_center: context.iter().map(|v| g * v).collect(),
        grad_context: center.iter().map(|v| g * v).collect(),
        loss: pair_loss(x, label),
    }
}
