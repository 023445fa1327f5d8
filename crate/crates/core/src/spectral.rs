//! Spectral representation of second-chaos random variables.
//!
//! A variable is identified by its chaos kind and the finite signed list of
//! spectral coefficients. Classical (Wiener) elements are sums of
//! `lambda * (N^2 - 1) / sqrt(2)` over i.i.d. standard normals, free (Wigner)
//! elements are sums of `lambda * (S^2 - 1)` over free standard semicirculars.
//! Only power sums of the coefficients enter any computation, so cumulants
//! come straight from them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Classical (second Wiener chaos) or free (second Wigner chaos).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChaosKind {
    Classical,
    Free,
}

impl fmt::Display for ChaosKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChaosKind::Classical => write!(f, "classical"),
            ChaosKind::Free => write!(f, "free"),
        }
    }
}

/// A chaos kind plus the non-zero spectral coefficients in canonical order:
/// positives first, descending; then negatives, most negative first.
///
/// The two-sided ordering `lambda_1 >= lambda_2 >= ... > 0 > ...` down to
/// `lambda_{-2} >= lambda_{-1}` is flattened into one list read left to right
/// on the positive side and right-to-left-reversed on the negative side, so
/// `lambdas.last()` on a mixed-sign sequence is the *least* negative value and
/// the most negative one sits right after the positives.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoefficientSequence {
    kind: ChaosKind,
    #[serde(rename = "lambda")]
    lambdas: Vec<f64>,
}

#[derive(Deserialize)]
struct RawCoefficients {
    kind: ChaosKind,
    lambda: Vec<f64>,
}

impl<'de> Deserialize<'de> for CoefficientSequence {
    fn deserialize<D>(deserializer: D) -> std::result::Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        let raw = RawCoefficients::deserialize(deserializer)?;
        CoefficientSequence::new(raw.kind, raw.lambda).map_err(serde::de::Error::custom)
    }
}

impl CoefficientSequence {
    /// Builds a sequence, dropping exact zeros and sorting into canonical
    /// order. Non-finite coefficients are rejected.
    pub fn new(kind: ChaosKind, lambdas: Vec<f64>) -> Result<Self> {
        if lambdas.iter().any(|l| !l.is_finite()) {
            return Err(Error::invalid("coefficients must be finite"));
        }
        let mut pos: Vec<f64> = lambdas.iter().copied().filter(|&l| l > 0.0).collect();
        let mut neg: Vec<f64> = lambdas.iter().copied().filter(|&l| l < 0.0).collect();
        pos.sort_by(|a, b| b.total_cmp(a));
        neg.sort_by(|a, b| a.total_cmp(b));
        pos.extend(neg);
        Ok(CoefficientSequence { kind, lambdas: pos })
    }

    pub fn kind(&self) -> ChaosKind {
        self.kind
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    /// `sum lambda^r`.
    pub fn power_sum(&self, r: u32) -> f64 {
        self.lambdas.iter().map(|l| l.powi(r as i32)).sum()
    }

    /// `sum lambda^2`, the variance of the chaos element.
    pub fn sum_of_squares(&self) -> f64 {
        self.power_sum(2)
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.sum_of_squares() - 1.0).abs() <= tol
    }

    /// Largest positive coefficient, 0.0 when there is none.
    pub fn largest_positive(&self) -> f64 {
        self.lambdas.first().copied().filter(|&l| l > 0.0).unwrap_or(0.0)
    }

    /// Most negative coefficient, 0.0 when there is none.
    pub fn most_negative(&self) -> f64 {
        self.lambdas
            .iter()
            .copied()
            .fold(0.0f64, |acc, l| if l < acc { l } else { acc })
    }

    /// The positive coefficients, descending.
    pub fn positive_part(&self) -> Vec<f64> {
        self.lambdas.iter().copied().filter(|&l| l > 0.0).collect()
    }

    /// Absolute values of the negative coefficients, descending.
    pub fn negative_part_abs(&self) -> Vec<f64> {
        self.lambdas.iter().copied().filter(|&l| l < 0.0).map(f64::abs).collect()
    }

    /// True when for every positive coefficient there is a matching negative
    /// one, compared exactly as multisets.
    pub fn is_spectrally_symmetric(&self) -> bool {
        let pos = self.positive_part();
        let neg = self.negative_part_abs();
        pos == neg
    }
}

/// Re-canonicalizes a raw coefficient list: zeros removed, canonical order,
/// idempotent, multiset of non-zero values preserved.
pub fn canonicalize(kind: ChaosKind, lambdas: Vec<f64>) -> Result<CoefficientSequence> {
    CoefficientSequence::new(kind, lambdas)
}

/// Splits into the positive part and the absolute values of the negative
/// part, each a coefficient sequence of the same kind. Concatenating the
/// first with the negated second recovers the input multiset.
pub fn split_signed_parts(
    seq: &CoefficientSequence,
) -> (CoefficientSequence, CoefficientSequence) {
    let pos = CoefficientSequence::new(seq.kind, seq.positive_part())
        .expect("positive part is finite");
    let neg = CoefficientSequence::new(seq.kind, seq.negative_part_abs())
        .expect("negative part is finite");
    (pos, neg)
}

/// Spectral coefficients of the target law: `[1/sqrt(2), -1/sqrt(2)]`.
/// Classical kind gives the normal product `N1 x N2`, free kind the
/// normalized tetilla law.
pub fn target_coefficients(kind: ChaosKind) -> CoefficientSequence {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    CoefficientSequence::new(kind, vec![h, -h]).expect("target coefficients are finite")
}

/// Order-indexed cumulants, `values()[r - 1]` holding order `r`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CumulantSequence {
    kind: ChaosKind,
    values: Vec<f64>,
}

impl CumulantSequence {
    pub fn new(kind: ChaosKind, values: Vec<f64>) -> Self {
        CumulantSequence { kind, values }
    }

    pub fn kind(&self) -> ChaosKind {
        self.kind
    }

    pub fn max_order(&self) -> usize {
        self.values.len()
    }

    /// Cumulant of the given order (1-based).
    pub fn order(&self, r: usize) -> f64 {
        self.values[r - 1]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Order-indexed moments, same layout as [`CumulantSequence`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentSequence {
    kind: ChaosKind,
    values: Vec<f64>,
}

impl MomentSequence {
    pub fn new(kind: ChaosKind, values: Vec<f64>) -> Self {
        MomentSequence { kind, values }
    }

    pub fn kind(&self) -> ChaosKind {
        self.kind
    }

    pub fn max_order(&self) -> usize {
        self.values.len()
    }

    /// Moment of the given order (1-based).
    pub fn order(&self, r: usize) -> f64 {
        self.values[r - 1]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// The classical prefactor `2^(r/2 - 1) (r - 1)!` relating cumulants to
/// power sums of the coefficients.
pub fn classical_cumulant_prefactor(r: usize) -> f64 {
    let mut fact = 1.0f64;
    for i in 2..r {
        fact *= i as f64;
    }
    2f64.powf(r as f64 / 2.0 - 1.0) * fact
}

/// Cumulants of orders 1..=max_order straight from the power sums:
/// classical `kappa_r = 2^(r/2-1) (r-1)! sum lambda^r`, free
/// `kappa_r = sum lambda^r`, both with the order-1 value pinned to 0.
pub fn cumulants_from_coefficients(
    seq: &CoefficientSequence,
    max_order: usize,
) -> Result<CumulantSequence> {
    if max_order < 2 {
        return Err(Error::invalid("cumulants need max order >= 2"));
    }
    let mut values = vec![0.0; max_order];
    for r in 2..=max_order {
        let p = seq.power_sum(r as u32);
        values[r - 1] = match seq.kind {
            ChaosKind::Classical => classical_cumulant_prefactor(r) * p,
            ChaosKind::Free => p,
        };
    }
    Ok(CumulantSequence::new(seq.kind, values))
}
