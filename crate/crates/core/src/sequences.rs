//! Finite sequences, decreasing rearrangement and `l_p` norms.
//!
//! For the sequence approximation scheme the best-approximation errors of `x`
//! are its approximation numbers `a_n(x)`, i.e. the non-increasing
//! rearrangement of `|x|`. Indices are 1-based in every public accessor.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::compensated_sum;

/// Scalar sequence of arbitrary sign and order (finite truncation of `l_∞`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct RawSequence(Vec<f64>);

impl RawSequence {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "entry {} is not finite ({})",
                i + 1,
                values[i]
            )));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl TryFrom<Vec<f64>> for RawSequence {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<RawSequence> for Vec<f64> {
    fn from(s: RawSequence) -> Self {
        s.0
    }
}

/// Finitely supported, non-negative, non-increasing sequence (an element of `k̂`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct DecreasingSequence(Vec<f64>);

impl DecreasingSequence {
    /// Validates that `values` is finite, non-negative and non-increasing.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let report = check_approximation_error_axioms(&values);
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("entry {} is not finite", i + 1)));
        }
        if let Some(i) = report.first_violation {
            return Err(Error::InvalidInput(format!(
                "sequence is not non-negative and non-increasing at index {}",
                i
            )));
        }
        Ok(Self(values))
    }

    /// Rearranges arbitrary finite values; shorthand for
    /// [`decreasing_rearrangement`] on a [`RawSequence`].
    pub fn rearranged(values: &[f64]) -> Result<Self> {
        Ok(decreasing_rearrangement(&RawSequence::new(values.to_vec())?))
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0.0; len])
    }

    /// The first unit vector `(1, 0, ..., 0)` of length `len >= 1`.
    pub fn unit(len: usize) -> Self {
        let mut v = vec![0.0; len.max(1)];
        v[0] = 1.0;
        Self(v)
    }

    pub(crate) fn from_vec_unchecked(values: Vec<f64>) -> Self {
        debug_assert!(check_approximation_error_axioms(&values).passed);
        Self(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// 1-based access; entries beyond the stored length read as zero.
    pub fn get(&self, n: usize) -> f64 {
        assert!(n >= 1, "sequence indices are 1-based");
        self.0.get(n - 1).copied().unwrap_or(0.0)
    }

    /// Largest entry, `0` for the empty sequence.
    pub fn first(&self) -> f64 {
        self.0.first().copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.first() == 0.0
    }

    /// `c·x` for `c >= 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c >= 0.0) || !c.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "scale factor must be finite and non-negative, got {c}"
            )));
        }
        Ok(Self(self.0.iter().map(|v| v * c).collect()))
    }

    /// The first `len` entries (zero-padded when `len` exceeds the length).
    pub fn truncated(&self, len: usize) -> Self {
        let mut v: Vec<f64> = self.0.iter().copied().take(len).collect();
        v.resize(len, 0.0);
        Self(v)
    }
}

impl TryFrom<Vec<f64>> for DecreasingSequence {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<DecreasingSequence> for Vec<f64> {
    fn from(s: DecreasingSequence) -> Self {
        s.0
    }
}

impl AsRef<[f64]> for DecreasingSequence {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// `(a_n(x))_n`: absolute values sorted non-increasingly, length preserved.
pub fn decreasing_rearrangement(x: &RawSequence) -> DecreasingSequence {
    let mut v: Vec<f64> = x.values().iter().map(|v| v.abs()).collect();
    v.sort_unstable_by(|a, b| b.total_cmp(a));
    DecreasingSequence(v)
}

/// `(Σ x_n^p)^{1/p}`, or `max x_n` when `p = ∞`. Empty input gives `0`.
pub fn lp_norm(x: &DecreasingSequence, p: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "l_p exponent must be positive or infinite, got {p}"
        )));
    }
    Ok(lp_norm_of_slice(x.values(), p))
}

/// `l_p` norm of a non-negative slice; `p` already validated.
pub(crate) fn lp_norm_of_slice(x: &[f64], p: f64) -> f64 {
    let scale = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    if p.is_infinite() {
        return scale;
    }
    if p == 1.0 {
        return compensated_sum(x.iter().map(|v| v.abs()));
    }
    let s = compensated_sum(x.iter().map(|v| (v.abs() / scale).powf(p)));
    scale * s.powf(1.0 / p)
}

/// Outcome of [`check_approximation_error_axioms`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MonotonicityReport {
    pub passed: bool,
    /// 1-based index of the first entry that is negative or exceeds its predecessor.
    pub first_violation: Option<usize>,
}

/// Checks `E_1 >= E_2 >= ... >= 0`, the monotonicity every sequence of
/// best-approximation errors satisfies.
pub fn check_approximation_error_axioms(e: &[f64]) -> MonotonicityReport {
    let mut first_violation = None;
    for (i, &v) in e.iter().enumerate() {
        let bad = !(v >= 0.0) || (i > 0 && v > e[i - 1]);
        if bad {
            first_violation = Some(i + 1);
            break;
        }
    }
    MonotonicityReport {
        passed: first_violation.is_none(),
        first_violation,
    }
}
