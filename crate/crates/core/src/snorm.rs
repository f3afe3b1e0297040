//! Symmetric norming functions on `k̂`: the extremal `Φ₁`, `Φ_∞`, the weighted
//! sums `Φ^ε` and their `p`-convexifications `Φ^ε_(p)`, with property checks.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::boyd::WeightSequence;
use crate::error::{Error, Result};
use crate::numeric::compensated_sum;
use crate::sequences::{decreasing_rearrangement, DecreasingSequence, RawSequence};

#[derive(Debug, Clone, PartialEq)]
pub enum SymmetricNormingFunction {
    /// `Φ₁(x) = Σ x_n`
    ExtremalOne,
    /// `Φ_∞(x) = max x_n`
    ExtremalInfinity,
    /// `Φ^ε(x) = Σ ε_n x_n`
    Weighted(Arc<WeightSequence>),
    /// `Φ^ε_(p)(x) = (Σ ε_n x_n^p)^{1/p}`, `1 <= p < ∞`
    Convexified { weights: Arc<WeightSequence>, p: f64 },
}

impl SymmetricNormingFunction {
    pub fn weighted(weights: WeightSequence) -> Self {
        SymmetricNormingFunction::Weighted(Arc::new(weights))
    }

    pub fn convexified(weights: WeightSequence, p: f64) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "convexification exponent must satisfy 1 <= p < ∞, got {p}"
            )));
        }
        Ok(SymmetricNormingFunction::Convexified {
            weights: Arc::new(weights),
            p,
        })
    }

    /// `Φ(a(x))` where `a(x)` is the decreasing rearrangement of `|x|`.
    pub fn apply(&self, x: &RawSequence) -> Result<f64> {
        self.apply_decreasing(&decreasing_rearrangement(x))
    }

    pub fn apply_decreasing(&self, a: &DecreasingSequence) -> Result<f64> {
        self.apply_slice(a.values())
    }

    /// `a` must already be non-negative and non-increasing.
    pub(crate) fn apply_slice(&self, a: &[f64]) -> Result<f64> {
        let support = a.iter().rposition(|&v| v > 0.0).map_or(0, |i| i + 1);
        let a = &a[..support];
        if a.is_empty() {
            return Ok(0.0);
        }
        Ok(match self {
            SymmetricNormingFunction::ExtremalOne => compensated_sum(a.iter().copied()),
            SymmetricNormingFunction::ExtremalInfinity => a[0],
            SymmetricNormingFunction::Weighted(eps) => {
                let w = eps.prefix(a.len())?;
                compensated_sum(w.iter().zip(a).map(|(e, x)| e * x))
            }
            SymmetricNormingFunction::Convexified { weights, p } => {
                let w = weights.prefix(a.len())?;
                let scale = a[0];
                let s = compensated_sum(w.iter().zip(a).map(|(e, x)| e * (x / scale).powf(*p)));
                scale * s.powf(1.0 / p)
            }
        })
    }

    /// `Φ` on the partial rearrangements `(a_1, ..., a_n, 0, ...)`, `n = 1..=len`.
    ///
    /// This is the limit construction that extends `Φ` to bounded sequences;
    /// for finitely supported input the last value is `Φ(x)` itself. Errors if
    /// a partial value is not finite.
    pub fn partial_values(&self, x: &RawSequence) -> Result<Vec<f64>> {
        let a = decreasing_rearrangement(x);
        let mut out = Vec::with_capacity(a.len());
        for n in 1..=a.len() {
            let v = self.apply_slice(&a.values()[..n])?;
            if !v.is_finite() {
                return Err(Error::numerical(format!("partial value {n} is unbounded")));
            }
            out.push(v);
        }
        Ok(out)
    }

    /// Whether the triangle inequality is part of the contract for this function.
    pub fn requires_triangle(&self) -> bool {
        !matches!(self, SymmetricNormingFunction::Convexified { p, .. } if *p > 1.0)
    }
}

impl fmt::Display for SymmetricNormingFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let exponent = |w: &WeightSequence| w.generator().and_then(|g| g.power_exponent());
        match self {
            SymmetricNormingFunction::ExtremalOne => write!(f, "phi1"),
            SymmetricNormingFunction::ExtremalInfinity => write!(f, "phiinf"),
            SymmetricNormingFunction::Weighted(w) => match exponent(w) {
                Some(a) => write!(f, "eps:a={a}"),
                None => write!(f, "eps:[{} weights]", w.len()),
            },
            SymmetricNormingFunction::Convexified { weights, p } => match exponent(weights) {
                Some(a) => write!(f, "eps:a={a},p={p}"),
                None => write!(f, "eps:[{} weights],p={p}", weights.len()),
            },
        }
    }
}

/// Outcome of one axiom over a sample batch.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomOutcome {
    pub required: bool,
    pub passed: bool,
    pub checked: usize,
    pub failures: usize,
    /// Largest relative violation seen (`<= 0` when none).
    pub worst: f64,
}

impl AxiomOutcome {
    fn new(required: bool) -> Self {
        Self {
            required,
            passed: true,
            checked: 0,
            failures: 0,
            worst: f64::NEG_INFINITY,
        }
    }

    fn record(&mut self, violation: f64, tol: f64) {
        self.checked += 1;
        self.worst = self.worst.max(violation);
        if violation > tol || violation.is_nan() {
            self.failures += 1;
            self.passed = false;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub positivity: AxiomOutcome,
    pub homogeneity: AxiomOutcome,
    pub triangle: AxiomOutcome,
    pub normalization: AxiomOutcome,
    pub majorization: AxiomOutcome,
    /// Every required axiom passed.
    pub passed: bool,
}

/// Length of the random `k̂` samples used by the axiom checker.
pub const AXIOM_SAMPLE_LEN: usize = 32;
const REL_TOL: f64 = 1e-12;

/// Random non-zero element of `k̂` with `len` slots.
pub(crate) fn random_khat(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    let support = rng.random_range(1..=len);
    let scale = 10f64.powf(rng.random_range(-3.0..3.0));
    let mut v: Vec<f64> = (0..support).map(|_| scale * (1.0 - rng.random::<f64>())).collect();
    v.sort_unstable_by(|a, b| b.total_cmp(a));
    v.resize(len, 0.0);
    v
}

/// `x ≺ y` built from `y` by averaging random blocks and shrinking.
pub(crate) fn majorized_by(rng: &mut ChaCha8Rng, y: &[f64]) -> Vec<f64> {
    let mut x = y.to_vec();
    let n = x.len();
    for _ in 0..rng.random_range(1..=3) {
        let i = rng.random_range(0..n);
        let j = rng.random_range(i..n);
        let mean = x[i..=j].iter().sum::<f64>() / (j - i + 1) as f64;
        x[i..=j].iter_mut().for_each(|v| *v = mean);
    }
    let shrink = rng.random_range(0.5..=1.0);
    x.iter_mut().for_each(|v| *v *= shrink);
    // averaging can leave rounding-level increases; restore monotonicity
    for k in 1..n {
        if x[k] > x[k - 1] {
            x[k] = x[k - 1];
        }
    }
    x
}

/// Checks positivity, homogeneity, the triangle inequality, normalization and
/// majorization monotonicity on `sample_count` pseudo-random samples.
pub fn check_snorm_axioms(phi: &SymmetricNormingFunction, sample_count: usize, seed: u64) -> Result<AxiomReport> {
    check_snorm_axioms_with(|a| phi.apply_slice(a), phi.requires_triangle(), sample_count, seed)
}

/// Axiom checker for an arbitrary functional on non-increasing slices.
pub fn check_snorm_axioms_with<F>(eval: F, triangle_required: bool, sample_count: usize, seed: u64) -> Result<AxiomReport>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    if sample_count == 0 {
        return Err(Error::InvalidParameter("sample_count must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut positivity = AxiomOutcome::new(true);
    let mut homogeneity = AxiomOutcome::new(true);
    let mut triangle = AxiomOutcome::new(triangle_required);
    let mut normalization = AxiomOutcome::new(true);
    let mut majorization = AxiomOutcome::new(true);

    let mut e1 = vec![0.0; AXIOM_SAMPLE_LEN];
    e1[0] = 1.0;
    normalization.record((eval(&e1)? - 1.0).abs(), REL_TOL);

    for _ in 0..sample_count {
        let x = random_khat(&mut rng, AXIOM_SAMPLE_LEN);
        let y = random_khat(&mut rng, AXIOM_SAMPLE_LEN);
        let fx = eval(&x)?;
        let fy = eval(&y)?;

        positivity.record(if fx > 0.0 { -1.0 } else { 1.0 }, 0.0);

        let c = 10f64.powf(rng.random_range(-3.0..3.0));
        let cx: Vec<f64> = x.iter().map(|v| v * c).collect();
        homogeneity.record((eval(&cx)? - c * fx).abs() / (c * fx), REL_TOL);

        let sum: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        triangle.record(eval(&sum)? / (fx + fy) - 1.0, REL_TOL);

        let z = majorized_by(&mut rng, &y);
        let fz = eval(&z)?;
        majorization.record(fz / fy - 1.0, REL_TOL);
    }

    let passed = [&positivity, &homogeneity, &triangle, &normalization, &majorization]
        .iter()
        .all(|o| o.passed || !o.required);
    Ok(AxiomReport {
        positivity,
        homogeneity,
        triangle,
        normalization,
        majorization,
        passed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SandwichReport {
    pub passed: bool,
    pub checked: usize,
    /// Largest of `Φ_∞(x) - Φ(x)` and `Φ(x) - Φ₁(x)`, relative to `Φ₁(x)`.
    pub worst: f64,
}

/// `Φ_∞(x) <= Φ(x) <= Φ₁(x)` for every sample, with `1e-12` relative slack.
pub fn check_sandwich(phi: &SymmetricNormingFunction, samples: &[DecreasingSequence]) -> Result<SandwichReport> {
    let mut worst = f64::NEG_INFINITY;
    for x in samples {
        let lo = SymmetricNormingFunction::ExtremalInfinity.apply_decreasing(x)?;
        let hi = SymmetricNormingFunction::ExtremalOne.apply_decreasing(x)?;
        let v = phi.apply_decreasing(x)?;
        let scale = hi.max(f64::MIN_POSITIVE);
        worst = worst.max((lo - v) / scale).max((v - hi) / scale);
    }
    Ok(SandwichReport {
        passed: worst <= REL_TOL,
        checked: samples.len(),
        worst,
    })
}

/// Random `k̂` batch for sandwich checks.
pub fn random_samples(count: usize, len: usize, seed: u64) -> Vec<DecreasingSequence> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| DecreasingSequence::from_vec_unchecked(random_khat(&mut rng, len)))
        .collect()
}
