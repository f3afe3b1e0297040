//! Batch checks that two quasi-norms are equivalent: per-sample ratios,
//! their spread, and how the spread moves when the truncation length doubles.

mod samples;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

pub use samples::{sample_sequences, DecayProfile, SampleSpec};

use crate::approx_spaces::{lorentz_marcinkiewicz_norm, phi_type_norm};
use crate::boyd::{
    boyd_indices, convexified_reiteration_weights, lp_couple_rho, reiteration_rho, validate_weight_sequence,
    BoydFunction, BoydIndices, WeightSequence,
};
use crate::error::{Error, Result};
use crate::kfunc::{
    interpolation_norm_with, intersection_norm, k_convex, k_truncation, sum_norm, InterpolationParameter, KMethod,
    QuadratureConfig, SequenceCouple, SequenceSpaceDescriptor,
};
use crate::numeric::{log_grid, spearman};
use crate::sequences::DecreasingSequence;
use crate::snorm::SymmetricNormingFunction;

pub const SPREAD_MAX: f64 = 16.0;
/// Allowed relative change of the spread when `N` doubles.
pub const STABILITY_TOLERANCE: f64 = 0.2;
/// Rank correlation between ratio and sample length scale above which a
/// trend is reported.
pub const DRIFT_MAX: f64 = 0.8;
/// Margin used when a numerical index must be separated from a threshold.
pub const INDEX_MARGIN: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyOptions {
    /// Second truncation length; `2N` when unset.
    pub n2: Option<usize>,
    pub quadrature: QuadratureConfig,
    /// Samples and t-points used to compare `k_truncation` with `k_convex`.
    pub calibration_samples: usize,
    pub calibration_points: usize,
    pub spread_max: f64,
    pub stability_tolerance: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            n2: None,
            quadrature: QuadratureConfig::default(),
            calibration_samples: 8,
            calibration_points: 16,
            spread_max: SPREAD_MAX,
            stability_tolerance: STABILITY_TOLERANCE,
        }
    }
}

/// Ratio statistics over one batch.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioStats {
    pub ratios: Vec<f64>,
    pub ratio_min: f64,
    pub ratio_max: f64,
    pub spread: f64,
    /// Spearman correlation between ratio and `‖x‖₁/x₁`.
    pub drift_correlation: f64,
    pub failures: Vec<usize>,
}

impl RatioStats {
    fn from_ratios(ratios: Vec<f64>, samples: &[DecreasingSequence]) -> Self {
        let failures: Vec<usize> = ratios
            .iter()
            .enumerate()
            .filter(|(_, r)| !(r.is_finite() && **r > 0.0))
            .map(|(i, _)| i)
            .collect();
        let (mut lengths, mut good) = (Vec::new(), Vec::new());
        for (r, x) in ratios.iter().zip(samples) {
            if r.is_finite() && *r > 0.0 {
                good.push(*r);
                lengths.push(x.values().iter().sum::<f64>() / x.first());
            }
        }
        let ratio_min = good.iter().copied().fold(f64::INFINITY, f64::min);
        let ratio_max = good.iter().copied().fold(0.0, f64::max);
        let spread = if good.is_empty() { f64::INFINITY } else { ratio_max / ratio_min };
        let drift_correlation = if good.len() >= 3 { spearman(&lengths, &good) } else { f64::NAN };
        Self {
            ratios,
            ratio_min,
            ratio_max,
            spread,
            drift_correlation,
            failures,
        }
    }
}

/// Outcome of one equivalence check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub theorem: String,
    pub params: Map<String, Value>,
    pub sample_spec: SampleSpec,
    pub n_samples: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "N2")]
    pub n2: usize,
    pub ratios: Vec<f64>,
    pub ratio_min: f64,
    pub ratio_max: f64,
    pub spread: f64,
    #[serde(rename = "ratio_min_N2")]
    pub ratio_min_n2: f64,
    #[serde(rename = "ratio_max_N2")]
    pub ratio_max_n2: f64,
    #[serde(rename = "spread_N2")]
    pub spread_n2: f64,
    /// `spread_N2 / spread − 1`.
    pub spread_change: f64,
    pub drift_correlation: f64,
    #[serde(rename = "drift_correlation_N2")]
    pub drift_correlation_n2: f64,
    /// `max k_truncation / k_convex` on the calibration subset, when the couple allows it.
    #[serde(rename = "C_emp")]
    pub c_emp: Option<f64>,
    pub calibration_note: Option<String>,
    pub spread_ok: bool,
    pub stability_ok: bool,
    /// Informational: `|drift_correlation| < DRIFT_MAX` at both lengths.
    pub drift_ok: bool,
    pub pass: bool,
    pub failures: Vec<usize>,
}

impl EquivalenceReport {
    #[allow(clippy::too_many_arguments)]
    fn assemble(
        theorem: &str,
        params: Map<String, Value>,
        spec: &SampleSpec,
        n2: usize,
        at_n: RatioStats,
        at_n2: RatioStats,
        calibration: Result<f64>,
        opts: &VerifyOptions,
    ) -> Self {
        let spread_change = at_n2.spread / at_n.spread - 1.0;
        let spread_ok = at_n.spread <= opts.spread_max && at_n2.spread <= opts.spread_max;
        let stability_ok = spread_change.abs() <= opts.stability_tolerance;
        let drift_ok = [at_n.drift_correlation, at_n2.drift_correlation]
            .iter()
            .all(|c| !(c.abs() >= DRIFT_MAX));
        let mut failures = at_n.failures.clone();
        failures.extend(at_n2.failures.iter().filter(|i| !at_n.failures.contains(i)));
        failures.sort_unstable();
        let (c_emp, calibration_note) = match calibration {
            Ok(c) => (Some(c), None),
            Err(e) => (None, Some(e.to_string())),
        };
        Self {
            theorem: theorem.to_string(),
            params,
            sample_spec: *spec,
            n_samples: spec.count,
            n: spec.n,
            n2,
            pass: spread_ok && stability_ok && failures.is_empty(),
            ratios: at_n.ratios,
            ratio_min: at_n.ratio_min,
            ratio_max: at_n.ratio_max,
            spread: at_n.spread,
            ratio_min_n2: at_n2.ratio_min,
            ratio_max_n2: at_n2.ratio_max,
            spread_n2: at_n2.spread,
            spread_change,
            drift_correlation: at_n.drift_correlation,
            drift_correlation_n2: at_n2.drift_correlation,
            c_emp,
            calibration_note,
            spread_ok,
            stability_ok,
            drift_ok,
            failures,
        }
    }
}

fn second_length(spec: &SampleSpec, opts: &VerifyOptions) -> Result<usize> {
    let n2 = opts.n2.unwrap_or(2 * spec.n);
    if n2 < 4 {
        return Err(Error::InvalidParameter(format!("second truncation length must be at least 4, got {n2}")));
    }
    Ok(n2)
}

/// `lhs(x)/rhs(x)` over the batch; a failed evaluation yields `NaN`.
fn ratios<F>(samples: &[DecreasingSequence], ratio: F) -> Vec<f64>
where
    F: Fn(&DecreasingSequence) -> Result<f64> + Sync,
{
    samples
        .par_iter()
        .enumerate()
        .map(|(i, x)| match ratio(x) {
            Ok(r) => r,
            Err(e) => {
                log::warn!("sample {i}: {e}");
                f64::NAN
            }
        })
        .collect()
}

fn batch<F>(spec: &SampleSpec, ratio: F) -> Result<RatioStats>
where
    F: Fn(&DecreasingSequence) -> Result<f64> + Sync,
{
    let samples = sample_sequences(spec)?;
    let r = ratios(&samples, ratio);
    Ok(RatioStats::from_ratios(r, &samples))
}

/// `max k_truncation / k_convex` over a sample subset and a t-grid on `[2^-8, 2^8]`.
pub fn calibrate_truncation(
    couple: &SequenceCouple,
    samples: &[DecreasingSequence],
    points: usize,
) -> Result<f64> {
    let ts = log_grid(2f64.powi(-8), 2f64.powi(8), points.max(2));
    let per_sample = samples
        .par_iter()
        .map(|x| {
            let mut worst: f64 = 1.0;
            for &t in &ts {
                let kc = k_convex(t, x, couple)?;
                if kc > 0.0 {
                    worst = worst.max(k_truncation(t, x, couple)? / kc);
                }
            }
            Ok(worst)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(per_sample.into_iter().fold(1.0, f64::max))
}

fn calibration(couple: &SequenceCouple, spec: &SampleSpec, opts: &VerifyOptions) -> Result<f64> {
    let sub = SampleSpec {
        count: opts.calibration_samples.clamp(1, spec.count),
        ..*spec
    };
    calibrate_truncation(couple, &sample_sequences(&sub)?, opts.calibration_points)
}

fn equivalence<L, R>(
    theorem: &str,
    params: Map<String, Value>,
    couple: &SequenceCouple,
    spec: &SampleSpec,
    opts: &VerifyOptions,
    lhs: L,
    rhs: R,
) -> Result<EquivalenceReport>
where
    L: Fn(&DecreasingSequence) -> Result<f64> + Sync,
    R: Fn(&DecreasingSequence) -> Result<f64> + Sync,
{
    spec.validate()?;
    let n2 = second_length(spec, opts)?;
    let ratio = |x: &DecreasingSequence| -> Result<f64> { Ok(lhs(x)? / rhs(x)?) };
    let at_n = batch(spec, ratio)?;
    let at_n2 = batch(&spec.with_len(n2), ratio)?;
    let cal = calibration(couple, spec, opts);
    Ok(EquivalenceReport::assemble(theorem, params, spec, n2, at_n, at_n2, cal, opts))
}

fn interpolation_side<'a>(
    couple: &'a SequenceCouple,
    param: &'a InterpolationParameter,
    opts: &'a VerifyOptions,
) -> impl Fn(&DecreasingSequence) -> Result<f64> + Sync + 'a {
    move |x| Ok(interpolation_norm_with(x, couple, param, KMethod::Truncation, &opts.quadrature)?.value)
}

fn indices_json(idx: &BoydIndices) -> Value {
    json!({"lower": idx.lower, "upper": idx.upper, "exact": idx.exact})
}

fn real_json(v: f64) -> Value {
    if v.is_infinite() { json!("inf") } else { json!(v) }
}

/// `(l_{p₀}, l_{p₁})_{ρ,q}` against `l_{φ,q}`, with `ρ` from [`lp_couple_rho`].
pub fn verify_lp_couple(
    phi: &BoydFunction,
    p0: f64,
    p1: f64,
    q: f64,
    spec: &SampleSpec,
    opts: &VerifyOptions,
) -> Result<EquivalenceReport> {
    let idx = boyd_indices(phi)?;
    if !(idx.lower > 0.0 && idx.within(1.0 / p1, 1.0 / p0)) {
        return Err(Error::InvalidParameter(format!(
            "Boyd indices [{:.4}, {:.4}] of {phi} must lie inside (1/p1, 1/p0) = ({}, {})",
            idx.lower,
            idx.upper,
            1.0 / p1,
            1.0 / p0
        )));
    }
    let rho = lp_couple_rho(phi, p0, p1)?;
    let couple = SequenceCouple::lp(p0, p1)?;
    let param = InterpolationParameter::new(rho.clone(), q)?;
    let mut params = Map::new();
    params.insert("phi".into(), json!(phi.to_string()));
    params.insert("p0".into(), real_json(p0));
    params.insert("p1".into(), real_json(p1));
    params.insert("q".into(), real_json(q));
    params.insert("rho".into(), json!(rho.to_string()));
    params.insert("phi_indices".into(), indices_json(&idx));
    params.insert("options".into(), serde_json::to_value(opts).expect("options serialize"));
    let lhs = interpolation_side(&couple, &param, opts);
    let rhs = |x: &DecreasingSequence| lorentz_marcinkiewicz_norm(x, phi, q);
    equivalence("thm13", params, &couple, spec, opts, lhs, rhs)
}

/// Hypotheses on `χ, φ₀, φ₁` for [`verify_lm_reiteration`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReiterationHypotheses {
    pub chi: BoydIndices,
    pub phi0: BoydIndices,
    pub phi1: BoydIndices,
    /// Indices of `φ₀/φ₁`.
    pub quotient: BoydIndices,
}

/// Estimates the indices and checks `0 < β_χ ≤ α_χ < 1`, `β_φᵢ > 0`, and
/// `β_φ > 0` or `α_φ < 0` for `φ = φ₀/φ₁`, each with margin [`INDEX_MARGIN`].
pub fn check_reiteration_hypotheses(
    chi: &BoydFunction,
    phi0: &BoydFunction,
    phi1: &BoydFunction,
) -> Result<ReiterationHypotheses> {
    let m = INDEX_MARGIN;
    let quotient_fn = BoydFunction::quotient(phi0.clone(), phi1.clone());
    let h = ReiterationHypotheses {
        chi: boyd_indices(chi)?,
        phi0: boyd_indices(phi0)?,
        phi1: boyd_indices(phi1)?,
        quotient: boyd_indices(&quotient_fn)?,
    };
    let fail = |what: String| Err(Error::InvalidParameter(what));
    if !(h.chi.lower > m && h.chi.upper < 1.0 - m && h.chi.lower <= h.chi.upper + m) {
        return fail(format!(
            "condition 0 < β_χ <= α_χ < 1 fails or is indeterminate (β = {:.4}, α = {:.4})",
            h.chi.lower, h.chi.upper
        ));
    }
    for (name, idx) in [("φ₀", &h.phi0), ("φ₁", &h.phi1)] {
        if !(idx.lower > m) {
            return fail(format!("condition β_{name} > 0 fails or is indeterminate (β = {:.4})", idx.lower));
        }
    }
    if !(h.quotient.lower > m || h.quotient.upper < -m) {
        return fail(format!(
            "condition β_φ > 0 or α_φ < 0 for φ = φ₀/φ₁ fails or is indeterminate (β = {:.4}, α = {:.4})",
            h.quotient.lower, h.quotient.upper
        ));
    }
    Ok(h)
}

/// `(l_{φ₀,q₀}, l_{φ₁,q₁})_{χ,q}` against `l_{ρ,q}`, with `ρ` from [`reiteration_rho`].
#[allow(clippy::too_many_arguments)]
pub fn verify_lm_reiteration(
    chi: &BoydFunction,
    phi0: &BoydFunction,
    phi1: &BoydFunction,
    q0: f64,
    q1: f64,
    q: f64,
    spec: &SampleSpec,
    opts: &VerifyOptions,
) -> Result<EquivalenceReport> {
    if !(q0 >= 1.0 && q1 >= 1.0) {
        return Err(Error::Unsupported(format!(
            "couple exponents below 1 are outside the solver's convex regime (q0 = {q0}, q1 = {q1})"
        )));
    }
    let h = check_reiteration_hypotheses(chi, phi0, phi1)?;
    let rho = reiteration_rho(chi, phi0, phi1);
    let couple = SequenceCouple::new(
        SequenceSpaceDescriptor::lorentz_marcinkiewicz(phi0.clone(), q0)?,
        SequenceSpaceDescriptor::lorentz_marcinkiewicz(phi1.clone(), q1)?,
    );
    let param = InterpolationParameter::new(chi.clone(), q)?;
    let mut params = Map::new();
    params.insert("chi".into(), json!(chi.to_string()));
    params.insert("phi0".into(), json!(phi0.to_string()));
    params.insert("phi1".into(), json!(phi1.to_string()));
    params.insert("q0".into(), real_json(q0));
    params.insert("q1".into(), real_json(q1));
    params.insert("q".into(), real_json(q));
    params.insert("rho".into(), json!(rho.to_string()));
    params.insert("hypotheses".into(), serde_json::to_value(&h).expect("indices serialize"));
    params.insert("options".into(), serde_json::to_value(opts).expect("options serialize"));
    let lhs = interpolation_side(&couple, &param, opts);
    let rhs = |x: &DecreasingSequence| lorentz_marcinkiewicz_norm(x, &rho, q);
    equivalence("thm12", params, &couple, spec, opts, lhs, rhs)
}

/// `p` values at which `M(p)` is probed during weight prechecks.
pub const WEIGHT_P_GRID: [f64; 3] = [1.5, 2.0, 4.0];

fn precheck_weights(name: &str, w: &WeightSequence) -> Result<()> {
    let v = validate_weight_sequence(w, &WEIGHT_P_GRID)?;
    if !v.passed {
        return Err(Error::InvalidParameter(format!(
            "weights {name} fail the weight-sequence properties (monotone {}, tends to zero {}, divergent sum {}, M finite {})",
            v.monotone_normalized, v.tends_to_zero, v.divergent_sum, v.m_finite
        )));
    }
    if !v.limit_condition.vanishes {
        return Err(Error::InvalidParameter(format!(
            "weights {name} fail the limit condition M(1/t)·t → 0 (log slope {:.3})",
            v.limit_condition.log_slope
        )));
    }
    Ok(())
}

/// `(l_{Φ^α_(p)}, l_{Φ^β_(q)})_{t^{1/l}, r}` against `l_{Φ^γ_(r)}`, with
/// `(r, γ)` from [`convexified_reiteration_weights`].
pub fn verify_convexified_reiteration(
    alpha: &WeightSequence,
    beta: &WeightSequence,
    p: f64,
    q: f64,
    l: f64,
    spec: &SampleSpec,
    opts: &VerifyOptions,
) -> Result<EquivalenceReport> {
    precheck_weights("α", alpha)?;
    precheck_weights("β", beta)?;
    let (r, gamma) = convexified_reiteration_weights(alpha, beta, p, q, l)?;
    let couple = SequenceCouple::new(
        SequenceSpaceDescriptor::PhiType(SymmetricNormingFunction::convexified(alpha.clone(), p)?),
        SequenceSpaceDescriptor::PhiType(SymmetricNormingFunction::convexified(beta.clone(), q)?),
    );
    let f = BoydFunction::power(1.0 / l);
    let param = InterpolationParameter::new(f.clone(), r)?;
    let target = SymmetricNormingFunction::convexified(gamma.clone(), r)?;
    let mut params = Map::new();
    params.insert("alpha".into(), json!(describe_weights(alpha)));
    params.insert("beta".into(), json!(describe_weights(beta)));
    params.insert("gamma".into(), json!(describe_weights(&gamma)));
    params.insert("p".into(), real_json(p));
    params.insert("q".into(), real_json(q));
    params.insert("l".into(), real_json(l));
    params.insert("r".into(), real_json(r));
    params.insert("f".into(), json!(f.to_string()));
    params.insert("options".into(), serde_json::to_value(opts).expect("options serialize"));
    let lhs = interpolation_side(&couple, &param, opts);
    let rhs = |x: &DecreasingSequence| phi_type_norm(x, &target);
    equivalence("thm17", params, &couple, spec, opts, lhs, rhs)
}

fn describe_weights(w: &WeightSequence) -> String {
    match w.generator() {
        Some(g) => format!("{g} (stored {})", w.len()),
        None => format!("{} explicit weights", w.len()),
    }
}

/// Ratio maxima for `E_Σ ⊇ (E₀,E₁)_{φ,q} ⊇ E_Δ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmbeddingReport {
    pub theorem: String,
    pub params: Map<String, Value>,
    pub sample_spec: SampleSpec,
    pub n_samples: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "N2")]
    pub n2: usize,
    /// `max sum_norm / interpolation_norm`.
    pub sum_ratio_max: f64,
    #[serde(rename = "sum_ratio_max_N2")]
    pub sum_ratio_max_n2: f64,
    /// `max interpolation_norm / intersection_norm`.
    pub intersection_ratio_max: f64,
    #[serde(rename = "intersection_ratio_max_N2")]
    pub intersection_ratio_max_n2: f64,
    pub sum_stable: bool,
    pub intersection_stable: bool,
    pub pass: bool,
    pub failures: Vec<usize>,
}

struct EmbeddingBatch {
    sum_max: f64,
    intersection_max: f64,
    failures: Vec<usize>,
}

fn embedding_batch(
    couple: &SequenceCouple,
    param: &InterpolationParameter,
    spec: &SampleSpec,
    opts: &VerifyOptions,
) -> Result<EmbeddingBatch> {
    let samples = sample_sequences(spec)?;
    let pairs: Vec<Option<(f64, f64)>> = samples
        .par_iter()
        .enumerate()
        .map(|(i, x)| {
            let eval = || -> Result<(f64, f64)> {
                let interp = interpolation_norm_with(x, couple, param, KMethod::Truncation, &opts.quadrature)?.value;
                Ok((sum_norm(x, couple)? / interp, interp / intersection_norm(x, couple)?))
            };
            match eval() {
                Ok((a, b)) if a.is_finite() && b.is_finite() && a > 0.0 && b > 0.0 => Some((a, b)),
                Ok(_) => None,
                Err(e) => {
                    log::warn!("sample {i}: {e}");
                    None
                }
            }
        })
        .collect();
    let failures = pairs.iter().enumerate().filter(|(_, p)| p.is_none()).map(|(i, _)| i).collect();
    let good: Vec<(f64, f64)> = pairs.into_iter().flatten().collect();
    Ok(EmbeddingBatch {
        sum_max: good.iter().map(|p| p.0).fold(0.0, f64::max),
        intersection_max: good.iter().map(|p| p.1).fold(0.0, f64::max),
        failures,
    })
}

/// Checks that `sum_norm/interpolation_norm` and
/// `interpolation_norm/intersection_norm` stay bounded, and that their maxima
/// move by at most the stability tolerance when `N` doubles.
pub fn verify_embeddings(
    couple: &SequenceCouple,
    phi: &BoydFunction,
    q: f64,
    spec: &SampleSpec,
    opts: &VerifyOptions,
) -> Result<EmbeddingReport> {
    spec.validate()?;
    let idx = boyd_indices(phi)?;
    if !idx.within(0.0, 1.0) {
        return Err(Error::InvalidParameter(format!(
            "Boyd indices [{:.4}, {:.4}] of {phi} must lie inside (0, 1)",
            idx.lower, idx.upper
        )));
    }
    let n2 = second_length(spec, opts)?;
    let param = InterpolationParameter::new(phi.clone(), q)?;
    let a = embedding_batch(couple, &param, spec, opts)?;
    let b = embedding_batch(couple, &param, &spec.with_len(n2), opts)?;
    let stable = |x: f64, y: f64| x.is_finite() && y.is_finite() && x > 0.0 && (y / x - 1.0).abs() <= opts.stability_tolerance;
    let sum_stable = stable(a.sum_max, b.sum_max);
    let intersection_stable = stable(a.intersection_max, b.intersection_max);
    let mut failures = a.failures.clone();
    failures.extend(b.failures.iter().filter(|i| !a.failures.contains(i)));
    failures.sort_unstable();
    let mut params = Map::new();
    params.insert("couple".into(), json!(couple.to_string()));
    params.insert("phi".into(), json!(phi.to_string()));
    params.insert("q".into(), real_json(q));
    params.insert("phi_indices".into(), indices_json(&idx));
    params.insert("options".into(), serde_json::to_value(opts).expect("options serialize"));
    Ok(EmbeddingReport {
        theorem: "embed".into(),
        params,
        sample_spec: *spec,
        n_samples: spec.count,
        n: spec.n,
        n2,
        sum_ratio_max: a.sum_max,
        sum_ratio_max_n2: b.sum_max,
        intersection_ratio_max: a.intersection_max,
        intersection_ratio_max_n2: b.intersection_max,
        pass: sum_stable && intersection_stable && failures.is_empty(),
        sum_stable,
        intersection_stable,
        failures,
    })
}
