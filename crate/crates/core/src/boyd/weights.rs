//! Weight sequences `1 = α_1 >= α_2 >= ... >= 0` and their validation.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::compensated_sum;

/// Closed-form extension of a weight sequence past its stored length.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightGenerator {
    /// `n ↦ n^{-a}`
    Power { a: f64 },
    /// `n ↦ Π g_i(n)^{e_i}`
    Product(Vec<(WeightGenerator, f64)>),
}

impl WeightGenerator {
    pub fn eval(&self, n: usize) -> f64 {
        match self {
            WeightGenerator::Power { a } => (n as f64).powf(-a),
            WeightGenerator::Product(parts) => parts.iter().map(|(g, e)| g.eval(n).powf(*e)).product(),
        }
    }

    /// `g^e`, folding pure powers into a single power.
    pub fn powered(&self, e: f64) -> WeightGenerator {
        match self {
            WeightGenerator::Power { a } => WeightGenerator::Power { a: a * e },
            other => WeightGenerator::Product(vec![(other.clone(), e)]),
        }
    }

    /// `self · other`, folding pure powers.
    pub fn times(&self, other: &WeightGenerator) -> WeightGenerator {
        match (self, other) {
            (WeightGenerator::Power { a }, WeightGenerator::Power { a: b }) => WeightGenerator::Power { a: a + b },
            _ => WeightGenerator::Product(vec![(self.clone(), 1.0), (other.clone(), 1.0)]),
        }
    }

    /// Decay exponent when the generator is a pure power.
    pub fn power_exponent(&self) -> Option<f64> {
        match self {
            WeightGenerator::Power { a } => Some(*a),
            WeightGenerator::Product(parts) => parts
                .iter()
                .map(|(g, e)| g.power_exponent().map(|a| a * e))
                .sum::<Option<f64>>(),
        }
    }
}

impl fmt::Display for WeightGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightGenerator::Power { a } => write!(f, "n^-{a}"),
            WeightGenerator::Product(parts) => {
                for (i, (g, e)) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    write!(f, "({g})^{e}")?;
                }
                Ok(())
            }
        }
    }
}

/// Non-increasing weights with `α_1 = 1`, stored for `n = 1..=len` and
/// optionally extended by a generator.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSequence {
    values: Vec<f64>,
    generator: Option<WeightGenerator>,
}

impl WeightSequence {
    /// Validates `1 = α_1 >= α_2 >= ... >= 0`.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        check_weights(&values)?;
        Ok(Self { values, generator: None })
    }

    /// Stores `len` generator values and keeps the generator for larger indices.
    pub fn from_generator(generator: WeightGenerator, len: usize) -> Result<Self> {
        let values: Vec<f64> = (1..=len.max(1)).map(|n| generator.eval(n)).collect();
        check_weights(&values)?;
        Ok(Self {
            values,
            generator: Some(generator),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn generator(&self) -> Option<&WeightGenerator> {
        self.generator.as_ref()
    }

    /// Largest index that can be evaluated, `None` when unbounded.
    pub fn max_index(&self) -> Option<usize> {
        match self.generator {
            Some(_) => None,
            None => Some(self.values.len()),
        }
    }

    /// `α_n`, 1-based.
    pub fn get(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return Err(Error::Domain("weight indices start at 1".into()));
        }
        if let Some(v) = self.values.get(n - 1) {
            return Ok(*v);
        }
        match &self.generator {
            Some(g) => Ok(g.eval(n)),
            None => Err(Error::Truncation(format!(
                "weight index {n} exceeds stored length {} and no generator is attached",
                self.values.len()
            ))),
        }
    }

    /// Weights `1..=len`, extending through the generator where needed.
    pub fn prefix(&self, len: usize) -> Result<Vec<f64>> {
        (1..=len).map(|n| self.get(n)).collect()
    }
}

fn check_weights(values: &[f64]) -> Result<()> {
    match values.first() {
        Some(&1.0) => {}
        Some(&v) => {
            return Err(Error::InvalidParameter(format!("weights must start with 1, got {v}")));
        }
        None => return Err(Error::InvalidParameter("weight sequence is empty".into())),
    }
    for (i, w) in values.windows(2).enumerate() {
        if !w[1].is_finite() || w[1] < 0.0 || w[1] > w[0] {
            return Err(Error::InvalidParameter(format!(
                "weights must be non-increasing and non-negative (index {})",
                i + 2
            )));
        }
    }
    Ok(())
}

/// `α_n = n^{-a}` for `n = 1..=len`, with the power generator attached.
pub fn power_weights(a: f64, len: usize) -> Result<WeightSequence> {
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::InvalidParameter(format!("power weight exponent must lie in [0, 1], got {a}")));
    }
    WeightSequence::from_generator(WeightGenerator::Power { a }, len)
}

/// Decay over the last decade must reach this factor for the "tends to zero" proxy.
pub const TAIL_DECAY_FACTOR: f64 = 0.9;
/// Minimum growth of `Σ_{N/2 < n <= N} α_n` for the divergent-sum proxy.
pub const DIVERGENCE_THRESHOLD: f64 = 0.5;
/// `M(p)` may grow at most this much between `N/2` and `N` to count as finite.
pub const M_STABILITY: f64 = 1.1;
/// Minimum log-log decay rate of `M(1/t)·t` as `t → 0`.
pub const LIMIT_SLOPE_MIN: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MEstimate {
    pub p: f64,
    /// `sup_{⌈p⌉ <= n <= N} α_{[n/p]} / α_n`
    pub m_at_n: f64,
    /// Same supremum restricted to `n <= N/2`.
    pub m_at_half: f64,
    pub finite: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitProbe {
    pub t: Vec<f64>,
    /// `M(1/t)·t` at each probe.
    pub values: Vec<f64>,
    /// Least-squares slope of `ln(M(1/t)·t)` against `ln t`.
    pub log_slope: f64,
    pub vanishes: bool,
}

/// Numerical report on the four weight-sequence properties plus the limit
/// condition `lim_{t→0} M(1/t)·t = 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightValidation {
    pub n: usize,
    pub monotone_normalized: bool,
    pub tail_ratio: f64,
    pub tends_to_zero: bool,
    pub partial_sum_growth: f64,
    pub divergent_sum: bool,
    pub m_estimates: Vec<MEstimate>,
    pub m_finite: bool,
    pub limit_condition: LimitProbe,
    /// Properties 1–4 all hold.
    pub passed: bool,
}

/// `sup_{⌈p⌉ <= n <= upto} α_{[n/p]} / α_n` (infinite if some `α_n = 0`).
pub fn m_estimate(alpha: &[f64], p: f64, upto: usize) -> f64 {
    let start = p.ceil().max(1.0) as usize;
    let mut m = 0.0_f64;
    for n in start..=upto.min(alpha.len()) {
        let k = ((n as f64) / p).floor() as usize;
        if k == 0 {
            continue;
        }
        let an = alpha[n - 1];
        if an == 0.0 {
            return f64::INFINITY;
        }
        m = m.max(alpha[k - 1] / an);
    }
    m
}

/// Checks the weight-sequence properties on the stored prefix (length `N`).
pub fn validate_weight_sequence(alpha: &WeightSequence, p_grid: &[f64]) -> Result<WeightValidation> {
    if p_grid.is_empty() || p_grid.iter().any(|&p| !(p > 1.0) || !p.is_finite()) {
        return Err(Error::InvalidParameter("p grid must be non-empty with every p > 1".into()));
    }
    let a = alpha.values();
    let n = a.len();
    if n < 4 {
        return Err(Error::InvalidParameter("weight validation needs at least 4 stored weights".into()));
    }

    let monotone_normalized = check_weights(a).is_ok();

    let decade = n.div_ceil(10).max(1);
    let tail_ratio = if a[decade - 1] > 0.0 { a[n - 1] / a[decade - 1] } else { 0.0 };
    let tends_to_zero = tail_ratio <= TAIL_DECAY_FACTOR;

    let partial_sum_growth = compensated_sum(a[n / 2..].iter().copied());
    let divergent_sum = partial_sum_growth >= DIVERGENCE_THRESHOLD;

    let m_estimates: Vec<MEstimate> = p_grid
        .iter()
        .map(|&p| {
            let m_at_n = m_estimate(a, p, n);
            let m_at_half = m_estimate(a, p, n / 2);
            let finite = m_at_n.is_finite() && m_at_n <= M_STABILITY * m_at_half.max(1.0);
            MEstimate {
                p,
                m_at_n,
                m_at_half,
                finite,
            }
        })
        .collect();
    let m_finite = m_estimates.iter().all(|m| m.finite);

    let limit_condition = probe_limit_condition(a);

    Ok(WeightValidation {
        n,
        monotone_normalized,
        tail_ratio,
        tends_to_zero,
        partial_sum_growth,
        divergent_sum,
        m_estimates,
        m_finite,
        limit_condition,
        passed: monotone_normalized && tends_to_zero && divergent_sum && m_finite,
    })
}

/// Probes `M(1/t)·t` at `t = 2^{-k}` for `2^k <= N/4`.
fn probe_limit_condition(alpha: &[f64]) -> LimitProbe {
    let n = alpha.len();
    let mut t = Vec::new();
    let mut values = Vec::new();
    let mut p = 2.0;
    while p <= (n as f64) / 4.0 {
        t.push(1.0 / p);
        values.push(m_estimate(alpha, p, n) / p);
        p *= 2.0;
    }
    let log_slope = if t.len() >= 2 && values.iter().all(|v| v.is_finite() && *v > 0.0) {
        let xs: Vec<f64> = t.iter().map(|v| v.ln()).collect();
        let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
        least_squares_slope(&xs, &ys)
    } else {
        f64::NAN
    };
    let vanishes = log_slope >= LIMIT_SLOPE_MIN && values.last() < values.first();
    LimitProbe {
        t,
        values,
        log_slope,
        vanishes,
    }
}

pub(crate) fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    const P_GRID: [f64; 3] = [1.5, 2.0, 4.0];

    #[test]
    fn power_weights_examples() {
        let ones = power_weights(0.0, 5).unwrap();
        assert!(ones.values().iter().all(|&v| v == 1.0));

        let w = power_weights(0.5, 4).unwrap();
        let expected = [1.0, 0.707_106_781_186_547_5, 0.577_350_269_189_625_8, 0.5];
        for (v, e) in w.values().iter().zip(expected) {
            assert!((v - e).abs() < 1e-15);
        }
        // generator extends past the stored prefix
        assert!((w.get(100).unwrap() - 0.1).abs() < 1e-15);

        assert!(power_weights(1.5, 4).is_err());
        assert!(power_weights(-0.1, 4).is_err());
    }

    #[test]
    fn truncated_weights_without_generator() {
        let w = WeightSequence::from_values(vec![1.0, 0.5, 0.25]).unwrap();
        assert!(matches!(w.get(4), Err(Error::Truncation(_))));
        assert!(WeightSequence::from_values(vec![0.9, 0.5]).is_err());
        assert!(WeightSequence::from_values(vec![1.0, 0.5, 0.6]).is_err());
    }

    #[test]
    fn square_root_weights_pass_everything() {
        let v = validate_weight_sequence(&power_weights(0.5, 256).unwrap(), &P_GRID).unwrap();
        assert!(v.passed, "{v:?}");
        assert!(v.limit_condition.vanishes);
        assert!((v.limit_condition.log_slope - 0.5).abs() < 0.1);
    }

    #[test]
    fn constant_weights_fail_the_limit() {
        let v = validate_weight_sequence(&power_weights(0.0, 256).unwrap(), &P_GRID).unwrap();
        assert!(!v.tends_to_zero);
        assert!(!v.passed);
    }

    #[test]
    fn geometric_weights_fail_divergence_and_m() {
        let alpha = WeightSequence::from_values((0..256).map(|k| 0.5_f64.powi(k)).collect()).unwrap();
        let v = validate_weight_sequence(&alpha, &[2.0]).unwrap();
        assert!(!v.divergent_sum);
        // α_{[n/2]}/α_n = 2^{n - [n/2]} keeps doubling
        assert!(!v.m_finite);
        assert!(v.m_estimates[0].m_at_n > 1e10 * v.m_estimates[0].m_at_half.min(1e300));
        assert!(!v.passed);
    }

    #[test]
    fn harmonic_weights_pass_but_limit_fails() {
        let v = validate_weight_sequence(&power_weights(1.0, 256).unwrap(), &P_GRID).unwrap();
        assert!(v.passed, "{v:?}");
        assert!(!v.limit_condition.vanishes);
        assert!(v.limit_condition.log_slope < LIMIT_SLOPE_MIN);
    }

    #[test]
    fn m_estimate_direct() {
        // α = n^{-1/2}, p = 2: sup over n >= 2 of sqrt(n/[n/2]) is sqrt(3) at n = 3
        let a = power_weights(0.5, 64).unwrap();
        let m = m_estimate(a.values(), 2.0, 64);
        assert!((m - 3.0_f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_p_grid() {
        let a = power_weights(0.5, 16).unwrap();
        assert!(validate_weight_sequence(&a, &[]).is_err());
        assert!(validate_weight_sequence(&a, &[1.0]).is_err());
    }
}
