//! Functions of class B (positive, continuous, `φ(1) = 1`, finite dilation
//! function), their algebra, dilation estimates and Boyd indices, plus the
//! parameter functions produced by the reiteration identities.

mod dilation;
mod reiteration;
mod weights;

use std::fmt;
use std::sync::Arc;

pub use dilation::{
    boyd_indices, boyd_indices_with, check_product_dilation, check_submultiplicativity, dilation,
    dilation_with, BoydIndices, DilationEstimate, DilationGrid, GridCheck, INDEX_PROBE_LOG2,
};
pub use reiteration::{convexified_reiteration_weights, lp_couple_rho, reiteration_rho};
pub use weights::{
    m_estimate, power_weights, validate_weight_sequence, LimitProbe, MEstimate, WeightGenerator,
    WeightSequence, WeightValidation, DIVERGENCE_THRESHOLD, LIMIT_SLOPE_MIN, M_STABILITY,
    TAIL_DECAY_FACTOR,
};

use crate::error::{Error, Result};

/// An evaluable function of class B.
#[derive(Debug, Clone, PartialEq)]
pub enum BoydFunction {
    /// `t^θ`
    Power(f64),
    /// Built from a weight sequence: `t^{1/p}` on `(0,1)`, `(α_n n)^{1/p}`
    /// at integers, piecewise linear in between.
    PhiAlphaP { weights: Arc<WeightSequence>, p: f64 },
    Product(Box<BoydFunction>, Box<BoydFunction>),
    Quotient(Box<BoydFunction>, Box<BoydFunction>),
    /// `t ↦ outer(t^m)`
    ComposePower { outer: Box<BoydFunction>, exponent: f64 },
    /// `t ↦ φ₀(t) / χ(φ₀(t)/φ₁(t))`
    Reiterated {
        chi: Box<BoydFunction>,
        phi0: Box<BoydFunction>,
        phi1: Box<BoydFunction>,
    },
}

impl BoydFunction {
    pub fn power(theta: f64) -> Self {
        BoydFunction::Power(theta)
    }

    pub fn phi_alpha_p(weights: WeightSequence, p: f64) -> Result<Self> {
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::InvalidParameter(format!("p must be positive and finite, got {p}")));
        }
        Ok(BoydFunction::PhiAlphaP {
            weights: Arc::new(weights),
            p,
        })
    }

    pub fn product(a: BoydFunction, b: BoydFunction) -> Self {
        BoydFunction::Product(Box::new(a), Box::new(b))
    }

    pub fn quotient(a: BoydFunction, b: BoydFunction) -> Self {
        BoydFunction::Quotient(Box::new(a), Box::new(b))
    }

    pub fn compose_power(outer: BoydFunction, exponent: f64) -> Self {
        BoydFunction::ComposePower {
            outer: Box::new(outer),
            exponent,
        }
    }

    /// `φ(t)` for `t > 0`.
    pub fn evaluate(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Domain(format!("Boyd functions are defined on (0, ∞), got t = {t}")));
        }
        self.eval_unchecked(t)
    }

    fn eval_unchecked(&self, t: f64) -> Result<f64> {
        Ok(match self {
            BoydFunction::Power(theta) => t.powf(*theta),
            BoydFunction::PhiAlphaP { weights, p } => phi_alpha_p_at(weights, *p, t)?,
            BoydFunction::Product(a, b) => a.eval_unchecked(t)? * b.eval_unchecked(t)?,
            BoydFunction::Quotient(a, b) => a.eval_unchecked(t)? / b.eval_unchecked(t)?,
            BoydFunction::ComposePower { outer, exponent } => {
                let s = t.powf(*exponent);
                if !(s > 0.0) || !s.is_finite() {
                    return Err(Error::numerical(format!("t^{exponent} left (0, ∞) at t = {t}")));
                }
                outer.eval_unchecked(s)?
            }
            BoydFunction::Reiterated { chi, phi0, phi1 } => {
                let f0 = phi0.eval_unchecked(t)?;
                let f1 = phi1.eval_unchecked(t)?;
                let ratio = f0 / f1;
                if !(ratio > 0.0) || !ratio.is_finite() {
                    return Err(Error::numerical(format!("φ₀/φ₁ left (0, ∞) at t = {t}")));
                }
                f0 / chi.eval_unchecked(ratio)?
            }
        })
    }

    /// Exponent `θ` when the function is identically `t^θ`.
    pub fn power_exponent(&self) -> Option<f64> {
        match self {
            BoydFunction::Power(theta) => Some(*theta),
            BoydFunction::PhiAlphaP { .. } => None,
            BoydFunction::Product(a, b) => Some(a.power_exponent()? + b.power_exponent()?),
            BoydFunction::Quotient(a, b) => Some(a.power_exponent()? - b.power_exponent()?),
            BoydFunction::ComposePower { outer, exponent } => Some(outer.power_exponent()? * exponent),
            BoydFunction::Reiterated { chi, phi0, phi1 } => {
                let (c, a, b) = (chi.power_exponent()?, phi0.power_exponent()?, phi1.power_exponent()?);
                Some(a - c * (a - b))
            }
        }
    }

    /// Closed-form dilation function, available for pure powers.
    pub fn exact_dilation(&self, t: f64) -> Option<f64> {
        self.power_exponent().map(|theta| t.powf(theta))
    }

    /// Largest argument at which evaluation stays inside stored weights,
    /// `None` when unbounded (or not tracked).
    pub fn argument_cap(&self) -> Option<f64> {
        match self {
            BoydFunction::PhiAlphaP { weights, .. } => weights.max_index().map(|n| n as f64),
            BoydFunction::Product(a, b) | BoydFunction::Quotient(a, b) => {
                match (a.argument_cap(), b.argument_cap()) {
                    (Some(x), Some(y)) => Some(x.min(y)),
                    (x, y) => x.or(y),
                }
            }
            BoydFunction::ComposePower { outer, exponent } if *exponent > 0.0 => {
                outer.argument_cap().map(|c| c.powf(1.0 / exponent))
            }
            _ => None,
        }
    }

    /// `φ(1)`, which must be 1 for class B.
    pub fn normalization(&self) -> Result<f64> {
        self.evaluate(1.0)
    }
}

fn phi_alpha_p_at(weights: &WeightSequence, p: f64, t: f64) -> Result<f64> {
    if t < 1.0 {
        return Ok(t.powf(1.0 / p));
    }
    let at_integer = |n: usize| -> Result<f64> { Ok((weights.get(n)? * n as f64).powf(1.0 / p)) };
    let floor = t.floor();
    let n = floor as usize;
    let frac = t - floor;
    if frac == 0.0 {
        at_integer(n)
    } else {
        Ok((1.0 - frac) * at_integer(n)? + frac * at_integer(n + 1)?)
    }
}

impl fmt::Display for BoydFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoydFunction::Power(theta) => write!(f, "power:{theta}"),
            BoydFunction::PhiAlphaP { weights, p } => match weights.generator().and_then(|g| g.power_exponent()) {
                Some(a) => write!(f, "phialphap:a={a},p={p}"),
                None => write!(f, "phialphap:[{} weights],p={p}", weights.len()),
            },
            BoydFunction::Product(a, b) => write!(f, "prod:({a})*({b})"),
            BoydFunction::Quotient(a, b) => write!(f, "quot:({a})/({b})"),
            BoydFunction::ComposePower { outer, exponent } => write!(f, "compose:({outer})^{exponent}"),
            BoydFunction::Reiterated { chi, phi0, phi1 } => {
                write!(f, "reiterated:chi=({chi}),phi0=({phi0}),phi1=({phi1})")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sqrt_weights() -> WeightSequence {
        power_weights(0.5, 64).unwrap()
    }

    #[test]
    fn power_evaluation() {
        assert_eq!(BoydFunction::power(0.5).evaluate(4.0).unwrap(), 2.0);
        assert!(matches!(BoydFunction::power(0.5).evaluate(0.0), Err(Error::Domain(_))));
        assert!(matches!(BoydFunction::power(0.5).evaluate(-1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn phi_alpha_p_branches() {
        let phi = BoydFunction::phi_alpha_p(sqrt_weights(), 2.0).unwrap();
        assert_eq!(phi.evaluate(1.0).unwrap(), 1.0);
        // integer branch: (4^{-1/2}·4)^{1/2} = √2
        assert!((phi.evaluate(4.0).unwrap() - 2.0_f64.sqrt()).abs() < 1e-15);
        assert!((phi.evaluate(0.25).unwrap() - 0.5).abs() < 1e-15);
        // linear between integers
        let mid = phi.evaluate(4.5).unwrap();
        let expected = 0.5 * (2.0_f64.sqrt()) + 0.5 * (5.0_f64.sqrt() * 5.0_f64.powf(-0.5) * 5.0_f64.sqrt()).sqrt();
        assert!((mid - expected).abs() < 1e-14, "{mid} vs {expected}");
    }

    #[test]
    fn phi_alpha_p_at_one_for_any_weights() {
        for a in [0.0, 0.25, 0.9, 1.0] {
            for p in [0.5, 1.0, 3.0] {
                let phi = BoydFunction::phi_alpha_p(power_weights(a, 8).unwrap(), p).unwrap();
                assert_eq!(phi.evaluate(1.0).unwrap(), 1.0);
            }
        }
    }

    #[test]
    fn phi_alpha_p_is_continuous_at_joints() {
        let phi = BoydFunction::phi_alpha_p(sqrt_weights(), 2.0).unwrap();
        for n in 1..40 {
            let t = n as f64;
            let left = phi.evaluate(t * (1.0 - 1e-14)).unwrap();
            let right = phi.evaluate(t * (1.0 + 1e-14)).unwrap();
            let at = phi.evaluate(t).unwrap();
            assert!((left - at).abs() <= 1e-12 && (right - at).abs() <= 1e-12, "joint {n}");
        }
    }

    #[test]
    fn truncation_without_generator() {
        let w = WeightSequence::from_values(vec![1.0, 0.8, 0.7]).unwrap();
        let phi = BoydFunction::phi_alpha_p(w, 1.0).unwrap();
        assert!(phi.evaluate(3.0).is_ok());
        assert!(matches!(phi.evaluate(3.5), Err(Error::Truncation(_))));
        assert_eq!(phi.argument_cap(), Some(3.0));
    }

    #[test]
    fn power_exponent_algebra() {
        let q = BoydFunction::quotient(BoydFunction::power(0.6), BoydFunction::power(0.2));
        assert!((q.power_exponent().unwrap() - 0.4).abs() < 1e-15);
        let c = BoydFunction::compose_power(BoydFunction::power(0.5), 3.0);
        assert_eq!(c.power_exponent(), Some(1.5));
        let phi = BoydFunction::phi_alpha_p(sqrt_weights(), 2.0).unwrap();
        assert_eq!(BoydFunction::product(phi, BoydFunction::power(1.0)).power_exponent(), None);
    }

    #[test]
    fn display_round_trips_through_parser() {
        let f = BoydFunction::quotient(BoydFunction::power(0.6), BoydFunction::power(0.2));
        let parsed = crate::parse::parse_boyd(&f.to_string()).unwrap();
        assert_eq!(parsed, f);
    }
}
