//! Quasi-norms of approximation spaces, evaluated on the sequence of best
//! approximation errors `E_n`.

use crate::boyd::BoydFunction;
use crate::error::{Error, Result};
use crate::numeric::compensated_sum;
use crate::sequences::{lp_norm_of_slice, DecreasingSequence};
use crate::snorm::SymmetricNormingFunction;

/// Parameters of a Lorentz–Marcinkiewicz space `G_{φ,q}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LorentzMarcinkiewiczDescriptor {
    pub phi: BoydFunction,
    pub q: f64,
}

impl LorentzMarcinkiewiczDescriptor {
    pub fn new(phi: BoydFunction, q: f64) -> Result<Self> {
        check_q(q)?;
        Ok(Self { phi, q })
    }

    pub fn norm(&self, e: &DecreasingSequence) -> Result<f64> {
        lorentz_marcinkiewicz_norm(e, &self.phi, self.q)
    }
}

/// Parameters of a `Φ`-type space `G_Φ`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiTypeDescriptor {
    pub phi: SymmetricNormingFunction,
}

impl PhiTypeDescriptor {
    pub fn new(phi: SymmetricNormingFunction) -> Self {
        Self { phi }
    }

    pub fn norm(&self, e: &DecreasingSequence) -> Result<f64> {
        phi_type_norm(e, &self.phi)
    }
}

fn check_q(q: f64) -> Result<()> {
    if q > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("q must lie in (0, ∞], got {q}")))
    }
}

/// `(Σ [φ(n) E_n]^q / n)^{1/q}`, or `sup_n φ(n) E_n` when `q = ∞`.
pub fn lorentz_marcinkiewicz_norm(e: &DecreasingSequence, phi: &BoydFunction, q: f64) -> Result<f64> {
    check_q(q)?;
    lm_norm_of_slice(e.values(), phi, q)
}

/// `e` must be non-increasing and non-negative; `q` already validated.
pub(crate) fn lm_norm_of_slice(e: &[f64], phi: &BoydFunction, q: f64) -> Result<f64> {
    let support = e.iter().rposition(|&v| v > 0.0).map_or(0, |i| i + 1);
    let e = &e[..support];
    if e.is_empty() {
        return Ok(0.0);
    }
    let phis = (1..=e.len()).map(|n| phi.evaluate(n as f64)).collect::<Result<Vec<_>>>()?;
    if q.is_infinite() {
        return Ok(phis.iter().zip(e).map(|(f, v)| f * v).fold(0.0, f64::max));
    }
    let direct = compensated_sum(
        phis.iter()
            .zip(e)
            .enumerate()
            .map(|(i, (f, v))| (f * v).powf(q) / (i + 1) as f64),
    );
    if direct.is_finite() && direct > 0.0 {
        return Ok(direct.powf(1.0 / q));
    }
    // overflow or underflow: redo relative to the largest term
    let scale = phis.iter().zip(e).map(|(f, v)| f * v).fold(0.0, f64::max);
    let s = compensated_sum(
        phis.iter()
            .zip(e)
            .enumerate()
            .map(|(i, (f, v))| (f * v / scale).powf(q) / (i + 1) as f64),
    );
    Ok(scale * s.powf(1.0 / q))
}

/// `Φ((E_n)_n)`.
pub fn phi_type_norm(e: &DecreasingSequence, phi: &SymmetricNormingFunction) -> Result<f64> {
    phi.apply_decreasing(e)
}

/// `(Σ E_n^p)^{1/p}`, or `E_1` when `p = ∞`.
pub fn gp_norm(e: &DecreasingSequence, p: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::InvalidParameter(format!("p must lie in (0, ∞], got {p}")));
    }
    Ok(lp_norm_of_slice(e.values(), p))
}
