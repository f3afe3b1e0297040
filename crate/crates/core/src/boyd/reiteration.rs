//! Parameter functions produced by the reiteration identities.

use super::{boyd_indices, BoydFunction, WeightSequence};
use crate::error::{Error, Result};

/// `ρ(t) = φ₀(t) / χ(φ₀(t)/φ₁(t))`: the parameter for which interpolating
/// `(G_{φ₀,q₀}, G_{φ₁,q₁})` with `(χ, q)` gives `G_{ρ,q}`.
pub fn reiteration_rho(chi: &BoydFunction, phi0: &BoydFunction, phi1: &BoydFunction) -> BoydFunction {
    if let (Some(c), Some(a), Some(b)) = (chi.power_exponent(), phi0.power_exponent(), phi1.power_exponent()) {
        return BoydFunction::Power(a - c * (a - b));
    }
    BoydFunction::Reiterated {
        chi: Box::new(chi.clone()),
        phi0: Box::new(phi0.clone()),
        phi1: Box::new(phi1.clone()),
    }
}

/// Parameter `ρ` with `(G_{p₀}, G_{p₁})_{ρ,q} = G_{φ,q}`.
///
/// `p₁ = ∞` gives `ρ(t) = t / φ(t^{p₀})`; otherwise
/// `ρ(t) = t^{p₁/(p₁-p₀)} / φ(t^{p₀p₁/(p₁-p₀)})`. Logs a warning when the
/// Boyd indices of `φ` fall outside `(1/p₁, 1/p₀)`.
pub fn lp_couple_rho(phi: &BoydFunction, p0: f64, p1: f64) -> Result<BoydFunction> {
    if !(p0 > 0.0 && p0.is_finite() && p1 > p0) {
        return Err(Error::InvalidParameter(format!("need 0 < p0 < p1 <= ∞, got p0 = {p0}, p1 = {p1}")));
    }
    match boyd_indices(phi) {
        Ok(idx) if !idx.within(1.0 / p1, 1.0 / p0) => log::warn!(
            "Boyd indices [{}, {}] of {phi} are outside ({}, {})",
            idx.lower,
            idx.upper,
            1.0 / p1,
            1.0 / p0
        ),
        Err(e) => log::warn!("could not estimate Boyd indices of {phi}: {e}"),
        _ => {}
    }
    let (lead, inner) = if p1.is_infinite() {
        (1.0, p0)
    } else {
        (p1 / (p1 - p0), p0 * p1 / (p1 - p0))
    };
    let rho = BoydFunction::quotient(BoydFunction::Power(lead), BoydFunction::compose_power(phi.clone(), inner));
    Ok(match rho.power_exponent() {
        Some(theta) => BoydFunction::Power(theta),
        None => rho,
    })
}

/// Exponent `r = pql/(p+ql-q)` and weights
/// `γ_n = α_n^{r(1/p - 1/(pl))} β_n^{r/(ql)}` for interpolating the
/// convexified spaces of `α` (power `p`) and `β` (power `q`) with `t^{1/l}`.
pub fn convexified_reiteration_weights(
    alpha: &WeightSequence,
    beta: &WeightSequence,
    p: f64,
    q: f64,
    l: f64,
) -> Result<(f64, WeightSequence)> {
    if !(p >= 1.0 && p <= q && q.is_finite()) {
        return Err(Error::InvalidParameter(format!("relation 1 <= p <= q < ∞ fails (p = {p}, q = {q})")));
    }
    if !(l > 1.0 && l.is_finite()) {
        return Err(Error::InvalidParameter(format!("relation l > 1 fails (l = {l})")));
    }
    if !(p + q * l > q) {
        return Err(Error::InvalidParameter("relation p + ql > q fails".into()));
    }
    let r = p * q * l / (p + q * l - q);
    if !(r > 1.0) {
        return Err(Error::InvalidParameter(format!("relation pql/(p+ql-q) > 1 fails (r = {r})")));
    }

    let len = alpha.len().min(beta.len());
    for n in 1..=len {
        if beta.get(n)? > alpha.get(n)? {
            return Err(Error::InvalidParameter(format!("β_n <= α_n fails at n = {n}")));
        }
    }
    let e_alpha = r * (1.0 / p - 1.0 / (p * l));
    let e_beta = r / (q * l);

    let gamma = match (alpha.generator(), beta.generator()) {
        (Some(ga), Some(gb)) => {
            // sample far beyond the stored prefix too
            let mut n = len.max(1);
            while n <= 1 << 40 {
                if gb.eval(n) > ga.eval(n) * (1.0 + 1e-12) {
                    return Err(Error::InvalidParameter(format!("β_n <= α_n fails at n = {n}")));
                }
                n *= 2;
            }
            WeightSequence::from_generator(ga.powered(e_alpha).times(&gb.powered(e_beta)), len)?
        }
        _ => {
            let values = (1..=len)
                .map(|n| Ok(alpha.get(n)?.powf(e_alpha) * beta.get(n)?.powf(e_beta)))
                .collect::<Result<Vec<f64>>>()?;
            WeightSequence::from_values(values)?
        }
    };
    Ok((r, gamma))
}


#[cfg(test)]
mod tests {
    use super::super::power_weights;
    use super::*;

    #[test]
    fn power_case_rho() {
        let rho = reiteration_rho(&BoydFunction::power(0.5), &BoydFunction::power(0.6), &BoydFunction::power(0.2));
        assert!((rho.power_exponent().unwrap() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn equal_endpoints_give_the_endpoint() {
        let phi = BoydFunction::phi_alpha_p(power_weights(0.5, 64).unwrap(), 2.0).unwrap();
        let rho = reiteration_rho(&BoydFunction::power(0.3), &phi, &phi);
        for t in [0.01, 0.5, 1.0, 3.3, 40.0] {
            assert!((rho.evaluate(t).unwrap() - phi.evaluate(t).unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn rho_is_normalized() {
        let phi0 = BoydFunction::phi_alpha_p(power_weights(0.5, 64).unwrap(), 2.0).unwrap();
        let rho = reiteration_rho(&BoydFunction::power(0.7), &phi0, &BoydFunction::power(0.1));
        assert_eq!(rho.evaluate(1.0).unwrap(), 1.0);
    }

    #[test]
    fn lp_couple_rho_examples() {
        let rho = lp_couple_rho(&BoydFunction::power(0.5), 1.0, f64::INFINITY).unwrap();
        assert_eq!(rho.power_exponent(), Some(0.5));
        let rho = lp_couple_rho(&BoydFunction::power(0.75), 1.0, 2.0).unwrap();
        assert!((rho.power_exponent().unwrap() - 0.5).abs() < 1e-15);
        // positive leading exponent reproduces the p1 = ∞ branch in the limit
        let near = lp_couple_rho(&BoydFunction::power(0.5), 1.0, 1e9).unwrap();
        assert!((near.power_exponent().unwrap() - 0.5).abs() < 1e-8);

        let phi = BoydFunction::phi_alpha_p(power_weights(0.5, 64).unwrap(), 1.5).unwrap();
        let rho = lp_couple_rho(&phi, 1.0, 4.0).unwrap();
        assert!((rho.evaluate(1.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn lp_couple_rho_rejects_bad_order() {
        assert!(lp_couple_rho(&BoydFunction::power(0.5), 2.0, 1.0).is_err());
        assert!(lp_couple_rho(&BoydFunction::power(0.5), 0.0, 1.0).is_err());
        assert!(lp_couple_rho(&BoydFunction::power(0.5), 1.0, 1.0).is_err());
    }

    #[test]
    fn gamma_examples() {
        let a = power_weights(0.5, 64).unwrap();
        let b = power_weights(0.75, 64).unwrap();
        let (r, g) = convexified_reiteration_weights(&a, &b, 2.0, 2.0, 2.0).unwrap();
        assert!((r - 2.0).abs() < 1e-15);
        assert!((g.generator().unwrap().power_exponent().unwrap() - 0.625).abs() < 1e-15);
        for n in 1..=64 {
            let expected = a.get(n).unwrap().sqrt() * b.get(n).unwrap().sqrt();
            assert!((g.get(n).unwrap() - expected).abs() < 1e-15);
            assert!((g.get(n).unwrap() - (n as f64).powf(-0.625)).abs() < 1e-14);
        }
        assert_eq!(g.get(1).unwrap(), 1.0);

        let (r, g) = convexified_reiteration_weights(&a, &b, 1.0, 2.0, 2.0).unwrap();
        assert!((r - 4.0 / 3.0).abs() < 1e-15);
        assert!((g.generator().unwrap().power_exponent().unwrap() - 7.0 / 12.0).abs() < 1e-14);
    }

    #[test]
    fn gamma_rejects_violations() {
        let a = power_weights(0.5, 16).unwrap();
        let b = power_weights(0.75, 16).unwrap();
        let err = convexified_reiteration_weights(&a, &b, 3.0, 2.0, 2.0).unwrap_err();
        assert!(err.to_string().contains("p <= q"));
        let err = convexified_reiteration_weights(&a, &b, 2.0, 2.0, 1.0).unwrap_err();
        assert!(err.to_string().contains("l > 1"));
        let err = convexified_reiteration_weights(&b, &a, 2.0, 2.0, 2.0).unwrap_err();
        assert!(err.to_string().contains("β_n <= α_n"));
    }
}
