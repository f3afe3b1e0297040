//! Deterministic batches of test sequences.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sequences::DecreasingSequence;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DecayProfile {
    /// `r^{n-1}` with `r ∈ [0.3, 0.95]`.
    Geometric,
    /// `n^{-a}`, with `a ∈ [0.6, 3]` drawn per sample unless fixed.
    Polynomial { a: Option<f64> },
    /// A geometric or polynomial base times random block levels, rearranged.
    Mixed,
    /// `k` ones then zeros, with `k` drawn per sample unless fixed.
    Plateau { k: Option<usize> },
}

impl fmt::Display for DecayProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecayProfile::Geometric => write!(f, "geometric"),
            DecayProfile::Polynomial { a: Some(a) } => write!(f, "polynomial:{a}"),
            DecayProfile::Polynomial { a: None } => write!(f, "polynomial"),
            DecayProfile::Mixed => write!(f, "mixed"),
            DecayProfile::Plateau { k: Some(k) } => write!(f, "plateau:{k}"),
            DecayProfile::Plateau { k: None } => write!(f, "plateau"),
        }
    }
}

impl FromStr for DecayProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let bad = || Error::Parse(format!("unknown decay profile `{s}`"));
        match (head, arg) {
            ("geometric", None) => Ok(DecayProfile::Geometric),
            ("mixed", None) => Ok(DecayProfile::Mixed),
            ("polynomial", None) => Ok(DecayProfile::Polynomial { a: None }),
            ("polynomial", Some(a)) => Ok(DecayProfile::Polynomial {
                a: Some(a.parse().map_err(|_| bad())?),
            }),
            ("plateau", None) => Ok(DecayProfile::Plateau { k: None }),
            ("plateau", Some(k)) => Ok(DecayProfile::Plateau {
                k: Some(k.parse().map_err(|_| bad())?),
            }),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub seed: u64,
    pub count: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub profile: DecayProfile,
}

impl SampleSpec {
    pub fn new(seed: u64, count: usize, n: usize, profile: DecayProfile) -> Result<Self> {
        let spec = Self { seed, count, n, profile };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.count < 1 {
            return Err(Error::InvalidParameter("sample count must be at least 1".into()));
        }
        if self.n < 4 {
            return Err(Error::InvalidParameter(format!("truncation length must be at least 4, got {}", self.n)));
        }
        match self.profile {
            DecayProfile::Polynomial { a: Some(a) } if !(a > 0.0 && a.is_finite()) => {
                Err(Error::InvalidParameter(format!("polynomial decay needs a > 0, got {a}")))
            }
            DecayProfile::Plateau { k: Some(k) } if k == 0 || k > self.n => {
                Err(Error::InvalidParameter(format!("plateau length must lie in 1..={}, got {k}", self.n)))
            }
            _ => Ok(()),
        }
    }

    /// Same seeds and profile at another truncation length.
    pub fn with_len(&self, n: usize) -> Self {
        Self { n, ..*self }
    }
}

/// Generator for sample `index`; entries are drawn in index order, so a
/// longer truncation extends the raw values of a shorter one.
fn sample_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn one_sample(spec: &SampleSpec, index: usize) -> DecreasingSequence {
    let mut rng = sample_rng(spec.seed, index);
    let n = spec.n;
    let values: Vec<f64> = match spec.profile {
        DecayProfile::Geometric => geometric(&mut rng, n),
        DecayProfile::Polynomial { a } => {
            let a = a.unwrap_or_else(|| rng.random_range(0.6..=3.0));
            polynomial(a, n)
        }
        DecayProfile::Plateau { k } => {
            // drawn against a fixed range so the plateau does not depend on N
            let k = k.unwrap_or_else(|| rng.random_range(1..=64usize));
            (1..=n).map(|i| if i <= k { 1.0 } else { 0.0 }).collect()
        }
        DecayProfile::Mixed => {
            let base = if rng.random::<bool>() { geometric(&mut rng, n) } else {
                polynomial(rng.random_range(0.6..=3.0), n)
            };
            let mut level = 1.0;
            let mut left = 0usize;
            base.into_iter()
                .map(|b| {
                    if left == 0 {
                        level = rng.random_range(0.25..=1.0);
                        left = rng.random_range(1..=8usize);
                    }
                    left -= 1;
                    b * level
                })
                .collect()
        }
    };
    DecreasingSequence::rearranged(&values).expect("generated values are finite")
}

fn geometric(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let r: f64 = rng.random_range(0.3..=0.95);
    (0..n).map(|i| r.powi(i as i32)).collect()
}

fn polynomial(a: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|i| (i as f64).powf(-a)).collect()
}

/// `spec.count` non-zero decreasing sequences of length `spec.n`.
pub fn sample_sequences(spec: &SampleSpec) -> Result<Vec<DecreasingSequence>> {
    spec.validate()?;
    Ok((0..spec.count).map(|i| one_sample(spec, i)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateau_full_length_is_all_ones() {
        let spec = SampleSpec::new(1, 3, 16, DecayProfile::Plateau { k: Some(16) }).unwrap();
        for s in sample_sequences(&spec).unwrap() {
            assert!(s.values().iter().all(|&v| v == 1.0));
        }
    }

    #[test]
    fn polynomial_fixed_exponent() {
        let spec = SampleSpec::new(0, 1, 4, DecayProfile::Polynomial { a: Some(1.0) }).unwrap();
        assert_eq!(sample_sequences(&spec).unwrap()[0].values(), &[1.0, 0.5, 1.0 / 3.0, 0.25]);
    }

    #[test]
    fn deterministic_and_non_zero() {
        for profile in [
            DecayProfile::Geometric,
            DecayProfile::Polynomial { a: None },
            DecayProfile::Mixed,
            DecayProfile::Plateau { k: None },
        ] {
            let spec = SampleSpec::new(42, 20, 64, profile).unwrap();
            let a = sample_sequences(&spec).unwrap();
            assert_eq!(a, sample_sequences(&spec).unwrap());
            assert!(a.iter().all(|s| !s.is_zero() && s.len() == 64));
            let other = sample_sequences(&SampleSpec { seed: 43, ..spec }).unwrap();
            if !matches!(profile, DecayProfile::Plateau { .. }) {
                assert_ne!(a, other);
            }
        }
    }

    #[test]
    fn longer_truncations_extend_shorter_ones() {
        for profile in [DecayProfile::Geometric, DecayProfile::Polynomial { a: None }] {
            let spec = SampleSpec::new(7, 10, 32, profile).unwrap();
            let short = sample_sequences(&spec).unwrap();
            let long = sample_sequences(&spec.with_len(64)).unwrap();
            for (s, l) in short.iter().zip(&long) {
                assert_eq!(s.values(), &l.values()[..32]);
            }
        }
    }

    #[test]
    fn invalid_specs() {
        assert!(SampleSpec::new(0, 0, 16, DecayProfile::Geometric).is_err());
        assert!(SampleSpec::new(0, 1, 3, DecayProfile::Geometric).is_err());
        assert!(SampleSpec::new(0, 1, 8, DecayProfile::Plateau { k: Some(9) }).is_err());
    }

    #[test]
    fn profile_strings() {
        for s in ["geometric", "mixed", "polynomial", "polynomial:1.5", "plateau", "plateau:4"] {
            assert_eq!(s.parse::<DecayProfile>().unwrap().to_string(), s);
        }
        assert!("zigzag".parse::<DecayProfile>().is_err());
    }
}
