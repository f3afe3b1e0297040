//! Couple norms specialised to non-increasing, non-negative vectors of a fixed
//! maximal length: a weighted `l_q` sum or a weighted sup.

use super::SequenceSpaceDescriptor;
use crate::error::Result;
use crate::snorm::SymmetricNormingFunction;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Form {
    /// `(Σ w_n v_n^q)^{1/q}`
    Sum { q: f64 },
    /// `max w_n v_n`
    Sup,
}

#[derive(Debug, Clone)]
pub(crate) struct PreparedNorm {
    pub form: Form,
    pub w: Vec<f64>,
}

impl PreparedNorm {
    /// Valid on non-increasing vectors with at most `len` entries.
    pub fn new(desc: &SequenceSpaceDescriptor, len: usize) -> Result<Self> {
        let ones = || vec![1.0; len];
        Ok(match desc {
            SequenceSpaceDescriptor::Lp(p) if p.is_infinite() => Self { form: Form::Sup, w: ones() },
            SequenceSpaceDescriptor::Lp(p) => Self { form: Form::Sum { q: *p }, w: ones() },
            SequenceSpaceDescriptor::LorentzMarcinkiewicz { phi, q } => {
                let phis = (1..=len).map(|n| phi.evaluate(n as f64)).collect::<Result<Vec<_>>>()?;
                if q.is_infinite() {
                    Self { form: Form::Sup, w: phis }
                } else {
                    let w = phis.iter().enumerate().map(|(i, f)| f.powf(*q) / (i + 1) as f64).collect();
                    Self { form: Form::Sum { q: *q }, w }
                }
            }
            SequenceSpaceDescriptor::PhiType(phi) => match phi {
                SymmetricNormingFunction::ExtremalOne => Self { form: Form::Sum { q: 1.0 }, w: ones() },
                SymmetricNormingFunction::ExtremalInfinity => Self { form: Form::Sup, w: ones() },
                SymmetricNormingFunction::Weighted(eps) => Self {
                    form: Form::Sum { q: 1.0 },
                    w: eps.prefix(len)?,
                },
                SymmetricNormingFunction::Convexified { weights, p } => Self {
                    form: Form::Sum { q: *p },
                    w: weights.prefix(len)?,
                },
            },
        })
    }

    /// `v^q` entrywise for sum forms, `v` itself for the sup form.
    pub fn powered(&self, v: &[f64]) -> Vec<f64> {
        match self.form {
            Form::Sum { q } if q != 1.0 => v.iter().map(|x| x.powf(q)).collect(),
            _ => v.to_vec(),
        }
    }

    /// Norm from the accumulated `Σ w v^q` (sum form) or `max w v` (sup form).
    pub fn finish(&self, acc: f64) -> f64 {
        match self.form {
            Form::Sum { q } if q != 1.0 => acc.powf(1.0 / q),
            _ => acc,
        }
    }

    pub fn eval(&self, v: &[f64]) -> f64 {
        match self.form {
            Form::Sup => v.iter().zip(&self.w).map(|(x, w)| w * x).fold(0.0, f64::max),
            Form::Sum { q: 1.0 } => v.iter().zip(&self.w).map(|(x, w)| w * x).sum(),
            Form::Sum { q } => {
                let s: f64 = v.iter().zip(&self.w).map(|(x, w)| w * x.powf(q)).sum();
                s.powf(1.0 / q)
            }
        }
    }

    /// Value and a subgradient with respect to `v`.
    pub fn eval_grad(&self, v: &[f64], grad: &mut [f64]) -> f64 {
        match self.form {
            Form::Sup => {
                grad.iter_mut().for_each(|g| *g = 0.0);
                let (mut best, mut arg) = (0.0, None);
                for (i, (x, w)) in v.iter().zip(&self.w).enumerate() {
                    if w * x > best {
                        best = w * x;
                        arg = Some(i);
                    }
                }
                if let Some(i) = arg {
                    grad[i] = self.w[i];
                }
                best
            }
            Form::Sum { q: 1.0 } => {
                grad.copy_from_slice(&self.w[..v.len()]);
                v.iter().zip(&self.w).map(|(x, w)| w * x).sum()
            }
            Form::Sum { q } => {
                let mut s = 0.0;
                for ((g, x), w) in grad.iter_mut().zip(v).zip(&self.w) {
                    let xq1 = x.powf(q - 1.0);
                    *g = w * xq1;
                    s += w * xq1 * x;
                }
                if s <= 0.0 {
                    grad.iter_mut().for_each(|g| *g = 0.0);
                    return 0.0;
                }
                let norm = s.powf(1.0 / q);
                let factor = norm.powf(1.0 - q);
                grad.iter_mut().for_each(|g| *g *= factor);
                norm
            }
        }
    }
}
