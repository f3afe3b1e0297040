//! Peetre's K-functional over couples of sequence spaces, the real-method
//! interpolation quasi-norm with a functional parameter, and the sum and
//! intersection norms.

mod prepared;
mod quadrature;
mod solver;
mod truncation;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use quadrature::{InterpolationNorm, InterpolationParameter, Majorants, QuadratureConfig};
pub use solver::SolverConfig;

use crate::approx_spaces::{lorentz_marcinkiewicz_norm, phi_type_norm};
use crate::boyd::BoydFunction;
use crate::error::{Error, Result};
use crate::sequences::{lp_norm, DecreasingSequence};
use crate::snorm::SymmetricNormingFunction;
use prepared::PreparedNorm;
use truncation::TruncationTable;

/// One space of a couple.
#[derive(Debug, Clone, PartialEq)]
pub enum SequenceSpaceDescriptor {
    Lp(f64),
    LorentzMarcinkiewicz { phi: BoydFunction, q: f64 },
    PhiType(SymmetricNormingFunction),
}

impl SequenceSpaceDescriptor {
    pub fn lp(p: f64) -> Result<Self> {
        if !(p > 0.0) {
            return Err(Error::InvalidParameter(format!("l_p exponent must lie in (0, ∞], got {p}")));
        }
        Ok(Self::Lp(p))
    }

    pub fn lorentz_marcinkiewicz(phi: BoydFunction, q: f64) -> Result<Self> {
        if !(q > 0.0) {
            return Err(Error::InvalidParameter(format!("q must lie in (0, ∞], got {q}")));
        }
        Ok(Self::LorentzMarcinkiewicz { phi, q })
    }

    pub fn phi_type(phi: SymmetricNormingFunction) -> Self {
        Self::PhiType(phi)
    }

    pub fn norm(&self, x: &DecreasingSequence) -> Result<f64> {
        match self {
            Self::Lp(p) => lp_norm(x, *p),
            Self::LorentzMarcinkiewicz { phi, q } => lorentz_marcinkiewicz_norm(x, phi, *q),
            Self::PhiType(phi) => phi_type_norm(x, phi),
        }
    }

    /// Whether the norm is convex on splittings, which `k_convex` requires.
    pub fn is_convex(&self) -> bool {
        match self {
            Self::Lp(p) => *p >= 1.0,
            Self::LorentzMarcinkiewicz { q, .. } => *q >= 1.0,
            Self::PhiType(_) => true,
        }
    }

    fn is_l1(&self) -> bool {
        matches!(self, Self::Lp(p) if *p == 1.0) || matches!(self, Self::PhiType(SymmetricNormingFunction::ExtremalOne))
    }

    fn is_linf(&self) -> bool {
        matches!(self, Self::Lp(p) if p.is_infinite())
            || matches!(self, Self::PhiType(SymmetricNormingFunction::ExtremalInfinity))
    }
}

impl fmt::Display for SequenceSpaceDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Lp(p) if p.is_infinite() => write!(f, "lp:inf"),
            Self::Lp(p) => write!(f, "lp:{p}"),
            Self::LorentzMarcinkiewicz { phi, q } if q.is_infinite() => write!(f, "lm:inf:{phi}"),
            Self::LorentzMarcinkiewicz { phi, q } => write!(f, "lm:{q}:{phi}"),
            Self::PhiType(phi) => write!(f, "snf:{phi}"),
        }
    }
}

/// `(E₀, E₁)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceCouple {
    pub e0: SequenceSpaceDescriptor,
    pub e1: SequenceSpaceDescriptor,
}

impl SequenceCouple {
    pub fn new(e0: SequenceSpaceDescriptor, e1: SequenceSpaceDescriptor) -> Self {
        Self { e0, e1 }
    }

    pub fn lp(p0: f64, p1: f64) -> Result<Self> {
        Ok(Self::new(SequenceSpaceDescriptor::lp(p0)?, SequenceSpaceDescriptor::lp(p1)?))
    }

    /// `(l₁, l_∞)`.
    pub fn l1_linf() -> Self {
        Self::new(SequenceSpaceDescriptor::Lp(1.0), SequenceSpaceDescriptor::Lp(f64::INFINITY))
    }

    pub fn is_l1_linf(&self) -> bool {
        self.e0.is_l1() && self.e1.is_linf()
    }

    fn prepare(&self, len: usize) -> Result<(PreparedNorm, PreparedNorm)> {
        Ok((PreparedNorm::new(&self.e0, len)?, PreparedNorm::new(&self.e1, len)?))
    }
}

impl fmt::Display for SequenceCouple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.e0, self.e1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KMethod {
    /// Closed form, `(l₁, l_∞)` only.
    Exact,
    /// Best head/tail splitting.
    Truncation,
    /// Numerical minimisation over splittings.
    Convex,
}

impl fmt::Display for KMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KMethod::Exact => "exact",
            KMethod::Truncation => "truncation",
            KMethod::Convex => "convex",
        })
    }
}

impl FromStr for KMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(KMethod::Exact),
            "truncation" => Ok(KMethod::Truncation),
            "convex" => Ok(KMethod::Convex),
            other => Err(Error::Parse(format!("unknown K method `{other}`"))),
        }
    }
}

/// Support of `x` rescaled to `x_1 = 1`, with the scale.
fn normalized(x: &DecreasingSequence) -> (Vec<f64>, f64) {
    let v = x.values();
    let support = v.iter().rposition(|&e| e > 0.0).map_or(0, |i| i + 1);
    if support == 0 {
        return (Vec::new(), 0.0);
    }
    let scale = v[0];
    (v[..support].iter().map(|e| e / scale).collect(), scale)
}

fn check_t(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("K(t, x) needs t in (0, ∞), got {t}")))
    }
}

/// `K(t, x; l₁, l_∞) = Σ_{n≤⌊t⌋} x_n + (t − ⌊t⌋) x_{⌊t⌋+1}`.
pub fn k_exact_l1_linf(t: f64, x: &DecreasingSequence) -> Result<f64> {
    check_t(t)?;
    Ok(L1LinfPrefix::new(x.values()).k(t))
}

struct L1LinfPrefix {
    x: Vec<f64>,
    prefix: Vec<f64>,
}

impl L1LinfPrefix {
    fn new(x: &[f64]) -> Self {
        let mut prefix = vec![0.0];
        let mut acc = crate::numeric::CompensatedSum::new();
        for v in x {
            acc.add(*v);
            prefix.push(acc.value());
        }
        Self { x: x.to_vec(), prefix }
    }

    fn k(&self, t: f64) -> f64 {
        let n = self.x.len();
        if t >= n as f64 {
            return self.prefix[n];
        }
        let m = t.floor() as usize;
        self.prefix[m] + (t - m as f64) * self.x[m]
    }
}

/// Best value of `‖x·1_{n≤m}‖₀ + t‖x·1_{n>m}‖₁` over `m = 0..=N`.
pub fn k_truncation(t: f64, x: &DecreasingSequence, couple: &SequenceCouple) -> Result<f64> {
    check_t(t)?;
    let (v, scale) = normalized(x);
    if v.is_empty() {
        return Ok(0.0);
    }
    let (n0, n1) = couple.prepare(v.len())?;
    Ok(scale * TruncationTable::new(&v, &n0, &n1).k(t))
}

/// Result of [`k_convex_detailed`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexK {
    pub value: f64,
    /// The `E₀` part of the best splitting found.
    pub split: Vec<f64>,
    /// Certified bound on the optimality gap of the solver's best point.
    pub gap: f64,
    pub start_values: Vec<f64>,
    pub converged: bool,
    /// Whether a head/tail splitting beat the solver.
    pub truncation_won: bool,
}

/// `K(t, x)` by numerical minimisation; errors if the solver does not converge.
pub fn k_convex(t: f64, x: &DecreasingSequence, couple: &SequenceCouple) -> Result<f64> {
    let r = k_convex_detailed(t, x, couple, &SolverConfig::default())?;
    if r.converged {
        Ok(r.value)
    } else {
        Err(Error::NumericalFailure {
            message: format!(
                "K solver did not converge at t = {t} (gap {:e}, starts {:?})",
                r.gap, r.start_values
            ),
            best_so_far: Some(r.value),
        })
    }
}

/// Minimises `‖y‖₀ + t‖x − y‖₁` over splittings with `y` and `x − y`
/// non-increasing, and compares with the best head/tail splitting.
pub fn k_convex_detailed(t: f64, x: &DecreasingSequence, couple: &SequenceCouple, cfg: &SolverConfig) -> Result<ConvexK> {
    check_t(t)?;
    for e in [&couple.e0, &couple.e1] {
        if !e.is_convex() {
            return Err(Error::Unsupported(format!("{e} is not convex on splittings")));
        }
    }
    let (v, scale) = normalized(x);
    if v.is_empty() {
        return Ok(ConvexK {
            value: 0.0,
            split: vec![0.0; x.len()],
            gap: 0.0,
            start_values: Vec::new(),
            converged: true,
            truncation_won: false,
        });
    }
    let (n0, n1) = couple.prepare(v.len())?;
    let out = solver::Problem::new(t, &v, &n0, &n1).solve(cfg);
    let table = TruncationTable::new(&v, &n0, &n1);
    let m = table.argmin(t);
    let trunc = table.head[m] + t * table.tail[m];
    let (value, mut split, truncation_won) = if trunc < out.value {
        let mut y = v[..m].to_vec();
        y.resize(v.len(), 0.0);
        (trunc, y, true)
    } else {
        (out.value, out.y, false)
    };
    split.iter_mut().for_each(|s| *s *= scale);
    split.resize(x.len(), 0.0);
    Ok(ConvexK {
        value: scale * value,
        split,
        gap: scale * out.gap,
        start_values: out.start_values.iter().map(|s| s * scale).collect(),
        converged: out.converged || truncation_won,
        truncation_won,
    })
}

/// `K(t, x)` by the chosen method.
pub fn k_value(method: KMethod, t: f64, x: &DecreasingSequence, couple: &SequenceCouple) -> Result<f64> {
    match method {
        KMethod::Exact => {
            if !couple.is_l1_linf() {
                return Err(Error::Unsupported(format!("the exact K formula needs (l1, l∞), got {couple}")));
            }
            k_exact_l1_linf(t, x)
        }
        KMethod::Truncation => k_truncation(t, x, couple),
        KMethod::Convex => k_convex(t, x, couple),
    }
}

/// `K(t, x)` sampled on a t-grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KCurve {
    pub t: Vec<f64>,
    pub k: Vec<f64>,
    pub method: KMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KCurveCheck {
    pub monotone: bool,
    pub concave: bool,
    /// Largest decrease between neighbours, relative to `max K`.
    pub worst_decrease: f64,
    /// Largest slope increase, relative to the larger slope magnitude.
    pub worst_convexity: f64,
}

impl KCurve {
    /// Non-decreasing values and non-increasing chord slopes, both with
    /// relative tolerance `tol`.
    pub fn check(&self, tol: f64) -> KCurveCheck {
        let kmax = self.k.iter().copied().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        let mut worst_decrease = f64::NEG_INFINITY;
        for w in self.k.windows(2) {
            worst_decrease = worst_decrease.max((w[0] - w[1]) / kmax);
        }
        let slopes: Vec<f64> = (1..self.t.len())
            .map(|i| (self.k[i] - self.k[i - 1]) / (self.t[i] - self.t[i - 1]))
            .collect();
        let mut worst_convexity = f64::NEG_INFINITY;
        for w in slopes.windows(2) {
            let scale = w[0].abs().max(w[1].abs()).max(f64::MIN_POSITIVE);
            worst_convexity = worst_convexity.max((w[1] - w[0]) / scale);
        }
        KCurveCheck {
            monotone: worst_decrease <= tol,
            concave: worst_convexity <= tol,
            worst_decrease,
            worst_convexity,
        }
    }
}

/// `K(t, x)` over the given increasing t-grid.
pub fn k_curve(x: &DecreasingSequence, couple: &SequenceCouple, ts: &[f64], method: KMethod) -> Result<KCurve> {
    if ts.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter("t-grid must be strictly increasing".into()));
    }
    let k = match method {
        KMethod::Truncation => {
            ts.iter().try_for_each(|&t| check_t(t))?;
            let (v, scale) = normalized(x);
            if v.is_empty() {
                vec![0.0; ts.len()]
            } else {
                let (n0, n1) = couple.prepare(v.len())?;
                let table = TruncationTable::new(&v, &n0, &n1);
                ts.iter().map(|&t| scale * table.k(t)).collect()
            }
        }
        _ => ts.iter().map(|&t| k_value(method, t, x, couple)).collect::<Result<Vec<_>>>()?,
    };
    Ok(KCurve {
        t: ts.to_vec(),
        k,
        method,
    })
}

/// `(∫ [K(t,x)/φ(t)]^q dt/t)^{1/q}`, or `sup_t K(t,x)/φ(t)` when `q = ∞`.
pub fn interpolation_norm(
    x: &DecreasingSequence,
    couple: &SequenceCouple,
    phi: &BoydFunction,
    q: f64,
    method: KMethod,
) -> Result<InterpolationNorm> {
    let param = InterpolationParameter::new(phi.clone(), q)?;
    interpolation_norm_with(x, couple, &param, method, &QuadratureConfig::default())
}

/// [`interpolation_norm`] with a prepared parameter and explicit quadrature settings.
pub fn interpolation_norm_with(
    x: &DecreasingSequence,
    couple: &SequenceCouple,
    param: &InterpolationParameter,
    method: KMethod,
    cfg: &QuadratureConfig,
) -> Result<InterpolationNorm> {
    let (v, scale) = normalized(x);
    if v.is_empty() {
        return quadrature::integrate(param, 0.0, 0.0, cfg, || |_t: f64| Ok(0.0));
    }
    let (n0, n1) = couple.prepare(v.len())?;
    let table = TruncationTable::new(&v, &n0, &n1);
    let (norm0, norm1) = (table.head[v.len()], table.tail[0]);
    let unit = DecreasingSequence::from_vec_unchecked(v.clone());
    let r = match method {
        KMethod::Truncation => quadrature::integrate(param, norm0, norm1, cfg, || {
            let mut env = table.envelope();
            move |t: f64| Ok(env.k(t))
        })?,
        KMethod::Exact => {
            if !couple.is_l1_linf() {
                return Err(Error::Unsupported(format!("the exact K formula needs (l1, l∞), got {couple}")));
            }
            let prefix = L1LinfPrefix::new(&v);
            quadrature::integrate(param, norm0, norm1, cfg, || |t: f64| Ok(prefix.k(t)))?
        }
        KMethod::Convex => quadrature::integrate(param, norm0, norm1, cfg, || |t: f64| k_convex(t, &unit, couple))?,
    };
    Ok(InterpolationNorm {
        value: scale * r.value,
        tail_bound: scale * r.tail_bound,
        ..r
    })
}

/// `‖x‖_Σ = K(1, x)`.
pub fn sum_norm(x: &DecreasingSequence, couple: &SequenceCouple) -> Result<f64> {
    k_convex(1.0, x, couple)
}

/// `‖x‖_Δ = max(‖x‖₀, ‖x‖₁)`.
pub fn intersection_norm(x: &DecreasingSequence, couple: &SequenceCouple) -> Result<f64> {
    Ok(couple.e0.norm(x)?.max(couple.e1.norm(x)?))
}
