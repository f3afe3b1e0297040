//! `(∫ [K(t)/φ(t)]^q dt/t)^{1/q}` in the variable `u = ln t`: composite
//! trapezoid with one Richardson step on a window `[2^{-L}, 2^L]`, plus
//! closed-form bounds for the two tails.

use serde::Serialize;

use crate::boyd::{dilation_with, BoydFunction, DilationGrid};
use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureConfig {
    /// Initial window `[2^{-L}, 2^{L}]`.
    pub initial_log2_window: u32,
    /// The window doubles until the tails pass or this size is exceeded.
    pub max_log2_window: u32,
    /// Panels on the initial window; the step stays fixed as it widens.
    pub panels: usize,
    /// Accepted tail mass relative to the main term, in `q`-th powers.
    pub tail_tolerance: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            initial_log2_window: 30,
            max_log2_window: 240,
            panels: 4096,
            tail_tolerance: 1e-6,
        }
    }
}

/// Power majorants `φ̄(r) <= c_up·r^a` on `r >= 1` and `φ̄(r) <= c_lo·r^b` on
/// `r <= 1`, used to bound the tails.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Majorants {
    pub a: f64,
    pub c_up: f64,
    pub b: f64,
    pub c_lo: f64,
}

/// An interpolation parameter `(φ, q)` with its tail majorants.
#[derive(Debug, Clone)]
pub struct InterpolationParameter {
    pub phi: BoydFunction,
    pub q: f64,
    pub majorants: Majorants,
}

const MAJORANT_LOG2_RANGE: i32 = 20;
const MAJORANT_STEPS_PER_OCTAVE: i32 = 4;

impl InterpolationParameter {
    pub fn new(phi: BoydFunction, q: f64) -> Result<Self> {
        if !(q > 0.0) {
            return Err(Error::InvalidParameter(format!("q must lie in (0, ∞], got {q}")));
        }
        let majorants = match phi.power_exponent() {
            Some(theta) => Majorants {
                a: theta,
                c_up: 1.0,
                b: theta,
                c_lo: 1.0,
            },
            None => estimate_majorants(&phi)?,
        };
        if !(majorants.a < 1.0 && majorants.b > 0.0) {
            log::warn!(
                "dilation exponents of {phi} ({:.3}, {:.3}) are not inside (0, 1); the integral may diverge",
                majorants.b,
                majorants.a
            );
        }
        Ok(Self { phi, q, majorants })
    }
}

fn estimate_majorants(phi: &BoydFunction) -> Result<Majorants> {
    let grid = DilationGrid::default();
    let steps = MAJORANT_LOG2_RANGE * MAJORANT_STEPS_PER_OCTAVE;
    let step = 2f64.powf(1.0 / MAJORANT_STEPS_PER_OCTAVE as f64);
    // φ̄ is submultiplicative, so between grid points it exceeds its value at
    // the nearer-to-1 neighbour by at most φ̄(step) (or φ̄(1/step)).
    let bridge_up = dilation_with(phi, step, &grid)?.value;
    let bridge_lo = dilation_with(phi, 1.0 / step, &grid)?.value;
    let side = |sign: f64, bridge: f64| -> Result<(f64, f64)> {
        let rs: Vec<f64> = (0..=steps).map(|k| 2f64.powf(sign * k as f64 / MAJORANT_STEPS_PER_OCTAVE as f64)).collect();
        let vals = rs.iter().map(|&r| dilation_with(phi, r, &grid).map(|d| d.value)).collect::<Result<Vec<_>>>()?;
        let big = *rs.last().unwrap();
        let e = vals.last().unwrap().ln() / big.ln();
        let mut c: f64 = 1.0;
        for k in 0..steps as usize {
            let lo_pow = rs[k].powf(e).min(rs[k + 1].powf(e));
            c = c.max(vals[k] * bridge / lo_pow);
        }
        Ok((e, c))
    };
    let (a, c_up) = side(1.0, bridge_up)?;
    let (b, c_lo) = side(-1.0, bridge_lo)?;
    Ok(Majorants { a, c_up, b, c_lo })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InterpolationNorm {
    pub value: f64,
    /// Bound on `(main + tails)^{1/q} − main^{1/q}`.
    pub tail_bound: f64,
    pub panels: usize,
    pub log2_window: u32,
}

/// `norm0 = ‖x‖_{E₀}`, `norm1 = ‖x‖_{E₁}`; `k` must accept non-decreasing `t`.
pub(crate) fn integrate<K>(
    param: &InterpolationParameter,
    norm0: f64,
    norm1: f64,
    cfg: &QuadratureConfig,
    mut make_k: impl FnMut() -> K,
) -> Result<InterpolationNorm>
where
    K: FnMut(f64) -> Result<f64>,
{
    if cfg.panels < 2 || !cfg.panels.is_multiple_of(2) || cfg.initial_log2_window == 0 {
        return Err(Error::InvalidParameter("quadrature needs an even panel count and a non-empty window".into()));
    }
    if norm0 == 0.0 && norm1 == 0.0 {
        return Ok(InterpolationNorm {
            value: 0.0,
            tail_bound: 0.0,
            panels: cfg.panels,
            log2_window: cfg.initial_log2_window,
        });
    }
    let q = param.q;
    let m = &param.majorants;
    let h = 2.0 * cfg.initial_log2_window as f64 * std::f64::consts::LN_2 / cfg.panels as f64;
    let mut l = cfg.initial_log2_window;
    let mut last_tail = f64::INFINITY;
    while l <= cfg.max_log2_window {
        let panels = cfg.panels * (l / cfg.initial_log2_window) as usize;
        let t0 = 2f64.powi(-(l as i32));
        let t1 = 2f64.powi(l as i32);
        let phi_t0 = param.phi.evaluate(t0)?;
        let phi_t1 = param.phi.evaluate(t1)?;
        // K(t) <= t‖x‖₁ below the window and K(t) <= ‖x‖₀ above it
        let low = norm1 * m.c_up * t0 / phi_t0;
        let high = norm0 * m.c_lo / phi_t1;

        let mut k = make_k();
        let u0 = -(l as f64) * std::f64::consts::LN_2;
        if q.is_infinite() {
            let mut sup: f64 = 0.0;
            for i in 0..=panels {
                let t = (u0 + i as f64 * h).exp();
                sup = sup.max(k(t)? / param.phi.evaluate(t)?);
            }
            let tail = if m.a < 1.0 && m.b > 0.0 { low.max(high) } else { f64::INFINITY };
            if tail < sup {
                return Ok(InterpolationNorm {
                    value: sup,
                    tail_bound: 0.0,
                    panels,
                    log2_window: l,
                });
            }
            last_tail = tail;
        } else {
            let tail = {
                let lo = if m.a < 1.0 { low.powf(q) / ((1.0 - m.a) * q) } else { f64::INFINITY };
                let hi = if m.b > 0.0 { high.powf(q) / (m.b * q) } else { f64::INFINITY };
                lo + hi
            };
            let (mut fine, mut coarse) = (CompensatedSum::new(), CompensatedSum::new());
            for i in 0..=panels {
                let t = (u0 + i as f64 * h).exp();
                let f = (k(t)? / param.phi.evaluate(t)?).powf(q);
                if !f.is_finite() {
                    return Err(Error::numerical(format!("integrand is not finite at t = {t:e}")));
                }
                let end = i == 0 || i == panels;
                fine.add(if end { 0.5 * f } else { f });
                if i % 2 == 0 {
                    coarse.add(if end { 0.5 * f } else { f });
                }
            }
            let trap_h = h * fine.value();
            let trap_2h = 2.0 * h * coarse.value();
            let main = (4.0 * trap_h - trap_2h) / 3.0;
            if tail < cfg.tail_tolerance * main {
                let value = main.powf(1.0 / q);
                return Ok(InterpolationNorm {
                    value,
                    tail_bound: (main + tail).powf(1.0 / q) - value,
                    panels,
                    log2_window: l,
                });
            }
            last_tail = tail / main;
        }
        l *= 2;
    }
    Err(Error::DivergentTail(format!(
        "tail bound {last_tail:e} (relative) still exceeds {:e} at the window 2^±{}",
        cfg.tail_tolerance, cfg.max_log2_window
    )))
}
