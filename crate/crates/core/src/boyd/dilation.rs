//! Dilation function `φ̄(t) = sup_{s>0} φ(ts)/φ(s)` and Boyd indices.

use serde::Serialize;

use super::BoydFunction;
use crate::error::{Error, Result};
use crate::numeric::log_grid;

/// Boyd indices are read off at `t = 2^{±INDEX_PROBE_LOG2}`.
pub const INDEX_PROBE_LOG2: i32 = 20;

/// Log-uniform grid of `s` values over which the supremum is taken.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DilationGrid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Default for DilationGrid {
    fn default() -> Self {
        Self {
            lo: 1e-6,
            hi: 1e6,
            points: 2001,
        }
    }
}

impl DilationGrid {
    fn validate(&self) -> Result<()> {
        if !(self.lo > 0.0 && self.hi >= self.lo && self.points >= 2) {
            return Err(Error::InvalidParameter(format!("bad dilation grid {self:?}")));
        }
        Ok(())
    }

    /// Grid points, capped so that `s·max(t,1)` stays below `cap`; `s = 1` is always present.
    fn points_for(&self, t: f64, cap: Option<f64>) -> Vec<f64> {
        let mut s = log_grid(self.lo, self.hi, self.points);
        if let Some(cap) = cap {
            let limit = cap / t.max(1.0);
            s.retain(|&v| v <= limit);
        }
        if !s.contains(&1.0) {
            s.push(1.0);
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DilationEstimate {
    pub t: f64,
    /// Estimate of `φ̄(t)`.
    pub value: f64,
    pub grid_lo: f64,
    pub grid_hi: f64,
    pub grid_points: usize,
    /// `true` when `value` comes from a closed form rather than the grid.
    pub exact: bool,
}

/// `φ̄(t)` on the default grid.
pub fn dilation(phi: &BoydFunction, t: f64) -> Result<DilationEstimate> {
    dilation_with(phi, t, &DilationGrid::default())
}

pub fn dilation_with(phi: &BoydFunction, t: f64, grid: &DilationGrid) -> Result<DilationEstimate> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("dilation needs t > 0, got {t}")));
    }
    grid.validate()?;
    if let Some(value) = phi.exact_dilation(t) {
        return Ok(DilationEstimate {
            t,
            value,
            grid_lo: grid.lo,
            grid_hi: grid.hi,
            grid_points: 0,
            exact: true,
        });
    }
    let points = grid.points_for(t, phi.argument_cap());
    let mut best = 0.0_f64;
    for &s in &points {
        let num = phi.evaluate(t * s)?;
        let den = phi.evaluate(s)?;
        let ratio = num / den;
        if !ratio.is_finite() || !(den > 0.0) || !(num > 0.0) {
            return Err(Error::numerical(format!("dilation ratio overflowed at s = {s:e} (t = {t:e})")));
        }
        best = best.max(ratio);
    }
    Ok(DilationEstimate {
        t,
        value: best,
        grid_lo: grid.lo,
        grid_hi: grid.hi,
        grid_points: points.len(),
        exact: false,
    })
}

/// Upper index `α_φ̄` and lower index `β_φ̄`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoydIndices {
    pub upper: f64,
    pub lower: f64,
    pub probe_t_large: f64,
    pub probe_t_small: f64,
    pub exact: bool,
}

impl BoydIndices {
    /// Both indices strictly inside `(lo, hi)`.
    pub fn within(&self, lo: f64, hi: f64) -> bool {
        self.lower > lo && self.upper < hi
    }
}

pub fn boyd_indices(phi: &BoydFunction) -> Result<BoydIndices> {
    boyd_indices_with(phi, &DilationGrid::default())
}

pub fn boyd_indices_with(phi: &BoydFunction, grid: &DilationGrid) -> Result<BoydIndices> {
    let large = 2.0_f64.powi(INDEX_PROBE_LOG2);
    let small = 1.0 / large;
    if let Some(theta) = phi.power_exponent() {
        return Ok(BoydIndices {
            upper: theta,
            lower: theta,
            probe_t_large: large,
            probe_t_small: small,
            exact: true,
        });
    }
    let up = dilation_with(phi, large, grid)?;
    let lo = dilation_with(phi, small, grid)?;
    Ok(BoydIndices {
        upper: up.value.ln() / large.ln(),
        lower: lo.value.ln() / small.ln(),
        probe_t_large: large,
        probe_t_small: small,
        exact: false,
    })
}

/// Result of a grid inequality check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridCheck {
    pub passed: bool,
    pub checked: usize,
    /// Largest relative excess `lhs/rhs - 1` seen (negative when all strict).
    pub worst_excess: f64,
}

fn subgrid(grid: &DilationGrid, count: usize) -> Vec<f64> {
    let full = log_grid(grid.lo, grid.hi, grid.points);
    let stride = (full.len() / count).max(1);
    full.into_iter().step_by(stride).take(count).collect()
}

/// `φ(st) <= φ(s)·φ̄(t)` on a `count × count` grid; the `s` values are drawn
/// from the dilation grid itself.
pub fn check_submultiplicativity(phi: &BoydFunction, count: usize, grid: &DilationGrid) -> Result<GridCheck> {
    let ss = subgrid(grid, count);
    let ts = log_grid(1e-3, 1e3, count);
    let cap = phi.argument_cap();
    let mut worst = f64::NEG_INFINITY;
    let mut checked = 0;
    for &t in &ts {
        let bar = dilation_with(phi, t, grid)?.value;
        for &s in &ss {
            if let Some(c) = cap {
                if s * t.max(1.0) > c {
                    continue;
                }
            }
            let lhs = phi.evaluate(s * t)?;
            let rhs = phi.evaluate(s)? * bar;
            worst = worst.max(lhs / rhs - 1.0);
            checked += 1;
        }
    }
    Ok(GridCheck {
        passed: worst <= 1e-9,
        checked,
        worst_excess: worst,
    })
}

/// `φ̄₁φ₂(t) <= φ̄₁(t)·φ̄₂(t)` on a log grid of `t`.
pub fn check_product_dilation(
    a: &BoydFunction,
    b: &BoydFunction,
    ts: &[f64],
    grid: &DilationGrid,
) -> Result<GridCheck> {
    let prod = BoydFunction::product(a.clone(), b.clone());
    let mut worst = f64::NEG_INFINITY;
    for &t in ts {
        let lhs = dilation_with(&prod, t, grid)?.value;
        let rhs = dilation_with(a, t, grid)?.value * dilation_with(b, t, grid)?.value;
        worst = worst.max(lhs / rhs - 1.0);
    }
    Ok(GridCheck {
        passed: worst <= 1e-9,
        checked: ts.len(),
        worst_excess: worst,
    })
}
