//! Minimisation of `‖y‖₀ + t‖x − y‖₁` over splittings of a non-increasing `x`
//! in which both `y` and `x − y` stay non-increasing.
//!
//! The splitting is parametrised by increments `d_n ∈ [0, δ_n]`, where
//! `δ_n = x_n − x_{n+1}` and `y_n = Σ_{k≥n} d_k`, so the feasible set is a box.

use serde::Serialize;

use super::prepared::PreparedNorm;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverConfig {
    /// Projected subgradient iterations per start.
    pub iterations: usize,
    /// Step `c/√k` uses `c = step_scale · max δ_n`.
    pub step_scale: f64,
    /// Spectral projected gradient iterations used to polish each start.
    pub polish_iterations: usize,
    /// Target for the Frank–Wolfe gap relative to the objective.
    pub gap_tolerance: f64,
    /// Starts agreeing to this relative spread also count as converged.
    pub agreement_tolerance: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            iterations: 2000,
            step_scale: 0.5,
            polish_iterations: 5000,
            gap_tolerance: 1e-9,
            agreement_tolerance: 1e-6,
        }
    }
}

const RESTARTS: usize = 8;

pub(crate) struct Problem<'a> {
    pub t: f64,
    pub delta: Vec<f64>,
    pub n0: &'a PreparedNorm,
    pub n1: &'a PreparedNorm,
}

#[derive(Debug, Clone)]
pub(crate) struct Outcome {
    pub value: f64,
    pub y: Vec<f64>,
    pub gap: f64,
    pub start_values: Vec<f64>,
    pub converged: bool,
}

struct Scratch {
    y: Vec<f64>,
    z: Vec<f64>,
    gy: Vec<f64>,
    gz: Vec<f64>,
}

impl<'a> Problem<'a> {
    pub fn new(t: f64, x: &[f64], n0: &'a PreparedNorm, n1: &'a PreparedNorm) -> Self {
        let delta = (0..x.len())
            .map(|i| (x[i] - x.get(i + 1).copied().unwrap_or(0.0)).max(0.0))
            .collect();
        Self { t, delta, n0, n1 }
    }

    fn scratch(&self) -> Scratch {
        let n = self.delta.len();
        Scratch {
            y: vec![0.0; n],
            z: vec![0.0; n],
            gy: vec![0.0; n],
            gz: vec![0.0; n],
        }
    }

    fn split(&self, d: &[f64], s: &mut Scratch) {
        let (mut ay, mut az) = (0.0, 0.0);
        for k in (0..d.len()).rev() {
            ay += d[k];
            az += self.delta[k] - d[k];
            s.y[k] = ay;
            s.z[k] = az;
        }
    }

    pub fn y_of(&self, d: &[f64]) -> Vec<f64> {
        let mut s = self.scratch();
        self.split(d, &mut s);
        s.y
    }

    fn value(&self, d: &[f64], s: &mut Scratch) -> f64 {
        self.split(d, s);
        self.n0.eval(&s.y) + self.t * self.n1.eval(&s.z)
    }

    fn value_grad(&self, d: &[f64], g: &mut [f64], s: &mut Scratch) -> f64 {
        self.split(d, s);
        let f0 = self.n0.eval_grad(&s.y, &mut s.gy);
        let f1 = self.n1.eval_grad(&s.z, &mut s.gz);
        let mut acc = 0.0;
        for ((gk, gy), gz) in g.iter_mut().zip(&s.gy).zip(&s.gz) {
            acc += gy - self.t * gz;
            *gk = acc;
        }
        f0 + self.t * f1
    }

    /// `max over the box of g·(d − v)`, an upper bound on `F(d) − min F`.
    fn gap(&self, d: &[f64], g: &[f64]) -> f64 {
        d.iter()
            .zip(g)
            .zip(&self.delta)
            .map(|((di, gi), dl)| if *gi > 0.0 { gi * di } else { gi * (di - dl) })
            .sum()
    }

    fn project(&self, d: &mut [f64]) {
        for (v, dl) in d.iter_mut().zip(&self.delta) {
            *v = v.clamp(0.0, *dl);
        }
    }

    pub fn solve(&self, cfg: &SolverConfig) -> Outcome {
        let n = self.delta.len();
        let starts: [Vec<f64>; 3] = [
            vec![0.0; n],
            self.delta.clone(),
            self.delta.iter().map(|v| v / 2.0).collect(),
        ];
        let mut s = self.scratch();
        let mut best: Option<(f64, Vec<f64>, f64)> = None;
        let mut start_values = Vec::with_capacity(3);
        for d0 in starts {
            let d1 = self.subgradient(d0, cfg, &mut s);
            let (f, d, gap) = self.polish(d1, cfg, &mut s);
            start_values.push(f);
            if best.as_ref().is_none_or(|b| f < b.0) {
                best = Some((f, d, gap));
            }
        }
        let (mut value, mut d, mut gap) = best.expect("three starts");
        // A fresh spectral step often unsticks a stalled polish.
        for _ in 0..RESTARTS {
            if gap <= cfg.gap_tolerance * value.abs().max(f64::MIN_POSITIVE) {
                break;
            }
            let (f, d1, g1) = self.polish(d.clone(), cfg, &mut s);
            if f > value || (f == value && g1 >= gap) {
                break;
            }
            (value, d, gap) = (f, d1, g1);
        }
        let lo = start_values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = start_values.iter().copied().fold(0.0, f64::max);
        let scale = value.abs().max(f64::MIN_POSITIVE);
        let converged = gap <= cfg.gap_tolerance * scale || (hi - lo) <= cfg.agreement_tolerance * scale;
        Outcome {
            value,
            y: self.y_of(&d),
            gap,
            start_values,
            converged,
        }
    }

    fn subgradient(&self, mut d: Vec<f64>, cfg: &SolverConfig, s: &mut Scratch) -> Vec<f64> {
        let c = cfg.step_scale * self.delta.iter().copied().fold(0.0, f64::max);
        let mut g = vec![0.0; d.len()];
        let mut best = (f64::INFINITY, d.clone());
        for k in 1..=cfg.iterations {
            let f = self.value_grad(&d, &mut g, s);
            if f < best.0 {
                best = (f, d.clone());
            }
            if self.gap(&d, &g) <= 0.0 {
                break;
            }
            let gmax = g.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            if gmax == 0.0 {
                break;
            }
            let step = c / (k as f64).sqrt() / gmax;
            for (v, gi) in d.iter_mut().zip(&g) {
                *v -= step * gi;
            }
            self.project(&mut d);
        }
        best.1
    }

    /// Spectral projected gradient with a non-monotone Armijo search.
    fn polish(&self, mut d: Vec<f64>, cfg: &SolverConfig, s: &mut Scratch) -> (f64, Vec<f64>, f64) {
        const MEMORY: usize = 10;
        const LAMBDA_MIN: f64 = 1e-30;
        const LAMBDA_MAX: f64 = 1e30;
        let n = d.len();
        let mut g = vec![0.0; n];
        let mut f = self.value_grad(&d, &mut g, s);
        let mut gap = self.gap(&d, &g);
        let mut best = (f, d.clone(), gap);
        let mut history = vec![f];
        let mut lambda = {
            let mut trial = d.clone();
            trial.iter_mut().zip(&g).for_each(|(v, gi)| *v -= gi);
            self.project(&mut trial);
            let pg = trial.iter().zip(&d).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
            if pg > 0.0 { (1.0 / pg).clamp(LAMBDA_MIN, LAMBDA_MAX) } else { 1.0 }
        };
        let mut dir = vec![0.0; n];
        let mut trial = vec![0.0; n];
        let mut g_trial = vec![0.0; n];
        for _ in 0..cfg.polish_iterations {
            if gap <= cfg.gap_tolerance * f.abs().max(f64::MIN_POSITIVE) {
                break;
            }
            for i in 0..n {
                dir[i] = (d[i] - lambda * g[i]).clamp(0.0, self.delta[i]) - d[i];
            }
            let slope: f64 = dir.iter().zip(&g).map(|(a, b)| a * b).sum();
            if !(slope < 0.0) {
                break;
            }
            let reference = history.iter().rev().take(MEMORY).copied().fold(f64::NEG_INFINITY, f64::max);
            let mut alpha = 1.0;
            let mut accepted = None;
            for _ in 0..60 {
                for i in 0..n {
                    trial[i] = d[i] + alpha * dir[i];
                }
                let ft = self.value(&trial, s);
                if ft <= reference + 1e-4 * alpha * slope {
                    accepted = Some(ft);
                    break;
                }
                alpha *= 0.5;
            }
            let Some(_) = accepted else { break };
            let ft = self.value_grad(&trial, &mut g_trial, s);
            let (mut ss, mut sy) = (0.0, 0.0);
            for i in 0..n {
                let si = trial[i] - d[i];
                ss += si * si;
                sy += si * (g_trial[i] - g[i]);
            }
            lambda = if sy > 0.0 { (ss / sy).clamp(LAMBDA_MIN, LAMBDA_MAX) } else { LAMBDA_MAX };
            std::mem::swap(&mut d, &mut trial);
            std::mem::swap(&mut g, &mut g_trial);
            f = ft;
            gap = self.gap(&d, &g);
            history.push(f);
            if f < best.0 || (f == best.0 && gap < best.2) {
                best = (f, d.clone(), gap);
            }
            if ss == 0.0 {
                break;
            }
        }
        best
    }
}
