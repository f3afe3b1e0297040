//! Head/tail splittings `x = x·1_{n≤m} + x·1_{n>m}` and the lower envelope of
//! the lines `t ↦ H_m + t·T_m` they induce.

use super::prepared::{Form, PreparedNorm};

/// `H_m = ‖x_1..x_m‖_{E₀}` and `T_m = ‖x_{m+1}..x_N‖_{E₁}` for `m = 0..=N`.
#[derive(Debug, Clone)]
pub(crate) struct TruncationTable {
    pub head: Vec<f64>,
    pub tail: Vec<f64>,
}

impl TruncationTable {
    pub fn new(x: &[f64], n0: &PreparedNorm, n1: &PreparedNorm) -> Self {
        let n = x.len();
        let xp0 = n0.powered(x);
        let mut head = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        head.push(0.0);
        for (v, w) in xp0.iter().zip(&n0.w) {
            match n0.form {
                Form::Sup => acc = f64::max(acc, w * v),
                Form::Sum { .. } => acc += w * v,
            }
            head.push(n0.finish(acc));
        }

        let xp1 = n1.powered(x);
        let tail = (0..=n)
            .map(|m| {
                let rest = xp1[m..].iter().zip(&n1.w);
                let acc = match n1.form {
                    Form::Sup => rest.map(|(v, w)| w * v).fold(0.0, f64::max),
                    Form::Sum { .. } => rest.map(|(v, w)| w * v).sum(),
                };
                n1.finish(acc)
            })
            .collect();
        Self { head, tail }
    }

    /// `min_m H_m + t·T_m`.
    pub fn k(&self, t: f64) -> f64 {
        self.head.iter().zip(&self.tail).map(|(h, s)| h + t * s).fold(f64::INFINITY, f64::min)
    }

    /// Minimising index `m` at `t`.
    pub fn argmin(&self, t: f64) -> usize {
        let mut best = (f64::INFINITY, 0);
        for (m, (h, s)) in self.head.iter().zip(&self.tail).enumerate() {
            let v = h + t * s;
            if v < best.0 {
                best = (v, m);
            }
        }
        best.1
    }

    /// Envelope restricted to the lines that can be minimal for some `t > 0`.
    pub fn envelope(&self) -> Envelope {
        // slopes are non-increasing and intercepts non-decreasing in m
        let mut lines: Vec<(f64, f64)> = Vec::new();
        for (&h, &s) in self.head.iter().zip(&self.tail) {
            if let Some(&(_, ls)) = lines.last() {
                if s >= ls {
                    // same or larger slope with no smaller intercept: never better
                    continue;
                }
            }
            while lines.len() >= 2 {
                let (h1, s1) = lines[lines.len() - 2];
                let (h2, s2) = lines[lines.len() - 1];
                // the middle line is redundant if the outer two cross before it enters
                if (h - h1) * (s1 - s2) <= (h2 - h1) * (s1 - s) {
                    lines.pop();
                } else {
                    break;
                }
            }
            lines.push((h, s));
        }
        Envelope { lines, cursor: 0 }
    }
}

/// Monotone query cursor over the lower envelope; queries must come with
/// non-decreasing `t`.
#[derive(Debug, Clone)]
pub(crate) struct Envelope {
    lines: Vec<(f64, f64)>,
    cursor: usize,
}

impl Envelope {
    pub fn k(&mut self, t: f64) -> f64 {
        let value = |(h, s): (f64, f64)| h + t * s;
        while self.cursor + 1 < self.lines.len() && value(self.lines[self.cursor + 1]) <= value(self.lines[self.cursor]) {
            self.cursor += 1;
        }
        value(self.lines[self.cursor])
    }
}
