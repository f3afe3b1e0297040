//! Approximation numbers of finite matrices.
//!
//! Between Euclidean spaces `a_n(T)` is the `n`-th singular value, computed
//! here with a one-sided (Hestenes) Jacobi iteration.

use serde::{Deserialize, Serialize};

use crate::approx_spaces::lorentz_marcinkiewicz_norm;
use crate::boyd::BoydFunction;
use crate::error::{Error, Result};
use crate::sequences::DecreasingSequence;

pub const MAX_JACOBI_SWEEPS: usize = 60;
pub const JACOBI_TOLERANCE: f64 = 1e-12;

/// Dense real matrix stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl TryFrom<MatrixRepr> for DenseMatrix {
    type Error = Error;
    fn try_from(r: MatrixRepr) -> Result<Self> {
        DenseMatrix::new(r.rows, r.cols, r.entries)
    }
}

impl From<DenseMatrix> for MatrixRepr {
    fn from(m: DenseMatrix) -> Self {
        MatrixRepr {
            rows: m.rows,
            cols: m.cols,
            entries: m.entries,
        }
    }
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidInput("matrix must be non-empty".into()));
        }
        if rows.checked_mul(cols) != Some(entries.len()) {
            return Err(Error::InvalidInput(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if let Some(i) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "entry ({}, {}) is not finite",
                i / cols + 1,
                i % cols + 1
            )));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidInput("ragged matrix rows".into()));
        }
        Self::new(r, c, rows.concat())
    }

    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        let n = diag.len();
        let mut e = vec![0.0; n * n];
        for (i, d) in diag.iter().enumerate() {
            e[i * n + i] = *d;
        }
        Self::new(n, n, e)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// 0-based element access.
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.cols + j]
    }

    pub fn transpose(&self) -> Self {
        let mut e = vec![0.0; self.entries.len()];
        for i in 0..self.rows {
            for j in 0..self.cols {
                e[j * self.rows + i] = self.at(i, j);
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            entries: e,
        }
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::InvalidInput(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut e = vec![0.0; self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    e[i * other.cols + j] += a * other.at(k, j);
                }
            }
        }
        Self::new(self.rows, other.cols, e)
    }
}

/// Singular values of `t` in non-increasing order, length `min(rows, cols)`.
pub fn approximation_numbers(t: &DenseMatrix) -> Result<DecreasingSequence> {
    // Orthogonalise the columns of a tall matrix; transpose wide ones.
    let tall = if t.rows >= t.cols { t.clone() } else { t.transpose() };
    let (m, n) = (tall.rows, tall.cols);
    // Column-major working copy.
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| (0..m).map(|i| tall.at(i, j)).collect()).collect();

    let mut converged = n < 2;
    for _sweep in 0..MAX_JACOBI_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let (alpha, beta, gamma) = gram(&cols[p], &cols[q]);
                if gamma == 0.0 || gamma.abs() <= JACOBI_TOLERANCE * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let tan = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let tan = if zeta == 0.0 { 1.0 } else { tan };
                let cos = 1.0 / (1.0 + tan * tan).sqrt();
                let sin = cos * tan;
                let (left, right) = cols.split_at_mut(q);
                let (cp, cq) = (&mut left[p], &mut right[0]);
                for (a, b) in cp.iter_mut().zip(cq.iter_mut()) {
                    let (x, y) = (*a, *b);
                    *a = cos * x - sin * y;
                    *b = sin * x + cos * y;
                }
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::numerical(format!(
            "one-sided Jacobi did not converge within {MAX_JACOBI_SWEEPS} sweeps"
        )));
    }
    let mut sigma: Vec<f64> = cols.iter().map(|c| crate::sequences::lp_norm_of_slice(c, 2.0)).collect();
    sigma.sort_unstable_by(|a, b| b.total_cmp(a));
    Ok(DecreasingSequence::from_vec_unchecked(sigma))
}

fn gram(a: &[f64], b: &[f64]) -> (f64, f64, f64) {
    let (mut aa, mut bb, mut ab) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        aa += x * x;
        bb += y * y;
        ab += x * y;
    }
    (aa, bb, ab)
}

/// `‖T‖_{φ,q}`: the Lorentz–Marcinkiewicz quasi-norm of the singular values.
pub fn operator_ideal_norm(t: &DenseMatrix, phi: &BoydFunction, q: f64) -> Result<f64> {
    lorentz_marcinkiewicz_norm(&approximation_numbers(t)?, phi, q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_and_permutation() {
        let d = DenseMatrix::diagonal(&[3.0, 1.0, 2.0]).unwrap();
        assert_eq!(approximation_numbers(&d).unwrap().values(), &[3.0, 2.0, 1.0]);
        let p = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(approximation_numbers(&p).unwrap().values(), &[1.0, 1.0]);
    }

    #[test]
    fn shear_matches_golden_ratio() {
        // eigenvalues of TᵀT are (3 ± √5)/2
        let t = DenseMatrix::from_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        let s = approximation_numbers(&t).unwrap();
        let r5 = 5.0_f64.sqrt();
        assert!((s.get(1) - ((3.0 + r5) / 2.0).sqrt()).abs() < 1e-12);
        assert!((s.get(2) - ((3.0 - r5) / 2.0).sqrt()).abs() < 1e-12);
        assert!((s.get(1) - 1.618_033_988_749_895).abs() < 1e-12);
    }

    #[test]
    fn wide_matrices_use_the_transpose() {
        let t = DenseMatrix::from_rows(&[vec![3.0, 0.0, 0.0], vec![0.0, 0.0, 4.0]]).unwrap();
        let s = approximation_numbers(&t).unwrap();
        assert_eq!(s.len(), 2);
        assert!((s.get(1) - 4.0).abs() < 1e-14 && (s.get(2) - 3.0).abs() < 1e-14);
    }

    #[test]
    fn invalid_matrices() {
        assert!(DenseMatrix::new(0, 2, vec![]).is_err());
        assert!(DenseMatrix::new(2, 2, vec![1.0; 3]).is_err());
        assert!(matches!(
            DenseMatrix::new(1, 2, vec![1.0, f64::NAN]),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn ideal_norm_examples() {
        let rank_one = DenseMatrix::from_rows(&[vec![0.6, 0.0], vec![0.8, 0.0]]).unwrap();
        let phi = BoydFunction::power(0.3);
        assert!((operator_ideal_norm(&rank_one, &phi, 2.5).unwrap() - 1.0).abs() < 1e-14);

        let id = DenseMatrix::diagonal(&[1.0, 1.0]).unwrap();
        let v = operator_ideal_norm(&id, &BoydFunction::power(1.0), 1.0).unwrap();
        assert!((v - 2.0).abs() < 1e-14);

        let d = DenseMatrix::diagonal(&[3.0, 1.0, 2.0]).unwrap();
        let v = operator_ideal_norm(&d, &BoydFunction::power(0.5), 2.0).unwrap();
        assert!((v - 14.0_f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn matrix_json_roundtrip_validates() {
        let m: DenseMatrix = serde_json::from_str(r#"{"rows":1,"cols":2,"entries":[1.0,2.0]}"#).unwrap();
        assert_eq!(m.at(0, 1), 2.0);
        assert!(serde_json::from_str::<DenseMatrix>(r#"{"rows":2,"cols":2,"entries":[1.0]}"#).is_err());
    }
}
