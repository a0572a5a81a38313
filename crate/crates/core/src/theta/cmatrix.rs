use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kfield::KMatrix;

/// Dense complex matrix; entries are always finite.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix(DMatrix<Complex64>);

impl CMatrix {
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || c == 0 || rows.iter().any(|row| row.len() != c) {
            return Err(Error::ShapeMismatch("complex matrix must be non-empty and rectangular".into()));
        }
        if rows.iter().flatten().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("non-finite matrix entry".into()));
        }
        Ok(CMatrix(DMatrix::from_fn(r, c, |i, j| rows[i][j])))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        CMatrix(DMatrix::from_fn(rows, cols, f))
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect()).collect())
    }

    pub fn identity(n: usize) -> Self {
        CMatrix(DMatrix::identity(n, n))
    }

    /// `i·I_n`.
    pub fn i_identity(n: usize) -> Self {
        CMatrix(DMatrix::identity(n, n) * Complex64::i())
    }

    pub fn diagonal(entries: &[f64]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| if i == j { Complex64::new(entries[i], 0.0) } else { Complex64::new(0.0, 0.0) })
    }

    pub fn from_kmatrix(m: &KMatrix) -> Self {
        Self::from_fn(m.rows(), m.cols(), |i, j| m.get(i, j).embed())
    }

    pub fn inner(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    pub fn to_rows(&self) -> Vec<Vec<Complex64>> {
        (0..self.rows()).map(|i| (0..self.cols()).map(|j| self.0[(i, j)]).collect()).collect()
    }

    pub fn scale(&self, s: f64) -> Self {
        CMatrix(self.0.map(|z| z * s))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.0.shape() != other.0.shape() {
            return Err(Error::ShapeMismatch(format!("{:?} + {:?}", self.0.shape(), other.0.shape())));
        }
        Ok(CMatrix(&self.0 + &other.0))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols() != other.rows() {
            return Err(Error::ShapeMismatch(format!("{:?} * {:?}", self.0.shape(), other.0.shape())));
        }
        Ok(CMatrix(&self.0 * &other.0))
    }

    pub fn conj_transpose(&self) -> Self {
        CMatrix(self.0.adjoint())
    }

    pub fn transpose(&self) -> Self {
        CMatrix(self.0.transpose())
    }

    /// `(W − W̄ᵗ)/(2i)`, Hermitian by construction.
    pub fn skew_part(&self) -> Self {
        CMatrix((&self.0 - self.0.adjoint()) / Complex64::new(0.0, 2.0))
    }

    /// `(W + W̄ᵗ)/2`.
    pub fn hermitian_part(&self) -> Self {
        CMatrix((&self.0 + self.0.adjoint()) * Complex64::new(0.5, 0.0))
    }

    fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0f64, |m, z| m.max(z.norm()))
    }

    /// Hermitian up to a relative tolerance.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let scale = self.max_abs().max(1.0);
        (&self.0 - self.0.adjoint()).iter().all(|z| z.norm() <= tol * scale)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let scale = self.max_abs().max(1.0);
        (&self.0 - self.0.transpose()).iter().all(|z| z.norm() <= tol * scale)
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let n = self.rows();
        // realification [[Re, −Im], [Im, Re]] doubles every eigenvalue's multiplicity
        let h = self.hermitian_part();
        let real = DMatrix::from_fn(2 * n, 2 * n, |i, j| {
            let z = h.0[(i % n, j % n)];
            match (i < n, j < n) {
                (true, true) | (false, false) => z.re,
                (true, false) => -z.im,
                (false, true) => z.im,
            }
        });
        let mut ev: Vec<f64> = SymmetricEigen::new(real).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev.into_iter().step_by(2).collect()
    }

    pub fn min_hermitian_eigenvalue(&self) -> f64 {
        self.hermitian_eigenvalues()[0]
    }

    /// Bit patterns of all entries, used as an exact cache fingerprint.
    pub fn fingerprint(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(2 * self.0.len() + 2);
        out.push(self.rows() as u64);
        out.push(self.cols() as u64);
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                let z = self.0[(i, j)];
                out.push((z.re + 0.0).to_bits());
                out.push((z.im + 0.0).to_bits());
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenvalues_of_hermitian() {
        let y = CMatrix::from_rows(vec![
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, -0.5)],
            vec![Complex64::new(0.0, 0.5), Complex64::new(1.0, 0.0)],
        ])
        .unwrap();
        let ev = y.hermitian_eigenvalues();
        assert!((ev[0] - 0.5).abs() < 1e-14 && (ev[1] - 1.5).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_finite() {
        assert!(CMatrix::from_rows(vec![vec![Complex64::new(f64::NAN, 0.0)]]).is_err());
        assert!(CMatrix::from_rows(vec![vec![Complex64::new(1.0, 0.0)], vec![]]).is_err());
    }
}
