use num_traits::Zero;

use super::element::KElement;
use super::field::FieldId;
use super::rational::{int, Rational};
use crate::error::{Error, Result};

/// Dense row-major matrix over `K`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KMatrix {
    rows: usize,
    cols: usize,
    field: FieldId,
    data: Vec<KElement>,
}

impl KMatrix {
    pub fn from_fn(rows: usize, cols: usize, field: FieldId, mut f: impl FnMut(usize, usize) -> KElement) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let x = f(i, j);
                assert_eq!(x.field(), field, "entry from a different field");
                data.push(x);
            }
        }
        KMatrix { rows, cols, field, data }
    }

    pub fn from_rows(field: FieldId, rows: Vec<Vec<KElement>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || c == 0 {
            return Err(Error::ShapeMismatch("empty matrix".into()));
        }
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::ShapeMismatch("ragged rows".into()));
            }
            for x in row {
                if x.field() != field {
                    return Err(Error::FieldMismatch(field.d(), x.field().d()));
                }
                data.push(x);
            }
        }
        Ok(KMatrix { rows: r, cols: c, field, data })
    }

    /// Matrix with rational entries given as `(num, den)` pairs.
    pub fn from_rationals(field: FieldId, rows: &[&[Rational]]) -> Self {
        let c = rows[0].len();
        Self::from_fn(rows.len(), c, field, |i, j| KElement::from_rational(rows[i][j].clone(), field))
    }

    pub fn zeros(rows: usize, cols: usize, field: FieldId) -> Self {
        Self::from_fn(rows, cols, field, |_, _| KElement::zero(field))
    }

    pub fn identity(n: usize, field: FieldId) -> Self {
        Self::from_fn(n, n, field, |i, j| if i == j { KElement::one(field) } else { KElement::zero(field) })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn field(&self) -> FieldId {
        self.field
    }

    pub fn get(&self, i: usize, j: usize) -> &KElement {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: KElement) {
        assert_eq!(x.field(), self.field);
        self.data[i * self.cols + j] = x;
    }

    pub fn entries(&self) -> &[KElement] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<KElement>> {
        self.data.chunks(self.cols).map(|r| r.to_vec()).collect()
    }

    fn check_field(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(self.field.d(), other.field.d()));
        }
        Ok(())
    }

    fn check_same_shape(&self, other: &Self, what: &str) -> Result<()> {
        self.check_field(other)?;
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch(format!("{what}: {:?} vs {:?}", self.shape(), other.shape())));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other, "add")?;
        Ok(Self::from_fn(self.rows, self.cols, self.field, |i, j| self.get(i, j) + other.get(i, j)))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other, "sub")?;
        Ok(Self::from_fn(self.rows, self.cols, self.field, |i, j| self.get(i, j) - other.get(i, j)))
    }

    pub fn neg(&self) -> Self {
        Self::from_fn(self.rows, self.cols, self.field, |i, j| -self.get(i, j))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!("mul: {:?} x {:?}", self.shape(), other.shape())));
        }
        Ok(Self::from_fn(self.rows, other.cols, self.field, |i, j| {
            let mut acc = KElement::zero(self.field);
            for k in 0..self.cols {
                let p = self.get(i, k) * other.get(k, j);
                acc = &acc + &p;
            }
            acc
        }))
    }

    pub fn scale(&self, c: &KElement) -> Self {
        Self::from_fn(self.rows, self.cols, self.field, |i, j| c * self.get(i, j))
    }

    pub fn scale_rational(&self, q: &Rational) -> Self {
        Self::from_fn(self.rows, self.cols, self.field, |i, j| self.get(i, j).scale(q))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, self.field, |i, j| self.get(j, i).clone())
    }

    pub fn conj(&self) -> Self {
        Self::from_fn(self.rows, self.cols, self.field, |i, j| self.get(i, j).conj())
    }

    /// `ᵗ\overline{M}`.
    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, self.field, |i, j| self.get(j, i).conj())
    }

    /// `B̂`: `B` when `−d ≢ 1 (mod 4)`, `2B` otherwise.
    pub fn hat(&self) -> Self {
        if self.field.is_one_mod_4() {
            self.scale_rational(&int(2))
        } else {
            self.clone()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(KElement::is_zero)
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(KElement::is_integral)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Entry-wise reduction modulo `O_K` into the box `[0,1)²`.
    pub fn reduce_mod_integers(&self) -> Self {
        Self::from_fn(self.rows, self.cols, self.field, |i, j| self.get(i, j).reduce_mod_integers())
    }

    pub fn column(&self, j: usize) -> Self {
        Self::from_fn(self.rows, 1, self.field, |i, _| self.get(i, j).clone())
    }

    pub fn columns(&self, range: std::ops::Range<usize>) -> Self {
        let start = range.start;
        Self::from_fn(self.rows, range.len(), self.field, |i, j| self.get(i, start + j).clone())
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Self {
        let (r0, c0) = (rows.start, cols.start);
        Self::from_fn(rows.len(), cols.len(), self.field, |i, j| self.get(r0 + i, c0 + j).clone())
    }

    pub fn hstack(parts: &[KMatrix]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::ShapeMismatch("empty hstack".into()))?;
        let rows = first.rows;
        let mut cols = 0;
        for p in parts {
            first.check_field(p)?;
            if p.rows != rows {
                return Err(Error::ShapeMismatch("hstack row counts differ".into()));
            }
            cols += p.cols;
        }
        let mut owner = Vec::with_capacity(cols);
        for (k, p) in parts.iter().enumerate() {
            for j in 0..p.cols {
                owner.push((k, j));
            }
        }
        Ok(Self::from_fn(rows, cols, first.field, |i, j| {
            let (k, jj) = owner[j];
            parts[k].get(i, jj).clone()
        }))
    }

    /// Exact Gauss–Jordan elimination over `K`, pivoting on the first nonzero entry.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch(format!("inverse of {:?}", self.shape())));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n, self.field);
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a.get(r, col).is_zero()).ok_or(Error::Singular)?;
            if pivot != col {
                a.swap_rows(pivot, col);
                inv.swap_rows(pivot, col);
            }
            let p_inv = a.get(col, col).inverse()?;
            a.scale_row(col, &p_inv);
            inv.scale_row(col, &p_inv);
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let factor = a.get(r, col).clone();
                a.axpy_row(r, col, &factor);
                inv.axpy_row(r, col, &factor);
            }
        }
        Ok(inv)
    }

    pub fn det(&self) -> Result<KElement> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch(format!("det of {:?}", self.shape())));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut det = KElement::one(self.field);
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&r| !a.get(r, col).is_zero()) else {
                return Ok(KElement::zero(self.field));
            };
            if pivot != col {
                a.swap_rows(pivot, col);
                det = -det;
            }
            let p = a.get(col, col).clone();
            det = &det * &p;
            let p_inv = p.inverse()?;
            for r in col + 1..n {
                if a.get(r, col).is_zero() {
                    continue;
                }
                let factor = a.get(r, col) * &p_inv;
                a.axpy_row(r, col, &factor);
            }
        }
        Ok(det)
    }

    /// `Re Tr(ᵗ\overline{M} B)` as an exact rational.
    pub fn re_trace_of_product(m: &KMatrix, b: &KMatrix) -> Result<Rational> {
        m.check_same_shape(b, "re_trace_of_product")?;
        let mut acc = Rational::zero();
        for (x, y) in m.data.iter().zip(&b.data) {
            acc += (&x.conj() * y).re();
        }
        Ok(acc)
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    fn scale_row(&mut self, i: usize, s: &KElement) {
        for c in 0..self.cols {
            let v = s * self.get(i, c);
            self.data[i * self.cols + c] = v;
        }
    }

    /// row_i -= factor * row_j
    fn axpy_row(&mut self, i: usize, j: usize, factor: &KElement) {
        for c in 0..self.cols {
            let v = self.get(i, c) - &(factor * self.get(j, c));
            self.data[i * self.cols + c] = v;
        }
    }
}

impl std::fmt::Display for KMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}
