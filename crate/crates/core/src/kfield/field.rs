use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Class of `-d` modulo 4, which fixes the shape of the integral basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Residue {
    /// `-d ≢ 1 (mod 4)`: `δ = √−d`.
    NotOneMod4,
    /// `-d ≡ 1 (mod 4)`: `δ = (1+√−d)/2`.
    OneMod4,
}

/// The imaginary quadratic field `Q(√−d)` together with its integral basis `{1, δ}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldId {
    d: u64,
    residue: Residue,
}

fn is_square_free(d: u64) -> bool {
    let mut p = 2u64;
    while p * p <= d {
        if d.is_multiple_of(p * p) {
            return false;
        }
        p += 1;
    }
    true
}

impl FieldId {
    pub fn new(d: u64) -> Result<Self> {
        if d == 0 || !is_square_free(d) {
            return Err(Error::InvalidField(d));
        }
        let residue = if d % 4 == 3 { Residue::OneMod4 } else { Residue::NotOneMod4 };
        Ok(FieldId { d, residue })
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn residue(&self) -> Residue {
        self.residue
    }

    pub fn is_one_mod_4(&self) -> bool {
        self.residue == Residue::OneMod4
    }

    /// `δ + conj(δ)`.
    pub fn delta_trace(&self) -> i64 {
        match self.residue {
            Residue::NotOneMod4 => 0,
            Residue::OneMod4 => 1,
        }
    }

    /// `|δ|²`, always a positive integer.
    pub fn delta_norm(&self) -> i64 {
        match self.residue {
            Residue::NotOneMod4 => self.d as i64,
            Residue::OneMod4 => (1 + self.d as i64) / 4,
        }
    }

    pub fn delta_complex(&self) -> Complex64 {
        let s = (self.d as f64).sqrt();
        match self.residue {
            Residue::NotOneMod4 => Complex64::new(0.0, s),
            Residue::OneMod4 => Complex64::new(0.5, 0.5 * s),
        }
    }

    /// Smallest eigenvalue of the Gram matrix of `{1, δ}` under `|·|²`, so that
    /// `|a + bδ|² ≥ μ (a² + b²)` for real `a, b`.
    pub fn basis_gram_min_eigenvalue(&self) -> f64 {
        let t = 0.5 * self.delta_trace() as f64;
        let n = self.delta_norm() as f64;
        let mean = 0.5 * (1.0 + n);
        let rad = (0.25 * (n - 1.0) * (n - 1.0) + t * t).sqrt();
        mean - rad
    }
}

impl std::fmt::Display for FieldId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Q(sqrt(-{}))", self.d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residues() {
        assert_eq!(FieldId::new(1).unwrap().residue(), Residue::NotOneMod4);
        assert_eq!(FieldId::new(2).unwrap().residue(), Residue::NotOneMod4);
        assert_eq!(FieldId::new(3).unwrap().residue(), Residue::OneMod4);
        assert_eq!(FieldId::new(7).unwrap().residue(), Residue::OneMod4);
        assert_eq!(FieldId::new(5).unwrap().residue(), Residue::NotOneMod4);
        assert!(FieldId::new(4).is_err());
        assert!(FieldId::new(12).is_err());
        assert!(FieldId::new(0).is_err());
    }

    #[test]
    fn delta_norms() {
        assert_eq!(FieldId::new(1).unwrap().delta_norm(), 1);
        assert_eq!(FieldId::new(3).unwrap().delta_norm(), 1);
        assert_eq!(FieldId::new(7).unwrap().delta_norm(), 2);
        assert_eq!(FieldId::new(2).unwrap().delta_norm(), 2);
        for d in [1u64, 2, 3, 5, 7, 11] {
            let f = FieldId::new(d).unwrap();
            let z = f.delta_complex();
            assert!((z.norm_sqr() - f.delta_norm() as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn gram_bound() {
        assert!((FieldId::new(1).unwrap().basis_gram_min_eigenvalue() - 1.0).abs() < 1e-15);
        assert!((FieldId::new(3).unwrap().basis_gram_min_eigenvalue() - 0.5).abs() < 1e-15);
    }
}
