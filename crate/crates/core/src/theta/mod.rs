//! Evaluation of theta series with rigorous truncation.
//!
//! Every series handled here is a Gaussian sum over a lattice `Z^n` after
//! choosing real coordinates; see [`engine`] for the common evaluator.

mod bound;
mod cache;
mod cmatrix;
pub mod engine;
mod series;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use bound::{choose_radius, level_for, tail_bound};
pub use cache::{canonical_characteristic, ThetaCache};
pub use cmatrix::CMatrix;
pub use series::{
    check_conversion_phase, riemann_theta_z0, theta_check_variant, theta_general, theta_rank1,
    theta_via_check_conversion,
};

use crate::error::{Error, Result};
use crate::kfield::KMatrix;

/// How lattice points are enumerated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Enumeration {
    /// Level set of the actual quadratic form.
    #[default]
    Ellipsoid,
    /// Euclidean ball sized from `λ_min(Y)·λ_min(P)`.
    Ball,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaParams {
    pub eps: f64,
    pub max_radius: u64,
    pub precision_bits: u32,
    #[serde(default)]
    pub enumeration: Enumeration,
    /// Minimum admissible `λ_min` for `Y` and `P`.
    #[serde(default = "default_pd_tol")]
    pub pd_tol: f64,
}

fn default_pd_tol() -> f64 {
    1e-10
}

impl Default for ThetaParams {
    fn default() -> Self {
        ThetaParams {
            eps: 1e-12,
            max_radius: 64,
            precision_bits: 53,
            enumeration: Enumeration::Ellipsoid,
            pd_tol: default_pd_tol(),
        }
    }
}

impl ThetaParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0) || !self.eps.is_finite() {
            return Err(Error::InvalidParameter(format!("eps must be positive, got {}", self.eps)));
        }
        if self.max_radius < 1 {
            return Err(Error::InvalidParameter("max_radius must be at least 1".into()));
        }
        if self.precision_bits != 53 {
            return Err(Error::InvalidParameter(format!(
                "only 53-bit precision is available, got {}",
                self.precision_bits
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaValue {
    pub value: Complex64,
    pub tail_bound: f64,
    pub lattice_points_used: u64,
}

impl ThetaValue {
    /// Product of values; tail bounds combine to first order.
    pub fn product(values: &[ThetaValue]) -> ThetaValue {
        let mut value = Complex64::new(1.0, 0.0);
        let mut tail = 0.0;
        let mut points = 0;
        for v in values {
            tail = tail * (v.value.norm() + v.tail_bound) + value.norm() * v.tail_bound;
            value *= v.value;
            points += v.lattice_points_used;
        }
        ThetaValue { value, tail_bound: tail, lattice_points_used: points }
    }
}

/// A pair of characteristics `A0, B0 ∈ Mat(g,h;K)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Characteristic {
    pub a0: KMatrix,
    pub b0: KMatrix,
}

impl Characteristic {
    pub fn new(a0: KMatrix, b0: KMatrix) -> Result<Self> {
        if a0.shape() != b0.shape() {
            return Err(Error::ShapeMismatch(format!("A0 {:?} vs B0 {:?}", a0.shape(), b0.shape())));
        }
        if a0.field() != b0.field() {
            return Err(Error::FieldMismatch(a0.field().d(), b0.field().d()));
        }
        Ok(Characteristic { a0, b0 })
    }

    pub fn zero(g: usize, h: usize, field: crate::kfield::FieldId) -> Self {
        Characteristic { a0: KMatrix::zeros(g, h, field), b0: KMatrix::zeros(g, h, field) }
    }
}

/// Whether `W` lies in the type-I domain, i.e. `Y = (W − W̄ᵗ)/(2i)` has
/// smallest eigenvalue above `tol`; the eigenvalue is returned as witness.
pub fn in_h1(w: &CMatrix, tol: f64) -> Result<(bool, f64)> {
    if !w.is_square() {
        return Err(Error::ShapeMismatch(format!("W must be square, got {}x{}", w.rows(), w.cols())));
    }
    let lambda = w.skew_part().min_hermitian_eigenvalue();
    Ok((lambda > tol, lambda))
}

pub(crate) fn require_h1(w: &CMatrix, tol: f64) -> Result<f64> {
    let (ok, lambda) = in_h1(w, tol)?;
    if !ok {
        return Err(Error::NotInDomain { lambda_min: lambda, tol });
    }
    Ok(lambda)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domain_membership() {
        let (ok, l) = in_h1(&CMatrix::i_identity(3), 1e-10).unwrap();
        assert!(ok && (l - 1.0).abs() < 1e-14);
        let (ok, _) = in_h1(&CMatrix::i_identity(2).scale(-1.0), 1e-10).unwrap();
        assert!(!ok);
        // Y = [[1, −i/2], [i/2, 1]], eigenvalues 1/2 and 3/2
        let w = CMatrix::from_rows(vec![
            vec![Complex64::new(0.0, 1.0), Complex64::new(0.5, 0.0)],
            vec![Complex64::new(-0.5, 0.0), Complex64::new(0.0, 1.0)],
        ])
        .unwrap();
        let (ok, l) = in_h1(&w, 1e-10).unwrap();
        assert!(ok && (l - 0.5).abs() < 1e-14);
        assert!(in_h1(&CMatrix::from_real_rows(&[&[1.0, 2.0]]).unwrap(), 1e-10).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(ThetaParams::default().validate().is_ok());
        assert!(ThetaParams { eps: 0.0, ..Default::default() }.validate().is_err());
        assert!(ThetaParams { precision_bits: 128, ..Default::default() }.validate().is_err());
    }
}
