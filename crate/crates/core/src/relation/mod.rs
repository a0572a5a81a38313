//! Riemann-type relations: for `T ∈ GL_h(K)` and Hermitian positive definite
//! `P`, with `Q = T̄ᵗ P T`,
//!
//! `Θ^Q[A0·(T̄ᵗ)⁻¹; B0·T](W) = (1/|G2|) Σ_{B∈G2} Σ_{A∈G1} e^{−2πi Re Tr(Ā0ᵗ B̂)} Θ^P[A0+A; B0+B̂](W)`.
//!
//! [`Pairing::Dual`] replaces `B̂` by `B̂/√−d` in both places. The two forms agree
//! when `d = 1` or `G2` is trivial; otherwise only the dual form is an identity.
//!
//! Building a relation is exact; only the final theta values are floating point.

mod plan;
pub mod random;
mod thmq;

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

pub use plan::{EvalPlan, Factor};
pub use thmq::{
    decompose_rational_p, polynomial_term_count, rat_det, theta_p_as_polynomial, theta_p_as_polynomial_with,
    DecompositionTree, Monomial, PolynomialReport, RankOneFactor, RatMatrix, SchurLevel, DEFAULT_POLYNOMIAL_CAP,
};

use crate::error::{Error, Result};
use crate::kfield::rational::{frac_part, to_f64};
use crate::kfield::{FieldId, KElement, KMatrix, Rational};
use crate::lattice::{
    character_phase_with, compute_g1_capped, compute_g2_capped, FiniteAbelianGroup, Pairing, DEFAULT_GROUP_CAP,
};
use crate::theta::{CMatrix, Characteristic, ThetaParams};

/// The matrix `P`: exact rational symmetric, or a general complex Hermitian one.
#[derive(Debug, Clone, PartialEq)]
pub enum PMatrix {
    Rational(Vec<Vec<Rational>>),
    Complex(CMatrix),
}

impl PMatrix {
    pub fn size(&self) -> usize {
        match self {
            PMatrix::Rational(r) => r.len(),
            PMatrix::Complex(c) => c.rows(),
        }
    }

    pub fn to_cmatrix(&self) -> CMatrix {
        match self {
            PMatrix::Rational(r) => CMatrix::from_fn(r.len(), r.len(), |i, j| Complex64::new(to_f64(&r[i][j]), 0.0)),
            PMatrix::Complex(c) => c.clone(),
        }
    }

    pub fn to_kmatrix(&self, field: FieldId) -> Option<KMatrix> {
        match self {
            PMatrix::Rational(r) => {
                Some(KMatrix::from_fn(r.len(), r.len(), field, |i, j| KElement::from_rational(r[i][j].clone(), field)))
            }
            PMatrix::Complex(_) => None,
        }
    }

    /// `α I`-style diagonal entries when `P` is diagonal with positive real entries.
    pub fn positive_diagonal(&self) -> Option<Vec<f64>> {
        positive_diagonal_of(&self.to_cmatrix())
    }

    pub fn scalar_identity(n: usize, alpha: i64) -> Self {
        PMatrix::Rational(
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| if i == j { Rational::from_integer(alpha.into()) } else { Rational::zero() })
                        .collect()
                })
                .collect(),
        )
    }
}

/// Whether a rational symmetric matrix is positive definite (leading minors, exactly).
pub fn rational_is_positive_definite(p: &[Vec<Rational>], field: FieldId) -> Result<bool> {
    let n = p.len();
    for k in 1..=n {
        let m = KMatrix::from_fn(k, k, field, |i, j| KElement::from_rational(p[i][j].clone(), field));
        let det = m.det()?;
        if !(det.a > Rational::zero()) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelationSpec {
    pub field: FieldId,
    pub g: usize,
    pub h: usize,
    pub t: KMatrix,
    pub p: PMatrix,
    pub a0: KMatrix,
    pub b0: KMatrix,
}

impl RelationSpec {
    pub fn validate(&self, params: &ThetaParams) -> Result<()> {
        let (g, h) = (self.g, self.h);
        if g == 0 || h == 0 {
            return Err(Error::InvalidParameter("g and h must be positive".into()));
        }
        if self.t.shape() != (h, h) {
            return Err(Error::ShapeMismatch(format!("T is {:?}, expected {h}x{h}", self.t.shape())));
        }
        if self.a0.shape() != (g, h) || self.b0.shape() != (g, h) {
            return Err(Error::ShapeMismatch(format!("A0/B0 must be {g}x{h}")));
        }
        for m in [&self.t, &self.a0, &self.b0] {
            if m.field() != self.field {
                return Err(Error::FieldMismatch(self.field.d(), m.field().d()));
            }
        }
        if self.p.size() != h {
            return Err(Error::ShapeMismatch(format!("P must be {h}x{h}")));
        }
        match &self.p {
            PMatrix::Rational(r) => {
                if r.iter().any(|row| row.len() != h) {
                    return Err(Error::ShapeMismatch("P must be square".into()));
                }
                if (0..h).any(|i| (0..h).any(|j| r[i][j] != r[j][i])) {
                    return Err(Error::NotHermitian("rational P must be symmetric".into()));
                }
                if !rational_is_positive_definite(r, self.field)? {
                    return Err(Error::NotPositiveDefinite("P".into()));
                }
            }
            PMatrix::Complex(c) => {
                if !c.is_hermitian(1e-12) {
                    return Err(Error::NotHermitian("P".into()));
                }
                let l = c.min_hermitian_eigenvalue();
                if !(l > params.pd_tol) {
                    return Err(Error::NotPositiveDefinite(format!("P has lambda_min = {l:e}")));
                }
            }
        }
        if self.t.det()?.is_zero() {
            return Err(Error::Singular);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RelationOptions {
    /// Limit on `|G1|·|G2|`.
    pub term_cap: u64,
    /// Test hook: shifts the phase of the first `B` by this many quarter turns.
    pub corrupt_phase: u8,
    pub pairing: Pairing,
}

impl Default for RelationOptions {
    fn default() -> Self {
        RelationOptions { term_cap: DEFAULT_GROUP_CAP, corrupt_phase: 0, pairing: Pairing::Printed }
    }
}

/// A fully expanded relation.
#[derive(Debug, Clone)]
pub struct RelationInstance {
    pub spec: RelationSpec,
    pub q: CMatrix,
    /// `Q` over `K` when `P` is rational.
    pub q_exact: Option<KMatrix>,
    pub g1: FiniteAbelianGroup,
    pub g2: FiniteAbelianGroup,
    pub lhs: Characteristic,
    pub pairing: Pairing,
    corrupt_phase: u8,
}

/// One right-hand term: indices into the representative lists of `G1`, `G2`
/// and the exact coefficient phase `q`, standing for `e^{2πiq}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub a_index: usize,
    pub b_index: usize,
    pub phase: Rational,
}

impl RelationInstance {
    pub fn term_count(&self) -> u64 {
        self.g1.order * self.g2.order
    }

    /// Phase `−Re Tr(Ā0ᵗ·shift(B)) mod 1` attached to each representative of `G2`.
    pub fn b_phases(&self) -> Result<Vec<Rational>> {
        let mut out = Vec::with_capacity(self.g2.representatives.len());
        for b in &self.g2.representatives {
            out.push(frac_part(&-character_phase_with(&self.spec.a0, b, self.pairing)?));
        }
        if self.corrupt_phase != 0 {
            out[0] = frac_part(&(&out[0] + Rational::new(self.corrupt_phase.into(), 4.into())));
        }
        Ok(out)
    }

    /// All `|G1|·|G2|` terms, ordered by `A` representative then `B` representative.
    pub fn terms(&self) -> Result<Vec<Term>> {
        let phases = self.b_phases()?;
        let mut out = Vec::with_capacity(self.term_count() as usize);
        for a_index in 0..self.g1.representatives.len() {
            for (b_index, phase) in phases.iter().enumerate() {
                out.push(Term { a_index, b_index, phase: phase.clone() });
            }
        }
        Ok(out)
    }

    /// Characteristic of the `(A, B)` term on the right-hand side.
    pub fn term_characteristic(&self, a_index: usize, b_index: usize) -> Result<Characteristic> {
        let a = self.spec.a0.add(&self.g1.representatives[a_index])?;
        let b = self.spec.b0.add(&self.pairing.shift(&self.g2.representatives[b_index])?)?;
        Characteristic::new(a, b)
    }
}

pub fn build_relation(spec: &RelationSpec) -> Result<RelationInstance> {
    build_relation_with(spec, &RelationOptions::default(), &ThetaParams::default())
}

pub fn build_relation_with(
    spec: &RelationSpec,
    opts: &RelationOptions,
    params: &ThetaParams,
) -> Result<RelationInstance> {
    spec.validate(params)?;
    let (g, t) = (spec.g, &spec.t);
    let g1 = compute_g1_capped(g, t, opts.term_cap)?;
    let g2 = compute_g2_capped(g, t, opts.term_cap)?;
    let terms = g1.order as u128 * g2.order as u128;
    if terms > opts.term_cap as u128 {
        return Err(Error::CapExceeded { what: "term count |G1|*|G2|", value: terms, cap: opts.term_cap as u128 });
    }
    let th = t.conj_transpose();
    let (q, q_exact) = match spec.p.to_kmatrix(spec.field) {
        Some(pk) => {
            let qk = th.mul(&pk)?.mul(t)?;
            (CMatrix::from_kmatrix(&qk), Some(qk))
        }
        None => {
            let tc = CMatrix::from_kmatrix(t);
            let raw = tc.conj_transpose().mul(&spec.p.to_cmatrix())?.mul(&tc)?;
            (raw.hermitian_part(), None)
        }
    };
    let lhs = Characteristic::new(spec.a0.mul(&th.inverse()?)?, spec.b0.mul(t)?)?;
    Ok(RelationInstance {
        spec: spec.clone(),
        q,
        q_exact,
        g1,
        g2,
        lhs,
        pairing: opts.pairing,
        corrupt_phase: opts.corrupt_phase,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    #[serde(with = "crate::json::complex")]
    pub lhs: Complex64,
    #[serde(with = "crate::json::complex")]
    pub rhs: Complex64,
    pub residual_abs: f64,
    pub residual_rel: f64,
    /// Size of the summed terms: `Σ|term|/|G2|` for a relation, else `max(|lhs|, |rhs|)`.
    /// Much larger than `|lhs|` means the right side cancels and `residual_rel`
    /// is limited by rounding.
    pub scale: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub term_count: u64,
    pub theta_evals: u64,
    pub cache_hits: u64,
    pub params: ThetaParams,
}

impl VerificationReport {
    /// `residual_abs` relative to the larger of `scale` and both sides.
    pub fn residual_scaled(&self) -> f64 {
        self.residual_abs / self.scale.max(self.lhs.norm()).max(self.rhs.norm()).max(1e-300)
    }

    pub fn compare(lhs: Complex64, rhs: Complex64, term_count: u64, stats: (u64, u64), params: &ThetaParams) -> Self {
        let residual_abs = (lhs - rhs).norm();
        let residual_rel = residual_abs / lhs.norm().max(rhs.norm()).max(1e-300);
        let tolerance = tolerance_for(term_count, params);
        VerificationReport {
            lhs,
            rhs,
            residual_abs,
            residual_rel,
            scale: lhs.norm().max(rhs.norm()),
            tolerance,
            pass: residual_rel < tolerance,
            term_count,
            theta_evals: stats.0,
            cache_hits: stats.1,
            params: *params,
        }
    }
}

/// Acceptance threshold for a relation with `term_count` terms.
pub fn tolerance_for(term_count: u64, params: &ThetaParams) -> f64 {
    (term_count as f64 * 4.0 * params.eps).max(1e-9)
}

/// Evaluates both sides of the relation at `W`.
pub fn evaluate_relation(inst: &RelationInstance, w: &CMatrix, params: &ThetaParams) -> Result<VerificationReport> {
    let mut plan = EvalPlan::new(w.clone());
    let spec = &inst.spec;
    let p = spec.p.to_cmatrix();
    let p_diag = spec.p.positive_diagonal();
    let q_diag = positive_diagonal_of(&inst.q);

    let lhs_slot = plan.add_product(&inst.q, q_diag.as_deref(), &inst.lhs.a0, &inst.lhs.b0)?;
    let mut rhs_terms = Vec::with_capacity(inst.term_count() as usize);
    for t in inst.terms()? {
        let ch = inst.term_characteristic(t.a_index, t.b_index)?;
        let factors = plan.add_product(&p, p_diag.as_deref(), &ch.a0, &ch.b0)?;
        rhs_terms.push((t.phase, factors));
    }
    let values = plan.evaluate(params)?;
    let lhs = plan.product_value(&lhs_slot, &values);
    let mut acc = crate::theta::engine::ComplexAccumulator::default();
    let mut mass = crate::theta::engine::Compensated::default();
    for (phase, factors) in &rhs_terms {
        let v = plan.product_value(factors, &values);
        acc.add(v * root_of_unity(phase));
        mass.add(v.norm());
    }
    let n = inst.g2.order as f64;
    let rhs = acc.value() / n;
    let mut report = VerificationReport::compare(lhs, rhs, inst.term_count(), plan.stats(), params);
    report.scale = mass.value() / n;
    Ok(report)
}

fn positive_diagonal_of(m: &CMatrix) -> Option<Vec<f64>> {
    let n = m.rows();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        for j in 0..n {
            let z = m.get(i, j);
            if i == j {
                if z.im != 0.0 || !(z.re > 0.0) {
                    return None;
                }
                out.push(z.re);
            } else if z != Complex64::zero() {
                return None;
            }
        }
    }
    Some(out)
}

/// `e^{2πi q}` for an exact phase.
pub fn root_of_unity(q: &Rational) -> Complex64 {
    if q.is_zero() {
        return Complex64::one();
    }
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * to_f64(&frac_part(q)))
}
