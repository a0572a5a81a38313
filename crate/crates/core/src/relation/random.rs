//! Seeded generators for randomized relation and decomposition cases.

use num_complex::Complex64;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::Rng;

use super::{polynomial_term_count, PMatrix, RatMatrix, RelationSpec, DEFAULT_POLYNOMIAL_CAP};
use crate::error::{Error, Result};
use crate::kfield::rational::rat;
use crate::kfield::{FieldId, KElement, KMatrix, Rational};
use crate::lattice::{compute_g1_capped, compute_g2_capped};
use crate::theta::{level_for, CMatrix, ThetaParams};

/// Ranges and size limits for random relations.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomCaps {
    pub fields: Vec<u64>,
    pub g_values: Vec<usize>,
    pub h_values: Vec<usize>,
    /// Bound on numerators and denominators of the coordinates of entries of `T`.
    pub t_height: i64,
    /// Limit on `|G1|·|G2|`.
    pub max_terms: u64,
    /// Largest denominator in the characteristics.
    pub max_den: i64,
    /// Eigenvalue range of `P`.
    pub p_eigenvalues: (f64, f64),
    /// Limit on the estimated number of lattice points summed at `W = i·I`.
    pub max_points: f64,
}

impl Default for RandomCaps {
    fn default() -> Self {
        RandomCaps {
            fields: vec![1, 2, 3, 7],
            g_values: vec![1, 2],
            h_values: vec![2, 3],
            t_height: 2,
            max_terms: 256,
            max_den: 4,
            p_eigenvalues: (0.5, 3.0),
            max_points: 2e7,
        }
    }
}

fn small_rational(rng: &mut impl Rng, height: i64) -> Rational {
    rat(rng.gen_range(-height..=height), rng.gen_range(1..=height))
}

/// A nonsingular `h×h` matrix whose entries `x + yδ` have `x, y` of height at most `height`.
pub fn random_t(rng: &mut impl Rng, field: FieldId, h: usize, height: i64) -> KMatrix {
    loop {
        let t = KMatrix::from_fn(h, h, field, |_, _| {
            KElement::new(small_rational(rng, height), small_rational(rng, height), field)
        });
        if t.det().is_ok_and(|d| !d.is_zero()) {
            return t;
        }
    }
}

pub fn random_characteristic(rng: &mut impl Rng, field: FieldId, g: usize, h: usize, max_den: i64) -> KMatrix {
    KMatrix::from_fn(g, h, field, |_, _| {
        let den = rng.gen_range(1..=max_den);
        KElement::new(rat(rng.gen_range(-3..=3), den), rat(rng.gen_range(-3..=3), den), field)
    })
}

/// Entries `x + yδ` with `x, y` of height at most `height`, drawn independently.
pub fn random_characteristic_height(rng: &mut impl Rng, field: FieldId, g: usize, h: usize, height: i64) -> KMatrix {
    KMatrix::from_fn(g, h, field, |_, _| KElement::new(small_rational(rng, height), small_rational(rng, height), field))
}

/// A complex Hermitian `P = U·diag(λ)·U*` with `U` unitary and `λ` uniform in `range`.
pub fn random_p(rng: &mut impl Rng, h: usize, range: (f64, f64)) -> PMatrix {
    let z = DMatrix::from_fn(h, h, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let u = z.qr().q();
    let lambda =
        DMatrix::from_diagonal(&DVector::from_fn(h, |_, _| Complex64::new(rng.gen_range(range.0..=range.1), 0.0)));
    let p = &u * lambda * u.adjoint();
    PMatrix::Complex(CMatrix::from_fn(h, h, |i, j| p[(i, j)]).hermitian_part())
}

/// Estimated number of points in the truncation ellipsoid of a theta series on
/// `Mat(g, h; K)` at `W = i·I` whose form has eigenvalues `eigs`.
pub fn estimated_points(eigs: &[f64], g: usize, eps: f64) -> f64 {
    let n = 2 * g * eigs.len();
    let lmin = eigs.iter().copied().fold(f64::INFINITY, f64::min);
    if !(lmin > 0.0) {
        return f64::INFINITY;
    }
    let half = (n / 2) as f64;
    let ln_fact: f64 = (1..=n / 2).map(|k| (k as f64).ln()).sum();
    let ln_det: f64 = eigs.iter().map(|l| l.ln()).sum::<f64>() * g as f64;
    (half * PI.ln() - ln_fact + half * level_for(eps, lmin, n).ln() - ln_det).exp()
}

/// Estimated lattice points for both sides of the relation `(t, p)` at `W = i·I`.
pub fn relation_cost(g: usize, t: &KMatrix, p: &CMatrix, terms: u64, eps: f64) -> f64 {
    let tc = CMatrix::from_kmatrix(t);
    let q = tc.conj_transpose().mul(p).and_then(|x| x.mul(&tc)).expect("square").hermitian_part();
    estimated_points(&q.hermitian_eigenvalues(), g, eps)
        + terms as f64 * estimated_points(&p.hermitian_eigenvalues(), g, eps)
}

/// A relation within `caps`; draws again until the term count and cost fit.
pub fn random_relation(rng: &mut impl Rng, caps: &RandomCaps) -> RelationSpec {
    loop {
        let d = *caps.fields.choose(rng).expect("at least one field");
        let field = FieldId::new(d).expect("square-free d");
        let g = *caps.g_values.choose(rng).expect("at least one g");
        let h = *caps.h_values.choose(rng).expect("at least one h");
        let t = random_t(rng, field, h, caps.t_height);
        let terms = match (compute_g1_capped(g, &t, caps.max_terms), compute_g2_capped(g, &t, caps.max_terms)) {
            (Ok(a), Ok(b)) if a.order * b.order <= caps.max_terms => a.order * b.order,
            _ => continue,
        };
        let p = random_p(rng, h, caps.p_eigenvalues);
        let PMatrix::Complex(pc) = &p else { unreachable!("random_p is complex") };
        if relation_cost(g, &t, pc, terms, ThetaParams::default().eps) > caps.max_points {
            continue;
        }
        let a0 = random_characteristic(rng, field, g, h, caps.max_den);
        let b0 = random_characteristic(rng, field, g, h, caps.max_den);
        return RelationSpec { field, g, h, t, p, a0, b0 };
    }
}

/// A matrix `T` whose `G2` is nontrivial and no larger than `cap`.
pub fn random_t_with_nontrivial_g2(rng: &mut impl Rng, field: FieldId, g: usize, h: usize, cap: u64) -> KMatrix {
    loop {
        let t = random_t(rng, field, h, 2);
        if let Ok(g2) = compute_g2_capped(g, &t, cap) {
            if g2.order > 1 {
                return t;
            }
        }
    }
}

/// A rational positive definite `h×h` matrix with entries `k/2`, `|k| ≤ max_k`,
/// whose rank-one expansion over `g = 1` has at most `cap` terms.
///
/// Returns the matrix and the number of draws rejected for exceeding `cap`.
pub fn random_rational_pd(
    rng: &mut impl Rng,
    h: usize,
    max_k: i64,
    field: FieldId,
    cap: u64,
) -> Result<(RatMatrix, u64)> {
    let mut rejected = 0;
    for _ in 0..10_000 {
        let mut p = vec![vec![rat(0, 1); h]; h];
        for i in 0..h {
            p[i][i] = rat(rng.gen_range(1..=max_k), 2);
            for j in 0..i {
                let x = rat(rng.gen_range(-max_k..=max_k), 2);
                p[i][j] = x.clone();
                p[j][i] = x;
            }
        }
        if super::decompose_rational_p(&p).is_err() {
            continue;
        }
        match polynomial_term_count(&p, 1, field, cap.min(DEFAULT_POLYNOMIAL_CAP)) {
            Ok(n) if n <= cap => return Ok((p, rejected)),
            _ => rejected += 1,
        }
    }
    Err(Error::InvalidParameter(format!(
        "no positive definite matrix with entries k/2, |k| <= {max_k}, within {cap} terms"
    )))
}
