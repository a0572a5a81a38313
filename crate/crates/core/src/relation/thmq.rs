//! Rational `P`: reduction of `Θ^P` to products of rank-one thetas by repeated
//! Schur complements.

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::plan::EvalPlan;
use super::root_of_unity;
use crate::error::{Error, Result};
use crate::kfield::rational::to_f64;
use crate::kfield::{KElement, KMatrix, Rational};
use crate::lattice::{character_phase_with, compute_g1_capped, compute_g2_capped, FiniteAbelianGroup, Pairing};
use crate::theta::{canonical_characteristic, theta_general, CMatrix, Characteristic, ThetaParams};

/// Default limit on the number of monomials in an expansion.
pub const DEFAULT_POLYNOMIAL_CAP: u64 = 50_000;

pub type RatMatrix = Vec<Vec<Rational>>;

/// One step `P = [[μ, R], [Rᵗ, P1]]`, `M̄ᵗ P M = diag(λ, P1)`, `K = M⁻¹`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchurLevel {
    #[serde(serialize_with = "crate::json::ser_rat_matrix")]
    pub p: RatMatrix,
    #[serde(serialize_with = "crate::json::ser_rational")]
    pub lambda: Rational,
    #[serde(serialize_with = "crate::json::ser_rat_matrix")]
    pub m: RatMatrix,
    #[serde(serialize_with = "crate::json::ser_rat_matrix")]
    pub k: RatMatrix,
    #[serde(serialize_with = "crate::json::ser_rat_matrix")]
    pub rest: RatMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionTree {
    pub levels: Vec<SchurLevel>,
}

impl DecompositionTree {
    pub fn lambdas(&self) -> Vec<Rational> {
        self.levels.iter().map(|l| l.lambda.clone()).collect()
    }
}

fn identity(n: usize) -> RatMatrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect()).collect()
}

fn rat_mul(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    let (n, m, k) = (a.len(), b.len(), b.first().map_or(0, Vec::len));
    (0..n)
        .map(|i| (0..k).map(|j| (0..m).fold(Rational::zero(), |acc, l| acc + &a[i][l] * &b[l][j])).collect())
        .collect()
}

fn rat_transpose(a: &RatMatrix) -> RatMatrix {
    let c = a.first().map_or(0, Vec::len);
    (0..c).map(|j| a.iter().map(|row| row[j].clone()).collect()).collect()
}

fn rat_inverse(a: &RatMatrix) -> Result<RatMatrix> {
    let n = a.len();
    let mut m: Vec<Vec<Rational>> = a.clone();
    let mut inv = identity(n);
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero()).ok_or(Error::Singular)?;
        m.swap(col, piv);
        inv.swap(col, piv);
        let p = m[col][col].clone();
        for j in 0..n {
            m[col][j] = &m[col][j] / &p;
            inv[col][j] = &inv[col][j] / &p;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for j in 0..n {
                    let (x, y) = (&m[col][j] * &f, &inv[col][j] * &f);
                    m[r][j] -= x;
                    inv[r][j] -= y;
                }
            }
        }
    }
    Ok(inv)
}

/// Exact determinant by elimination.
pub fn rat_det(a: &RatMatrix) -> Rational {
    let n = a.len();
    let mut m = a.clone();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else { return Rational::zero() };
        if piv != col {
            m.swap(col, piv);
            det = -det;
        }
        det *= &m[col][col];
        for r in col + 1..n {
            let f = &m[r][col] / &m[col][col];
            for j in col..n {
                let x = &m[col][j] * &f;
                m[r][j] -= x;
            }
        }
    }
    det
}

pub fn decompose_rational_p(p: &RatMatrix) -> Result<DecompositionTree> {
    let h = p.len();
    if h == 0 || p.iter().any(|r| r.len() != h) {
        return Err(Error::ShapeMismatch("P must be a non-empty square matrix".into()));
    }
    if (0..h).any(|i| (0..i).any(|j| p[i][j] != p[j][i])) {
        return Err(Error::NotHermitian("P must be symmetric".into()));
    }
    let mut levels = Vec::with_capacity(h);
    let mut cur = p.clone();
    while !cur.is_empty() {
        let n = cur.len();
        let mu = cur[0][0].clone();
        let rest: RatMatrix = cur[1..].iter().map(|row| row[1..].to_vec()).collect();
        let (lambda, m, k) = if n == 1 {
            (mu, identity(1), identity(1))
        } else {
            if !mu.is_positive() {
                return Err(Error::NotPositiveDefinite(format!("leading entry {mu} at size {n}")));
            }
            let rt: RatMatrix = cur[1..].iter().map(|row| vec![row[0].clone()]).collect();
            // c = P1⁻¹ Rᵗ
            let c = rat_mul(&rat_inverse(&rest).map_err(|_| Error::NotPositiveDefinite("singular block".into()))?, &rt);
            let lambda = &mu - rat_mul(&rat_transpose(&rt), &c)[0][0].clone();
            let mut m = identity(n);
            let mut k = identity(n);
            for i in 1..n {
                m[i][0] = -c[i - 1][0].clone();
                k[i][0] = c[i - 1][0].clone();
            }
            (lambda, m, k)
        };
        if !lambda.is_positive() {
            return Err(Error::NotPositiveDefinite(format!("Schur complement {lambda} at size {n}")));
        }
        levels.push(SchurLevel { p: cur, lambda, m, k, rest: rest.clone() });
        cur = rest;
    }
    Ok(DecompositionTree { levels })
}

/// `Θ[a;b](λW)` for columns `a, b`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RankOneFactor {
    pub lambda: Rational,
    pub a: KMatrix,
    pub b: KMatrix,
}

/// `weight · e^{2πi·phase} · Π factors`.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub phase: Rational,
    pub weight: Rational,
    pub factors: Vec<RankOneFactor>,
}

#[derive(Debug, Clone)]
pub struct PolynomialReport {
    pub tree: DecompositionTree,
    pub monomials: Vec<Monomial>,
    pub value: Complex64,
    pub direct: Complex64,
    pub residual: f64,
    /// `Σ|monomial|`; see [`crate::relation::VerificationReport::scale`].
    pub scale: f64,
    pub theta_evals: u64,
}

fn rat_to_k(m: &RatMatrix, field: crate::kfield::FieldId) -> KMatrix {
    KMatrix::from_fn(m.len(), m[0].len(), field, |i, j| KElement::from_rational(m[i][j].clone(), field))
}

struct LevelGroups {
    k: KMatrix,
    m: KMatrix,
    lambda: Rational,
    g1: FiniteAbelianGroup,
    g2: FiniteAbelianGroup,
}

fn level_groups(
    tree: &DecompositionTree,
    g: usize,
    field: crate::kfield::FieldId,
    cap: u64,
) -> Result<Vec<LevelGroups>> {
    let mut out = Vec::new();
    let mut total: u128 = 1;
    for lvl in &tree.levels {
        let k = rat_to_k(&lvl.k, field);
        let g1 = compute_g1_capped(g, &k, cap)?;
        let g2 = compute_g2_capped(g, &k, cap)?;
        total = total.saturating_mul(g1.order as u128 * g2.order as u128);
        if total > cap as u128 {
            return Err(Error::CapExceeded { what: "polynomial monomial count", value: total, cap: cap as u128 });
        }
        out.push(LevelGroups { m: rat_to_k(&lvl.m, field), k, lambda: lvl.lambda.clone(), g1, g2 });
    }
    Ok(out)
}

/// Number of monomials the expansion of `Θ^P` on `Mat(g,h;K)` produces.
pub fn polynomial_term_count(p: &RatMatrix, g: usize, field: crate::kfield::FieldId, cap: u64) -> Result<u64> {
    let tree = decompose_rational_p(p)?;
    let groups = level_groups(&tree, g, field, cap)?;
    Ok(groups.iter().map(|l| l.g1.order * l.g2.order).product())
}

fn expand(
    levels: &[LevelGroups],
    a: &KMatrix,
    b: &KMatrix,
    prefix: &Monomial,
    pairing: Pairing,
    out: &mut Vec<Monomial>,
) -> Result<()> {
    let lvl = &levels[0];
    // Θ^P[A;B] is the left side of the relation for (K, S) at A0' = A·K̄ᵗ, B0' = B·M
    let a0 = a.mul(&lvl.k.conj_transpose())?;
    let b0 = b.mul(&lvl.m)?;
    let n = a.cols();
    let weight = &prefix.weight / Rational::from_integer(lvl.g2.order.into());
    for ra in &lvl.g1.representatives {
        let x = a0.add(ra)?;
        for rb in &lvl.g2.representatives {
            let y = b0.add(&pairing.shift(rb)?)?;
            let phase = &prefix.phase - character_phase_with(&a0, rb, pairing)?;
            let (fa, fb) = canonical_characteristic(&x.column(0), &y.column(0));
            let mut factors = prefix.factors.clone();
            factors.push(RankOneFactor { lambda: lvl.lambda.clone(), a: fa, b: fb });
            let mono = Monomial { phase: crate::kfield::rational::frac_part(&phase), weight: weight.clone(), factors };
            if n == 1 {
                out.push(mono);
            } else {
                expand(&levels[1..], &x.columns(1..n), &y.columns(1..n), &mono, pairing, out)?;
            }
        }
    }
    Ok(())
}

/// Expands `Θ^P[A0;B0](W)` into rank-one thetas, evaluates the expansion and
/// compares it with the direct lattice sum.
pub fn theta_p_as_polynomial(
    p: &RatMatrix,
    a0: &KMatrix,
    b0: &KMatrix,
    w: &CMatrix,
    params: &ThetaParams,
    cap: u64,
) -> Result<PolynomialReport> {
    theta_p_as_polynomial_with(p, a0, b0, w, params, cap, Pairing::Dual)
}

pub fn theta_p_as_polynomial_with(
    p: &RatMatrix,
    a0: &KMatrix,
    b0: &KMatrix,
    w: &CMatrix,
    params: &ThetaParams,
    cap: u64,
    pairing: Pairing,
) -> Result<PolynomialReport> {
    let ch = Characteristic::new(a0.clone(), b0.clone())?;
    let (g, h) = a0.shape();
    if p.len() != h {
        return Err(Error::ShapeMismatch(format!("P is {}x{}, characteristic has h = {h}", p.len(), p.len())));
    }
    let field = a0.field();
    let tree = decompose_rational_p(p)?;
    let levels = level_groups(&tree, g, field, cap)?;
    let mut monomials = Vec::new();
    let root = Monomial { phase: Rational::zero(), weight: Rational::one(), factors: Vec::new() };
    expand(&levels, a0, b0, &root, pairing, &mut monomials)?;

    let mut plan = EvalPlan::new(w.clone());
    let slots: Vec<Vec<usize>> = monomials
        .iter()
        .map(|m| m.factors.iter().map(|f| plan.add_scaled(to_f64(&f.lambda), &f.a, &f.b)).collect())
        .collect();
    let values = plan.evaluate(params)?;
    let mut acc = crate::theta::engine::ComplexAccumulator::default();
    let mut mass = crate::theta::engine::Compensated::default();
    for (m, s) in monomials.iter().zip(&slots) {
        let v = plan.product_value(s, &values) * to_f64(&m.weight);
        acc.add(v * root_of_unity(&m.phase));
        mass.add(v.norm());
    }
    let value = acc.value();
    let pc = CMatrix::from_fn(h, h, |i, j| Complex64::new(to_f64(&p[i][j]), 0.0));
    let direct = theta_general(w, &pc, &ch, params)?.value;
    let residual = (value - direct).norm() / value.norm().max(direct.norm()).max(1e-300);
    Ok(PolynomialReport { tree, monomials, value, direct, residual, scale: mass.value(), theta_evals: plan.stats().0 })
}
