use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::intmat;
use super::lattice::{integral_basis, lattice_image, matrix_coordinates, matrix_from_coordinates, IntLattice};
use crate::error::{Error, Result};
use crate::kfield::rational::frac_part;
use crate::kfield::{FieldId, KElement, KMatrix, Rational};

/// Default limit on the number of enumerated group elements.
pub const DEFAULT_GROUP_CAP: u64 = 1_000_000;

/// A finite quotient `L/S` of lattices inside `Mat(g,h;K)`, with one canonical
/// representative per coset.
#[derive(Debug, Clone)]
pub struct FiniteAbelianGroup {
    pub invariant_factors: Vec<u64>,
    pub order: u64,
    pub representatives: Vec<KMatrix>,
    lat: IntLattice,
    sub: IntLattice,
}

impl FiniteAbelianGroup {
    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    /// The lattice `S` being divided out.
    pub fn subgroup(&self) -> &IntLattice {
        &self.sub
    }

    /// The lattice `L` the group is a quotient of.
    pub fn lattice(&self) -> &IntLattice {
        &self.lat
    }

    /// Whether `x ∈ L`.
    pub fn contains(&self, x: &KMatrix) -> bool {
        self.lat.contains(&matrix_coordinates(x))
    }

    /// The canonical point of `x + S`; equal to a listed representative when `x ∈ L`.
    pub fn canonical(&self, x: &KMatrix) -> KMatrix {
        let coords = matrix_coordinates(x);
        let scale = crate::kfield::rational::lcm_denominators(&coords).lcm(self.sub.scale());
        let ints: Vec<BigInt> =
            coords.iter().map(|c| (c * Rational::from_integer(scale.clone())).to_integer()).collect();
        let red = reduce_mod_scaled(&self.sub, &scale, &ints);
        let back: Vec<Rational> = red.into_iter().map(|v| Rational::new(v, scale.clone())).collect();
        matrix_from_coordinates(x.rows(), x.cols(), x.field(), &back)
    }

    /// Position of the coset of `x` in the representative list.
    pub fn index_of(&self, x: &KMatrix) -> Option<usize> {
        if !self.contains(x) {
            return None;
        }
        let c = self.canonical(x);
        self.representatives.iter().position(|r| *r == c)
    }

    /// Whether `x − y ∈ S`.
    pub fn same_coset(&self, x: &KMatrix, y: &KMatrix) -> Result<bool> {
        let diff = x.sub(y)?;
        Ok(self.sub.contains(&matrix_coordinates(&diff)))
    }
}

/// `L/S` for `S ⊆ L`, as invariant factors and canonical representatives.
pub fn quotient_group(
    l: &IntLattice,
    s: &IntLattice,
    shape: (usize, usize, FieldId),
    cap: u64,
) -> Result<FiniteAbelianGroup> {
    let (g, h, field) = shape;
    if l.dim() != s.dim() || l.dim() != 2 * g * h {
        return Err(Error::ShapeMismatch(format!("lattice dims {} / {} for {g}x{h}", l.dim(), s.dim())));
    }
    let scale = l.scale().lcm(s.scale());
    let lb = l.basis_at_scale(&scale);
    let sb = s.basis_at_scale(&scale);
    // C = S_B · L_B⁻¹, integral iff S ⊆ L
    let mut c = Vec::with_capacity(sb.len());
    for row in &sb {
        match intmat::solve_upper(&lb, row) {
            Some(y) => c.push(y),
            None => return Err(Error::NotSublattice("S is not contained in L".into())),
        }
    }
    let snf = intmat::smith(&c);
    let mut factors = Vec::new();
    let mut gens = Vec::new();
    let mut order: u128 = 1;
    for (i, d) in snf.diagonal.iter().enumerate() {
        let d = d.to_u128().filter(|&d| d <= cap as u128).ok_or(Error::CapExceeded {
            what: "group order",
            value: d.to_u128().unwrap_or(u128::MAX),
            cap: cap as u128,
        })?;
        order = order.saturating_mul(d);
        if order > cap as u128 {
            return Err(Error::CapExceeded { what: "group order", value: order, cap: cap as u128 });
        }
        if d > 1 {
            factors.push(d as u64);
            gens.push(intmat::vec_mat_mul(&snf.v_inv[i], &lb));
        }
    }
    let order = order as u64;

    let n = l.dim();
    let mut reps = Vec::with_capacity(order as usize);
    let mut digits = vec![0u64; factors.len()];
    loop {
        let mut x = vec![BigInt::zero(); n];
        for (c, gen) in digits.iter().zip(&gens) {
            if *c != 0 {
                let c = BigInt::from(*c);
                for (xi, gi) in x.iter_mut().zip(gen) {
                    *xi += &c * gi;
                }
            }
        }
        let x = reduce_mod_scaled(s, &scale, &x);
        let coords: Vec<Rational> = x.into_iter().map(|v| Rational::new(v, scale.clone())).collect();
        reps.push(matrix_from_coordinates(g, h, field, &coords));
        // mixed-radix increment, last digit fastest
        let mut k = digits.len();
        loop {
            if k == 0 {
                return Ok(FiniteAbelianGroup {
                    invariant_factors: factors,
                    order,
                    representatives: reps,
                    lat: l.clone(),
                    sub: s.clone(),
                });
            }
            k -= 1;
            digits[k] += 1;
            if digits[k] < factors[k] {
                break;
            }
            digits[k] = 0;
        }
    }
}

/// Reduces `x` (given at `scale`) modulo the HNF rows of `s` so that every
/// pivot coordinate lands in `[0, pivot)`; a canonical point of `x + s`.
fn reduce_mod_scaled(s: &IntLattice, scale: &BigInt, x: &[BigInt]) -> Vec<BigInt> {
    let basis = s.basis_at_scale(scale);
    let mut v = x.to_vec();
    for (r, row) in basis.iter().enumerate() {
        let q = v[r].div_floor(&row[r]);
        if !q.is_zero() {
            for (vi, bi) in v.iter_mut().zip(row) {
                *vi -= &q * bi;
            }
        }
    }
    v
}

fn quotient_by_integral_part(g: usize, m: &KMatrix, cap: u64) -> Result<FiniteAbelianGroup> {
    let h = m.rows();
    let l = lattice_image(g, h, m)?;
    let std = IntLattice::standard(2 * g * h);
    let s = l.intersect(&std);
    quotient_group(&l, &s, (g, h, m.field()), cap)
}

/// `G1 = Λ·T̄ᵗ / (Λ·T̄ᵗ ∩ Λ)` with `Λ = Mat(g,h;O_K)`.
pub fn compute_g1(g: usize, t: &KMatrix) -> Result<FiniteAbelianGroup> {
    compute_g1_capped(g, t, DEFAULT_GROUP_CAP)
}

pub fn compute_g1_capped(g: usize, t: &KMatrix, cap: u64) -> Result<FiniteAbelianGroup> {
    check_square(t)?;
    quotient_by_integral_part(g, &t.conj_transpose(), cap)
}

/// `G2 = Λ·T⁻¹ / (Λ·T⁻¹ ∩ Λ)`.
pub fn compute_g2(g: usize, t: &KMatrix) -> Result<FiniteAbelianGroup> {
    compute_g2_capped(g, t, DEFAULT_GROUP_CAP)
}

pub fn compute_g2_capped(g: usize, t: &KMatrix, cap: u64) -> Result<FiniteAbelianGroup> {
    check_square(t)?;
    quotient_by_integral_part(g, &t.inverse()?, cap)
}

fn check_square(t: &KMatrix) -> Result<()> {
    if !t.is_square() {
        return Err(Error::ShapeMismatch(format!("T must be square, got {:?}", t.shape())));
    }
    Ok(())
}

/// How a representative `B` of `G2` enters a relation: as the shift added to
/// `B0` and in the character `M ↦ e^{2πi Re Tr(M̄ᵗ·shift)}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pairing {
    /// Shift by `B̂`.
    #[default]
    Printed,
    /// Shift by `B̂/√−d`. These shifts run over the dual of `Λ·T̄ᵗ` under
    /// `Re Tr`, so the character sum detects `Λ·T̄ᵗ` for every `d`. For `d = 1`
    /// the two pairings give the same cosets.
    Dual,
}

impl Pairing {
    pub fn shift(self, b: &KMatrix) -> Result<KMatrix> {
        let s = b.hat();
        match self {
            Pairing::Printed => Ok(s),
            Pairing::Dual => Ok(s.scale(&KElement::sqrt_minus_d(b.field()).inverse()?)),
        }
    }
}

/// `Re Tr(M̄ᵗ·B̂)` reduced into `[0, 1)`.
pub fn character_phase(m: &KMatrix, b: &KMatrix) -> Result<Rational> {
    character_phase_with(m, b, Pairing::Printed)
}

/// `Re Tr(M̄ᵗ·shift(B))` reduced into `[0, 1)`.
pub fn character_phase_with(m: &KMatrix, b: &KMatrix, pairing: Pairing) -> Result<Rational> {
    Ok(frac_part(&KMatrix::re_trace_of_product(m, &pairing.shift(b)?)?))
}

/// Exact value of `Σ_B exp(2πi·q_B)` over a list of phases that form a
/// character of a finite group: the sum is the group order when the character
/// is trivial and zero otherwise. Fails if the phases are not equidistributed
/// over a cyclic subgroup of `Q/Z`, which no character can produce.
pub fn character_sum(phases: &[Rational]) -> Result<u64> {
    let n = phases.len() as u64;
    if phases.iter().all(Zero::is_zero) {
        return Ok(n);
    }
    let k = phases
        .iter()
        .fold(BigInt::from(1), |acc, q| acc.lcm(q.denom()))
        .to_u64()
        .ok_or_else(|| Error::InvalidParameter("phase denominator too large".into()))?;
    if !n.is_multiple_of(k) {
        return Err(Error::InvalidParameter(format!("{n} phases cannot form a character of order {k}")));
    }
    let mut counts = vec![0u64; k as usize];
    for q in phases {
        let idx = (q * Rational::from_integer(k.into())).to_integer().to_usize().unwrap_or(usize::MAX);
        if idx >= counts.len() {
            return Err(Error::InvalidParameter("phase outside [0,1)".into()));
        }
        counts[idx] += 1;
    }
    if counts.iter().any(|&c| c != n / k) {
        return Err(Error::InvalidParameter("phases are not equidistributed".into()));
    }
    // a full set of k-th roots of unity, each with equal multiplicity
    Ok(0)
}

/// Both sides of the integrality criterion for `M`: whether the pairing of `M`
/// with every `B ∈ Λ·T⁻¹` is an integer (checked on a Z-basis), and whether `M ∈ Λ·T̄ᵗ`.
pub fn ring_integrality_sides(g: usize, t: &KMatrix, m: &KMatrix, pairing: Pairing) -> Result<(bool, bool)> {
    let h = t.rows();
    let t_inv = t.inverse()?;
    let mut integral = true;
    for e in integral_basis(g, h, t.field()) {
        let b = e.mul(&t_inv)?;
        if !character_phase_with(m, &b, pairing)?.is_zero() {
            integral = false;
            break;
        }
    }
    let lattice = lattice_image(g, h, &t.conj_transpose())?;
    Ok((integral, lattice.contains(&matrix_coordinates(m))))
}

/// Exact check of the character sum over `G2`: for every coset `M` of
/// `(Λ·T̄ᵗ + Λ)/Λ·T̄ᵗ`, `Σ_{B∈G2} e^{2πi Re Tr(M̄ᵗ·shift(B))}` should be `|G2|`
/// for the zero coset and `0` otherwise.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct OrthogonalityReport {
    pub order_g2: u64,
    pub cosets: u64,
    /// Cosets whose character sum disagreed with the expected value.
    pub mismatches: u64,
}

impl OrthogonalityReport {
    pub fn holds(&self) -> bool {
        self.mismatches == 0
    }
}

pub fn orthogonality_check(g: usize, t: &KMatrix, cap: u64, pairing: Pairing) -> Result<OrthogonalityReport> {
    check_square(t)?;
    let h = t.rows();
    let field = t.field();
    let g2 = compute_g2_capped(g, t, cap)?;
    let image = lattice_image(g, h, &t.conj_transpose())?;
    let sum = image.sum(&IntLattice::standard(2 * g * h));
    let cosets = quotient_group(&sum, &image, (g, h, field), cap)?;
    let mut mismatches = 0;
    for m in &cosets.representatives {
        let phases =
            g2.representatives.iter().map(|b| character_phase_with(m, b, pairing)).collect::<Result<Vec<_>>>()?;
        let expected = if image.contains(&matrix_coordinates(m)) { g2.order } else { 0 };
        if character_sum(&phases).map_or(true, |s| s != expected) {
            mismatches += 1;
        }
    }
    Ok(OrthogonalityReport { order_g2: g2.order, cosets: cosets.order, mismatches })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kfield::rational::{int, rat};
    use crate::kfield::KElement;

    fn lat(rows: &[&[i64]]) -> IntLattice {
        let r: Vec<Vec<Rational>> = rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect();
        IntLattice::from_generators(r[0].len(), &r).unwrap()
    }

    fn shape1() -> (usize, usize, FieldId) {
        (1, 1, FieldId::new(1).unwrap())
    }

    #[test]
    fn trivial_quotient() {
        let z = IntLattice::standard(2);
        let q = quotient_group(&z, &z, shape1(), 100).unwrap();
        assert_eq!(q.order, 1);
        assert!(q.invariant_factors.is_empty());
        assert_eq!(q.representatives.len(), 1);
        assert!(q.representatives[0].is_zero());
    }

    #[test]
    fn diag_two_three_is_cyclic_of_order_six() {
        let q = quotient_group(&IntLattice::standard(2), &lat(&[&[2, 0], &[0, 3]]), shape1(), 100).unwrap();
        assert_eq!(q.invariant_factors, vec![6]);
        assert_eq!(q.order, 6);
        assert_eq!(q.representatives.len(), 6);
    }

    #[test]
    fn representatives_are_their_own_canonical_points() {
        let k = FieldId::new(7).unwrap();
        let t = KMatrix::from_fn(2, 2, k, |i, j| KElement::new(rat(1 + i as i64, 2 + j as i64), rat(j as i64, 3), k));
        let g1 = compute_g1(1, &t).unwrap();
        for (i, r) in g1.representatives.iter().enumerate() {
            assert_eq!(g1.index_of(r), Some(i));
            let shifted = r.add(&KMatrix::identity(2, k).submatrix(0..1, 0..2)).unwrap();
            assert_eq!(g1.index_of(&shifted), Some(i));
        }
    }

    #[test]
    fn two_z_squared() {
        let q = quotient_group(&IntLattice::standard(2), &lat(&[&[2, 0], &[0, 2]]), shape1(), 100).unwrap();
        assert_eq!(q.invariant_factors, vec![2, 2]);
        for (i, x) in q.representatives.iter().enumerate() {
            for y in &q.representatives[..i] {
                assert!(!q.same_coset(x, y).unwrap());
            }
        }
    }

    #[test]
    fn not_a_sublattice() {
        let half = IntLattice::from_generators(2, &[vec![rat(1, 2), int(0)], vec![int(0), int(1)]]).unwrap();
        let err = quotient_group(&IntLattice::standard(2), &half, shape1(), 100).unwrap_err();
        assert!(matches!(err, Error::NotSublattice(_)));
    }

    #[test]
    fn cap_is_enforced() {
        let err = quotient_group(&IntLattice::standard(2), &lat(&[&[10, 0], &[0, 10]]), shape1(), 50).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { .. }));
    }

    #[test]
    fn one_plus_i_over_two() {
        let k = FieldId::new(1).unwrap();
        let t = KMatrix::from_fn(1, 1, k, |_, _| KElement::new(rat(1, 2), rat(-1, 2), k));
        // T̄ᵗ = (1+i)/2
        let g1 = compute_g1(1, &t).unwrap();
        assert_eq!(g1.order, 2);
        assert_eq!(
            character_phase(
                &KMatrix::from_fn(1, 1, k, |_, _| KElement::from_rational(rat(1, 2), k)),
                &KMatrix::identity(1, k)
            )
            .unwrap(),
            rat(1, 2)
        );
    }

    #[test]
    fn character_sum_cases() {
        assert_eq!(character_sum(&[int(0), int(0), int(0)]).unwrap(), 3);
        assert_eq!(character_sum(&[int(0), rat(1, 2), int(0), rat(1, 2)]).unwrap(), 0);
        assert_eq!(character_sum(&[int(0), rat(1, 3), rat(2, 3)]).unwrap(), 0);
        assert!(character_sum(&[int(0), rat(1, 2), rat(1, 2)]).is_err());
    }
}
