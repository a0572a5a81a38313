use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::intmat::{self, IntMat};
use crate::error::{Error, Result};
use crate::kfield::{FieldId, KElement, KMatrix, Rational};

/// Full-rank lattice in `(1/scale)·Z^n`, stored by its row HNF basis.
///
/// The pair `(scale, basis)` is canonical: the scale is the smallest one for
/// which the basis is integral, so two lattices are equal iff the fields are.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntLattice {
    dim: usize,
    basis: IntMat,
    scale: BigInt,
}

impl IntLattice {
    /// `Z^n`.
    pub fn standard(dim: usize) -> Self {
        IntLattice { dim, basis: intmat::identity(dim), scale: BigInt::one() }
    }

    /// Lattice spanned by rational generator rows; fails unless they span a full-rank lattice.
    pub fn from_generators(dim: usize, rows: &[Vec<Rational>]) -> Result<Self> {
        let scale = crate::kfield::rational::lcm_denominators(rows.iter().flatten());
        let ints: IntMat = rows
            .iter()
            .map(|r| {
                assert_eq!(r.len(), dim);
                r.iter().map(|q| (q * Rational::from_integer(scale.clone())).to_integer()).collect()
            })
            .collect();
        Self::from_int_generators(dim, &ints, scale)
    }

    fn from_int_generators(dim: usize, rows: &IntMat, scale: BigInt) -> Result<Self> {
        let (h, rank) = intmat::hnf(rows);
        if rank != dim {
            return Err(Error::Singular);
        }
        let basis: IntMat = h.into_iter().take(dim).collect();
        Ok(Self::normalized(dim, basis, scale))
    }

    fn normalized(dim: usize, mut basis: IntMat, mut scale: BigInt) -> Self {
        let mut g = scale.clone();
        for x in basis.iter().flatten() {
            g = g.gcd(x);
        }
        if !g.is_one() && !g.is_zero() {
            for x in basis.iter_mut().flatten() {
                *x /= &g;
            }
            scale /= &g;
        }
        IntLattice { dim, basis, scale }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &IntMat {
        &self.basis
    }

    pub fn scale(&self) -> &BigInt {
        &self.scale
    }

    /// Basis rows rewritten over a multiple of the current scale.
    pub fn basis_at_scale(&self, scale: &BigInt) -> IntMat {
        let (f, r) = scale.div_rem(&self.scale);
        assert!(r.is_zero(), "target scale must be a multiple");
        self.basis.iter().map(|row| row.iter().map(|x| x * &f).collect()).collect()
    }

    pub fn basis_rationals(&self) -> Vec<Vec<Rational>> {
        self.basis
            .iter()
            .map(|row| row.iter().map(|x| Rational::new(x.clone(), self.scale.clone())).collect())
            .collect()
    }

    /// Covolume relative to `Z^n`.
    pub fn covolume(&self) -> Rational {
        let det = self.basis.iter().enumerate().fold(BigInt::one(), |acc, (i, r)| acc * &r[i]);
        Rational::new(det, num_traits::pow(self.scale.clone(), self.dim))
    }

    /// Integer coordinates of `x` in this basis, if `x` belongs to the lattice.
    pub fn coordinates(&self, x: &[Rational]) -> Option<Vec<BigInt>> {
        let s = Rational::from_integer(self.scale.clone());
        let mut scaled = Vec::with_capacity(x.len());
        for q in x {
            let v = q * &s;
            if !v.is_integer() {
                return None;
            }
            scaled.push(v.to_integer());
        }
        intmat::solve_upper(&self.basis, &scaled)
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.coordinates(x).is_some()
    }

    pub fn contains_lattice(&self, other: &IntLattice) -> bool {
        other.basis_rationals().iter().all(|r| self.contains(r))
    }

    pub fn sum(&self, other: &IntLattice) -> IntLattice {
        assert_eq!(self.dim, other.dim);
        let s = self.scale.lcm(&other.scale);
        let mut rows = self.basis_at_scale(&s);
        rows.extend(other.basis_at_scale(&s));
        Self::from_int_generators(self.dim, &rows, s).expect("sum of full-rank lattices is full rank")
    }

    /// `L1 ∩ L2` through the integer kernel of `[B1; B2]`.
    pub fn intersect(&self, other: &IntLattice) -> IntLattice {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let s = self.scale.lcm(&other.scale);
        let b1 = self.basis_at_scale(&s);
        let b2 = other.basis_at_scale(&s);
        let mut stacked = b1.clone();
        stacked.extend(b2);
        let (_, u, rank) = intmat::hnf_with_transform(&stacked);
        // rows rank..2n of U satisfy u1·B1 + u2·B2 = 0, so u1·B1 ∈ L1 ∩ L2
        let gens: IntMat = u[rank..].iter().map(|row| intmat::vec_mat_mul(&row[..n], &b1)).collect();
        Self::from_int_generators(n, &gens, s).expect("intersection of commensurable full-rank lattices")
    }
}

/// Coordinates of a `g×h` matrix over `K` in `Q^{2gh}`: entry `(j,k)` contributes
/// its `(a, b)` pair at positions `2(j·h+k)`, `2(j·h+k)+1`.
pub fn matrix_coordinates(m: &KMatrix) -> Vec<Rational> {
    m.entries().iter().flat_map(|x| [x.a.clone(), x.b.clone()]).collect()
}

pub fn matrix_from_coordinates(rows: usize, cols: usize, field: FieldId, v: &[Rational]) -> KMatrix {
    assert_eq!(v.len(), 2 * rows * cols);
    KMatrix::from_fn(rows, cols, field, |i, j| {
        let k = 2 * (i * cols + j);
        KElement::new(v[k].clone(), v[k + 1].clone(), field)
    })
}

/// Unit matrices `E_jk` and `δ·E_jk`, in coordinate order; a Z-basis of `Mat(g,h;O_K)`.
pub fn integral_basis(g: usize, h: usize, field: FieldId) -> Vec<KMatrix> {
    let mut out = Vec::with_capacity(2 * g * h);
    for j in 0..g {
        for k in 0..h {
            for unit in [KElement::one(field), KElement::delta(field)] {
                let mut m = KMatrix::zeros(g, h, field);
                m.set(j, k, unit);
                out.push(m);
            }
        }
    }
    out
}

/// The lattice `{N·M : N ∈ Mat(g,h;O_K)}` in coordinates.
pub fn lattice_image(g: usize, h: usize, m: &KMatrix) -> Result<IntLattice> {
    if m.shape() != (h, h) {
        return Err(Error::ShapeMismatch(format!("expected {h}x{h}, got {:?}", m.shape())));
    }
    if m.det()?.is_zero() {
        return Err(Error::Singular);
    }
    let rows: Vec<Vec<Rational>> =
        integral_basis(g, h, m.field()).iter().map(|e| Ok(matrix_coordinates(&e.mul(m)?))).collect::<Result<_>>()?;
    IntLattice::from_generators(2 * g * h, &rows)
}

pub fn lattice_intersect(l1: &IntLattice, l2: &IntLattice) -> Result<IntLattice> {
    if l1.dim() != l2.dim() {
        return Err(Error::ShapeMismatch(format!("dims {} vs {}", l1.dim(), l2.dim())));
    }
    Ok(l1.intersect(l2))
}
