use crate::error::{Error, Result};
use crate::kfield::rational::rat;
use crate::kfield::{FieldId, KElement, KMatrix};

/// Canonical residue of `x` modulo `m`, in `[0, m)`.
pub fn residue(x: i64, m: i64) -> i64 {
    x.rem_euclid(m)
}

/// Column of characteristics labelled by a `g×2` residue grid: entries
/// `ρ1/3 + ρ2/√−3` for `d = 3` (residues mod 3) and `(ρ1 + iρ2)/4` for `d = 1`
/// (residues mod 4).
pub fn bracket_to_characteristic(rho: &[[i64; 2]], d: u64, field: FieldId) -> Result<KMatrix> {
    if field.d() != d {
        return Err(Error::FieldMismatch(d, field.d()));
    }
    let modulus = match d {
        3 => 3,
        1 => 4,
        _ => return Err(Error::InvalidParameter(format!("bracket characteristics need d = 1 or 3, got {d}"))),
    };
    if rho.is_empty() {
        return Err(Error::InvalidParameter("empty residue grid".into()));
    }
    let mut col = Vec::with_capacity(rho.len());
    for r in rho {
        if r.iter().any(|&x| !(0..modulus).contains(&x)) {
            return Err(Error::InvalidParameter(format!("residues {r:?} outside [0, {modulus})")));
        }
        let x = if d == 3 {
            // 1/√−3 = −√−3/3
            let inv_sqrt = KElement::sqrt_minus_d(field).scale(&rat(-1, 3));
            &KElement::from_rational(rat(r[0], 3), field) + &inv_sqrt.scale(&rat(r[1], 1))
        } else {
            KElement::new(rat(r[0], 4), rat(r[1], 4), field)
        };
        col.push(vec![x]);
    }
    KMatrix::from_rows(field, col)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let k3 = FieldId::new(3).unwrap();
        let k1 = FieldId::new(1).unwrap();
        assert!(bracket_to_characteristic(&[[0, 0], [0, 0]], 3, k3).unwrap().is_zero());
        let a = bracket_to_characteristic(&[[1, 0]], 3, k3).unwrap();
        assert_eq!(*a.get(0, 0), KElement::from_rational(rat(1, 3), k3));
        let a = bracket_to_characteristic(&[[1, 1]], 1, k1).unwrap();
        assert_eq!(*a.get(0, 0), KElement::new(rat(1, 4), rat(1, 4), k1));
        // ρ2/√−3 times √−3 is ρ2
        let a = bracket_to_characteristic(&[[0, 2]], 3, k3).unwrap();
        assert_eq!(a.get(0, 0) * &KElement::sqrt_minus_d(k3), KElement::from_int(2, k3));
    }

    #[test]
    fn rejects_out_of_range() {
        let k3 = FieldId::new(3).unwrap();
        assert!(bracket_to_characteristic(&[[3, 0]], 3, k3).is_err());
        assert!(bracket_to_characteristic(&[[-1, 0]], 3, k3).is_err());
        assert!(bracket_to_characteristic(&[[0, 0]], 2, FieldId::new(2).unwrap()).is_err());
        assert_eq!(residue(-1, 3), 2);
    }
}
