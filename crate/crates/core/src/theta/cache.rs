use std::collections::HashMap;

use parking_lot::RwLock;

use super::{theta_general, CMatrix, Characteristic, ThetaParams, ThetaValue};
use crate::error::Result;
use crate::kfield::{KElement, KMatrix, Rational};

/// Representative of `(A, B)` under `A ↦ A + N` (`N` integral) and
/// `(A, B) ↦ (uA, uB)` (`u` a unit), both of which leave every `Θ^P` unchanged.
pub fn canonical_characteristic(a: &KMatrix, b: &KMatrix) -> (KMatrix, KMatrix) {
    let coords =
        |m: &KMatrix| -> Vec<Rational> { m.entries().iter().flat_map(|x| [x.a.clone(), x.b.clone()]).collect() };
    let mut best: Option<(Vec<Rational>, KMatrix, KMatrix)> = None;
    for u in KElement::units(a.field()) {
        let ua = a.scale(&u).reduce_mod_integers();
        let ub = b.scale(&u);
        let mut key = coords(&ua);
        key.extend(coords(&ub));
        if best.as_ref().is_none_or(|(k, _, _)| key < *k) {
            best = Some((key, ua, ub));
        }
    }
    let (_, a, b) = best.expect("at least one unit");
    (a, b)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Key {
    w: Vec<u64>,
    p: Vec<u64>,
    a: KMatrix,
    b: KMatrix,
}

/// Memo table for theta values keyed on the exact `W`, `P` bit patterns and the
/// canonical characteristic. Safe for concurrent use.
#[derive(Debug)]
pub struct ThetaCache {
    params: ThetaParams,
    map: RwLock<HashMap<Key, ThetaValue>>,
}

impl ThetaCache {
    pub fn new(params: ThetaParams) -> Self {
        ThetaCache { params, map: RwLock::new(HashMap::new()) }
    }

    pub fn params(&self) -> &ThetaParams {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.map.read().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn general(&self, w: &CMatrix, p: &CMatrix, a: &KMatrix, b: &KMatrix) -> Result<ThetaValue> {
        let (a, b) = canonical_characteristic(a, b);
        let key = Key { w: w.fingerprint(), p: p.fingerprint(), a, b };
        if let Some(v) = self.map.read().get(&key) {
            return Ok(*v);
        }
        let ch = Characteristic::new(key.a.clone(), key.b.clone())?;
        let v = theta_general(w, p, &ch, &self.params)?;
        self.map.write().insert(key, v);
        Ok(v)
    }

    pub fn rank1(&self, w: &CMatrix, a: &KMatrix, b: &KMatrix) -> Result<ThetaValue> {
        self.general(w, &CMatrix::identity(1), a, b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kfield::rational::rat;
    use crate::kfield::FieldId;

    #[test]
    fn unit_orbit_shares_a_representative() {
        let k = FieldId::new(3).unwrap();
        let a = KMatrix::from_fn(1, 1, k, |_, _| KElement::new(rat(1, 3), rat(2, 3), k));
        let b = KMatrix::from_fn(1, 1, k, |_, _| KElement::new(rat(1, 2), rat(0, 1), k));
        let base = canonical_characteristic(&a, &b);
        for u in KElement::units(k) {
            let shifted = a.scale(&u).add(&KMatrix::identity(1, k)).unwrap();
            assert_eq!(canonical_characteristic(&shifted, &b.scale(&u)), base);
        }
    }
}
