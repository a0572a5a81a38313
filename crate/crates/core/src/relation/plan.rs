use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::Result;
use crate::kfield::KMatrix;
use crate::theta::{canonical_characteristic, theta_general, CMatrix, Characteristic, ThetaParams};

/// One theta value needed by a relation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Factor {
    /// `Θ^P[A;B](W)` for the matrix with the given fingerprint.
    General { p: Vec<u64>, a: KMatrix, b: KMatrix },
    /// `Θ[a;b](αW)` for a single column.
    Scaled { alpha: u64, a: KMatrix, b: KMatrix },
}

/// Collects the distinct theta values behind a set of products, then evaluates
/// them once each, in parallel but in a fixed order.
#[derive(Debug)]
pub struct EvalPlan {
    w: CMatrix,
    index: HashMap<Factor, usize>,
    keys: Vec<Factor>,
    p_mats: HashMap<Vec<u64>, CMatrix>,
    lookups: u64,
}

impl EvalPlan {
    pub fn new(w: CMatrix) -> Self {
        EvalPlan { w, index: HashMap::new(), keys: Vec::new(), p_mats: HashMap::new(), lookups: 0 }
    }

    fn slot(&mut self, f: Factor) -> usize {
        self.lookups += 1;
        if let Some(&i) = self.index.get(&f) {
            return i;
        }
        let i = self.keys.len();
        self.index.insert(f.clone(), i);
        self.keys.push(f);
        i
    }

    /// Registers `Θ^P[A;B](W)`, split into column factors when `P` is diagonal.
    pub fn add_product(&mut self, p: &CMatrix, diag: Option<&[f64]>, a: &KMatrix, b: &KMatrix) -> Result<Vec<usize>> {
        match diag {
            Some(alphas) => Ok(alphas
                .iter()
                .enumerate()
                .map(|(j, &alpha)| self.add_scaled(alpha, &a.column(j), &b.column(j)))
                .collect()),
            None => {
                let fp = p.fingerprint();
                self.p_mats.entry(fp.clone()).or_insert_with(|| p.clone());
                let (ca, cb) = canonical_characteristic(a, b);
                Ok(vec![self.slot(Factor::General { p: fp, a: ca, b: cb })])
            }
        }
    }

    /// Registers `Θ[a;b](αW)` for columns `a, b`.
    pub fn add_scaled(&mut self, alpha: f64, a: &KMatrix, b: &KMatrix) -> usize {
        let (ca, cb) = canonical_characteristic(a, b);
        self.slot(Factor::Scaled { alpha: alpha.to_bits(), a: ca, b: cb })
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    /// `(distinct evaluations, cache hits)`.
    pub fn stats(&self) -> (u64, u64) {
        let n = self.keys.len() as u64;
        (n, self.lookups - n)
    }

    pub fn evaluate(&self, params: &ThetaParams) -> Result<Vec<Complex64>> {
        let one = CMatrix::identity(1);
        self.keys
            .par_iter()
            .map(|f| {
                let v = match f {
                    Factor::General { p, a, b } => {
                        theta_general(&self.w, &self.p_mats[p], &Characteristic::new(a.clone(), b.clone())?, params)?
                    }
                    Factor::Scaled { alpha, a, b } => {
                        let w = self.w.scale(f64::from_bits(*alpha));
                        theta_general(&w, &one, &Characteristic::new(a.clone(), b.clone())?, params)?
                    }
                };
                Ok(v.value)
            })
            .collect()
    }

    pub fn product_value(&self, slots: &[usize], values: &[Complex64]) -> Complex64 {
        slots.iter().fold(Complex64::new(1.0, 0.0), |acc, &i| acc * values[i])
    }
}
