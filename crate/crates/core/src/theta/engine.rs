//! Truncated evaluation of `Σ_{m∈Z^n} exp(πi·xᵀΩx + 2πi·(l·x + c))`, `x = m + a`,
//! for complex symmetric `Ω` with positive definite imaginary part.
//!
//! Points are enumerated Fincke–Pohst style inside an ellipsoid (or a ball) whose
//! level is chosen from the tail bound in [`super::bound`]. Subtrees rooted at a
//! fixed, input-determined set of prefixes are summed independently and the
//! partial sums are combined in prefix order, so results do not depend on the
//! number of worker threads.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;

use super::bound::{level_for, tail_bound};
use super::{Enumeration, ThetaParams, ThetaValue};
use crate::error::{Error, Result};

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct Compensated {
    sum: f64,
    comp: f64,
}

impl Compensated {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexAccumulator {
    re: Compensated,
    im: Compensated,
}

impl ComplexAccumulator {
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// A Gaussian lattice sum ready for evaluation.
#[derive(Debug, Clone)]
pub struct GaussianSum {
    pub omega: DMatrix<Complex64>,
    pub offset: Vec<f64>,
    pub linear: Vec<f64>,
    /// Constant added to `l·x` in every term.
    pub constant: f64,
    /// Lower bound for the smallest eigenvalue of `Im Ω`, used in ball mode.
    pub ball_decay: Option<f64>,
    /// Set when the sum is known to be exactly zero; see `odd_by_symmetry`.
    pub vanishes: bool,
}

struct Partial {
    acc: ComplexAccumulator,
    points: u64,
}

/// State after the coordinates `level..n` have been fixed.
#[derive(Clone)]
struct Node {
    level: usize,
    budget: f64,
    x: Vec<f64>,
    // exponent contributions of the fixed coordinates
    quad: Complex64,
    lin: f64,
    // t[k] = Σ_{j fixed} Ω_kj x_j for unfixed k
    t: Vec<Complex64>,
}

struct Enumerator<'a> {
    n: usize,
    omega: &'a DMatrix<Complex64>,
    offset: &'a [f64],
    linear: &'a [f64],
    constant: f64,
    diag: Vec<f64>,
    mu: DMatrix<f64>,
}

impl<'a> Enumerator<'a> {
    fn range(&self, node: &Node, i: usize) -> Option<(i64, i64)> {
        let mut s = self.offset[i];
        for j in i + 1..self.n {
            s += self.mu[(i, j)] * node.x[j];
        }
        // y_i = m_i + s, need d_i y_i² ≤ budget
        let half = (node.budget.max(0.0) / self.diag[i]).sqrt();
        let lo = (-s - half).ceil();
        let hi = (-s + half).floor();
        if lo > hi {
            None
        } else {
            Some((lo as i64, hi as i64))
        }
    }

    fn child(&self, node: &Node, i: usize, m: i64) -> Node {
        let xi = m as f64 + self.offset[i];
        let mut y = xi;
        for j in i + 1..self.n {
            y += self.mu[(i, j)] * node.x[j];
        }
        let mut x = node.x.clone();
        x[i] = xi;
        let quad = node.quad + self.omega[(i, i)] * (xi * xi) + node.t[i] * (2.0 * xi);
        let mut t = node.t.clone();
        for (k, tk) in t.iter_mut().enumerate().take(i) {
            *tk += self.omega[(k, i)] * xi;
        }
        Node { level: i, budget: node.budget - self.diag[i] * y * y, x, quad, lin: node.lin + self.linear[i] * xi, t }
    }

    fn term(&self, quad: Complex64, lin: f64) -> Complex64 {
        let modulus = (-PI * quad.im).exp();
        let arg = PI * quad.re + 2.0 * PI * (lin + self.constant);
        Complex64::from_polar(modulus, arg)
    }

    fn walk(&self, node: &Node, out: &mut Partial) {
        if node.level == 0 {
            out.acc.add(self.term(node.quad, node.lin));
            out.points += 1;
            return;
        }
        let i = node.level - 1;
        let Some((lo, hi)) = self.range(node, i) else { return };
        if i == 0 {
            // innermost coordinate, unrolled
            for m in lo..=hi {
                let x0 = m as f64 + self.offset[0];
                let quad = node.quad + self.omega[(0, 0)] * (x0 * x0) + node.t[0] * (2.0 * x0);
                out.acc.add(self.term(quad, node.lin + self.linear[0] * x0));
                out.points += 1;
            }
            return;
        }
        for m in lo..=hi {
            let c = self.child(node, i, m);
            self.walk(&c, out);
        }
    }

    /// Expands the tree breadth-first until there are enough independent subtrees.
    fn prefixes(&self, root: Node, target: usize) -> Vec<Node> {
        let mut frontier = vec![root];
        while frontier.len() < target && frontier.first().is_some_and(|n| n.level > 2) {
            let mut next = Vec::new();
            for node in &frontier {
                let i = node.level - 1;
                if let Some((lo, hi)) = self.range(node, i) {
                    for m in lo..=hi {
                        next.push(self.child(node, i, m));
                    }
                }
            }
            if next.is_empty() {
                return next;
            }
            frontier = next;
        }
        frontier
    }
}

impl GaussianSum {
    pub fn dim(&self) -> usize {
        self.offset.len()
    }

    fn imag_form(&self) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| 0.5 * (self.omega[(i, j)].im + self.omega[(j, i)].im))
    }

    pub fn evaluate(&self, params: &ThetaParams) -> Result<ThetaValue> {
        params.validate()?;
        let n = self.dim();
        assert!(n > 0 && self.linear.len() == n && self.omega.shape() == (n, n));
        let y = self.imag_form();
        let lambda_num = SymmetricEigen::new(y.clone()).eigenvalues.min();
        // shave a relative margin off the numerical eigenvalue
        let lambda_form = lambda_num * (1.0 - 1e-9) - 1e-15 * y.norm();
        if !(lambda_form > 0.0) {
            return Err(Error::NotPositiveDefinite(format!("imaginary part has lambda_min = {lambda_num:e}")));
        }
        if self.vanishes {
            return Ok(ThetaValue { value: Complex64::new(0.0, 0.0), tail_bound: 0.0, lattice_points_used: 0 });
        }

        let (gram, level, lambda) = match params.enumeration {
            Enumeration::Ellipsoid => {
                let level = level_for(params.eps, lambda_form, n);
                (y, level, lambda_form)
            }
            Enumeration::Ball => {
                let decay = self.ball_decay.unwrap_or(lambda_form).min(lambda_form);
                let r = super::bound::choose_radius(decay, 1.0, 0.0, params.eps, n, params.max_radius)?;
                let r2 = (r * r) as f64;
                (DMatrix::identity(n, n) * decay, decay * r2, decay)
            }
        };
        let needed = (level / lambda).sqrt().ceil() as u64;
        if needed > params.max_radius {
            return Err(Error::Truncation { needed, max_radius: params.max_radius, eps: params.eps });
        }
        let tail = tail_bound(level, lambda, n);

        let chol = gram
            .clone()
            .cholesky()
            .ok_or_else(|| Error::NotPositiveDefinite("Cholesky factorisation failed".into()))?;
        let r = chol.l().transpose();
        let diag: Vec<f64> = (0..n).map(|i| r[(i, i)] * r[(i, i)]).collect();
        let mu = DMatrix::from_fn(n, n, |i, j| if j > i { r[(i, j)] / r[(i, i)] } else { 0.0 });
        let en = Enumerator {
            n,
            omega: &self.omega,
            offset: &self.offset,
            linear: &self.linear,
            constant: self.constant,
            diag,
            mu,
        };
        // slack so that boundary points are not lost to rounding
        let root = Node {
            level: n,
            budget: level * (1.0 + 1e-12) + 1e-12,
            x: vec![0.0; n],
            quad: Complex64::new(0.0, 0.0),
            lin: 0.0,
            t: vec![Complex64::new(0.0, 0.0); n],
        };
        let prefixes = en.prefixes(root, 256);
        let partials: Vec<Partial> = prefixes
            .par_iter()
            .map(|node| {
                let mut p = Partial { acc: ComplexAccumulator::default(), points: 0 };
                en.walk(node, &mut p);
                p
            })
            .collect();
        let mut acc = ComplexAccumulator::default();
        let mut points = 0;
        for p in &partials {
            acc.add(p.acc.value());
            points += p.points;
        }
        Ok(ThetaValue { value: acc.value(), tail_bound: tail, lattice_points_used: points })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> ThetaParams {
        ThetaParams::default()
    }

    #[test]
    fn one_dimensional_jacobi_sum() {
        // Σ e^{−πn²} = π^{1/4}/Γ(3/4)
        let s = GaussianSum {
            omega: DMatrix::from_element(1, 1, Complex64::new(0.0, 1.0)),
            offset: vec![0.0],
            linear: vec![0.0],
            constant: 0.0,
            ball_decay: None,
            vanishes: false,
        };
        let v = s.evaluate(&params()).unwrap();
        assert!((v.value.re - 1.086_434_811_213_308).abs() < 1e-14);
        assert!(v.tail_bound < 1e-12);
    }

    #[test]
    fn ball_and_ellipsoid_agree() {
        let omega = DMatrix::from_row_slice(
            3,
            3,
            &[
                Complex64::new(0.2, 1.0),
                Complex64::new(0.1, 0.3),
                Complex64::new(0.0, 0.1),
                Complex64::new(0.1, 0.3),
                Complex64::new(-0.3, 1.2),
                Complex64::new(0.05, -0.2),
                Complex64::new(0.0, 0.1),
                Complex64::new(0.05, -0.2),
                Complex64::new(0.4, 0.9),
            ],
        );
        let base = GaussianSum {
            omega,
            offset: vec![0.25, 0.5, 0.0],
            linear: vec![0.1, 0.0, 0.3],
            constant: 0.0,
            ball_decay: None,
            vanishes: false,
        };
        let e = base.evaluate(&params()).unwrap();
        let b = base.evaluate(&ThetaParams { enumeration: Enumeration::Ball, ..params() }).unwrap();
        assert!((e.value - b.value).norm() < 1e-12);
        assert!(b.lattice_points_used >= e.lattice_points_used);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut c = Compensated::default();
        c.add(1.0);
        for _ in 0..10 {
            c.add(1e-17);
        }
        c.add(-1.0);
        assert!((c.value() - 1e-16).abs() < 1e-30);
    }
}
