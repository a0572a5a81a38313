use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use num_traits::Zero;

use super::engine::GaussianSum;
use super::{require_h1, CMatrix, Characteristic, ThetaParams, ThetaValue};
use crate::error::{Error, Result};
use crate::kfield::rational::{frac_part, to_f64};
use crate::kfield::{KElement, KMatrix, Rational};

/// Exact real coordinates of `N + A0` shifts and of the linear functional
/// `X ↦ Re Tr(X̄ᵗ B0)` in the basis `{1, δ}` of every entry.
fn real_coordinates(a0: &KMatrix, b0: &KMatrix) -> (Vec<Rational>, Vec<Rational>) {
    let mut offset = Vec::with_capacity(2 * a0.entries().len());
    let mut linear = Vec::with_capacity(2 * a0.entries().len());
    let delta_bar = KElement::delta(a0.field()).conj();
    for (x, b) in a0.entries().iter().zip(b0.entries()) {
        offset.push(x.a.clone());
        offset.push(x.b.clone());
        linear.push(b.re());
        linear.push((&delta_bar * b).re());
    }
    (offset, linear)
}

/// Whether `Σ_{x ∈ Z^n + o} e^{πiΩ[x] + 2πi l·x}` vanishes for every `Ω`: when
/// `2o` and `2l` are integral, `x ↦ −x` multiplies the sum by `e^{−4πi l·o}`.
pub(crate) fn odd_by_symmetry(offset: &[Rational], linear: &[Rational]) -> bool {
    let two = Rational::from_integer(2.into());
    let half_integral = |v: &[Rational]| v.iter().all(|x| (x * &two).is_integer());
    if !half_integral(offset) || !half_integral(linear) {
        return false;
    }
    let pairing = offset.iter().zip(linear).fold(Rational::zero(), |acc, (o, l)| acc + o * l);
    !(pairing * two).is_integer()
}

/// Whether the sum vanishes because one block of coordinates that `Ω` couples to
/// nothing else is odd in the sense of [`odd_by_symmetry`].
pub(crate) fn has_odd_block(omega: &DMatrix<Complex64>, offset: &[Rational], linear: &[Rational]) -> bool {
    let n = offset.len();
    let mut block: Vec<usize> = (0..n).collect();
    fn root(block: &mut [usize], mut i: usize) -> usize {
        while block[i] != i {
            block[i] = block[block[i]];
            i = block[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if omega[(i, j)] != Complex64::zero() {
                let (a, b) = (root(&mut block, i), root(&mut block, j));
                block[a] = b;
            }
        }
    }
    let roots: Vec<usize> = (0..n).map(|i| root(&mut block, i)).collect();
    (0..n).filter(|&i| roots[i] == i).any(|r| {
        let members: Vec<usize> = (0..n).filter(|&i| roots[i] == r).collect();
        let o: Vec<Rational> = members.iter().map(|&i| offset[i].clone()).collect();
        let l: Vec<Rational> = members.iter().map(|&i| linear[i].clone()).collect();
        odd_by_symmetry(&o, &l)
    })
}

/// Reduces offsets and linear coefficients into `[0,1)`; the integer parts of the
/// linear coefficients contribute a constant phase, returned exactly.
fn reduce_sum_data(offset: &[Rational], linear: &[Rational], extra: &Rational) -> (Vec<f64>, Vec<f64>, f64) {
    let mut constant = extra.clone();
    let mut off = Vec::with_capacity(offset.len());
    let mut lin = Vec::with_capacity(linear.len());
    for (a, l) in offset.iter().zip(linear) {
        let ar = frac_part(a);
        let lr = frac_part(l);
        constant += (l - &lr) * &ar;
        off.push(to_f64(&ar));
        lin.push(to_f64(&lr));
    }
    (off, lin, to_f64(&frac_part(&constant)))
}

fn require_hermitian_pd(p: &CMatrix, tol: f64) -> Result<f64> {
    if !p.is_square() {
        return Err(Error::ShapeMismatch(format!("P must be square, got {}x{}", p.rows(), p.cols())));
    }
    if !p.is_hermitian(1e-12) {
        return Err(Error::NotHermitian("P".into()));
    }
    let lambda = p.min_hermitian_eigenvalue();
    if !(lambda > tol) {
        return Err(Error::NotPositiveDefinite(format!("P has lambda_min = {lambda:e}")));
    }
    Ok(lambda)
}

fn general_sum(
    w: &CMatrix,
    p: &CMatrix,
    ch: &Characteristic,
    extra: &Rational,
    params: &ThetaParams,
) -> Result<GaussianSum> {
    let (g, h) = ch.a0.shape();
    if w.rows() != g || !w.is_square() {
        return Err(Error::ShapeMismatch(format!("W is {}x{}, characteristic has g = {g}", w.rows(), w.cols())));
    }
    if p.rows() != h {
        return Err(Error::ShapeMismatch(format!("P is {}x{}, characteristic has h = {h}", p.rows(), p.cols())));
    }
    let lambda_y = require_h1(w, params.pd_tol)?;
    let lambda_p = require_hermitian_pd(p, params.pd_tol)?;
    let field = ch.a0.field();
    let basis = [Complex64::new(1.0, 0.0), field.delta_complex()];
    let n = 2 * g * h;
    let idx = |j: usize, a: usize, e: usize| 2 * (j * h + a) + e;
    let mut hmat = DMatrix::from_element(n, n, Complex64::zero());
    for j in 0..g {
        for a in 0..h {
            for e in 0..2 {
                for k in 0..g {
                    for b in 0..h {
                        for f in 0..2 {
                            hmat[(idx(j, a, e), idx(k, b, f))] = basis[e].conj() * basis[f] * w.get(j, k) * p.get(b, a);
                        }
                    }
                }
            }
        }
    }
    let omega = DMatrix::from_fn(n, n, |r, c| (hmat[(r, c)] + hmat[(c, r)]) * 0.5);
    let (off, lin) = real_coordinates(&ch.a0, &ch.b0);
    let vanishes = has_odd_block(&omega, &off, &lin);
    let (offset, linear, constant) = reduce_sum_data(&off, &lin, extra);
    Ok(GaussianSum {
        omega,
        offset,
        linear,
        constant,
        ball_decay: Some(lambda_y * lambda_p * field.basis_gram_min_eigenvalue()),
        vanishes,
    })
}

/// `Θ^P[A0;B0](W)`.
pub fn theta_general(w: &CMatrix, p: &CMatrix, ch: &Characteristic, params: &ThetaParams) -> Result<ThetaValue> {
    general_sum(w, p, ch, &Rational::zero(), params)?.evaluate(params)
}

/// `Θ[a;b](W)` for column vectors `a, b ∈ K^g`.
pub fn theta_rank1(w: &CMatrix, a: &KMatrix, b: &KMatrix, params: &ThetaParams) -> Result<ThetaValue> {
    check_column(a, b)?;
    let ch = Characteristic::new(a.clone(), b.clone())?;
    theta_general(w, &CMatrix::identity(1), &ch, params)
}

fn check_column(a: &KMatrix, b: &KMatrix) -> Result<()> {
    if a.cols() != 1 || b.cols() != 1 {
        return Err(Error::ShapeMismatch("rank-1 characteristics must be column vectors".into()));
    }
    Ok(())
}

/// The variant theta `Θ̌[a;b](W)`, summed directly: the linear term pairs `b`
/// with `n` instead of `n + a`, and for `−d ≡ 1 mod 4` the series runs at `2W`
/// with `b` doubled.
pub fn theta_check_variant(w: &CMatrix, a: &KMatrix, b: &KMatrix, params: &ThetaParams) -> Result<ThetaValue> {
    check_column(a, b)?;
    let (w2, b2) = check_arguments(w, a, b);
    let ch = Characteristic::new(a.clone(), b2)?;
    // Re(n̄ᵗ b) = Re((n+a)‾ᵗ b) − Re(āᵗ b), the last term folded into every exponent
    let extra = -KMatrix::re_trace_of_product(&ch.a0, &ch.b0)?;
    general_sum(&w2, &CMatrix::identity(1), &ch, &extra, params)?.evaluate(params)
}

fn check_arguments(w: &CMatrix, a: &KMatrix, b: &KMatrix) -> (CMatrix, KMatrix) {
    if a.field().is_one_mod_4() {
        (w.scale(2.0), b.scale_rational(&Rational::from_integer(2.into())))
    } else {
        (w.clone(), b.clone())
    }
}

/// Phase `q` with `Θ̌[a;b](W) = e^{2πiq}·Θ[a;b](W)`, or `e^{2πiq}·Θ[a;2b](2W)` when `−d ≡ 1 mod 4`.
pub fn check_conversion_phase(a: &KMatrix, b: &KMatrix) -> Result<Rational> {
    let b = if a.field().is_one_mod_4() { b.scale_rational(&Rational::from_integer(2.into())) } else { b.clone() };
    Ok(frac_part(&-KMatrix::re_trace_of_product(a, &b)?))
}

/// `Θ̌[a;b](W)` computed through the conversion to `Θ`.
pub fn theta_via_check_conversion(w: &CMatrix, a: &KMatrix, b: &KMatrix, params: &ThetaParams) -> Result<ThetaValue> {
    check_column(a, b)?;
    let q = to_f64(&check_conversion_phase(a, b)?);
    let (w2, b2) = check_arguments(w, a, b);
    let mut v = theta_rank1(&w2, a, &b2, params)?;
    v.value *= Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * q);
    Ok(v)
}

/// Riemann theta `ϑ[a;b](0, Ω)` for `Ω` in the Siegel upper half space.
pub fn riemann_theta_z0(omega: &CMatrix, a: &[Rational], b: &[Rational], params: &ThetaParams) -> Result<ThetaValue> {
    let g = omega.rows();
    if !omega.is_square() || a.len() != g || b.len() != g {
        return Err(Error::ShapeMismatch(format!(
            "Omega {}x{}, |a| = {}, |b| = {}",
            g,
            omega.cols(),
            a.len(),
            b.len()
        )));
    }
    if !omega.is_symmetric(1e-12) {
        return Err(Error::NotHermitian("Omega must be symmetric".into()));
    }
    let im = DMatrix::from_fn(g, g, |i, j| 0.5 * (omega.get(i, j).im + omega.get(j, i).im));
    let lambda = SymmetricEigen::new(im).eigenvalues.min();
    if !(lambda > params.pd_tol) {
        return Err(Error::NotInDomain { lambda_min: lambda, tol: params.pd_tol });
    }
    let (offset, linear, constant) = reduce_sum_data(a, b, &Rational::zero());
    let omega = DMatrix::from_fn(g, g, |i, j| (omega.get(i, j) + omega.get(j, i)) * 0.5);
    let vanishes = has_odd_block(&omega, a, b);
    let sum = GaussianSum { omega, offset, linear, constant, ball_decay: Some(lambda), vanishes };
    sum.evaluate(params)
}
