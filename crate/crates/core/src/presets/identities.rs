//! Identities checked directly on theta values rather than through a
//! `RelationSpec`: the classical Jacobi and Riemann theta identities, and the
//! fully expanded bracket displays.

use num_complex::Complex64;
use num_traits::Zero;

use super::brackets::{bracket_to_characteristic, residue};
use crate::error::Result;
use crate::kfield::rational::{int, rat};
use crate::kfield::{FieldId, KElement, KMatrix, Rational};
use crate::relation::{root_of_unity, EvalPlan, VerificationReport};
use crate::theta::engine::ComplexAccumulator;
use crate::theta::{check_conversion_phase, riemann_theta_z0, CMatrix, ThetaParams};

#[derive(Debug, Clone, PartialEq)]
pub enum IdentityCheck {
    /// `ϑ00⁴ = ϑ10⁴ + ϑ01⁴`.
    Jacobi,
    /// `ϑ00²(τ) = ϑ00²(2τ) + ϑ10²(2τ)` and `ϑ10²(τ) = 2ϑ00(2τ)ϑ10(2τ)`.
    Half,
    /// `ϑ00²(2τ) = (ϑ00²(τ) + ϑ01²(τ))/2` and `ϑ01²(2τ) = ϑ00(τ)ϑ01(τ)`.
    Double,
    /// `ϑ[a1;0](Ω)ϑ[a2;0](Ω) = Σ_d ϑ[(d+a1+a2)/2;0](2Ω)ϑ[(d+a1−a2)/2;0](2Ω)`.
    RiemannQuad { a1: Vec<Rational>, a2: Vec<Rational> },
    /// Expanded bracket form of the cubic specialisations at `v = 0`
    /// (`which` is 1 or 2).
    CubicDisplay { which: u8, g: usize },
    /// Expanded bracket form of the quartic relation at `α = 0`.
    QuarticDisplay { g: usize },
    /// Matsumoto's relation in the variant normalisation `Θ̌`, evaluated term by term.
    /// `conj_e` selects the coefficient `Re((1+i)ᵗ(b1+b2)·ē)` instead of `… f̄`.
    MatsumotoCheck { a1: KMatrix, a2: KMatrix, b1: KMatrix, b2: KMatrix, conj_e: bool },
}

/// The point at which an identity is evaluated.
#[derive(Debug, Clone, PartialEq)]
pub enum Sample {
    Tau(Complex64),
    Siegel(CMatrix),
    Domain(CMatrix),
}

impl IdentityCheck {
    /// `(label, report)` for each equation of the check.
    pub fn evaluate(&self, sample: &Sample, params: &ThetaParams) -> Result<Vec<(String, VerificationReport)>> {
        match (self, sample) {
            (IdentityCheck::Jacobi, Sample::Tau(tau)) => {
                let t = Jacobi::new(*tau, params)?;
                let lhs = t.t00.powi(4);
                let rhs = t.t10.powi(4) + t.t01.powi(4);
                Ok(vec![("jacobi".into(), VerificationReport::compare(lhs, rhs, 2, (3, 0), params))])
            }
            (IdentityCheck::Half, Sample::Tau(tau)) => {
                let t = Jacobi::new(*tau, params)?;
                let t2 = Jacobi::new(*tau * 2.0, params)?;
                Ok(vec![
                    (
                        "half_00".into(),
                        VerificationReport::compare(t.t00.powi(2), t2.t00.powi(2) + t2.t10.powi(2), 2, (6, 0), params),
                    ),
                    (
                        "half_10".into(),
                        VerificationReport::compare(t.t10.powi(2), t2.t00 * t2.t10 * 2.0, 1, (6, 0), params),
                    ),
                ])
            }
            (IdentityCheck::Double, Sample::Tau(tau)) => {
                let t = Jacobi::new(*tau, params)?;
                let t2 = Jacobi::new(*tau * 2.0, params)?;
                Ok(vec![
                    (
                        "double_00".into(),
                        VerificationReport::compare(
                            t2.t00.powi(2),
                            (t.t00.powi(2) + t.t01.powi(2)) * 0.5,
                            2,
                            (6, 0),
                            params,
                        ),
                    ),
                    ("double_01".into(), VerificationReport::compare(t2.t01.powi(2), t.t00 * t.t01, 1, (6, 0), params)),
                ])
            }
            (IdentityCheck::RiemannQuad { a1, a2 }, Sample::Siegel(omega)) => {
                Ok(vec![("riemann_quad".into(), riemann_quad(omega, a1, a2, params)?)])
            }
            (IdentityCheck::CubicDisplay { which, g }, Sample::Domain(w)) => {
                Ok(vec![(format!("cor{which}_display"), cubic_display(*which, *g, w, params)?)])
            }
            (IdentityCheck::QuarticDisplay { g }, Sample::Domain(w)) => {
                Ok(vec![("quartic_display".into(), quartic_display(*g, w, params)?)])
            }
            (IdentityCheck::MatsumotoCheck { a1, a2, b1, b2, conj_e }, Sample::Domain(w)) => {
                let label = if *conj_e { "theta_check_e" } else { "theta_check_f" };
                Ok(vec![(label.into(), matsumoto_check(a1, a2, b1, b2, *conj_e, w, params)?)])
            }
            _ => Err(crate::error::Error::InvalidParameter("identity evaluated at the wrong kind of sample".into())),
        }
    }
}

struct Jacobi {
    t00: Complex64,
    t01: Complex64,
    t10: Complex64,
}

impl Jacobi {
    fn new(tau: Complex64, params: &ThetaParams) -> Result<Self> {
        let om = CMatrix::from_rows(vec![vec![tau]])?;
        let t = |a: Rational, b: Rational| riemann_theta_z0(&om, &[a], &[b], params).map(|v| v.value);
        Ok(Jacobi { t00: t(int(0), int(0))?, t01: t(int(0), rat(1, 2))?, t10: t(rat(1, 2), int(0))? })
    }
}

fn riemann_quad(omega: &CMatrix, a1: &[Rational], a2: &[Rational], params: &ThetaParams) -> Result<VerificationReport> {
    let g = omega.rows();
    let zero = vec![Rational::zero(); g];
    let lhs = riemann_theta_z0(omega, a1, &zero, params)?.value * riemann_theta_z0(omega, a2, &zero, params)?.value;
    let om2 = omega.scale(2.0);
    let mut acc = ComplexAccumulator::default();
    let half = rat(1, 2);
    for mask in 0..(1u32 << g) {
        let d = |j: usize| int(i64::from((mask >> j) & 1));
        let c1: Vec<Rational> = (0..g).map(|j| (d(j) + &a1[j] + &a2[j]) * &half).collect();
        let c2: Vec<Rational> = (0..g).map(|j| (d(j) + &a1[j] - &a2[j]) * &half).collect();
        acc.add(riemann_theta_z0(&om2, &c1, &zero, params)?.value * riemann_theta_z0(&om2, &c2, &zero, params)?.value);
    }
    let n = 1u64 << g;
    Ok(VerificationReport::compare(lhs, acc.value(), n, (2 + 2 * n, 0), params))
}

/// Iterates over all vectors in `{values}^len`, last entry fastest.
fn grid(values: &[i64], len: usize) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|p| {
                values.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out
}

type Triple = Vec<[i64; 2]>;

fn bracket_sum(
    d: u64,
    modulus: i64,
    w: &CMatrix,
    scale: f64,
    lhs: &[Triple],
    terms: &[Vec<Triple>],
    params: &ThetaParams,
) -> Result<VerificationReport> {
    let field = FieldId::new(d)?;
    let mut plan = EvalPlan::new(w.clone());
    let zero = KMatrix::zeros(lhs[0].len(), 1, field);
    let slot = |plan: &mut EvalPlan, rho: &Triple, s: f64| -> Result<usize> {
        let rho: Vec<[i64; 2]> = rho.iter().map(|r| [residue(r[0], modulus), residue(r[1], modulus)]).collect();
        let a = bracket_to_characteristic(&rho, d, field)?;
        Ok(plan.add_scaled(s, &a, &zero))
    };
    let lhs_slots = lhs.iter().map(|r| slot(&mut plan, r, 1.0)).collect::<Result<Vec<_>>>()?;
    let term_slots = terms
        .iter()
        .map(|t| t.iter().map(|r| slot(&mut plan, r, scale)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let values = plan.evaluate(params)?;
    let lhs_v = plan.product_value(&lhs_slots, &values);
    let mut acc = ComplexAccumulator::default();
    for s in &term_slots {
        acc.add(plan.product_value(s, &values));
    }
    Ok(VerificationReport::compare(lhs_v, acc.value(), terms.len() as u64, plan.stats(), params))
}

fn cubic_display(which: u8, g: usize, w: &CMatrix, params: &ThetaParams) -> Result<VerificationReport> {
    let zeros: Triple = vec![[0, 0]; g];
    let lhs = if which == 1 {
        vec![zeros.clone(), zeros.clone(), zeros]
    } else {
        vec![zeros, vec![[0, 1]; g], vec![[0, -1]; g]]
    };
    let shift = if which == 1 { 0 } else { 1 };
    let mut terms = Vec::new();
    for rho in grid(&[0, 1, -1], 2 * g) {
        for sigma in grid(&[0, 1, -1], g) {
            let f = |k: usize| -> Triple {
                (0..g)
                    .map(|j| {
                        let (r1, r2, s) = (rho[2 * j], rho[2 * j + 1], sigma[j]);
                        match k {
                            0 => [r1 - shift, r2],
                            1 => [r1 + shift, r2 + s],
                            _ => [r1, r2 - s],
                        }
                    })
                    .collect()
            };
            terms.push(vec![f(0), f(1), f(2)]);
        }
    }
    bracket_sum(3, 3, w, 3.0, &lhs, &terms, params)
}

fn quartic_display(g: usize, w: &CMatrix, params: &ThetaParams) -> Result<VerificationReport> {
    let zeros: Triple = vec![[0, 0]; g];
    let lhs = vec![zeros.clone(), zeros.clone(), zeros.clone(), zeros];
    let mut terms = Vec::new();
    for rho in grid(&[0, 1, -1, 2], 2 * g) {
        for sigma in grid(&[0, 2], 2 * g) {
            for sigma2 in grid(&[0, 2], 2 * g) {
                let f = |k: usize| -> Triple {
                    (0..g)
                        .map(|j| {
                            let (r1, r2) = (rho[2 * j], rho[2 * j + 1]);
                            let (s1, s2) = (sigma[2 * j], sigma[2 * j + 1]);
                            let (t1, t2) = (sigma2[2 * j], sigma2[2 * j + 1]);
                            match k {
                                0 => [r1, r2],
                                1 => [r2 + s1, -r1 + s2],
                                2 => [r2 + t1, -r1 + t2],
                                _ => [-r1 + s2 - t2, -r2 - s1 + t1],
                            }
                        })
                        .collect()
                };
                terms.push(vec![f(0), f(1), f(2), f(3)]);
            }
        }
    }
    bracket_sum(1, 4, w, 4.0, &lhs, &terms, params)
}

fn matsumoto_check(
    a1: &KMatrix,
    a2: &KMatrix,
    b1: &KMatrix,
    b2: &KMatrix,
    conj_e: bool,
    w: &CMatrix,
    params: &ThetaParams,
) -> Result<VerificationReport> {
    let field = a1.field();
    let g = a1.rows();
    let one_plus_i = KElement::new(int(1), int(1), field);
    let half_class = KElement::new(rat(1, 2), rat(-1, 2), field); // 1/(1+i)
    let mut plan = EvalPlan::new(w.clone());
    let check = |plan: &mut EvalPlan, a: &KMatrix, b: &KMatrix| -> Result<(usize, Rational)> {
        Ok((plan.add_scaled(1.0, a, b), check_conversion_phase(a, b)?))
    };
    let (l1, q1) = check(&mut plan, &a1.add(a2)?, &b1.add(b2)?)?;
    let (l2, q2) = check(&mut plan, &a1.sub(a2)?, &b1.sub(b2)?)?;
    let a1s = a1.scale(&one_plus_i);
    let a2s = a2.scale(&one_plus_i);
    let b1s = b1.scale(&one_plus_i);
    let b2s = b2.scale(&one_plus_i);
    let bsum = b1.add(b2)?.scale(&one_plus_i);
    let mut terms = Vec::new();
    let classes = |mask: u32| {
        KMatrix::from_fn(
            g,
            1,
            field,
            |j, _| if (mask >> j) & 1 == 1 { half_class.clone() } else { KElement::zero(field) },
        )
    };
    for em in 0..(1u32 << g) {
        let e = classes(em);
        for fm in 0..(1u32 << g) {
            let f = classes(fm);
            // Re(ᵗx·ȳ) = Re Tr(ȳᵗ x)
            let coeff = KMatrix::re_trace_of_product(if conj_e { &e } else { &f }, &bsum)?;
            let (s1, p1) = check(&mut plan, &e.add(&a1s)?, &f.add(&b1s)?)?;
            let (s2, p2) = check(&mut plan, &e.add(&a2s)?, &f.add(&b2s)?)?;
            terms.push((coeff + p1 + p2, [s1, s2]));
        }
    }
    let values = plan.evaluate(params)?;
    let lhs = plan.product_value(&[l1, l2], &values) * root_of_unity(&(q1 + q2)) * f64::from(1u32 << g);
    let mut acc = ComplexAccumulator::default();
    for (q, s) in &terms {
        acc.add(plan.product_value(s, &values) * root_of_unity(q));
    }
    Ok(VerificationReport::compare(lhs, acc.value(), terms.len() as u64, plan.stats(), params))
}
