//! The worked relations as named configurations, and a runner for all of them.

mod brackets;
mod identities;
mod samples;
mod suite;

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::Value;

pub use brackets::{bracket_to_characteristic, residue};
pub use identities::{IdentityCheck, Sample};
pub use samples::{omega_samples, random_w, tau_samples, w_samples, DEFAULT_SEED};
pub use suite::{default_suite, run_case, run_case_with, run_paper_suite, SuiteCase, SuiteRecord, SuiteReport};

use crate::error::{Error, Result};
use crate::json::kmatrix_from_json;
use crate::kfield::rational::{int, rat};
use crate::kfield::{omega, FieldId, KElement, KMatrix, Rational};
use crate::lattice::compute_g1;
use crate::relation::{PMatrix, RelationSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PresetName {
    RiemannQuad,
    JacobiIdentity,
    HalfFormulas,
    DoubleFormulas,
    PropHalfGeneral,
    PropHalfGeneral2,
    CartanAh,
    CubicD3,
    CubicD3Cor1,
    CubicD3Cor2,
    QuarticD1,
    QuarticD1Zero,
    Matsumoto,
}

impl PresetName {
    pub const ALL: [PresetName; 13] = [
        PresetName::RiemannQuad,
        PresetName::JacobiIdentity,
        PresetName::HalfFormulas,
        PresetName::DoubleFormulas,
        PresetName::PropHalfGeneral,
        PresetName::PropHalfGeneral2,
        PresetName::CartanAh,
        PresetName::CubicD3,
        PresetName::CubicD3Cor1,
        PresetName::CubicD3Cor2,
        PresetName::QuarticD1,
        PresetName::QuarticD1Zero,
        PresetName::Matsumoto,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PresetName::RiemannQuad => "riemann_quad",
            PresetName::JacobiIdentity => "jacobi_identity",
            PresetName::HalfFormulas => "half_formulas",
            PresetName::DoubleFormulas => "double_formulas",
            PresetName::PropHalfGeneral => "prop_half_general",
            PresetName::PropHalfGeneral2 => "prop_half_general_2",
            PresetName::CartanAh => "cartan_Ah",
            PresetName::CubicD3 => "cubic_d3",
            PresetName::CubicD3Cor1 => "cubic_d3_cor1",
            PresetName::CubicD3Cor2 => "cubic_d3_cor2",
            PresetName::QuarticD1 => "quartic_d1",
            PresetName::QuarticD1Zero => "quartic_d1_zero",
            PresetName::Matsumoto => "matsumoto",
        }
    }
}

impl fmt::Display for PresetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PresetName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        PresetName::ALL
            .into_iter()
            .find(|p| p.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown preset {s:?}")))
    }
}

/// Preset parameters. Characteristic inputs stay as JSON until the field is known.
///
/// `alpha` is the left-hand `A` characteristic as a `g×h` matrix (for
/// `matsumoto` the columns `a1, a2`; for the cubic corollaries the column `v`;
/// for `riemann_quad` the columns `a1, a2`), `beta` likewise for `B`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PresetParams {
    pub d: Option<u64>,
    pub g: Option<usize>,
    pub h: Option<usize>,
    pub alpha: Option<Value>,
    pub beta: Option<Value>,
}

impl PresetParams {
    pub fn with_g(g: usize) -> Self {
        PresetParams { g: Some(g), ..Default::default() }
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let get = |k: &str| -> Result<Option<u64>> {
            match v.get(k) {
                None | Some(Value::Null) => Ok(None),
                Some(x) => {
                    x.as_u64().map(Some).ok_or_else(|| Error::Parse(format!("\"{k}\" must be a non-negative integer")))
                }
            }
        };
        Ok(PresetParams {
            d: get("d")?,
            g: get("g")?.map(|x| x as usize),
            h: get("h")?.map(|x| x as usize),
            alpha: v.get("alpha").cloned(),
            beta: v.get("beta").cloned(),
        })
    }

    pub fn to_json(&self) -> Value {
        let mut m = serde_json::Map::new();
        if let Some(d) = self.d {
            m.insert("d".into(), d.into());
        }
        if let Some(g) = self.g {
            m.insert("g".into(), g.into());
        }
        if let Some(h) = self.h {
            m.insert("h".into(), h.into());
        }
        if let Some(a) = &self.alpha {
            m.insert("alpha".into(), a.clone());
        }
        if let Some(b) = &self.beta {
            m.insert("beta".into(), b.clone());
        }
        Value::Object(m)
    }
}

/// Group data and theta arguments a preset is expected to produce.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Expected {
    pub order_g1: Option<u64>,
    pub order_g2: Option<u64>,
    /// Diagonal of `Q` (arguments `q_j W` on the left), when diagonal.
    #[serde(serialize_with = "ser_rationals")]
    pub lhs_arguments: Vec<Rational>,
    /// Diagonal of `P` (arguments `p_j W` on the right), when diagonal.
    #[serde(serialize_with = "ser_rationals")]
    pub rhs_arguments: Vec<Rational>,
}

fn ser_rationals<S: serde::Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for q in v {
        seq.serialize_element(&crate::json::rational_to_json(q))?;
    }
    seq.end()
}

#[derive(Debug, Clone)]
pub struct RelationPreset {
    pub spec: RelationSpec,
    pub expected: Expected,
}

#[derive(Debug, Clone)]
pub enum Check {
    Relation(RelationPreset),
    Identity(IdentityCheck),
}

#[derive(Debug, Clone)]
pub struct Preset {
    pub name: PresetName,
    pub d: u64,
    pub g: usize,
    pub h: usize,
    pub checks: Vec<Check>,
    /// Cross-checks of printed parametrisations that did not match.
    pub warnings: Vec<String>,
}

impl Preset {
    pub fn relation(&self) -> Option<&RelationPreset> {
        self.checks.iter().find_map(|c| match c {
            Check::Relation(r) => Some(r),
            _ => None,
        })
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

fn forced_field(params: &PresetParams, d: u64, name: PresetName) -> Result<FieldId> {
    match params.d {
        Some(x) if x != d => Err(invalid(format!("{name} requires d = {d}, got {x}"))),
        _ => FieldId::new(d),
    }
}

fn char_input(v: &Option<Value>, g: usize, h: usize, field: FieldId, what: &str) -> Result<KMatrix> {
    match v {
        None | Some(Value::Null) => Ok(KMatrix::zeros(g, h, field)),
        Some(v) => {
            let m = kmatrix_from_json(v, field)?;
            if m.shape() != (g, h) {
                return Err(invalid(format!("{what} must be {g}x{h}, got {:?}", m.shape())));
            }
            Ok(m)
        }
    }
}

fn el(field: FieldId, a: Rational, b: Rational) -> KElement {
    KElement::new(a, b, field)
}

fn scalar_matrix(field: FieldId, c: &KElement, rows: &[&[KElement]]) -> KMatrix {
    KMatrix::from_fn(rows.len(), rows[0].len(), field, |i, j| c * &rows[i][j])
}

fn diag_p(values: &[Rational]) -> PMatrix {
    let n = values.len();
    PMatrix::Rational(
        (0..n).map(|i| (0..n).map(|j| if i == j { values[i].clone() } else { Rational::zero() }).collect()).collect(),
    )
}

/// `T` with the left-hand characteristic `(α, β)`: `A0 = α·T̄ᵗ`, `B0 = β·T⁻¹`.
fn spec_from_lhs(
    field: FieldId,
    g: usize,
    t: KMatrix,
    p: PMatrix,
    alpha: &KMatrix,
    beta: &KMatrix,
) -> Result<RelationSpec> {
    let h = t.rows();
    let a0 = alpha.mul(&t.conj_transpose())?;
    let b0 = beta.mul(&t.inverse()?)?;
    Ok(RelationSpec { field, g, h, t, p, a0, b0 })
}

pub fn prop_half_t(field: FieldId, variant: u8) -> Result<KMatrix> {
    let db = KElement::delta(field).conj();
    let c = db.scale(&int(2)).inverse()?;
    let one = KElement::one(field);
    let m1 = -&one;
    Ok(if variant == 1 {
        scalar_matrix(field, &c, &[&[db.clone(), one.clone()], &[db, m1]])
    } else {
        scalar_matrix(field, &c, &[&[one.clone(), one.clone()], &[one, m1]])
    })
}

/// `T_h` from the Cartan proposition: `1/(h+1−j)` on the diagonal, its negative below.
pub fn cartan_t_h(h: usize) -> Vec<Vec<Rational>> {
    let mut t = vec![vec![Rational::zero(); h]; h];
    for j in 0..h {
        let v = rat(1, (h - j) as i64);
        t[j][j] = v.clone();
        if j + 1 < h {
            t[j + 1][j] = -v;
        }
    }
    t
}

pub fn cartan_matrix(h: usize) -> Vec<Vec<Rational>> {
    (0..h)
        .map(|i| {
            (0..h)
                .map(|j| match i.abs_diff(j) {
                    0 => int(2),
                    1 => int(-1),
                    _ => Rational::zero(),
                })
                .collect()
        })
        .collect()
}

pub fn cubic_t(field: FieldId) -> KMatrix {
    let w = omega(field);
    let w2 = &w * &w;
    let one = KElement::one(field);
    let c = KElement::from_rational(rat(1, 3), field);
    scalar_matrix(
        field,
        &c,
        &[&[one.clone(), one.clone(), one.clone()], &[one.clone(), w.clone(), w2.clone()], &[one, w2, w]],
    )
}

pub fn quartic_t(field: FieldId) -> KMatrix {
    let i = KElement::delta(field);
    let mi = -&i;
    let one = KElement::one(field);
    let m1 = -&one;
    let c = KElement::from_rational(rat(1, 4), field);
    scalar_matrix(
        field,
        &c,
        &[
            &[one.clone(), i.clone(), i.clone(), m1.clone()],
            &[i.clone(), one.clone(), m1.clone(), i.clone()],
            &[mi.clone(), one.clone(), m1.clone(), mi.clone()],
            &[one, mi.clone(), mi, m1],
        ],
    )
}

pub fn matsumoto_t(field: FieldId) -> KMatrix {
    let c = el(field, rat(1, 2), rat(-1, 2));
    let one = KElement::one(field);
    scalar_matrix(field, &c, &[&[one.clone(), one.clone()], &[one.clone(), -&one]])
}

pub fn make_preset(name: PresetName, params: &PresetParams) -> Result<Preset> {
    let g = params.g.unwrap_or(1);
    if g == 0 {
        return Err(invalid("g must be positive"));
    }
    let mut warnings = Vec::new();
    let (d, h, checks) = match name {
        PresetName::JacobiIdentity | PresetName::HalfFormulas | PresetName::DoubleFormulas => {
            if g != 1 {
                return Err(invalid(format!("{name} is a genus-one identity")));
            }
            let check = match name {
                PresetName::JacobiIdentity => IdentityCheck::Jacobi,
                PresetName::HalfFormulas => IdentityCheck::Half,
                _ => IdentityCheck::Double,
            };
            (0, 1, vec![Check::Identity(check)])
        }
        PresetName::RiemannQuad => {
            let field = FieldId::new(1)?;
            let a = match &params.alpha {
                None | Some(Value::Null) => KMatrix::from_fn(g, 2, field, |j, k| {
                    KElement::from_rational(if k == 0 || j == 0 { rat(1, 2) } else { int(0) }, field)
                }),
                Some(_) => char_input(&params.alpha, g, 2, field, "alpha")?,
            };
            let mut cols = [Vec::new(), Vec::new()];
            for j in 0..g {
                for (k, col) in cols.iter_mut().enumerate() {
                    let x = a.get(j, k);
                    let two = x.a.clone() * int(2);
                    if !x.b.is_zero() || !two.is_integer() {
                        return Err(invalid("riemann_quad characteristics must lie in (1/2)Z"));
                    }
                    col.push(x.a.clone());
                }
            }
            let [a1, a2] = cols;
            (0, 2, vec![Check::Identity(IdentityCheck::RiemannQuad { a1, a2 })])
        }
        PresetName::PropHalfGeneral | PresetName::PropHalfGeneral2 => {
            let field = FieldId::new(params.d.unwrap_or(1))?;
            let variant = if name == PresetName::PropHalfGeneral { 1 } else { 2 };
            let n = int(field.delta_norm());
            let t = prop_half_t(field, variant)?;
            let p = diag_p(&[&n * int(2), &n * int(2)]);
            let default_alpha = KMatrix::from_fn(g, 2, field, |j, k| {
                if k == 0 {
                    KElement::from_rational(rat(1, 3 + j as i64), field)
                } else {
                    KElement::delta(field).scale(&rat(1, 4))
                }
            });
            let alpha =
                if params.alpha.is_some() { char_input(&params.alpha, g, 2, field, "alpha")? } else { default_alpha };
            let beta = char_input(&params.beta, g, 2, field, "beta")?;
            let spec = spec_from_lhs(field, g, t, p, &alpha, &beta)?;
            let report = prop_half_parametrization(field, variant)?;
            if !report.statement_matches {
                warnings.push(format!(
                    "printed parametrisation (w mod |delta|^2) lists {} elements, {} distinct cosets, {} outside the lattice; computed |G1| = {}",
                    report.statement_count, report.statement_distinct, report.statement_outside, report.computed_order
                ));
            }
            let q_args = if variant == 1 { vec![n.clone(), int(1)] } else { vec![int(1), int(1)] };
            // |N(det T)|^{-1} per row: 4|δ|² for the first form, 4|δ|⁴ for the second
            let per_row = if variant == 1 { 4 * field.delta_norm() } else { 4 * field.delta_norm().pow(2) } as u64;
            let expected = Expected {
                order_g1: Some(per_row.pow(g as u32)),
                order_g2: Some(1),
                lhs_arguments: q_args,
                rhs_arguments: vec![&n * int(2), &n * int(2)],
            };
            (field.d(), 2, vec![Check::Relation(RelationPreset { spec, expected })])
        }
        PresetName::CartanAh => {
            let field = FieldId::new(params.d.unwrap_or(1))?;
            let h = params.h.unwrap_or(2);
            if h == 0 {
                return Err(invalid("h must be positive"));
            }
            let n = int(field.delta_norm());
            let th = cartan_t_h(h);
            let c = KElement::delta(field).conj().inverse()?;
            let t = KMatrix::from_fn(h, h, field, |i, j| KElement::from_rational(th[i][j].clone(), field) * c.clone());
            let p_diag: Vec<Rational> = (0..h).map(|j| &n * int(((h + 1 - j) * (h - j)) as i64)).collect();
            let default_alpha = KMatrix::from_fn(g, h, field, |i, j| {
                KElement::from_rational(rat((j + 1) as i64, 2 * (h as i64 + 1 + i as i64)), field)
            });
            let alpha =
                if params.alpha.is_some() { char_input(&params.alpha, g, h, field, "alpha")? } else { default_alpha };
            let beta = char_input(&params.beta, g, h, field, "beta")?;
            let spec = spec_from_lhs(field, g, t, diag_p(&p_diag), &alpha, &beta)?;
            let fact: i64 = (1..=h as i64).product();
            let per_g = (field.delta_norm() as u64).pow(h as u32) * (fact * fact) as u64;
            let expected = Expected {
                order_g1: Some(per_g.pow(g as u32)),
                order_g2: Some(1),
                lhs_arguments: Vec::new(),
                rhs_arguments: p_diag,
            };
            (field.d(), h, vec![Check::Relation(RelationPreset { spec, expected })])
        }
        PresetName::CubicD3 | PresetName::CubicD3Cor1 | PresetName::CubicD3Cor2 => {
            let field = forced_field(params, 3, name)?;
            let alpha = if name == PresetName::CubicD3 {
                char_input(&params.alpha, g, 3, field, "alpha")?
            } else {
                let v = char_input(&params.alpha, g, 1, field, "alpha (v)")?;
                let shift = if name == PresetName::CubicD3Cor1 {
                    KElement::zero(field)
                } else {
                    KElement::sqrt_minus_d(field).inverse()?
                };
                let ones = KMatrix::from_fn(g, 1, field, |_, _| shift.clone());
                KMatrix::hstack(&[v.clone(), v.add(&ones)?, v.sub(&ones)?])?
            };
            let beta = char_input(&params.beta, g, 3, field, "beta")?;
            let spec = spec_from_lhs(field, g, cubic_t(field), diag_p(&[int(3), int(3), int(3)]), &alpha, &beta)?;
            let expected = Expected {
                order_g1: Some(27u64.pow(g as u32)),
                order_g2: Some(1),
                lhs_arguments: vec![int(1); 3],
                rhs_arguments: vec![int(3); 3],
            };
            let mut checks = vec![Check::Relation(RelationPreset { spec, expected })];
            let v_zero = params.alpha.as_ref().is_none_or(|_| alpha.column(0).is_zero());
            if name != PresetName::CubicD3 && v_zero && params.beta.is_none() {
                let which = if name == PresetName::CubicD3Cor1 { 1 } else { 2 };
                checks.push(Check::Identity(IdentityCheck::CubicDisplay { which, g }));
            }
            (3, 3, checks)
        }
        PresetName::QuarticD1 | PresetName::QuarticD1Zero => {
            let field = forced_field(params, 1, name)?;
            let alpha = if name == PresetName::QuarticD1 {
                char_input(&params.alpha, g, 4, field, "alpha")?
            } else {
                if params.alpha.is_some() || params.beta.is_some() {
                    return Err(invalid("quartic_d1_zero takes no characteristics"));
                }
                KMatrix::zeros(g, 4, field)
            };
            let beta = char_input(&params.beta, g, 4, field, "beta")?;
            let spec =
                spec_from_lhs(field, g, quartic_t(field), diag_p(&[int(4), int(4), int(4), int(4)]), &alpha, &beta)?;
            let expected = Expected {
                order_g1: Some(256u64.pow(g as u32)),
                order_g2: Some(1),
                lhs_arguments: vec![int(1); 4],
                rhs_arguments: vec![int(4); 4],
            };
            let mut checks = vec![Check::Relation(RelationPreset { spec, expected })];
            if name == PresetName::QuarticD1Zero {
                checks.push(Check::Identity(IdentityCheck::QuarticDisplay { g }));
            }
            (1, 4, checks)
        }
        PresetName::Matsumoto => {
            let field = forced_field(params, 1, name)?;
            let a = char_input(&params.alpha, g, 2, field, "alpha (a1, a2)")?;
            let b = char_input(&params.beta, g, 2, field, "beta (b1, b2)")?;
            let one_plus_i = el(field, int(1), int(1));
            let t = matsumoto_t(field);
            let spec = RelationSpec {
                field,
                g,
                h: 2,
                t,
                p: diag_p(&[Rational::one(), Rational::one()]),
                a0: a.scale(&one_plus_i),
                b0: b.scale(&one_plus_i),
            };
            let expected = Expected {
                order_g1: Some(2u64.pow(g as u32)),
                order_g2: Some(2u64.pow(g as u32)),
                lhs_arguments: vec![int(1); 2],
                rhs_arguments: vec![int(1); 2],
            };
            let check = IdentityCheck::MatsumotoCheck {
                a1: a.column(0),
                a2: a.column(1),
                b1: b.column(0),
                b2: b.column(1),
                conj_e: true,
            };
            if !b.is_zero() {
                warnings.push(
                    "printed coefficient Re((1+i)(b1+b2)·conj(f)) does not hold for general b; checked with conj(e)"
                        .into(),
                );
            }
            (1, 2, vec![Check::Relation(RelationPreset { spec, expected }), Check::Identity(check)])
        }
    };
    Ok(Preset { name, d, g, h, checks, warnings })
}

/// How the printed description of `G1` in the two half-formula propositions
/// compares with the computed group (genus one).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParametrizationReport {
    pub d: u64,
    pub variant: u8,
    pub computed_order: u64,
    /// `u mod 2|δ|², v mod 2, w mod |δ|²`, as in the statement.
    pub statement_count: u64,
    pub statement_distinct: u64,
    pub statement_outside: u64,
    pub statement_matches: bool,
    /// `w mod |δ|`, as in the proof; only meaningful when `|δ|` is an integer.
    pub proof_count: Option<u64>,
    pub proof_distinct: Option<u64>,
    pub proof_outside: Option<u64>,
    pub proof_matches: Option<bool>,
}

pub fn prop_half_parametrization(field: FieldId, variant: u8) -> Result<ParametrizationReport> {
    let t = prop_half_t(field, variant)?;
    let g1 = compute_g1(1, &t)?;
    let n = field.delta_norm();
    let delta = KElement::delta(field);
    let inv = delta.scale(&int(2)).inverse()?;
    let tally = |w_mod: i64| -> Result<(u64, u64, u64)> {
        let mut seen = std::collections::BTreeSet::new();
        let (mut count, mut outside) = (0u64, 0u64);
        for u in 0..2 * n {
            for v in 0..2 {
                for w in 0..w_mod {
                    count += 1;
                    let r = el(field, int(u), int(v));
                    let first = (&r + &KElement::from_int(2 * w, field)) * inv.clone();
                    let second = &r * &inv;
                    let x = KMatrix::from_rows(field, vec![vec![first, second]])?;
                    match g1.index_of(&x) {
                        Some(i) => {
                            seen.insert(i);
                        }
                        None => outside += 1,
                    }
                }
            }
        }
        Ok((count, seen.len() as u64, outside))
    };
    let (sc, sd, so) = tally(n)?;
    let root = (1..=n).find(|r| r * r == n);
    let proof = root.map(tally).transpose()?;
    let matches = |c: u64, dd: u64, o: u64| c == g1.order && dd == g1.order && o == 0;
    Ok(ParametrizationReport {
        d: field.d(),
        variant,
        computed_order: g1.order,
        statement_count: sc,
        statement_distinct: sd,
        statement_outside: so,
        statement_matches: matches(sc, sd, so),
        proof_count: proof.map(|p| p.0),
        proof_distinct: proof.map(|p| p.1),
        proof_outside: proof.map(|p| p.2),
        proof_matches: proof.map(|p| matches(p.0, p.1, p.2)),
    })
}
