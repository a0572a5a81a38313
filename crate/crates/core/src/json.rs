//! Wire formats. Complex numbers are `[re, im]`, rationals `[num, den]`,
//! field elements `{"a": [n, d], "b": [n, d]}` (or the string `"a+b*delta"`),
//! matrices arrays of rows. The field is given once per document as `"d"`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::{Serialize, Serializer};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::kfield::rational::parse_rational;
use crate::kfield::{FieldId, KElement, KMatrix, Rational};
use crate::lattice::FiniteAbelianGroup;
use crate::relation::{PMatrix, RelationSpec};
use crate::theta::{CMatrix, ThetaValue};

fn perr(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

/// `Complex64` as `[re, im]`, for `#[serde(with = ...)]`.
pub mod complex {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

fn bigint_to_json(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(v) => json!(v),
        None => json!(n.to_string()),
    }
}

fn bigint_from_json(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => n.as_i64().map(BigInt::from).ok_or_else(|| perr(format!("not an integer: {n}"))),
        Value::String(s) => s.parse().map_err(|_| perr(format!("not an integer: {s:?}"))),
        _ => Err(perr(format!("not an integer: {v}"))),
    }
}

pub fn rational_to_json(q: &Rational) -> Value {
    json!([bigint_to_json(q.numer()), bigint_to_json(q.denom())])
}

/// Accepts `[num, den]`, a plain integer, or a string `"p/q"`.
pub fn rational_from_json(v: &Value) -> Result<Rational> {
    match v {
        Value::Array(a) if a.len() == 2 => {
            let den = bigint_from_json(&a[1])?;
            if den == BigInt::from(0) {
                return Err(perr("zero denominator"));
            }
            Ok(Rational::new(bigint_from_json(&a[0])?, den))
        }
        Value::Number(_) => Ok(Rational::from_integer(bigint_from_json(v)?)),
        Value::String(s) => parse_rational(s).ok_or_else(|| perr(format!("bad rational {s:?}"))),
        _ => Err(perr(format!("bad rational {v}"))),
    }
}

pub fn ser_rational<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    rational_to_json(q).serialize(s)
}

pub fn ser_rat_matrix<S: Serializer>(m: &[Vec<Rational>], s: S) -> std::result::Result<S::Ok, S::Error> {
    rat_matrix_to_json(m).serialize(s)
}

pub fn rat_matrix_to_json(m: &[Vec<Rational>]) -> Value {
    Value::Array(m.iter().map(|r| Value::Array(r.iter().map(rational_to_json).collect())).collect())
}

pub fn rat_matrix_from_json(v: &Value) -> Result<Vec<Vec<Rational>>> {
    rows_of(v)?.iter().map(|r| row_of(r)?.iter().map(rational_from_json).collect()).collect()
}

pub fn kelement_to_json(x: &KElement) -> Value {
    json!({ "a": rational_to_json(&x.a), "b": rational_to_json(&x.b) })
}

pub fn kelement_from_json(v: &Value, field: FieldId) -> Result<KElement> {
    match v {
        Value::Object(o) => {
            let get = |k: &str| o.get(k).map(rational_from_json).unwrap_or(Ok(Rational::from_integer(0.into())));
            Ok(KElement::new(get("a")?, get("b")?, field))
        }
        Value::String(s) => KElement::parse(s, field),
        Value::Number(_) | Value::Array(_) => Ok(KElement::from_rational(rational_from_json(v)?, field)),
        _ => Err(perr(format!("bad K element {v}"))),
    }
}

fn rows_of(v: &Value) -> Result<&Vec<Value>> {
    let rows = v.as_array().ok_or_else(|| perr("matrix must be an array of rows"))?;
    if rows.is_empty() {
        return Err(perr("matrix has no rows"));
    }
    Ok(rows)
}

fn row_of(v: &Value) -> Result<&Vec<Value>> {
    v.as_array().ok_or_else(|| perr("matrix row must be an array"))
}

pub fn kmatrix_to_json(m: &KMatrix) -> Value {
    Value::Array(m.to_rows().iter().map(|r| Value::Array(r.iter().map(kelement_to_json).collect())).collect())
}

pub fn kmatrix_from_json(v: &Value, field: FieldId) -> Result<KMatrix> {
    let rows = rows_of(v)?
        .iter()
        .map(|r| row_of(r)?.iter().map(|x| kelement_from_json(x, field)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    KMatrix::from_rows(field, rows).map_err(|e| perr(e.to_string()))
}

pub fn complex_to_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

/// Accepts `[re, im]` or a real number.
pub fn complex_from_json(v: &Value) -> Result<Complex64> {
    match v {
        Value::Number(n) => Ok(Complex64::new(n.as_f64().ok_or_else(|| perr("bad number"))?, 0.0)),
        Value::Array(a) if a.len() == 2 => {
            let f = |x: &Value| x.as_f64().ok_or_else(|| perr(format!("bad complex component {x}")));
            Ok(Complex64::new(f(&a[0])?, f(&a[1])?))
        }
        _ => Err(perr(format!("bad complex number {v}"))),
    }
}

pub fn cmatrix_to_json(m: &CMatrix) -> Value {
    Value::Array(m.to_rows().iter().map(|r| Value::Array(r.iter().map(|z| complex_to_json(*z)).collect())).collect())
}

pub fn cmatrix_from_json(v: &Value) -> Result<CMatrix> {
    let rows = rows_of(v)?
        .iter()
        .map(|r| row_of(r)?.iter().map(complex_from_json).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    CMatrix::from_rows(rows).map_err(|e| perr(e.to_string()))
}

pub fn theta_value_to_json(v: &ThetaValue) -> Value {
    json!({ "re": v.value.re, "im": v.value.im, "tail": v.tail_bound, "points": v.lattice_points_used })
}

pub fn theta_value_from_json(v: &Value) -> Result<ThetaValue> {
    let f = |k: &str| v.get(k).and_then(Value::as_f64).ok_or_else(|| perr(format!("missing {k}")));
    Ok(ThetaValue {
        value: Complex64::new(f("re")?, f("im")?),
        tail_bound: f("tail")?,
        lattice_points_used: v.get("points").and_then(Value::as_u64).ok_or_else(|| perr("missing points"))?,
    })
}

pub fn group_to_json(g: &FiniteAbelianGroup) -> Value {
    json!({
        "invariant_factors": g.invariant_factors,
        "order": g.order,
        "representatives": g.representatives.iter().map(kmatrix_to_json).collect::<Vec<_>>(),
    })
}

pub fn pmatrix_to_json(p: &PMatrix) -> Value {
    match p {
        PMatrix::Rational(r) => json!({ "rational": rat_matrix_to_json(r) }),
        PMatrix::Complex(c) => json!({ "complex": cmatrix_to_json(c) }),
    }
}

pub fn pmatrix_from_json(v: &Value) -> Result<PMatrix> {
    if let Some(r) = v.get("rational") {
        Ok(PMatrix::Rational(rat_matrix_from_json(r)?))
    } else if let Some(c) = v.get("complex") {
        Ok(PMatrix::Complex(cmatrix_from_json(c)?))
    } else {
        Err(perr("P must be {\"rational\": ...} or {\"complex\": ...}"))
    }
}

fn field_of(v: &Value) -> Result<FieldId> {
    let d = v.get("d").and_then(Value::as_u64).ok_or_else(|| perr("missing integer field \"d\""))?;
    FieldId::new(d).map_err(|e| perr(e.to_string()))
}

fn usize_of(v: &Value, k: &str) -> Result<usize> {
    v.get(k).and_then(Value::as_u64).map(|x| x as usize).ok_or_else(|| perr(format!("missing integer \"{k}\"")))
}

fn req<'a>(v: &'a Value, k: &str) -> Result<&'a Value> {
    v.get(k).ok_or_else(|| perr(format!("missing \"{k}\"")))
}

pub fn spec_to_json(s: &RelationSpec) -> Value {
    json!({
        "d": s.field.d(),
        "g": s.g,
        "h": s.h,
        "T": kmatrix_to_json(&s.t),
        "P": pmatrix_to_json(&s.p),
        "A0": kmatrix_to_json(&s.a0),
        "B0": kmatrix_to_json(&s.b0),
    })
}

pub fn spec_from_json(v: &Value) -> Result<RelationSpec> {
    let field = field_of(v)?;
    Ok(RelationSpec {
        field,
        g: usize_of(v, "g")?,
        h: usize_of(v, "h")?,
        t: kmatrix_from_json(req(v, "T")?, field)?,
        p: pmatrix_from_json(req(v, "P")?)?,
        a0: kmatrix_from_json(req(v, "A0")?, field)?,
        b0: kmatrix_from_json(req(v, "B0")?, field)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kfield::rational::rat;
    use proptest::prelude::*;

    #[test]
    fn element_forms() {
        let k = FieldId::new(3).unwrap();
        let x = KElement::new(rat(1, 3), rat(-2, 5), k);
        assert_eq!(kelement_to_json(&x), json!({"a": [1, 3], "b": [-2, 5]}));
        assert_eq!(kelement_from_json(&json!("1/3+-2/5*delta"), k).unwrap(), x);
        assert_eq!(kelement_from_json(&json!(2), k).unwrap(), KElement::from_int(2, k));
    }

    #[test]
    fn huge_rationals_use_strings() {
        let big: BigInt = "123456789012345678901234567890".parse().unwrap();
        let q = Rational::new(big, 7.into());
        let v = rational_to_json(&q);
        assert!(v[0].is_string());
        assert_eq!(rational_from_json(&v).unwrap(), q);
    }

    proptest! {
        #[test]
        fn kmatrix_round_trip(d in prop::sample::select(vec![1u64, 2, 3, 7]), xs in prop::collection::vec((-50i64..50, 1i64..20, -50i64..50, 1i64..20), 6)) {
            let k = FieldId::new(d).unwrap();
            let m = KMatrix::from_fn(2, 3, k, |i, j| {
                let (a, b, c, e) = xs[3 * i + j];
                KElement::new(rat(a, b), rat(c, e), k)
            });
            let text = serde_json::to_string(&kmatrix_to_json(&m)).unwrap();
            let back = kmatrix_from_json(&serde_json::from_str(&text).unwrap(), k).unwrap();
            prop_assert_eq!(back, m);
        }

        #[test]
        fn complex_round_trip_is_bit_exact(re in any::<f64>().prop_filter("finite", |x| x.is_finite()), im in -1e300f64..1e300) {
            let text = serde_json::to_string(&complex_to_json(Complex64::new(re, im))).unwrap();
            let z = complex_from_json(&serde_json::from_str(&text).unwrap()).unwrap();
            prop_assert_eq!(z.re.to_bits(), re.to_bits());
            prop_assert_eq!(z.im.to_bits(), im.to_bits());
        }
    }
}
