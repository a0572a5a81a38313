use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};

use super::field::FieldId;
use super::rational::{self, int, Rational};
use crate::error::{Error, Result};

/// An element `a + b·δ` of `K = Q(√−d)`, stored in the integral basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KElement {
    pub a: Rational,
    pub b: Rational,
    field: FieldId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl KElement {
    pub fn new(a: Rational, b: Rational, field: FieldId) -> Self {
        KElement { a, b, field }
    }

    pub fn zero(field: FieldId) -> Self {
        Self::new(Rational::zero(), Rational::zero(), field)
    }

    pub fn one(field: FieldId) -> Self {
        Self::new(Rational::one(), Rational::zero(), field)
    }

    pub fn delta(field: FieldId) -> Self {
        Self::new(Rational::zero(), Rational::one(), field)
    }

    pub fn from_rational(q: Rational, field: FieldId) -> Self {
        Self::new(q, Rational::zero(), field)
    }

    pub fn from_int(n: i64, field: FieldId) -> Self {
        Self::from_rational(int(n), field)
    }

    /// `√−d` expressed in the integral basis.
    pub fn sqrt_minus_d(field: FieldId) -> Self {
        if field.is_one_mod_4() {
            // √−d = 2δ − 1
            Self::new(int(-1), int(2), field)
        } else {
            Self::delta(field)
        }
    }

    pub fn field(&self) -> FieldId {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Both coordinates are integers, i.e. the element lies in `O_K`.
    pub fn is_integral(&self) -> bool {
        rational::is_integer(&self.a) && rational::is_integer(&self.b)
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(self.field.d(), other.field.d()));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(Self::new(&self.a + &other.a, &self.b + &other.b, self.field))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(Self::new(&self.a - &other.a, &self.b - &other.b, self.field))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        // δ² = tδ − N
        let t = int(self.field.delta_trace());
        let n = int(self.field.delta_norm());
        let be = &self.b * &other.b;
        let a = &self.a * &other.a - &n * &be;
        let b = &self.a * &other.b + &self.b * &other.a + &t * &be;
        Ok(Self::new(a, b, self.field))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        let inv = other.inverse()?;
        self.checked_mul(&inv)
    }

    pub fn arith(&self, other: &Self, op: KOp) -> Result<Self> {
        match op {
            KOp::Add => self.checked_add(other),
            KOp::Sub => self.checked_sub(other),
            KOp::Mul => self.checked_mul(other),
            KOp::Div => self.checked_div(other),
        }
    }

    pub fn conj(&self) -> Self {
        // conj(δ) = t − δ
        let t = int(self.field.delta_trace());
        Self::new(&self.a + &self.b * t, -&self.b, self.field)
    }

    /// Field norm `x·conj(x)`, a non-negative rational.
    pub fn norm(&self) -> Rational {
        let t = int(self.field.delta_trace());
        let n = int(self.field.delta_norm());
        &self.a * &self.a + &self.a * &self.b * t + &self.b * &self.b * n
    }

    /// Trace `x + conj(x)`.
    pub fn trace(&self) -> Rational {
        let t = int(self.field.delta_trace());
        &self.a * int(2) + &self.b * t
    }

    /// Real part of the complex embedding.
    pub fn re(&self) -> Rational {
        if self.field.is_one_mod_4() {
            &self.a + &self.b / int(2)
        } else {
            self.a.clone()
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.norm();
        let c = self.conj();
        Ok(Self::new(&c.a / &n, &c.b / &n, self.field))
    }

    pub fn scale(&self, q: &Rational) -> Self {
        Self::new(&self.a * q, &self.b * q, self.field)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::one(self.field);
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    pub fn embed(&self) -> Complex64 {
        let delta = self.field.delta_complex();
        Complex64::new(rational::to_f64(&self.a), 0.0) + delta * rational::to_f64(&self.b)
    }

    /// Units of `O_K`: `{±1, ±i}` for d=1, the sixth roots of unity for d=3, `{±1}` otherwise.
    pub fn units(field: FieldId) -> Vec<KElement> {
        let one = Self::one(field);
        let mut out = vec![one.clone(), -&one];
        match field.d() {
            1 => {
                let i = Self::delta(field);
                out.push(i.clone());
                out.push(-&i);
            }
            3 => {
                // ω = δ − 1, ω² = −δ
                let w = Self::new(int(-1), int(1), field);
                let w2 = Self::new(int(0), int(-1), field);
                out.push(w.clone());
                out.push(-&w);
                out.push(w2.clone());
                out.push(-&w2);
            }
            _ => {}
        }
        out
    }

    /// Reduces both coordinates into `[0, 1)`, a canonical representative modulo `O_K`.
    pub fn reduce_mod_integers(&self) -> Self {
        Self::new(rational::frac_part(&self.a), rational::frac_part(&self.b), self.field)
    }

    /// Parses `"a/b+c/e*delta"`, `"a-c*delta"`, `"c*delta"`, `"a+delta"` or a bare rational.
    pub fn parse(s: &str, field: FieldId) -> Result<Self> {
        let err = || Error::Parse(format!("bad K element {s:?}"));
        let mut t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if let Some(head) = t.strip_suffix("delta").filter(|h| !h.ends_with('*')) {
            t = format!("{head}1*delta");
        }
        if let Some(head) = t.strip_suffix("*delta") {
            match head.rfind(['+', '-']).filter(|&i| i > 0) {
                Some(split) => {
                    // `a+-b` as printed by `Display`
                    let end = if head[..split].ends_with('+') { split - 1 } else { split };
                    let a = rational::parse_rational(&head[..end]).ok_or_else(err)?;
                    let b = rational::parse_rational(head[split..].trim_start_matches('+')).ok_or_else(err)?;
                    Ok(Self::new(a, b, field))
                }
                None => {
                    let b = rational::parse_rational(head).ok_or_else(err)?;
                    Ok(Self::new(Rational::zero(), b, field))
                }
            }
        } else {
            let a = rational::parse_rational(&t).ok_or_else(err)?;
            Ok(Self::from_rational(a, field))
        }
    }
}

impl fmt::Display for KElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}*delta", rational::format_rational(&self.a), rational::format_rational(&self.b))
    }
}

// Operator impls panic on mismatched fields; callers that cannot guarantee a
// shared field should use the `checked_*` methods.
impl<'a> Add<&'a KElement> for &'a KElement {
    type Output = KElement;
    fn add(self, rhs: &'a KElement) -> KElement {
        self.checked_add(rhs).expect("K elements from different fields")
    }
}

impl<'a> Sub<&'a KElement> for &'a KElement {
    type Output = KElement;
    fn sub(self, rhs: &'a KElement) -> KElement {
        self.checked_sub(rhs).expect("K elements from different fields")
    }
}

impl<'a> Mul<&'a KElement> for &'a KElement {
    type Output = KElement;
    fn mul(self, rhs: &'a KElement) -> KElement {
        self.checked_mul(rhs).expect("K elements from different fields")
    }
}

impl Neg for &KElement {
    type Output = KElement;
    fn neg(self) -> KElement {
        KElement::new(-&self.a, -&self.b, self.field)
    }
}

impl Add for KElement {
    type Output = KElement;
    fn add(self, rhs: KElement) -> KElement {
        &self + &rhs
    }
}

impl Sub for KElement {
    type Output = KElement;
    fn sub(self, rhs: KElement) -> KElement {
        &self - &rhs
    }
}

impl Mul for KElement {
    type Output = KElement;
    fn mul(self, rhs: KElement) -> KElement {
        &self * &rhs
    }
}

impl Neg for KElement {
    type Output = KElement;
    fn neg(self) -> KElement {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kfield::rational::rat;
    use proptest::prelude::*;

    fn f(d: u64) -> FieldId {
        FieldId::new(d).unwrap()
    }

    #[test]
    fn i_squared_is_minus_one() {
        let i = KElement::delta(f(1));
        assert_eq!(&i * &i, KElement::from_int(-1, f(1)));
    }

    #[test]
    fn parse_forms() {
        let k = f(2);
        let p = |s: &str| KElement::parse(s, k).unwrap();
        assert_eq!(p("1/2*delta"), KElement::new(rat(0, 1), rat(1, 2), k));
        assert_eq!(p("-1/4-1/3*delta"), KElement::new(rat(-1, 4), rat(-1, 3), k));
        assert_eq!(p("3+-2*delta"), KElement::new(rat(3, 1), rat(-2, 1), k));
        assert_eq!(p("5"), KElement::from_int(5, k));
        assert_eq!(p("delta"), KElement::delta(k));
        assert_eq!(p("-delta"), KElement::new(rat(0, 1), rat(-1, 1), k));
        assert_eq!(p("1/2 - delta"), KElement::new(rat(1, 2), rat(-1, 1), k));
        let x = KElement::new(rat(-7, 3), rat(-5, 2), k);
        assert_eq!(p(&x.to_string()), x);
        assert!(KElement::parse("1/0*delta", k).is_err());
    }

    #[test]
    fn delta_squared_d3() {
        let k = f(3);
        let d = KElement::delta(k);
        assert_eq!(&d * &d, &d - &KElement::one(k));
    }

    #[test]
    fn omega_minimal_polynomial() {
        // Oracle: expand in √−3 directly. ω = (−1 + √−3)/2, so with s = √−3,
        // ω² = (1 − 2s + s²)/4 = (1 − 2s − 3)/4 = (−1 − s)/2 and ω² + ω + 1 = 0.
        let k = f(3);
        let s = KElement::sqrt_minus_d(k);
        let omega = (&s - &KElement::one(k)).scale(&rat(1, 2));
        assert_eq!(omega, KElement::new(int(-1), int(1), k));
        let lhs = &(&(&omega * &omega) + &omega) + &KElement::one(k);
        assert!(lhs.is_zero());
        // s² = −3 in the δ basis
        assert_eq!(&s * &s, KElement::from_int(-3, k));
    }

    #[test]
    fn conjugates() {
        assert_eq!(KElement::delta(f(1)).conj(), -KElement::delta(f(1)));
        let k7 = f(7);
        assert_eq!(KElement::delta(k7).conj(), &KElement::one(k7) - &KElement::delta(k7));
        let x = KElement::new(int(3), int(2), f(2));
        assert_eq!(x.conj(), KElement::new(int(3), int(-2), f(2)));
    }

    #[test]
    fn real_parts() {
        assert_eq!(KElement::new(int(3), int(5), f(1)).re(), int(3));
        assert_eq!(KElement::delta(f(3)).re(), rat(1, 2));
    }

    #[test]
    fn embeddings() {
        let z = KElement::new(int(1), int(1), f(1)).embed();
        assert_eq!((z.re, z.im), (1.0, 1.0));
        let z = KElement::delta(f(3)).embed();
        assert_eq!(z.re, 0.5);
        assert!((z.im - 0.8660254037844386).abs() <= 2.0 * f64::EPSILON);
        let z = KElement::delta(f(2)).embed();
        assert_eq!(z.re, 0.0);
        assert!((z.im - std::f64::consts::SQRT_2).abs() <= 2.0 * f64::EPSILON);
    }

    #[test]
    fn division_errors() {
        let k = f(2);
        assert!(matches!(KElement::one(k).checked_div(&KElement::zero(k)), Err(Error::DivisionByZero)));
        assert!(matches!(KElement::one(k).checked_add(&KElement::one(f(3))), Err(Error::FieldMismatch(2, 3))));
    }

    #[test]
    fn string_round_trip() {
        let k = f(7);
        let x = KElement::new(rat(-1, 2), rat(-3, 4), k);
        let s = x.to_string();
        assert_eq!(s, "-1/2+-3/4*delta");
        assert_eq!(KElement::parse(&s, k).unwrap(), x);
        assert_eq!(KElement::parse("5", k).unwrap(), KElement::from_int(5, k));
        assert_eq!(KElement::parse("1/3 + 2*delta", k).unwrap(), KElement::new(rat(1, 3), int(2), k));
        assert!(KElement::parse("x+1*delta", k).is_err());
    }

    #[test]
    fn units_have_norm_one() {
        for d in [1u64, 2, 3, 7] {
            for u in KElement::units(f(d)) {
                assert_eq!(u.norm(), int(1));
                assert!(u.is_integral());
            }
        }
        assert_eq!(KElement::units(f(3)).len(), 6);
        assert_eq!(KElement::units(f(1)).len(), 4);
    }

    fn elem(d: u64) -> impl Strategy<Value = KElement> {
        (-20i64..20, 1i64..6, -20i64..20, 1i64..6)
            .prop_map(move |(a, ad, b, bd)| KElement::new(rat(a, ad), rat(b, bd), f(d)))
    }

    fn triple() -> impl Strategy<Value = (KElement, KElement, KElement)> {
        prop_oneof![Just(1u64), Just(2), Just(3), Just(5), Just(7)].prop_flat_map(|d| (elem(d), elem(d), elem(d)))
    }

    proptest! {
        #[test]
        fn ring_axioms((x, y, z) in triple()) {
            prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
            prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
            prop_assert_eq!(&x * &y, &y * &x);
        }

        #[test]
        fn conj_is_involutive_ring_morphism((x, y, _z) in triple()) {
            prop_assert_eq!(x.conj().conj(), x.clone());
            prop_assert_eq!((&x * &y).conj(), &x.conj() * &y.conj());
            prop_assert_eq!((&x + &y).conj(), &x.conj() + &y.conj());
            prop_assert_eq!(x.re(), x.conj().re());
            let n = &x * &x.conj();
            prop_assert!(n.b.is_zero());
            prop_assert_eq!(n.a.clone(), x.norm());
            prop_assert!(n.a >= Rational::zero());
        }

        #[test]
        fn re_plus_re_conj_is_trace((x, _y, _z) in triple()) {
            // symbolic oracle: Tr(a + bδ) = 2a + b·Tr(δ)
            let t = int(x.field().delta_trace());
            prop_assert_eq!(x.re() + x.conj().re(), &x.a * int(2) + &x.b * t);
        }

        #[test]
        fn division_inverts_multiplication((x, y, _z) in triple()) {
            prop_assume!(!y.is_zero());
            prop_assert_eq!((&x * &y).checked_div(&y).unwrap(), x);
        }

        #[test]
        fn embedding_is_a_ring_morphism((x, y, _z) in triple()) {
            let lhs = (&x * &y).embed();
            let rhs = x.embed() * y.embed();
            prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
        }
    }
}
