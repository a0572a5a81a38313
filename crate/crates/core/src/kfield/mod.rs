//! Exact arithmetic in an imaginary quadratic field `K = Q(√−d)` and in
//! matrices over it. Elements are kept in the integral basis `{1, δ}`, so an
//! element lies in `O_K` exactly when both coordinates are integers.

mod element;
mod field;
mod matrix;
pub mod rational;

pub use element::{KElement, KOp};
pub use field::{FieldId, Residue};
pub use matrix::KMatrix;
pub use rational::Rational;

/// `ω = (−1 + √−3)/2` for `d = 3`.
pub fn omega(field: FieldId) -> KElement {
    assert_eq!(field.d(), 3, "omega is only defined here for d = 3");
    KElement::new(rational::int(-1), rational::int(1), field)
}
