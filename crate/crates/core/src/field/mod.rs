//! Exact arithmetic in small finite fields `F_{p^n}` and in `Q`.
//!
//! Elements of `F_{p^n}` are coefficient vectors over `F_p` modulo a fixed
//! monic irreducible polynomial. The textual form follows the table
//! convention `[m,n,l] = m*a^2 + n*a + l`, where `a` is the class of `x`;
//! elements of the prime subfield print as a bare residue.

mod element;
mod rational;
mod spec;

pub use element::{enumerate_field, FieldElement, SquareRoots};
pub use rational::Rational;
pub use spec::{conway_polynomial, EnumerationBudget, FieldSpec, MAX_DEGREE};

use std::fmt;

use thiserror::Error;

/// Errors raised by field construction and arithmetic.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not a prime")]
    NotPrime(u32),
    #[error("modulus must be monic of degree 1..={max}, got {0:?}", max = MAX_DEGREE)]
    BadModulus(Vec<u32>),
    #[error("modulus {modulus:?} is reducible over F_{p}")]
    Reducible { p: u32, modulus: Vec<u32> },
    #[error("coefficient list of length {len} exceeds extension degree {degree}")]
    InvalidElement { len: usize, degree: usize },
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    SpecMismatch,
    #[error("field of order {order} exceeds the enumeration budget of {budget} elements")]
    EnumerationTooLarge { order: u64, budget: u64 },
    #[error("cannot parse field element {0:?}")]
    Parse(String),
    #[error("no default modulus known for F_{p}^{n}")]
    NoDefaultModulus { p: u32, n: usize },
}

/// The arithmetic the curve and expression code needs from a base field.
///
/// Constants are produced relative to an existing element (`zero_like`,
/// `int_like`) because a finite-field element carries its field with it.
pub trait Field: Clone + PartialEq + Eq + fmt::Debug + fmt::Display {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn int_like(&self, n: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse, `None` for zero.
    fn inv(&self) -> Option<Self>;

    fn square(&self) -> Self {
        self.mul(self)
    }

    fn pow_u32(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = self.one_like();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.square();
            e >>= 1;
        }
        acc
    }

    /// `self / rhs`, `None` when `rhs` is zero.
    fn div(&self, rhs: &Self) -> Option<Self> {
        rhs.inv().map(|r| self.mul(&r))
    }
}
