use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{Field, FieldError, FieldElement, FieldSpec};

/// An exact rational number.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rational(pub BigRational);

impl Rational {
    pub fn from_int(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn new(num: i64, den: i64) -> Self {
        Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    /// The integer value, if integral and within `i128`.
    pub fn to_i128(&self) -> Option<i128> {
        use num_traits::ToPrimitive;
        if self.is_integer() {
            self.0.numer().to_i128()
        } else {
            None
        }
    }

    /// Reduction into `spec`; `None` when `p` divides the denominator.
    pub fn reduce(&self, spec: &std::sync::Arc<FieldSpec>) -> Option<FieldElement> {
        use num_traits::ToPrimitive;
        let p = BigInt::from(spec.characteristic());
        let residue = |n: &BigInt| -> i64 {
            let r = ((n % &p) + &p) % &p;
            r.to_i64().expect("residue fits in i64")
        };
        let den = residue(self.0.denom());
        if den == 0 {
            return None;
        }
        let num = FieldElement::from_int(spec, residue(self.0.numer()));
        let den = FieldElement::from_int(spec, den);
        num.checked_div(&den).ok()
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Accepts `n` or `n/d` with integer `n`, `d != 0`.
impl FromStr for Rational {
    type Err = FieldError;
    fn from_str(s: &str) -> Result<Self, FieldError> {
        let bad = || FieldError::Parse(s.to_string());
        let t = s.trim();
        let (num, den) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t, "1"),
        };
        let num: BigInt = num.parse().map_err(|_| bad())?;
        let den: BigInt = den.parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        Ok(Rational(BigRational::new(num, den)))
    }
}

impl Field for Rational {
    fn zero_like(&self) -> Self {
        Rational(BigRational::zero())
    }
    fn one_like(&self) -> Self {
        Rational(BigRational::one())
    }
    fn int_like(&self, n: i64) -> Self {
        Rational::from_int(n)
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
    fn add(&self, rhs: &Self) -> Self {
        Rational(&self.0 + &rhs.0)
    }
    fn sub(&self, rhs: &Self) -> Self {
        Rational(&self.0 - &rhs.0)
    }
    fn mul(&self, rhs: &Self) -> Self {
        Rational(&self.0 * &rhs.0)
    }
    fn neg(&self) -> Self {
        Rational(-&self.0)
    }
    fn inv(&self) -> Option<Self> {
        if self.0.is_zero() {
            None
        } else {
            Some(Rational(self.0.recip()))
        }
    }
}
