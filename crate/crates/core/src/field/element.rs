use std::fmt;
use std::sync::Arc;

use arrayvec::ArrayVec;

use super::spec::{Coeffs, EnumerationBudget, FieldSpec, MAX_DEGREE};
use super::{Field, FieldError};

/// An element of `F_{p^n}`, tied to the [`FieldSpec`] it was built in.
#[derive(Clone)]
pub struct FieldElement {
    spec: Arc<FieldSpec>,
    coeffs: Coeffs,
}

/// Square roots of an element: empty, `[0]`, or `[r, -r]` with the
/// principal (Tonelli-Shanks) root first.
pub type SquareRoots = ArrayVec<FieldElement, 2>;

fn same_spec(a: &Arc<FieldSpec>, b: &Arc<FieldSpec>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl FieldElement {
    /// Builds an element from coefficients written highest degree first,
    /// as in `[m,n,l]`. Shorter lists are right-aligned, so `[3]` is the
    /// constant `3`.
    pub fn new(spec: &Arc<FieldSpec>, coeffs: &[i64]) -> Result<Self, FieldError> {
        let n = spec.degree();
        if coeffs.len() > n {
            return Err(FieldError::InvalidElement { len: coeffs.len(), degree: n });
        }
        let p = spec.characteristic() as i64;
        let mut c = [0; MAX_DEGREE];
        for (slot, &v) in c.iter_mut().zip(coeffs.iter().rev()) {
            *slot = v.rem_euclid(p) as u32;
        }
        Ok(FieldElement { spec: spec.clone(), coeffs: c })
    }

    pub fn zero(spec: &Arc<FieldSpec>) -> Self {
        FieldElement { spec: spec.clone(), coeffs: [0; MAX_DEGREE] }
    }

    pub fn one(spec: &Arc<FieldSpec>) -> Self {
        Self::from_int(spec, 1)
    }

    pub fn from_int(spec: &Arc<FieldSpec>, n: i64) -> Self {
        FieldElement { spec: spec.clone(), coeffs: spec.int_raw(n) }
    }

    /// The class `a` of `x` in `F_p[x]/(modulus)`.
    pub fn generator(spec: &Arc<FieldSpec>) -> Self {
        let mut coeffs = [0; MAX_DEGREE];
        if spec.degree() == 1 {
            coeffs[0] = 0;
        } else {
            coeffs[1] = 1;
        }
        FieldElement { spec: spec.clone(), coeffs }
    }

    /// Element with enumeration index `index` (base-`p` digits of the
    /// coefficients, constant term least significant).
    pub fn from_index(spec: &Arc<FieldSpec>, index: u64) -> Self {
        FieldElement { spec: spec.clone(), coeffs: spec.coeffs_of_index(index % spec.order()) }
    }

    pub fn index(&self) -> u64 {
        self.spec.index_of(&self.coeffs)
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }

    /// Coefficients, highest degree first.
    pub fn coeffs(&self) -> Vec<u32> {
        self.coeffs[..self.spec.degree()].iter().rev().copied().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// True when the element lies in the prime subfield `F_p`.
    pub fn in_prime_field(&self) -> bool {
        self.coeffs[1..].iter().all(|&c| c == 0)
    }

    /// Constant coefficient; the residue when [`in_prime_field`](Self::in_prime_field).
    pub fn constant_term(&self) -> u32 {
        self.coeffs[0]
    }

    fn with(&self, coeffs: Coeffs) -> Self {
        FieldElement { spec: self.spec.clone(), coeffs }
    }

    fn check(&self, other: &Self) -> Result<(), FieldError> {
        if same_spec(&self.spec, &other.spec) {
            Ok(())
        } else {
            Err(FieldError::SpecMismatch)
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, FieldError> {
        self.check(other)?;
        Ok(self.with(self.spec.add_raw(&self.coeffs, &other.coeffs)))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, FieldError> {
        self.check(other)?;
        let neg = self.spec.neg_raw(&other.coeffs);
        Ok(self.with(self.spec.add_raw(&self.coeffs, &neg)))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, FieldError> {
        self.check(other)?;
        Ok(self.with(self.spec.mul_raw(&self.coeffs, &other.coeffs)))
    }

    pub fn negated(&self) -> Self {
        self.with(self.spec.neg_raw(&self.coeffs))
    }

    pub fn inverse(&self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(self.pow(self.spec.order() - 2))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, FieldError> {
        self.check(other)?;
        self.checked_mul(&other.inverse()?)
    }

    pub fn pow(&self, e: u64) -> Self {
        self.with(self.spec.pow_raw(&self.coeffs, e))
    }

    /// The Frobenius map `x -> x^p`.
    pub fn frobenius(&self) -> Self {
        self.pow(self.spec.characteristic() as u64)
    }

    /// Euler's criterion; zero counts as a square.
    pub fn is_square(&self) -> bool {
        if self.is_zero() || self.spec.characteristic() == 2 {
            return true;
        }
        let half = (self.spec.order() - 1) / 2;
        self.pow(half) == FieldElement::one(&self.spec)
    }

    /// Both square roots, principal root first.
    ///
    /// The principal root comes from Tonelli-Shanks seeded with the
    /// smallest quadratic non-residue in enumeration order, which makes
    /// the choice deterministic for a given presentation.
    pub fn sqrt(&self) -> SquareRoots {
        let mut out = SquareRoots::new();
        if self.is_zero() {
            out.push(self.clone());
            return out;
        }
        let spec = &self.spec;
        if spec.characteristic() == 2 {
            out.push(self.pow(spec.order() / 2));
            return out;
        }
        if !self.is_square() {
            return out;
        }
        let one = FieldElement::one(spec);
        let mut m = spec.two_adicity();
        let mut c = self.with(spec.pow_raw(spec.nonresidue(), spec.odd_part()));
        let mut t = self.pow(spec.odd_part());
        let mut r = self.pow(spec.odd_part().div_ceil(2));
        while t != one {
            let mut i = 0;
            let mut t2 = t.clone();
            while t2 != one {
                t2 = &t2 * &t2;
                i += 1;
            }
            let mut b = c.clone();
            for _ in 0..(m - i - 1) {
                b = &b * &b;
            }
            m = i;
            c = &b * &b;
            t = &t * &c;
            r = &r * &b;
        }
        let neg = r.negated();
        out.push(r);
        out.push(neg);
        out
    }

    /// Parses `[m,n,l]` (highest coefficient first) or a bare residue.
    pub fn parse(spec: &Arc<FieldSpec>, text: &str) -> Result<Self, FieldError> {
        let bad = || FieldError::Parse(text.to_string());
        let t = text.trim();
        let coeffs: Vec<i64> = if let Some(inner) = t.strip_prefix('[') {
            let inner = inner.strip_suffix(']').ok_or_else(bad)?;
            let parts: Result<Vec<i64>, _> =
                inner.split(',').map(|s| s.trim().parse::<i64>()).collect();
            let parts = parts.map_err(|_| bad())?;
            if parts.len() != spec.degree() {
                return Err(bad());
            }
            parts
        } else {
            vec![t.parse::<i64>().map_err(|_| bad())?]
        };
        if coeffs.iter().any(|&c| c < 0 || c >= spec.characteristic() as i64) {
            return Err(bad());
        }
        FieldElement::new(spec, &coeffs)
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && same_spec(&self.spec, &other.spec)
    }
}

impl Eq for FieldElement {}

impl std::hash::Hash for FieldElement {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl PartialOrd for FieldElement {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Enumeration order: lexicographic on `[m,n,l]`.
impl Ord for FieldElement {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.index().cmp(&other.index())
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.in_prime_field() {
            return write!(f, "{}", self.coeffs[0]);
        }
        let parts: Vec<String> = self.coeffs().iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in F_{}^{}", self, self.spec.characteristic(), self.spec.degree())
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl std::ops::$tr<&FieldElement> for &FieldElement {
            type Output = FieldElement;
            /// Panics when the operands come from different fields.
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                self.$checked(rhs).expect("field element operands from different fields")
            }
        }
        impl std::ops::$tr for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                std::ops::$tr::$method(&self, &rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl std::ops::Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.negated()
    }
}

impl std::ops::Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.negated()
    }
}

impl Field for FieldElement {
    fn zero_like(&self) -> Self {
        FieldElement::zero(&self.spec)
    }
    fn one_like(&self) -> Self {
        FieldElement::one(&self.spec)
    }
    fn int_like(&self, n: i64) -> Self {
        FieldElement::from_int(&self.spec, n)
    }
    fn is_zero(&self) -> bool {
        FieldElement::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        self.negated()
    }
    fn inv(&self) -> Option<Self> {
        self.inverse().ok()
    }
}

/// Every element of the field in enumeration order (`[0,0,0]`, `[0,0,1]`, ...).
pub fn enumerate_field(
    spec: &Arc<FieldSpec>,
    budget: EnumerationBudget,
) -> Result<impl Iterator<Item = FieldElement> + '_, FieldError> {
    budget.check(spec.order())?;
    Ok((0..spec.order()).map(move |i| FieldElement::from_index(spec, i)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f27() -> Arc<FieldSpec> {
        FieldSpec::default_for(3, 3).unwrap()
    }

    fn f125() -> Arc<FieldSpec> {
        FieldSpec::default_for(5, 3).unwrap()
    }

    fn el(spec: &Arc<FieldSpec>, c: &[i64]) -> FieldElement {
        FieldElement::new(spec, c).unwrap()
    }

    #[test]
    fn make_zero_generator_and_prime_residue() {
        let k = f27();
        assert!(el(&k, &[0, 0, 0]).is_zero());
        assert_eq!(el(&k, &[0, 1, 0]), FieldElement::generator(&k));
        let f5 = FieldSpec::prime(5).unwrap();
        let three = el(&f5, &[3]);
        assert_eq!(three.to_string(), "3");
        assert_eq!(three, FieldElement::from_int(&f5, 8));
    }

    #[test]
    fn make_rejects_long_coefficient_lists() {
        let f5 = FieldSpec::prime(5).unwrap();
        assert_eq!(
            FieldElement::new(&f5, &[1, 2]),
            Err(FieldError::InvalidElement { len: 2, degree: 1 })
        );
    }

    #[test]
    fn cube_of_generator_in_f27() {
        // x^3 + 2x + 1 = 0  =>  a^3 = -2a - 1 = a + 2 (mod 3)
        let k = f27();
        let a = FieldElement::generator(&k);
        assert_eq!(&(&a * &a) * &a, el(&k, &[0, 1, 2]));
        assert_eq!(a.frobenius(), el(&k, &[0, 1, 2]));
    }

    #[test]
    fn table_square_roots_are_negatives() {
        let k = f27();
        assert!((&el(&k, &[2, 1, 1]) + &el(&k, &[1, 2, 2])).is_zero());
    }

    #[test]
    fn inverse_of_zero_fails() {
        let k = f27();
        assert_eq!(FieldElement::zero(&k).inverse(), Err(FieldError::DivisionByZero));
    }

    #[test]
    fn mixed_fields_are_rejected() {
        let a = FieldElement::one(&f27());
        let b = FieldElement::one(&f125());
        assert_eq!(a.checked_add(&b), Err(FieldError::SpecMismatch));
        assert_eq!(a.checked_mul(&b), Err(FieldError::SpecMismatch));
        assert_ne!(a, b);
    }

    #[test]
    fn two_is_a_nonsquare_in_both_cubic_fields() {
        for k in [f27(), f125()] {
            let two = FieldElement::from_int(&k, 2);
            assert!(!two.is_square());
            assert!(two.sqrt().is_empty());
        }
    }

    #[test]
    fn sqrt_of_one_and_zero() {
        let k = f125();
        let roots = FieldElement::one(&k).sqrt();
        assert_eq!(roots.len(), 2);
        assert!(roots.contains(&FieldElement::from_int(&k, 1)));
        assert!(roots.contains(&FieldElement::from_int(&k, 4)));
        let zero = FieldElement::zero(&k);
        assert_eq!(zero.sqrt().as_slice(), std::slice::from_ref(&zero));
    }

    #[test]
    fn sqrt_in_characteristic_two() {
        let k = FieldSpec::default_for(2, 3).unwrap();
        for x in enumerate_field(&k, EnumerationBudget::default()).unwrap() {
            let r = x.sqrt();
            assert_eq!(r.len(), 1);
            assert_eq!(&r[0] * &r[0], x);
        }
    }

    #[test]
    fn enumeration_order_and_size() {
        let f3 = FieldSpec::prime(3).unwrap();
        let names: Vec<String> = enumerate_field(&f3, EnumerationBudget::default())
            .unwrap()
            .map(|x| x.to_string())
            .collect();
        assert_eq!(names, ["0", "1", "2"]);
        let k = f27();
        let all: Vec<_> = enumerate_field(&k, EnumerationBudget::default()).unwrap().collect();
        assert_eq!(all.len(), 27);
        assert_eq!(all[3].to_string(), "[0,1,0]");
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(enumerate_field(&f125(), EnumerationBudget::default()).unwrap().count(), 125);
        assert!(matches!(
            enumerate_field(&f125(), EnumerationBudget(64)),
            Err(FieldError::EnumerationTooLarge { .. })
        ));
    }

    #[test]
    fn parse_and_print() {
        let k = f27();
        let x = FieldElement::parse(&k, "[2,1,1]").unwrap();
        assert_eq!(x.coeffs(), vec![2, 1, 1]);
        assert_eq!(x.to_string(), "[2,1,1]");
        assert_eq!(FieldElement::parse(&k, "2").unwrap().to_string(), "2");
        assert_eq!(FieldElement::parse(&k, "[0,0,2]").unwrap().to_string(), "2");
        assert!(FieldElement::parse(&k, "[3,0,0]").is_err());
        assert!(FieldElement::parse(&k, "[1,0]").is_err());
        assert!(FieldElement::parse(&k, "a").is_err());
    }
}
