//! Long Weierstrass curves `y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6`
//! over any [`Field`]: group law, point enumeration over finite fields and
//! group-structure determination from element orders.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{enumerate_field, EnumerationBudget, Field, FieldElement, FieldError, FieldSpec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CurveError {
    #[error("curve is singular (discriminant vanishes)")]
    Singular,
    #[error("point {0} is not on the curve")]
    NotOnCurve(String),
    #[error("curve invariant violated: {0}")]
    InvariantViolation(String),
    #[error("curve coefficients are not all in the prime field")]
    NotOverPrimeField,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// A point in projective closure: the identity or an affine pair.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum CurvePoint<F> {
    Infinity,
    Affine { x: F, y: F },
}

impl<F> CurvePoint<F> {
    pub fn affine(x: F, y: F) -> Self {
        CurvePoint::Affine { x, y }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, CurvePoint::Infinity)
    }

    pub fn x(&self) -> Option<&F> {
        match self {
            CurvePoint::Infinity => None,
            CurvePoint::Affine { x, .. } => Some(x),
        }
    }

    pub fn y(&self) -> Option<&F> {
        match self {
            CurvePoint::Infinity => None,
            CurvePoint::Affine { y, .. } => Some(y),
        }
    }

    /// Applies `f` to both coordinates; `None` from `f` sends the point to
    /// infinity (a coordinate with a pole at the reducing prime).
    pub fn map<G>(&self, f: impl Fn(&F) -> Option<G>) -> CurvePoint<G> {
        match self {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => match (f(x), f(y)) {
                (Some(x), Some(y)) => CurvePoint::Affine { x, y },
                _ => CurvePoint::Infinity,
            },
        }
    }
}

impl<F: fmt::Display> fmt::Display for CurvePoint<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurvePoint::Infinity => write!(f, "(∞,∞)"),
            CurvePoint::Affine { x, y } => write!(f, "({x},{y})"),
        }
    }
}

impl CurvePoint<FieldElement> {
    /// Coordinatewise Frobenius.
    pub fn frobenius(&self) -> Self {
        self.map(|c| Some(c.frobenius()))
    }

    pub fn is_prime_field_rational(&self) -> bool {
        match self {
            CurvePoint::Infinity => true,
            CurvePoint::Affine { x, y } => x.in_prime_field() && y.in_prime_field(),
        }
    }

    /// Parses `(∞,∞)` or `(x,y)` with coordinates in field-element syntax.
    pub fn parse(spec: &Arc<FieldSpec>, text: &str) -> Result<Self, FieldError> {
        let t = text.trim();
        if t == "(∞,∞)" || t == "∞" {
            return Ok(CurvePoint::Infinity);
        }
        let bad = || FieldError::Parse(text.to_string());
        let inner = t.strip_prefix('(').and_then(|s| s.strip_suffix(')')).ok_or_else(bad)?;
        // split on the comma that is not inside brackets
        let mut depth = 0;
        let split = inner
            .char_indices()
            .find(|&(_, c)| {
                match c {
                    '[' => depth += 1,
                    ']' => depth -= 1,
                    _ => {}
                }
                c == ',' && depth == 0
            })
            .map(|(i, _)| i)
            .ok_or_else(bad)?;
        let x = FieldElement::parse(spec, &inner[..split])?;
        let y = FieldElement::parse(spec, &inner[split + 1..])?;
        Ok(CurvePoint::affine(x, y))
    }
}

/// Invariant factors `Z/n2 x Z/n1` with `n2 | n1`; `n2 = 1` is cyclic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupStructure {
    pub n2: u64,
    pub n1: u64,
}

impl GroupStructure {
    pub fn order(&self) -> u64 {
        self.n1 * self.n2
    }

    pub fn exponent(&self) -> u64 {
        self.n1
    }
}

impl fmt::Display for GroupStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n2 == 1 {
            write!(f, "Z/{}", self.n1)
        } else {
            write!(f, "Z/{}×Z/{}", self.n2, self.n1)
        }
    }
}

impl std::str::FromStr for GroupStructure {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |t: &str| -> Result<u64, String> {
            t.trim()
                .strip_prefix("Z/")
                .and_then(|n| n.parse().ok())
                .ok_or_else(|| format!("bad group structure {s:?}"))
        };
        match s.split_once('×').or_else(|| s.split_once('x')) {
            Some((a, b)) => Ok(GroupStructure { n2: parse(a)?, n1: parse(b)? }),
            None => Ok(GroupStructure { n2: 1, n1: parse(s)? }),
        }
    }
}

/// `true` iff an element of order `n` is not ruled out by the Hasse bound
/// over `F_q`, i.e. `n <= (1 + sqrt q)^2`.
pub fn hasse_admits_order(q: u64, n: u64) -> bool {
    // n <= q + 1 + 2 sqrt(q)  <=>  n - q - 1 <= 0  or  (n - q - 1)^2 <= 4q
    let excess = n as i128 - q as i128 - 1;
    excess <= 0 || excess * excess <= 4 * q as i128
}

/// `|count - q - 1| <= 2 sqrt(q)`.
pub fn within_hasse_interval(q: u64, count: u64) -> bool {
    let t = count as i128 - q as i128 - 1;
    t * t <= 4 * q as i128
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeierstrassCurve<F> {
    a1: F,
    a2: F,
    a3: F,
    a4: F,
    a6: F,
}

impl<F: Field> WeierstrassCurve<F> {
    pub fn new(a1: F, a2: F, a3: F, a4: F, a6: F) -> Result<Self, CurveError> {
        let curve = WeierstrassCurve { a1, a2, a3, a4, a6 };
        if curve.discriminant().is_zero() {
            return Err(CurveError::Singular);
        }
        Ok(curve)
    }

    /// `y^2 = x^3 + a2 x^2 + a4 x + a6`.
    pub fn from_a2_a4_a6(a2: F, a4: F, a6: F) -> Result<Self, CurveError> {
        let z = a2.zero_like();
        WeierstrassCurve::new(z.clone(), a2, z, a4, a6)
    }

    /// `[a1, a2, a3, a4, a6]`.
    pub fn coefficients(&self) -> [&F; 5] {
        [&self.a1, &self.a2, &self.a3, &self.a4, &self.a6]
    }

    fn c(&self, n: i64) -> F {
        self.a1.int_like(n)
    }

    pub fn b2(&self) -> F {
        self.a1.square().add(&self.c(4).mul(&self.a2))
    }

    pub fn b4(&self) -> F {
        self.c(2).mul(&self.a4).add(&self.a1.mul(&self.a3))
    }

    pub fn b6(&self) -> F {
        self.a3.square().add(&self.c(4).mul(&self.a6))
    }

    pub fn b8(&self) -> F {
        let (a1, a2, a3, a4, a6) = (&self.a1, &self.a2, &self.a3, &self.a4, &self.a6);
        a1.square()
            .mul(a6)
            .add(&self.c(4).mul(a2).mul(a6))
            .sub(&a1.mul(a3).mul(a4))
            .add(&a2.mul(&a3.square()))
            .sub(&a4.square())
    }

    pub fn c4(&self) -> F {
        self.b2().square().sub(&self.c(24).mul(&self.b4()))
    }

    pub fn discriminant(&self) -> F {
        let (b2, b4, b6, b8) = (self.b2(), self.b4(), self.b6(), self.b8());
        b2.square()
            .mul(&b8)
            .neg()
            .sub(&self.c(8).mul(&b4.pow_u32(3)))
            .sub(&self.c(27).mul(&b6.square()))
            .add(&self.c(9).mul(&b2).mul(&b4).mul(&b6))
    }

    /// `c4^3 / discriminant`.
    pub fn j_invariant(&self) -> F {
        self.c4().pow_u32(3).div(&self.discriminant()).expect("nonsingular curve")
    }

    /// Right-hand side `x^3 + a2 x^2 + a4 x + a6`.
    pub fn rhs(&self, x: &F) -> F {
        x.add(&self.a2).mul(x).add(&self.a4).mul(x).add(&self.a6)
    }

    pub fn contains(&self, p: &CurvePoint<F>) -> bool {
        match p {
            CurvePoint::Infinity => true,
            CurvePoint::Affine { x, y } => {
                let lhs = y.add(&self.a1.mul(x)).add(&self.a3).mul(y);
                lhs == self.rhs(x)
            }
        }
    }

    pub fn validate(&self, p: &CurvePoint<F>) -> Result<(), CurveError> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(CurveError::NotOnCurve(p.to_string()))
        }
    }

    /// `-(x, y) = (x, -y - a1 x - a3)`.
    pub fn neg(&self, p: &CurvePoint<F>) -> CurvePoint<F> {
        match p {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => CurvePoint::affine(
                x.clone(),
                y.neg().sub(&self.a1.mul(x)).sub(&self.a3),
            ),
        }
    }

    /// Chord-and-tangent addition. Points are assumed to be on the curve;
    /// see [`checked_add`](Self::checked_add).
    pub fn add(&self, p: &CurvePoint<F>, q: &CurvePoint<F>) -> CurvePoint<F> {
        let (x1, y1, x2, y2) = match (p, q) {
            (CurvePoint::Infinity, _) => return q.clone(),
            (_, CurvePoint::Infinity) => return p.clone(),
            (CurvePoint::Affine { x: x1, y: y1 }, CurvePoint::Affine { x: x2, y: y2 }) => {
                (x1, y1, x2, y2)
            }
        };
        let lambda = if x1 == x2 {
            let denom = y1.add(y2).add(&self.a1.mul(x2)).add(&self.a3);
            if denom.is_zero() {
                return CurvePoint::Infinity;
            }
            let num = self
                .c(3)
                .mul(&x1.square())
                .add(&self.c(2).mul(&self.a2).mul(x1))
                .add(&self.a4)
                .sub(&self.a1.mul(y1));
            num.div(&denom).expect("nonzero tangent denominator")
        } else {
            y2.sub(y1).div(&x2.sub(x1)).expect("distinct x")
        };
        let nu = y1.sub(&lambda.mul(x1));
        let x3 = lambda
            .square()
            .add(&self.a1.mul(&lambda))
            .sub(&self.a2)
            .sub(x1)
            .sub(x2);
        let y3 = lambda.add(&self.a1).mul(&x3).neg().sub(&nu).sub(&self.a3);
        CurvePoint::affine(x3, y3)
    }

    pub fn checked_add(
        &self,
        p: &CurvePoint<F>,
        q: &CurvePoint<F>,
    ) -> Result<CurvePoint<F>, CurveError> {
        self.validate(p)?;
        self.validate(q)?;
        Ok(self.add(p, q))
    }

    pub fn sub(&self, p: &CurvePoint<F>, q: &CurvePoint<F>) -> CurvePoint<F> {
        self.add(p, &self.neg(q))
    }

    /// `[k]P` by double-and-add; negative `k` goes through [`neg`](Self::neg).
    pub fn scalar_mul(&self, k: i64, p: &CurvePoint<F>) -> CurvePoint<F> {
        let base = if k < 0 { self.neg(p) } else { p.clone() };
        self.scalar_mul_u64(k.unsigned_abs(), &base)
    }

    pub fn scalar_mul_u64(&self, mut k: u64, p: &CurvePoint<F>) -> CurvePoint<F> {
        let mut acc = CurvePoint::Infinity;
        let mut base = p.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            base = self.add(&base, &base);
            k >>= 1;
        }
        acc
    }

    /// Exact order of `p`, given any multiple `n` of it (`[n]P = O`).
    pub fn order_dividing(&self, p: &CurvePoint<F>, n: u64) -> u64 {
        debug_assert!(self.scalar_mul_u64(n, p).is_infinity());
        let mut order = n;
        for (prime, _) in factorize(n) {
            while order.is_multiple_of(prime) && self.scalar_mul_u64(order / prime, p).is_infinity() {
                order /= prime;
            }
        }
        order
    }

    /// Order by repeated addition, giving up after `limit` steps.
    pub fn naive_order(&self, p: &CurvePoint<F>, limit: u64) -> Option<u64> {
        let mut acc = p.clone();
        for k in 1..=limit {
            if acc.is_infinity() {
                return Some(k);
            }
            acc = self.add(&acc, p);
        }
        None
    }

    /// Same curve with coefficients mapped into another field.
    pub fn map_coefficients<G: Field>(
        &self,
        f: impl Fn(&F) -> Option<G>,
    ) -> Result<Option<WeierstrassCurve<G>>, CurveError> {
        let mapped: Option<Vec<G>> = self.coefficients().iter().map(|c| f(c)).collect();
        let Some(mut m) = mapped else {
            return Ok(None);
        };
        let a6 = m.pop().unwrap();
        let a4 = m.pop().unwrap();
        let a3 = m.pop().unwrap();
        let a2 = m.pop().unwrap();
        let a1 = m.pop().unwrap();
        WeierstrassCurve::new(a1, a2, a3, a4, a6).map(Some)
    }
}

impl<F: Field> fmt::Display for WeierstrassCurve<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut lhs = String::from("y^2");
        if !self.a1.is_zero() {
            lhs.push_str(&format!(" + {}xy", self.a1));
        }
        if !self.a3.is_zero() {
            lhs.push_str(&format!(" + {}y", self.a3));
        }
        let mut rhs = String::from("x^3");
        for (c, mono) in [(&self.a2, "x^2"), (&self.a4, "x"), (&self.a6, "")] {
            if c.is_zero() {
                continue;
            }
            if *c == c.one_like() && !mono.is_empty() {
                rhs.push_str(&format!(" + {mono}"));
            } else {
                rhs.push_str(&format!(" + {c}{mono}"));
            }
        }
        write!(f, "{lhs} = {rhs}")
    }
}

/// Prime factorisation by trial division.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl WeierstrassCurve<FieldElement> {
    pub fn spec(&self) -> &Arc<FieldSpec> {
        self.a1.spec()
    }

    pub fn is_over_prime_field(&self) -> bool {
        self.coefficients().iter().all(|c| c.in_prime_field())
    }

    /// Base change of a curve with prime-field coefficients into `target`,
    /// which must have the same characteristic.
    pub fn lift(&self, target: &Arc<FieldSpec>) -> Result<Self, CurveError> {
        if !self.is_over_prime_field()
            || target.characteristic() != self.spec().characteristic()
        {
            return Err(CurveError::NotOverPrimeField);
        }
        let lifted = self
            .map_coefficients(|c| Some(FieldElement::from_int(target, c.constant_term() as i64)))?;
        Ok(lifted.expect("lift never drops coefficients"))
    }

    /// The `y`-values above `x`, in listing order.
    ///
    /// Prime-subfield roots are listed in descending residue order; others
    /// principal square root first (see [`FieldElement::sqrt`]).
    pub fn ys_over(&self, x: &FieldElement) -> Vec<FieldElement> {
        let spec = self.spec();
        if spec.characteristic() == 2 {
            let mut ys: Vec<FieldElement> = enumerate_field(spec, EnumerationBudget(u64::MAX))
                .expect("unbounded budget")
                .filter(|y| self.contains(&CurvePoint::affine(x.clone(), y.clone())))
                .collect();
            ys.sort();
            return ys;
        }
        // (y + h/2)^2 = rhs(x) + h^2/4 with h = a1 x + a3
        let h = &(&self.a1 * x) + &self.a3;
        let half_h = h.checked_div(&FieldElement::from_int(spec, 2)).expect("odd characteristic");
        let disc = &self.rhs(x) + &(&half_h * &half_h);
        let mut ys: Vec<FieldElement> = disc.sqrt().iter().map(|r| r - &half_h).collect();
        if ys.len() == 2 && ys.iter().all(FieldElement::in_prime_field) {
            ys.sort_by(|a, b| b.cmp(a));
        }
        ys
    }

    /// All points, the identity first, then by `x` in enumeration order.
    pub fn points(&self, budget: EnumerationBudget) -> Result<Vec<CurvePoint<FieldElement>>, CurveError> {
        let spec = self.spec().clone();
        let mut out = vec![CurvePoint::Infinity];
        for x in enumerate_field(&spec, budget)? {
            for y in self.ys_over(&x) {
                out.push(CurvePoint::affine(x.clone(), y));
            }
        }
        Ok(out)
    }

    /// `1 + sum_x (1 + chi(disc(x)))` with `chi` from Euler's criterion;
    /// odd characteristic only.
    pub fn count_by_character(&self, budget: EnumerationBudget) -> Result<u64, CurveError> {
        let spec = self.spec().clone();
        let two = FieldElement::from_int(&spec, 2);
        let four = &two * &two;
        let mut count = 1;
        for x in enumerate_field(&spec, budget)? {
            let h = &(&self.a1 * &x) + &self.a3;
            let four_disc = &(&four * &self.rhs(&x)) + &(&h * &h);
            count += if four_disc.is_zero() {
                1
            } else if four_disc.is_square() {
                2
            } else {
                0
            };
        }
        Ok(count)
    }

    /// Exact order of `p`.
    pub fn point_order(&self, p: &CurvePoint<FieldElement>) -> Result<u64, CurveError> {
        self.validate(p)?;
        let n = self.points(EnumerationBudget::from_env())?.len() as u64;
        Ok(self.order_dividing(p, n))
    }

    /// Invariant factors from element orders: `n1` is the largest order,
    /// `n2 = |E| / n1`.
    pub fn group_structure(&self, budget: EnumerationBudget) -> Result<GroupStructure, CurveError> {
        let points = self.points(budget)?;
        let n = points.len() as u64;
        let n1 = points.iter().map(|p| self.order_dividing(p, n)).max().unwrap_or(1);
        let n2 = n / n1;
        let q = self.spec().order();
        if n1 * n2 != n || n1 % n2 != 0 || !(q - 1).is_multiple_of(n2) {
            return Err(CurveError::InvariantViolation(format!(
                "|E| = {n}, exponent {n1} over F_{q}"
            )));
        }
        if !within_hasse_interval(q, n) {
            return Err(CurveError::InvariantViolation(format!("|E| = {n} outside Hasse interval for q = {q}")));
        }
        debug_assert_eq!(gcd(n1, n2), n2);
        Ok(GroupStructure { n2, n1 })
    }
}
