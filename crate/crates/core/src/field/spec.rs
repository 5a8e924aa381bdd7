use std::sync::Arc;

use super::FieldError;

/// Largest supported extension degree.
pub const MAX_DEGREE: usize = 3;

/// Raw coefficient storage, low degree first. Unused slots stay zero.
pub(crate) type Coeffs = [u32; MAX_DEGREE];

/// Conway polynomials (low-to-high coefficients) for the fields this crate
/// is exercised on. Degree one is normalised to `x` since the residue
/// representation does not depend on the linear modulus.
const CONWAY: &[(u32, &[u32])] = &[
    (2, &[1, 1, 1]),
    (2, &[1, 1, 0, 1]),
    (3, &[2, 2, 1]),
    (3, &[1, 2, 0, 1]),
    (5, &[2, 4, 1]),
    (5, &[3, 3, 0, 1]),
    (7, &[3, 6, 1]),
    (7, &[4, 0, 6, 1]),
];

/// Conway polynomial for `F_{p^n}`, if tabulated.
pub fn conway_polynomial(p: u32, n: usize) -> Option<&'static [u32]> {
    CONWAY
        .iter()
        .find(|(cp, m)| *cp == p && m.len() == n + 1)
        .map(|(_, m)| *m)
}

/// Upper bound on the number of elements an exhaustive sweep may visit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationBudget(pub u64);

impl EnumerationBudget {
    pub const ENV_VAR: &'static str = "KENKU_ENUM_BUDGET";

    /// Budget from `KENKU_ENUM_BUDGET`, falling back to the default.
    pub fn from_env() -> Self {
        std::env::var(Self::ENV_VAR)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .map(EnumerationBudget)
            .unwrap_or_default()
    }

    pub fn check(self, order: u64) -> Result<(), FieldError> {
        if order > self.0 {
            Err(FieldError::EnumerationTooLarge { order, budget: self.0 })
        } else {
            Ok(())
        }
    }
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        EnumerationBudget(1 << 16)
    }
}

/// A finite field `F_p[x]/(modulus)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldSpec {
    p: u32,
    modulus: Vec<u32>,
    q: u64,
    // Tonelli-Shanks data: q - 1 = 2^two_adicity * odd_part.
    two_adicity: u32,
    odd_part: u64,
    nonresidue: Coeffs,
}

fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

impl FieldSpec {
    /// Builds `F_p[x]/(modulus)`, checking primality and irreducibility.
    pub fn new(p: u32, modulus: &[u32]) -> Result<Arc<FieldSpec>, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        let modulus: Vec<u32> = modulus.iter().map(|c| c % p).collect();
        let n = modulus.len().saturating_sub(1);
        if n == 0 || n > MAX_DEGREE || modulus[n] != 1 {
            return Err(FieldError::BadModulus(modulus));
        }
        let modulus = if n == 1 { vec![0, 1] } else { modulus };
        if !is_irreducible(p, &modulus) {
            return Err(FieldError::Reducible { p, modulus });
        }
        let q = (p as u64).pow(n as u32);
        let mut odd_part = q - 1;
        let mut two_adicity = 0;
        while odd_part.is_multiple_of(2) && odd_part > 0 {
            odd_part /= 2;
            two_adicity += 1;
        }
        let mut spec = FieldSpec {
            p,
            modulus,
            q,
            two_adicity,
            odd_part,
            nonresidue: [0; MAX_DEGREE],
        };
        if p != 2 {
            let half = (q - 1) / 2;
            let minus_one = spec.neg_raw(&spec.int_raw(1));
            spec.nonresidue = (1..q)
                .map(|i| spec.coeffs_of_index(i))
                .find(|c| spec.pow_raw(c, half) == minus_one)
                .expect("odd-order field has a non-residue");
        }
        Ok(Arc::new(spec))
    }

    /// The prime field `F_p`.
    pub fn prime(p: u32) -> Result<Arc<FieldSpec>, FieldError> {
        FieldSpec::new(p, &[0, 1])
    }

    /// Default presentation of `F_{p^n}`: the Conway polynomial when
    /// tabulated, otherwise the first irreducible monic polynomial in
    /// enumeration order.
    pub fn default_for(p: u32, n: usize) -> Result<Arc<FieldSpec>, FieldError> {
        if n == 1 {
            return FieldSpec::prime(p);
        }
        if let Some(m) = conway_polynomial(p, n) {
            return FieldSpec::new(p, m);
        }
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if n == 0 || n > MAX_DEGREE {
            return Err(FieldError::NoDefaultModulus { p, n });
        }
        let count = (p as u64).pow(n as u32);
        (0..count)
            .map(|i| {
                let mut m = index_digits(p, i, n);
                m.push(1);
                m
            })
            .find(|m| is_irreducible(p, m))
            .map(|m| FieldSpec::new(p, &m))
            .ok_or(FieldError::NoDefaultModulus { p, n })?
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn order(&self) -> u64 {
        self.q
    }

    /// Modulus coefficients, low degree first.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub(crate) fn nonresidue(&self) -> &Coeffs {
        &self.nonresidue
    }

    pub(crate) fn two_adicity(&self) -> u32 {
        self.two_adicity
    }

    pub(crate) fn odd_part(&self) -> u64 {
        self.odd_part
    }

    pub(crate) fn coeffs_of_index(&self, index: u64) -> Coeffs {
        let mut c = [0; MAX_DEGREE];
        let mut rest = index;
        for slot in c.iter_mut().take(self.degree()) {
            *slot = (rest % self.p as u64) as u32;
            rest /= self.p as u64;
        }
        c
    }

    pub(crate) fn index_of(&self, c: &Coeffs) -> u64 {
        c[..self.degree()]
            .iter()
            .rev()
            .fold(0u64, |acc, &d| acc * self.p as u64 + d as u64)
    }

    pub(crate) fn int_raw(&self, n: i64) -> Coeffs {
        let mut c = [0; MAX_DEGREE];
        c[0] = n.rem_euclid(self.p as i64) as u32;
        c
    }

    pub(crate) fn add_raw(&self, a: &Coeffs, b: &Coeffs) -> Coeffs {
        let mut c = [0; MAX_DEGREE];
        for i in 0..MAX_DEGREE {
            c[i] = (a[i] + b[i]) % self.p;
        }
        c
    }

    pub(crate) fn neg_raw(&self, a: &Coeffs) -> Coeffs {
        let mut c = [0; MAX_DEGREE];
        for i in 0..MAX_DEGREE {
            c[i] = (self.p - a[i]) % self.p;
        }
        c
    }

    pub(crate) fn mul_raw(&self, a: &Coeffs, b: &Coeffs) -> Coeffs {
        let n = self.degree();
        let p = self.p as u64;
        let mut prod = [0u64; 2 * MAX_DEGREE];
        for i in 0..n {
            if a[i] == 0 {
                continue;
            }
            for j in 0..n {
                prod[i + j] += a[i] as u64 * b[j] as u64;
            }
        }
        // x^n = -(m_0 + m_1 x + ... + m_{n-1} x^{n-1})
        for k in (n..2 * n - 1).rev() {
            let top = prod[k] % p;
            prod[k] = 0;
            if top == 0 {
                continue;
            }
            for i in 0..n {
                let m = self.modulus[i] as u64;
                prod[k - n + i] += (p - top) * m;
            }
        }
        let mut c = [0; MAX_DEGREE];
        for i in 0..n {
            c[i] = (prod[i] % p) as u32;
        }
        c
    }

    pub(crate) fn pow_raw(&self, a: &Coeffs, mut e: u64) -> Coeffs {
        let mut acc = self.int_raw(1);
        let mut base = *a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_raw(&acc, &base);
            }
            base = self.mul_raw(&base, &base);
            e >>= 1;
        }
        acc
    }
}

fn index_digits(p: u32, mut i: u64, n: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(n + 1);
    for _ in 0..n {
        out.push((i % p as u64) as u32);
        i /= p as u64;
    }
    out
}

/// Remainder of `num` modulo the monic polynomial `den` over `F_p`.
fn poly_rem(p: u32, num: &[u32], den: &[u32]) -> Vec<u32> {
    let mut r: Vec<u64> = num.iter().map(|&c| c as u64).collect();
    let dn = den.len() - 1;
    let p64 = p as u64;
    while r.len() > dn {
        let top = r.pop().unwrap() % p64;
        if top == 0 {
            continue;
        }
        let shift = r.len() - dn;
        for (i, &d) in den[..dn].iter().enumerate() {
            r[shift + i] = (r[shift + i] + (p64 - top) * d as u64) % p64;
        }
    }
    r.into_iter().map(|c| (c % p64) as u32).collect()
}

/// Trial division by every monic polynomial of degree `1..=n/2`.
fn is_irreducible(p: u32, modulus: &[u32]) -> bool {
    let n = modulus.len() - 1;
    for d in 1..=n / 2 {
        let count = (p as u64).pow(d as u32);
        for i in 0..count {
            let mut divisor = index_digits(p, i, d);
            divisor.push(1);
            if poly_rem(p, modulus, &divisor).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}
