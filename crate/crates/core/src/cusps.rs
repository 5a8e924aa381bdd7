//! Cusps of `X1(N)` as classes `±(x, y)`, their counts per level, orbits
//! under a subgroup `Δ` of `(Z/N)^×` and the same-`y` conjugacy rule.

use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curve::CurvePoint;
use crate::field::Rational;
use crate::models::ModularCurveModel;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CuspError {
    #[error("level {0} is not supported (need N >= 5)")]
    UnsupportedLevel(u32),
    #[error("invalid Δ for N = {level}: {reason}")]
    InvalidDelta { level: u32, reason: String },
    #[error("{divisor} is not a divisor of {level} coprime to its cofactor")]
    InvalidDivisor { level: u32, divisor: u32 },
    #[error("({x},{y}) does not define a cusp of level {level}")]
    InvalidCusp { level: u32, x: u32, y: u32 },
}

/// The class `±(x, y)`; `x` is reduced mod `d = gcd(y, N)` into `1..=d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cusp {
    pub y: u32,
    pub x: u32,
    pub level: u32,
}

fn residue(v: i64, m: u32) -> u32 {
    v.rem_euclid(m as i64) as u32
}

/// `x mod d` represented in `1..=d`.
fn residue_one_based(v: i64, d: u32) -> u32 {
    residue(v - 1, d) + 1
}

impl Cusp {
    pub fn new(level: u32, x: i64, y: i64) -> Result<Cusp, CuspError> {
        let y0 = residue(y, level);
        let d = y0.gcd(&level);
        let x0 = residue_one_based(x, d);
        if x0.gcd(&d) != 1 {
            return Err(CuspError::InvalidCusp { level, x: residue(x, level), y: y0 });
        }
        let plus = Cusp { y: y0, x: x0, level };
        let minus = Cusp { y: residue(-(y0 as i64), level), x: residue_one_based(-(x0 as i64), d), level };
        Ok(plus.min(minus))
    }

    /// `d = gcd(y, N)`.
    pub fn divisor(&self) -> u32 {
        self.y.gcd(&self.level)
    }

    /// `y` up to sign, as the smaller of `y` and `N - y`.
    pub fn y_up_to_sign(&self) -> u32 {
        self.y.min(residue(-(self.y as i64), self.level))
    }

    /// `(x, y) -> (a x, a^{-1} y)`.
    pub fn act(&self, a: u32) -> Cusp {
        let n = self.level as i64;
        let inv = mod_inverse(a as i64, n).expect("a is a unit");
        Cusp::new(self.level, a as i64 * self.x as i64, inv * self.y as i64).expect("action preserves cusps")
    }
}

impl fmt::Display for Cusp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "±({},{})", self.x, self.y)
    }
}

fn mod_inverse(a: i64, n: i64) -> Option<i64> {
    let e = a.rem_euclid(n).extended_gcd(&n);
    (e.gcd == 1).then(|| e.x.rem_euclid(n))
}

pub fn euler_phi(n: u32) -> u32 {
    (1..=n).filter(|k| k.gcd(&n) == 1).count() as u32
}

pub fn divisors(n: u32) -> Vec<u32> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelCount {
    pub d: u32,
    pub count: u32,
}

/// `½ φ(d) φ(N/d)` cusps of `X1(N)` for each `d | N`.
pub fn cusp_inventory(n: u32) -> Result<Vec<LevelCount>, CuspError> {
    if n < 5 {
        return Err(CuspError::UnsupportedLevel(n));
    }
    Ok(divisors(n)
        .into_iter()
        .map(|d| LevelCount { d, count: euler_phi(d) * euler_phi(n / d) / 2 })
        .collect())
}

/// All cusps of `X1(N)` by direct enumeration of pairs, sorted.
pub fn enumerate_cusps(n: u32) -> Result<Vec<Cusp>, CuspError> {
    if n < 5 {
        return Err(CuspError::UnsupportedLevel(n));
    }
    let mut set = BTreeSet::new();
    for y in 0..n {
        let d = y.gcd(&n);
        for x in 1..=d {
            if let Ok(c) = Cusp::new(n, x as i64, y as i64) {
                set.insert(c);
            }
        }
    }
    Ok(set.into_iter().collect())
}

pub fn cusps_at_divisor(n: u32, d: u32) -> Result<Vec<Cusp>, CuspError> {
    Ok(enumerate_cusps(n)?.into_iter().filter(|c| c.divisor() == d).collect())
}

/// A subgroup of `(Z/N)^×` containing `-1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Delta {
    pub level: u32,
    pub residues: Vec<u32>,
}

impl Delta {
    pub fn new(level: u32, residues: &[u32]) -> Result<Delta, CuspError> {
        let invalid = |reason: String| CuspError::InvalidDelta { level, reason };
        let set: BTreeSet<u32> = residues.iter().map(|&a| a % level).collect();
        if let Some(a) = set.iter().find(|a| a.gcd(&level) != 1) {
            return Err(invalid(format!("{a} is not a unit")));
        }
        if !set.contains(&1) || !set.contains(&(level - 1)) {
            return Err(invalid("must contain ±1".into()));
        }
        for a in &set {
            for b in &set {
                if !set.contains(&(a * b % level)) {
                    return Err(invalid(format!("{a}·{b} is missing")));
                }
            }
        }
        Ok(Delta { level, residues: set.into_iter().collect() })
    }

    /// All of `(Z/N)^×`.
    pub fn full(level: u32) -> Delta {
        let units: Vec<u32> = (1..level).filter(|a| a.gcd(&level) == 1).collect();
        Delta::new(level, &units).expect("unit group is a subgroup")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CuspOrbit {
    pub members: Vec<Cusp>,
    /// `y`-values of the members up to sign.
    pub y_values: Vec<u32>,
}

impl fmt::Display for CuspOrbit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.members.iter().map(Cusp::to_string).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Orbits of `cusps` under `(x, y) -> (a x, a^{-1} y)` for `a ∈ Δ`, ordered by
/// least member.
pub fn delta_orbits(delta: &Delta, cusps: &[Cusp]) -> Vec<CuspOrbit> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut sorted = cusps.to_vec();
    sorted.sort();
    for c in sorted {
        if seen.contains(&c) {
            continue;
        }
        let members: BTreeSet<Cusp> = delta.residues.iter().map(|&a| c.act(a)).collect();
        seen.extend(members.iter().copied());
        let y_values: BTreeSet<u32> = members.iter().map(Cusp::y_up_to_sign).collect();
        out.push(CuspOrbit { members: members.into_iter().collect(), y_values: y_values.into_iter().collect() });
    }
    out
}

/// Groups orbits with the same `y`-values; orbits in one group are conjugate.
pub fn conjugacy_classes(orbits: &[CuspOrbit]) -> Vec<Vec<CuspOrbit>> {
    let mut classes: Vec<Vec<CuspOrbit>> = Vec::new();
    for o in orbits {
        match classes.iter_mut().find(|c| c[0].y_values == o.y_values) {
            Some(class) => class.push(o.clone()),
            None => classes.push(vec![o.clone()]),
        }
    }
    classes
}

/// `w_{N'}(±(1,1)) = ±(1, N')`.
pub fn al_on_cusp(n: u32, n_prime: u32) -> Result<Cusp, CuspError> {
    if n_prime == 0 || !n.is_multiple_of(n_prime) || n_prime.gcd(&(n / n_prime)) != 1 {
        return Err(CuspError::InvalidDivisor { level: n, divisor: n_prime });
    }
    Cusp::new(n, 1, n_prime as i64)
}

/// Cusps of `X1(N)` and `X_Δ(N)` lying over one cusp of `X0(N)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fibre {
    pub base: Cusp,
    pub x1_cusps: Vec<Cusp>,
    pub orbits: Vec<CuspOrbit>,
    pub classes: Vec<Vec<CuspOrbit>>,
}

impl Fibre {
    /// Every `X_Δ`-cusp in the fibre has a conjugacy class of size 2.
    pub fn is_quadratic(&self) -> bool {
        self.classes.iter().all(|c| c.len() == 2)
    }
}

/// The fibre over an `X0(N)` cusp at a level `d` with `gcd(d, N/d) = 1`,
/// where all `X1(N)` cusps at level `d` lie over the single `X0` cusp.
pub fn fibre_over(delta: &Delta, base: Cusp) -> Result<Fibre, CuspError> {
    let n = delta.level;
    let d = base.divisor();
    if d.gcd(&(n / d)) != 1 {
        return Err(CuspError::InvalidDivisor { level: n, divisor: d });
    }
    let x1_cusps = cusps_at_divisor(n, d)?;
    let orbits = delta_orbits(delta, &x1_cusps);
    let classes = conjugacy_classes(&orbits);
    Ok(Fibre { base, x1_cusps, orbits, classes })
}

/// Translations `T = w(∞)` of the involutions on `branch` whose image cusp
/// has a quadratic fibre on `X_Δ(N)`.
pub fn derived_quadratic_cusp_images(
    model: &ModularCurveModel,
    branch: &str,
) -> Result<Vec<CurvePoint<Rational>>, CuspError> {
    let delta = Delta::new(model.level, &model.delta)?;
    let mut out = Vec::new();
    for inv in model.involutions_for(branch) {
        let base = al_on_cusp(model.level, inv.level)?;
        if fibre_over(&delta, base)?.is_quadratic() && !out.contains(&inv.translation) {
            out.push(inv.translation.clone());
        }
    }
    Ok(out)
}
