//! The two quadratic-twist classes of curves with a given j-invariant over a
//! finite field, and the marking of j-values that admit a point of given order.

use thiserror::Error;

use crate::curve::{CurveError, GroupStructure, WeierstrassCurve};
use crate::field::{EnumerationBudget, FieldElement};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TwistError {
    #[error("j = {0} has more than two twist classes and is not supported")]
    UnsupportedJ(String),
    #[error("twists in characteristic {0} are not supported")]
    UnsupportedCharacteristic(u32),
    #[error("twist parameter {0} is a square")]
    SquareAlpha(String),
    #[error("j and the twist parameter lie in different fields")]
    FieldMismatch,
    #[error(transparent)]
    Curve(#[from] CurveError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistPair {
    pub j: FieldElement,
    pub alpha: FieldElement,
    pub e1: WeierstrassCurve<FieldElement>,
    pub e2: WeierstrassCurve<FieldElement>,
    pub structures: (GroupStructure, GroupStructure),
}

impl TwistPair {
    /// True iff some twist has a point of order `n`, i.e. `n` divides the
    /// exponent of `E1` or of `E2`.
    pub fn admits_order(&self, n: u64) -> bool {
        self.structures.0.exponent().is_multiple_of(n) || self.structures.1.exponent().is_multiple_of(n)
    }

    /// `|E1| + |E2| = 2q + 2`.
    pub fn twist_sum_holds(&self) -> bool {
        let q = self.j.spec().order();
        self.structures.0.order() + self.structures.1.order() == 2 * q + 2
    }
}

/// Representatives `E1`, `E2` for `j` twisted by the non-square `alpha`.
///
/// For `p >= 5`, `E1: y^2 = x^3 - 27c x + 54c` with `c = j/(j - 1728)` and
/// `E2` scales the coefficients by `alpha^2`, `alpha^3`. For `p = 3`,
/// `E1: y^2 = x^3 + x^2 - 1/j` and `E2: y^2 = x^3 + alpha x^2 - alpha^3/j`.
pub fn twist_curves(
    j: &FieldElement,
    alpha: &FieldElement,
) -> Result<(WeierstrassCurve<FieldElement>, WeierstrassCurve<FieldElement>), TwistError> {
    if j.spec() != alpha.spec() {
        return Err(TwistError::FieldMismatch);
    }
    let spec = j.spec();
    let p = spec.characteristic();
    if p == 2 {
        return Err(TwistError::UnsupportedCharacteristic(p));
    }
    if alpha.is_zero() || alpha.is_square() {
        return Err(TwistError::SquareAlpha(alpha.to_string()));
    }
    let k = |n: i64| FieldElement::from_int(spec, n);
    let zero = k(0);
    let unsupported = || TwistError::UnsupportedJ(j.to_string());
    if p == 3 {
        let inv_j = j.inverse().map_err(|_| unsupported())?;
        let e1 = WeierstrassCurve::from_a2_a4_a6(k(1), zero.clone(), -&inv_j)?;
        let a3 = alpha.pow(3);
        let e2 = WeierstrassCurve::from_a2_a4_a6(alpha.clone(), zero, -&(&a3 * &inv_j))?;
        return Ok((e1, e2));
    }
    let shifted = j - &k(1728);
    if j.is_zero() || shifted.is_zero() {
        return Err(unsupported());
    }
    let c = j.checked_div(&shifted).expect("nonzero");
    let a = -&(&k(27) * &c);
    let b = &k(54) * &c;
    let a2 = alpha * alpha;
    let a3 = &a2 * alpha;
    let e1 = WeierstrassCurve::from_a2_a4_a6(zero.clone(), a.clone(), b.clone())?;
    let e2 = WeierstrassCurve::from_a2_a4_a6(zero, &a * &a2, &b * &a3)?;
    Ok((e1, e2))
}

pub fn twist_pair(j: &FieldElement, alpha: &FieldElement, budget: EnumerationBudget) -> Result<TwistPair, TwistError> {
    let (e1, e2) = twist_curves(j, alpha)?;
    let s1 = e1.group_structure(budget)?;
    let s2 = e2.group_structure(budget)?;
    Ok(TwistPair { j: j.clone(), alpha: alpha.clone(), e1, e2, structures: (s1, s2) })
}

/// Whether `j` is marked for target order `n`.
pub fn mark_j(j: &FieldElement, alpha: &FieldElement, n: u64, budget: EnumerationBudget) -> Result<bool, TwistError> {
    Ok(twist_pair(j, alpha, budget)?.admits_order(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{enumerate_field, FieldSpec};

    fn el(p: u32, s: &str) -> FieldElement {
        FieldElement::parse(&FieldSpec::default_for(p, 3).unwrap(), s).unwrap()
    }

    #[test]
    fn both_twists_have_the_requested_j() {
        for (p, j) in [(3, "[2,1,2]"), (5, "[4,1,0]"), (7, "[1,2,3]")] {
            let j = el(p, j);
            let alpha = el(p, if p == 7 { "3" } else { "2" });
            let (e1, e2) = twist_curves(&j, &alpha).unwrap();
            assert_eq!(e1.j_invariant(), j);
            assert_eq!(e2.j_invariant(), j);
        }
    }

    #[test]
    fn excluded_inputs() {
        let alpha = el(5, "2");
        assert!(matches!(twist_curves(&el(5, "0"), &alpha), Err(TwistError::UnsupportedJ(_))));
        // 1728 = 3 mod 5
        assert!(matches!(twist_curves(&el(5, "3"), &alpha), Err(TwistError::UnsupportedJ(_))));
        assert!(matches!(twist_curves(&el(3, "0"), &el(3, "2")), Err(TwistError::UnsupportedJ(_))));
        assert!(matches!(twist_curves(&el(5, "[1,0,0]"), &el(5, "4")), Err(TwistError::SquareAlpha(_))));
        assert!(matches!(twist_curves(&el(2, "1"), &el(2, "1")), Err(TwistError::UnsupportedCharacteristic(2))));
        assert!(matches!(twist_curves(&el(3, "1"), &el(5, "2")), Err(TwistError::FieldMismatch)));
    }

    #[test]
    fn twist_sum_over_whole_fields() {
        for p in [3, 5] {
            let spec = FieldSpec::default_for(p, 3).unwrap();
            let alpha = FieldElement::from_int(&spec, 2);
            for j in enumerate_field(&spec, EnumerationBudget::default()).unwrap() {
                match twist_pair(&j, &alpha, EnumerationBudget::default()) {
                    Ok(pair) => assert!(pair.twist_sum_holds(), "j = {j}"),
                    Err(TwistError::UnsupportedJ(_)) => {}
                    Err(e) => panic!("{e}"),
                }
            }
        }
    }
}
