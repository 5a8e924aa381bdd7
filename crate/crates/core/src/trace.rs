//! The Frobenius action on points of a curve defined over `F_p` and the
//! trace map `ϕ = id + φ + ... + φ^{n-1}` into the `F_p`-rational points.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curve::{CurveError, CurvePoint, WeierstrassCurve};
use crate::field::FieldElement;
use crate::models::ReducedModel;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TraceError {
    #[error("trace value {0} is not rational over the prime field")]
    NotPrimeRational(String),
    #[error(transparent)]
    Curve(#[from] CurveError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceClass {
    Allowed,
    Forbidden,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceTarget {
    pub point: CurvePoint<FieldElement>,
    pub class: TraceClass,
}

/// `(x, y) -> (x^p, y^p)` on a curve with prime-field coefficients.
pub fn frob_point(
    curve: &WeierstrassCurve<FieldElement>,
    p: &CurvePoint<FieldElement>,
) -> Result<CurvePoint<FieldElement>, CurveError> {
    if !curve.is_over_prime_field() {
        return Err(CurveError::NotOverPrimeField);
    }
    curve.validate(p)?;
    Ok(p.frobenius())
}

/// `P + φ(P) + ... + φ^{n-1}(P)` over `F_{p^n}`.
pub fn trace_map(
    curve: &WeierstrassCurve<FieldElement>,
    p: &CurvePoint<FieldElement>,
) -> Result<CurvePoint<FieldElement>, CurveError> {
    let mut conj = frob_point(curve, p)?;
    let mut acc = p.clone();
    for _ in 1..curve.spec().degree() {
        acc = curve.add(&acc, &conj);
        conj = conj.frobenius();
    }
    Ok(acc)
}

/// Forbidden iff `t` is the reduction of a quadratic-cusp image on `branch`.
pub fn classify_trace(
    reduced: &ReducedModel<'_>,
    branch: &str,
    t: &CurvePoint<FieldElement>,
) -> Result<TraceClass, TraceError> {
    if !t.is_prime_field_rational() {
        return Err(TraceError::NotPrimeRational(t.to_string()));
    }
    reduced.curve.validate(t)?;
    Ok(if reduced.forbidden_traces(branch).contains(t) { TraceClass::Forbidden } else { TraceClass::Allowed })
}

pub fn trace_target(
    reduced: &ReducedModel<'_>,
    branch: &str,
    p: &CurvePoint<FieldElement>,
) -> Result<TraceTarget, TraceError> {
    let point = trace_map(&reduced.curve, p)?;
    let class = classify_trace(reduced, branch, &point)?;
    Ok(TraceTarget { point, class })
}
