//! Declarative models of modular curves: equations over `Q`, j-formulas,
//! Atkin-Lehner involutions as affine maps, reduction mod `p` and rational
//! torsion via Lutz-Nagell.

use std::collections::HashMap;
use std::path::Path;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curve::{CurveError, CurvePoint, GroupStructure, WeierstrassCurve};
use crate::expr::{Expr, ExprError};
use crate::field::{enumerate_field, EnumerationBudget, Field, FieldElement, FieldError, FieldSpec, Rational};

const BUILTIN: &str = include_str!("../models/builtin.toml");

/// Config files with a different `format_version` are rejected.
pub const FORMAT_VERSION: u32 = 1;

/// Largest multiple tried when testing a Lutz-Nagell candidate.
const TORSION_SEARCH: u64 = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("cannot read model config: {0}")]
    Config(String),
    #[error("invalid model {id}: {reason}")]
    InvalidModel { id: String, reason: String },
    #[error("unknown model {0:?}")]
    UnknownModel(String),
    #[error("unknown involution {0:?}")]
    UnknownInvolution(String),
    #[error("unknown branch {0:?}")]
    UnknownBranch(String),
    #[error("bad prime {p}: {reason}")]
    BadPrime { p: u32, reason: String },
    #[error("point {0} is cuspidal or the j-formula degenerates there")]
    CuspidalOrBadPoint(String),
    #[error("curve coefficients must be integers for Lutz-Nagell")]
    NonIntegral,
    #[error("integer overflow during torsion search")]
    Overflow,
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub format_version: u32,
    #[serde(rename = "model")]
    pub models: Vec<ModelConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub id: String,
    pub level: u32,
    pub coefficients: [String; 5],
    pub delta: Vec<u32>,
    pub target_order: u64,
    pub j_formula: String,
    #[serde(default, rename = "involution")]
    pub involutions: Vec<InvolutionConfig>,
    #[serde(default, rename = "quadratic_cusp_image")]
    pub quadratic_cusp_images: Vec<PointConfig>,
    #[serde(default, rename = "reduction")]
    pub reductions: Vec<ReductionConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct InvolutionConfig {
    pub name: String,
    pub level: u32,
    pub sign: i8,
    pub translation: [String; 2],
    #[serde(default)]
    pub branch: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PointConfig {
    pub point: [String; 2],
    #[serde(default)]
    pub branch: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ReductionConfig {
    pub prime: u32,
    pub degree: usize,
    /// Monic modulus, low-degree coefficient first.
    #[serde(default)]
    pub modulus: Option<Vec<u32>>,
    #[serde(default)]
    pub twist_alpha: Option<String>,
}

/// `P -> sign*P + T`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Involution {
    pub name: String,
    pub level: u32,
    pub sign: i8,
    pub translation: CurvePoint<Rational>,
    pub branch: Option<String>,
}

impl Involution {
    pub fn applies_to(&self, branch: &str) -> bool {
        self.branch.as_deref().is_none_or(|b| b == branch)
    }

    /// Evaluates the map on `curve` with the translation already moved into
    /// the curve's base field.
    pub fn apply_with<F: Field>(
        &self,
        curve: &WeierstrassCurve<F>,
        translation: &CurvePoint<F>,
        p: &CurvePoint<F>,
    ) -> Result<CurvePoint<F>, CurveError> {
        curve.validate(p)?;
        let signed = if self.sign < 0 { curve.neg(p) } else { p.clone() };
        Ok(curve.add(&signed, translation))
    }
}

/// A rational point attached to an optional branch hypothesis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchPoint {
    pub point: CurvePoint<Rational>,
    pub branch: Option<String>,
}

/// Name used when a model has no tagged branches.
pub const SINGLE_BRANCH: &str = "all";

#[derive(Debug, Clone)]
pub struct ModularCurveModel {
    pub id: String,
    pub level: u32,
    pub equation: WeierstrassCurve<Rational>,
    pub j_formula: Expr,
    pub delta: Vec<u32>,
    pub target_order: u64,
    pub involutions: Vec<Involution>,
    pub quadratic_cusp_images: Vec<BranchPoint>,
    pub reductions: Vec<ReductionConfig>,
}

fn parse_rational(id: &str, s: &str) -> Result<Rational, ModelError> {
    s.parse().map_err(|_| ModelError::InvalidModel {
        id: id.into(),
        reason: format!("bad rational {s:?}"),
    })
}

fn parse_point(id: &str, xy: &[String; 2]) -> Result<CurvePoint<Rational>, ModelError> {
    Ok(CurvePoint::affine(parse_rational(id, &xy[0])?, parse_rational(id, &xy[1])?))
}

impl ModularCurveModel {
    pub fn from_config(cfg: &ModelConfig) -> Result<Self, ModelError> {
        let id = cfg.id.as_str();
        let invalid = |reason: String| ModelError::InvalidModel { id: id.into(), reason };
        let c: Vec<Rational> = cfg
            .coefficients
            .iter()
            .map(|s| parse_rational(id, s))
            .collect::<Result<_, _>>()?;
        let equation = WeierstrassCurve::new(c[0].clone(), c[1].clone(), c[2].clone(), c[3].clone(), c[4].clone())
            .map_err(|e| invalid(e.to_string()))?;
        let j_formula: Expr = cfg.j_formula.parse()?;
        if let Some(v) = j_formula.free_variables().iter().find(|v| *v != "x" && *v != "y") {
            return Err(invalid(format!("j-formula uses unknown variable {v:?}")));
        }
        let involutions = cfg
            .involutions
            .iter()
            .map(|i| {
                Ok(Involution {
                    name: i.name.clone(),
                    level: i.level,
                    sign: i.sign,
                    translation: parse_point(id, &i.translation)?,
                    branch: i.branch.clone(),
                })
            })
            .collect::<Result<Vec<_>, ModelError>>()?;
        let quadratic_cusp_images = cfg
            .quadratic_cusp_images
            .iter()
            .map(|q| Ok(BranchPoint { point: parse_point(id, &q.point)?, branch: q.branch.clone() }))
            .collect::<Result<Vec<_>, ModelError>>()?;
        let model = ModularCurveModel {
            id: cfg.id.clone(),
            level: cfg.level,
            equation,
            j_formula,
            delta: cfg.delta.clone(),
            target_order: cfg.target_order,
            involutions,
            quadratic_cusp_images,
            reductions: cfg.reductions.clone(),
        };
        model.validate()?;
        Ok(model)
    }

    fn invalid(&self, reason: String) -> ModelError {
        ModelError::InvalidModel { id: self.id.clone(), reason }
    }

    fn validate(&self) -> Result<(), ModelError> {
        let n = self.level;
        for inv in &self.involutions {
            if inv.sign != 1 && inv.sign != -1 {
                return Err(self.invalid(format!("{}: sign must be 1 or -1", inv.name)));
            }
            if inv.level == 0 || !n.is_multiple_of(inv.level) || inv.level.gcd(&(n / inv.level)) != 1 {
                return Err(self.invalid(format!("{}: level {} is not a Hall divisor of {n}", inv.name, inv.level)));
            }
            if !self.equation.contains(&inv.translation) {
                return Err(self.invalid(format!("{}: translation {} is off the curve", inv.name, inv.translation)));
            }
            if inv.sign > 0 && !self.equation.add(&inv.translation, &inv.translation).is_infinity() {
                return Err(self.invalid(format!("{}: P + T is an involution only when 2T = O", inv.name)));
            }
        }
        for q in &self.quadratic_cusp_images {
            if !self.equation.contains(&q.point) {
                return Err(self.invalid(format!("quadratic cusp image {} is off the curve", q.point)));
            }
        }
        for branch in self.branches() {
            self.check_closure(&branch)?;
        }
        Ok(())
    }

    /// `sign_a*(sign_b*P + T_b) + T_a`, as a (sign, translation) pair.
    pub fn compose(&self, a: &Involution, b: &Involution) -> (i8, CurvePoint<Rational>) {
        let tb = if a.sign < 0 { self.equation.neg(&b.translation) } else { b.translation.clone() };
        (a.sign * b.sign, self.equation.add(&tb, &a.translation))
    }

    /// Checks `w_{N1} o w_{N2} = w_{lcm/gcd}` among the involutions of a branch.
    fn check_closure(&self, branch: &str) -> Result<(), ModelError> {
        let invs = self.involutions_for(branch);
        for a in &invs {
            for b in &invs {
                if a.level == b.level {
                    continue;
                }
                let target = a.level.lcm(&b.level) / a.level.gcd(&b.level);
                let composed = self.compose(a, b);
                let ok = if target == 1 {
                    composed == (1, CurvePoint::Infinity)
                } else {
                    invs.iter().any(|c| c.level == target && composed == (c.sign, c.translation.clone()))
                };
                if !ok {
                    return Err(self.invalid(format!(
                        "{} o {} does not match an involution of level {target} on branch {branch}",
                        a.name, b.name
                    )));
                }
            }
        }
        Ok(())
    }

    /// Branch hypotheses in order of first appearance, or [`SINGLE_BRANCH`].
    pub fn branches(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        let tags = self
            .involutions
            .iter()
            .filter_map(|i| i.branch.as_ref())
            .chain(self.quadratic_cusp_images.iter().filter_map(|q| q.branch.as_ref()));
        for b in tags {
            if !out.contains(b) {
                out.push(b.clone());
            }
        }
        if out.is_empty() {
            out.push(SINGLE_BRANCH.to_string());
        }
        out
    }

    pub fn check_branch(&self, branch: &str) -> Result<(), ModelError> {
        if self.branches().iter().any(|b| b == branch) {
            Ok(())
        } else {
            Err(ModelError::UnknownBranch(branch.to_string()))
        }
    }

    pub fn involutions_for(&self, branch: &str) -> Vec<&Involution> {
        self.involutions.iter().filter(|i| i.applies_to(branch)).collect()
    }

    pub fn involution(&self, name: &str) -> Result<&Involution, ModelError> {
        self.involutions
            .iter()
            .find(|i| i.name == name)
            .ok_or_else(|| ModelError::UnknownInvolution(name.to_string()))
    }

    pub fn quadratic_cusp_images_for(&self, branch: &str) -> Vec<&CurvePoint<Rational>> {
        self.quadratic_cusp_images
            .iter()
            .filter(|q| q.branch.as_deref().is_none_or(|b| b == branch))
            .map(|q| &q.point)
            .collect()
    }

    /// Applies a named involution over `Q`.
    pub fn apply_involution(
        &self,
        name: &str,
        p: &CurvePoint<Rational>,
    ) -> Result<CurvePoint<Rational>, ModelError> {
        let inv = self.involution(name)?;
        Ok(inv.apply_with(&self.equation, &inv.translation, p)?)
    }

    /// Evaluates the j-formula at `p`; `embed` maps constants into the field.
    pub fn j_with<F: Field>(
        &self,
        p: &CurvePoint<F>,
        embed: &dyn Fn(&Rational) -> Option<F>,
    ) -> Result<F, ModelError> {
        let (x, y) = match p {
            CurvePoint::Infinity => return Err(ModelError::CuspidalOrBadPoint(p.to_string())),
            CurvePoint::Affine { x, y } => (x, y),
        };
        let vars = HashMap::from([("x".to_string(), x.clone()), ("y".to_string(), y.clone())]);
        match self.j_formula.eval(&x.one_like(), &vars, embed) {
            Err(ExprError::DivisionByZero(_)) => Err(ModelError::CuspidalOrBadPoint(p.to_string())),
            other => Ok(other?),
        }
    }

    pub fn j_of_rational_point(&self, p: &CurvePoint<Rational>) -> Result<Rational, ModelError> {
        self.j_with(p, &|r| Some(r.clone()))
    }

    /// The configured reduction entry for `F_{p^n}`, if any.
    pub fn reduction_config(&self, p: u32, n: usize) -> Option<&ReductionConfig> {
        self.reductions.iter().find(|r| r.prime == p && r.degree == n)
    }

    /// Reduces the model mod `p` and base-changes to `F_{p^n}`, using the
    /// configured modulus and twist parameter when present.
    pub fn reduce(&self, p: u32, n: usize) -> Result<ReducedModel<'_>, ModelError> {
        let cfg = self.reduction_config(p, n);
        let spec = match cfg.and_then(|c| c.modulus.as_ref()) {
            Some(m) => FieldSpec::new(p, m)?,
            None => FieldSpec::default_for(p, n)?,
        };
        self.reduce_to(&spec, cfg.and_then(|c| c.twist_alpha.as_deref()))
    }

    /// Reduction into an explicit field.
    pub fn reduce_to(&self, spec: &Arc<FieldSpec>, alpha: Option<&str>) -> Result<ReducedModel<'_>, ModelError> {
        let p = spec.characteristic();
        if self.level.is_multiple_of(p) {
            return Err(ModelError::BadPrime { p, reason: format!("{p} divides the level {}", self.level) });
        }
        let curve = match self.equation.map_coefficients(|c| c.reduce(spec)) {
            Ok(Some(c)) => c,
            Ok(None) => {
                return Err(ModelError::BadPrime { p, reason: "a coefficient has p in its denominator".into() })
            }
            Err(CurveError::Singular) => {
                return Err(ModelError::BadPrime { p, reason: "the reduction is singular".into() })
            }
            Err(e) => return Err(e.into()),
        };
        let alpha = match alpha {
            Some(a) => FieldElement::parse(spec, a)?,
            None => smallest_nonsquare(spec)?,
        };
        Ok(ReducedModel { model: self, spec: spec.clone(), curve, alpha })
    }
}

fn smallest_nonsquare(spec: &Arc<FieldSpec>) -> Result<FieldElement, ModelError> {
    let found = enumerate_field(spec, EnumerationBudget(u64::MAX))?.find(|x| !x.is_zero() && !x.is_square());
    // characteristic 2: every element is a square; twists are unsupported there anyway
    Ok(found.unwrap_or_else(|| FieldElement::one(spec)))
}

/// Reduction of a rational point; a coordinate with `p` in its denominator
/// sends the point to infinity.
pub fn reduce_point(p: &CurvePoint<Rational>, spec: &Arc<FieldSpec>) -> CurvePoint<FieldElement> {
    p.map(|c| c.reduce(spec))
}

/// A model reduced into a concrete finite field.
#[derive(Debug, Clone)]
pub struct ReducedModel<'m> {
    pub model: &'m ModularCurveModel,
    pub spec: Arc<FieldSpec>,
    pub curve: WeierstrassCurve<FieldElement>,
    /// Non-square used for quadratic twists.
    pub alpha: FieldElement,
}

impl ReducedModel<'_> {
    pub fn reduce_point(&self, p: &CurvePoint<Rational>) -> CurvePoint<FieldElement> {
        reduce_point(p, &self.spec)
    }

    pub fn j_of_point(&self, p: &CurvePoint<FieldElement>) -> Result<FieldElement, ModelError> {
        self.curve.validate(p)?;
        let spec = self.spec.clone();
        self.model.j_with(p, &move |r| r.reduce(&spec))
    }

    pub fn apply(&self, inv: &Involution, p: &CurvePoint<FieldElement>) -> Result<CurvePoint<FieldElement>, ModelError> {
        let t = self.reduce_point(&inv.translation);
        Ok(inv.apply_with(&self.curve, &t, p)?)
    }

    pub fn apply_involution(&self, name: &str, p: &CurvePoint<FieldElement>) -> Result<CurvePoint<FieldElement>, ModelError> {
        self.apply(self.model.involution(name)?, p)
    }

    /// Reductions of the quadratic-cusp images of a branch.
    pub fn forbidden_traces(&self, branch: &str) -> Vec<CurvePoint<FieldElement>> {
        self.model.quadratic_cusp_images_for(branch).into_iter().map(|p| self.reduce_point(p)).collect()
    }
}

pub fn builtin_model_file() -> ModelFile {
    parse_model_file(BUILTIN).expect("builtin model file is valid")
}

pub fn parse_model_file(text: &str) -> Result<ModelFile, ModelError> {
    let file: ModelFile = toml::from_str(text).map_err(|e| ModelError::Config(e.to_string()))?;
    if file.format_version != FORMAT_VERSION {
        return Err(ModelError::Config(format!(
            "unsupported format_version {} (expected {FORMAT_VERSION})",
            file.format_version
        )));
    }
    Ok(file)
}

pub fn models_from_text(text: &str) -> Result<Vec<ModularCurveModel>, ModelError> {
    parse_model_file(text)?.models.iter().map(ModularCurveModel::from_config).collect()
}

pub fn builtin_models() -> Vec<ModularCurveModel> {
    models_from_text(BUILTIN).expect("builtin models are valid")
}

pub fn load_models(path: &Path) -> Result<Vec<ModularCurveModel>, ModelError> {
    let text = std::fs::read_to_string(path).map_err(|e| ModelError::Config(format!("{}: {e}", path.display())))?;
    models_from_text(&text)
}

/// Finds a builtin model by id, or loads the single model in a config file.
pub fn resolve_model(id_or_path: &str) -> Result<ModularCurveModel, ModelError> {
    if let Some(m) = builtin_models().into_iter().find(|m| m.id == id_or_path) {
        return Ok(m);
    }
    let path = Path::new(id_or_path);
    if !path.exists() {
        return Err(ModelError::UnknownModel(id_or_path.to_string()));
    }
    let mut models = load_models(path)?;
    if models.len() != 1 {
        return Err(ModelError::Config(format!("{} defines {} models, expected one", path.display(), models.len())));
    }
    Ok(models.pop().unwrap())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalTorsionTable {
    /// Identity first, then affine points by `(x, y)`.
    pub points: Vec<CurvePoint<Rational>>,
    pub orders: Vec<u64>,
    pub structure: GroupStructure,
}

fn to_i128(r: &Rational) -> Result<i128, ModelError> {
    if !r.is_integer() {
        return Err(ModelError::NonIntegral);
    }
    r.to_i128().ok_or(ModelError::Overflow)
}

/// Integer roots of the monic cubic `x^3 + a x^2 + b x + c`.
fn integer_roots(a: i128, b: i128, c: i128) -> Result<Vec<i128>, ModelError> {
    let eval = |x: i128| -> Option<i128> {
        x.checked_add(a)?.checked_mul(x)?.checked_add(b)?.checked_mul(x)?.checked_add(c)
    };
    let mut candidates = Vec::new();
    if c == 0 {
        candidates.push(0);
        // remaining roots divide b, or are roots of x + a when b = 0
        if b == 0 {
            candidates.push(-a);
        } else {
            candidates.extend(signed_divisors(b)?);
        }
    } else {
        candidates.extend(signed_divisors(c)?);
    }
    let mut roots = Vec::new();
    for x in candidates {
        if eval(x) == Some(0) && !roots.contains(&x) {
            roots.push(x);
        }
    }
    roots.sort();
    Ok(roots)
}

fn signed_divisors(n: i128) -> Result<Vec<i128>, ModelError> {
    let n = n.checked_abs().ok_or(ModelError::Overflow)?;
    let mut out = Vec::new();
    let mut d: i128 = 1;
    while d * d <= n {
        if n % d == 0 {
            for v in [d, n / d] {
                out.push(v);
                out.push(-v);
            }
        }
        d += 1;
    }
    Ok(out)
}

/// Positive `y` with `y^2 | n`.
fn square_divisor_roots(n: i128) -> Result<Vec<i128>, ModelError> {
    let n = n.checked_abs().ok_or(ModelError::Overflow)?;
    let mut out = Vec::new();
    let mut y: i128 = 1;
    while y * y <= n {
        if n % (y * y) == 0 {
            out.push(y);
        }
        y += 1;
    }
    Ok(out)
}

/// Rational torsion of a curve with integral coefficients, via Lutz-Nagell
/// on `Y^2 = X^3 + b2 X^2 + 8 b4 X + 16 b6` where `X = 4x`, `Y = 8y + 4 a1 x + 4 a3`.
pub fn rational_torsion(curve: &WeierstrassCurve<Rational>) -> Result<RationalTorsionTable, ModelError> {
    let [a1, _, a3, _, _] = curve.coefficients();
    for c in curve.coefficients() {
        to_i128(c)?;
    }
    let q = |n: i64| Rational::from_int(n);
    let a = to_i128(&curve.b2())?;
    let b = to_i128(&q(8).mul(&curve.b4()))?;
    let c = to_i128(&q(16).mul(&curve.b6()))?;
    let short = WeierstrassCurve::from_a2_a4_a6(curve.b2(), q(8).mul(&curve.b4()), q(16).mul(&curve.b6()))?;
    let disc = cubic_discriminant(a, b, c)?;

    let mut candidates: Vec<(i128, i128)> = integer_roots(a, b, c)?.into_iter().map(|x| (x, 0)).collect();
    for y in square_divisor_roots(disc)? {
        let y2 = y * y;
        for x in integer_roots(a, b, c.checked_sub(y2).ok_or(ModelError::Overflow)?)? {
            candidates.push((x, y));
            candidates.push((x, -y));
        }
    }

    let mut points = vec![CurvePoint::Infinity];
    let mut orders = vec![1];
    for (x, y) in candidates {
        let big = |v: i128| Rational(num_rational::BigRational::from_integer(BigInt::from(v)));
        let p = CurvePoint::affine(big(x), big(y));
        let Some(order) = lutz_nagell_order(&short, &p) else { continue };
        // back to the original model
        let xr = big(x).div(&q(4)).expect("nonzero");
        let yr = big(y)
            .sub(&q(4).mul(a1).mul(&xr))
            .sub(&q(4).mul(a3))
            .div(&q(8))
            .expect("nonzero");
        points.push(CurvePoint::affine(xr, yr));
        orders.push(order);
    }
    let mut paired: Vec<_> = points.into_iter().zip(orders).collect();
    paired.sort_by_key(|(p, _)| point_key(p));
    paired.dedup_by(|a, b| a.0 == b.0);
    let (points, orders): (Vec<_>, Vec<_>) = paired.into_iter().unzip();
    let n = points.len() as u64;
    let n1 = orders.iter().copied().max().unwrap_or(1);
    let structure = GroupStructure { n2: n / n1, n1 };
    Ok(RationalTorsionTable { points, orders, structure })
}

fn point_key(p: &CurvePoint<Rational>) -> (bool, Option<Rational>, Option<Rational>) {
    (!p.is_infinity(), p.x().cloned(), p.y().cloned())
}

fn cubic_discriminant(a: i128, b: i128, c: i128) -> Result<i128, ModelError> {
    let big = |v: i128| BigInt::from(v);
    let (a, b, c) = (big(a), big(b), big(c));
    let d = -BigInt::from(4) * &a * &a * &a * &c + &a * &a * &b * &b + BigInt::from(18) * &a * &b * &c
        - BigInt::from(4) * &b * &b * &b
        - BigInt::from(27) * &c * &c;
    i128::try_from(d).map_err(|_| ModelError::Overflow)
}

/// The order of `p` if some multiple up to [`TORSION_SEARCH`] is the identity
/// while all earlier multiples stay integral.
fn lutz_nagell_order(curve: &WeierstrassCurve<Rational>, p: &CurvePoint<Rational>) -> Option<u64> {
    let mut acc = p.clone();
    for k in 1..=TORSION_SEARCH {
        match &acc {
            CurvePoint::Infinity => return Some(k),
            CurvePoint::Affine { x, y } if !(x.is_integer() && y.is_integer()) => return None,
            _ => {}
        }
        acc = curve.add(&acc, p);
    }
    None
}
