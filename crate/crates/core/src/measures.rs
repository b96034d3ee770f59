//! Share functions, constancy measures and the value type they produce.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::engine::Rational;

/// Absolute tolerance for comparisons involving floating point values.
pub const FLOAT_TOLERANCE: f64 = 1e-12;

/// Either an exact rational or a float (only `κ_log` and custom κ yield floats).
#[derive(Clone, Debug)]
pub enum Value {
    Exact(Rational),
    Float(f64),
}

impl Value {
    pub fn zero() -> Self {
        Value::Exact(Rational::zero())
    }

    pub fn one() -> Self {
        Value::Exact(Rational::one())
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(r) => rational_to_f64(r),
            Value::Float(x) => *x,
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            Value::Exact(r) => Some(r),
            Value::Float(_) => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Value::Exact(_))
    }

    fn combine(
        &self,
        other: &Value,
        exact: impl Fn(&Rational, &Rational) -> Rational,
        float: impl Fn(f64, f64) -> f64,
    ) -> Value {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(exact(a, b)),
            _ => Value::Float(float(self.to_f64(), other.to_f64())),
        }
    }

    pub fn add(&self, other: &Value) -> Value {
        self.combine(other, |a, b| a + b, |a, b| a + b)
    }

    pub fn sub(&self, other: &Value) -> Value {
        self.combine(other, |a, b| a - b, |a, b| a - b)
    }

    pub fn mul(&self, other: &Value) -> Value {
        self.combine(other, |a, b| a * b, |a, b| a * b)
    }

    pub fn scale(&self, r: &Rational) -> Value {
        self.mul(&Value::Exact(r.clone()))
    }

    /// Exact equality for exact pairs, tolerance otherwise.
    pub fn approx_eq(&self, other: &Value) -> bool {
        self.cmp_tol(other) == Ordering::Equal
    }

    /// Total order with ties inside [`FLOAT_TOLERANCE`] when a float is involved.
    pub fn cmp_tol(&self, other: &Value) -> Ordering {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => a.cmp(b),
            _ => {
                let (a, b) = (self.to_f64(), other.to_f64());
                if (a - b).abs() <= FLOAT_TOLERANCE {
                    Ordering::Equal
                } else {
                    a.partial_cmp(&b).unwrap_or(Ordering::Equal)
                }
            }
        }
    }

    /// Strict total order (exact where possible) suitable for sorting.
    pub fn total_cmp(&self, other: &Value) -> Ordering {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => a.cmp(b),
            _ => self.to_f64().total_cmp(&other.to_f64()),
        }
    }

    pub fn ge(&self, other: &Value) -> bool {
        self.cmp_tol(other) != Ordering::Less
    }

    /// Exact `p/q` string, or the float printed with full precision.
    pub fn exact_string(&self) -> String {
        match self {
            Value::Exact(r) => rational_string(r),
            Value::Float(x) => format!("{x}"),
        }
    }

    /// Decimal rendering with 6 significant digits.
    pub fn decimal(&self) -> String {
        format_sig(self.to_f64(), 6)
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        self.approx_eq(other)
    }
}

impl From<Rational> for Value {
    fn from(r: Rational) -> Self {
        Value::Exact(r)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Value::Exact(r) => write!(f, "{} = {}", rational_string(r), self.decimal()),
            Value::Float(_) => write!(f, "{}", self.decimal()),
        }
    }
}

pub fn rational_string(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    match s.split_once('/') {
        Some((n, d)) => {
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rational::new(n.trim().parse().ok()?, d))
        }
        None => Some(Rational::from_integer(s.trim().parse().ok()?)),
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // extreme magnitudes: scale down both sides first
        let shift = r.denom().bits().max(r.numer().magnitude().bits()).saturating_sub(1000);
        let n = (r.numer() >> shift as usize).to_f64().unwrap_or(0.0);
        let d = (r.denom() >> shift as usize).to_f64().unwrap_or(1.0);
        n / d
    })
}

/// `x` with `sig` significant digits, trailing zeros trimmed.
pub fn format_sig(x: f64, sig: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let mag = x.abs().log10().floor() as i64;
    let decimals = (sig as i64 - 1 - mag).max(0) as usize;
    let s = format!("{x:.decimals$}");
    let s = if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MeasureError {
    #[error("share function must satisfy rho(0) = 1")]
    ShareNotNormalized,
    #[error("share function must be non-increasing and non-negative")]
    ShareNotMonotone,
    #[error("share function must vanish at infinity")]
    ShareNotVanishing,
    #[error("constancy measure must satisfy kappa(0) = kappa(1) = 1 and kappa(1/2) = 0")]
    KappaNotNormalized,
    #[error("constancy measure must be symmetric around 1/2")]
    KappaNotSymmetric,
    #[error("constancy measure must be convex")]
    KappaNotConvex,
    #[error("argument {0} outside [0, 1]")]
    OutOfRange(String),
    #[error("unknown {kind} {name:?}")]
    Unknown { kind: &'static str, name: String },
}

/// `ρ : ℕ ∪ {∞} → [0,1]`, non-increasing, `ρ(0) = 1`, `ρ(∞) = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ShareFunction {
    Exp,
    Frac,
    Step,
    /// Values for `k = 0..table.len()`, zero afterwards.
    Custom(Vec<Rational>),
}

impl ShareFunction {
    /// Validated custom table with an implicit zero tail.
    pub fn custom(table: Vec<Rational>) -> Result<Self, MeasureError> {
        Self::custom_with_tail(table, Rational::zero())
    }

    /// Validates a table whose value stays at `tail` beyond its end. Only a
    /// zero tail is admissible; the parameter exists so that callers with
    /// non-vanishing candidates get a precise error.
    pub fn custom_with_tail(table: Vec<Rational>, tail: Rational) -> Result<Self, MeasureError> {
        if table.first() != Some(&Rational::one()) {
            return Err(MeasureError::ShareNotNormalized);
        }
        let decreasing = table.windows(2).all(|w| w[1] <= w[0])
            && table.last().is_some_and(|l| *l >= tail)
            && !tail.is_negative();
        if !decreasing {
            return Err(MeasureError::ShareNotMonotone);
        }
        if !tail.is_zero() {
            return Err(MeasureError::ShareNotVanishing);
        }
        Ok(ShareFunction::Custom(table))
    }

    /// `ρ(k)`; `None` stands for `∞`.
    pub fn eval(&self, k: Option<usize>) -> Rational {
        let Some(k) = k else {
            return Rational::zero();
        };
        match self {
            ShareFunction::Exp => Rational::new(BigInt::one(), BigInt::one() << k),
            ShareFunction::Frac => Rational::new(BigInt::one(), BigInt::from(k + 1)),
            ShareFunction::Step => {
                if k == 0 {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            }
            ShareFunction::Custom(t) => t.get(k).cloned().unwrap_or_else(Rational::zero),
        }
    }

    pub fn name(&self) -> String {
        match self {
            ShareFunction::Exp => "exp".into(),
            ShareFunction::Frac => "frac".into(),
            ShareFunction::Step => "step".into(),
            ShareFunction::Custom(t) => format!(
                "custom({})",
                t.iter().map(rational_string).collect::<Vec<_>>().join(",")
            ),
        }
    }

    /// True when `ρ(k) = 0` for every `k ≥ 1`.
    pub fn is_step(&self) -> bool {
        match self {
            ShareFunction::Step => true,
            ShareFunction::Custom(t) => t[1..].iter().all(Zero::is_zero),
            _ => false,
        }
    }
}

impl FromStr for ShareFunction {
    type Err = MeasureError;

    /// `exp`, `frac`, `step` or a comma separated table such as `1,1/2,1/8`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exp" => Ok(ShareFunction::Exp),
            "frac" => Ok(ShareFunction::Frac),
            "step" => Ok(ShareFunction::Step),
            _ => {
                let table: Option<Vec<Rational>> = s.split(',').map(parse_rational).collect();
                match table {
                    Some(t) if s.contains(',') || s == "1" => ShareFunction::custom(t),
                    _ => Err(MeasureError::Unknown {
                        kind: "share function",
                        name: s.to_string(),
                    }),
                }
            }
        }
    }
}

/// `κ : [0,1] → [0,1]`, symmetric, convex, `κ(0) = 1`, `κ(1/2) = 0`.
#[derive(Clone)]
pub enum ConstancyMeasure {
    Quad,
    Log,
    Abs,
    Custom {
        name: String,
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

impl fmt::Debug for ConstancyMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ConstancyMeasure({})", self.name())
    }
}

impl PartialEq for ConstancyMeasure {
    fn eq(&self, other: &Self) -> bool {
        self.name() == other.name()
    }
}

impl ConstancyMeasure {
    /// Validates a custom measure on a grid of 1025 points.
    pub fn custom(
        name: &str,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self, MeasureError> {
        const GRID: usize = 1024;
        let tol = 1e-9;
        if (f(0.0) - 1.0).abs() > tol || (f(1.0) - 1.0).abs() > tol || f(0.5).abs() > tol {
            return Err(MeasureError::KappaNotNormalized);
        }
        let pts: Vec<f64> = (0..=GRID).map(|i| f(i as f64 / GRID as f64)).collect();
        if (0..=GRID).any(|i| (pts[i] - pts[GRID - i]).abs() > tol) {
            return Err(MeasureError::KappaNotSymmetric);
        }
        if pts.windows(3).any(|w| w[0] + w[2] - 2.0 * w[1] < -tol) {
            return Err(MeasureError::KappaNotConvex);
        }
        Ok(ConstancyMeasure::Custom {
            name: name.to_string(),
            f: Arc::new(f),
        })
    }

    pub fn name(&self) -> String {
        match self {
            ConstancyMeasure::Quad => "quad".into(),
            ConstancyMeasure::Log => "log".into(),
            ConstancyMeasure::Abs => "abs".into(),
            ConstancyMeasure::Custom { name, .. } => name.clone(),
        }
    }

    /// Whether the composition with Banzhaf/Shapley is known to be importance inducing.
    pub fn is_certified(&self) -> bool {
        matches!(self, ConstancyMeasure::Quad)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, ConstancyMeasure::Quad | ConstancyMeasure::Abs)
    }

    pub fn eval(&self, a: &Rational) -> Result<Value, MeasureError> {
        if a.is_negative() || *a > Rational::one() {
            return Err(MeasureError::OutOfRange(rational_string(a)));
        }
        let half = Rational::new(1.into(), 2.into());
        Ok(match self {
            ConstancyMeasure::Quad => {
                let d = a - &half;
                Value::Exact(Rational::from_integer(4.into()) * &d * &d)
            }
            ConstancyMeasure::Abs => Value::Exact(Rational::from_integer(2.into()) * (a - &half).abs()),
            ConstancyMeasure::Log => Value::Float(kappa_log(rational_to_f64(a))),
            ConstancyMeasure::Custom { f, .. } => Value::Float(f(rational_to_f64(a))),
        })
    }

    /// `κ(c / 2^s)` for a count `c ≤ 2^s`.
    pub fn eval_dyadic(&self, c: u64, s: u32) -> Value {
        self.eval(&Rational::new(c.into(), BigInt::one() << s as usize))
            .expect("dyadic argument within [0, 1]")
    }
}

fn kappa_log(a: f64) -> f64 {
    let xlx = |x: f64| if x <= 0.0 { 0.0 } else { x * x.log2() };
    1.0 + xlx(a) + xlx(1.0 - a)
}

impl FromStr for ConstancyMeasure {
    type Err = MeasureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "quad" => Ok(ConstancyMeasure::Quad),
            "log" => Ok(ConstancyMeasure::Log),
            "abs" => Ok(ConstancyMeasure::Abs),
            _ => Err(MeasureError::Unknown {
                kind: "constancy measure",
                name: s.to_string(),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn share_instances() {
        assert_eq!(ShareFunction::Exp.eval(Some(1)), q(1, 2));
        assert_eq!(ShareFunction::Frac.eval(Some(2)), q(1, 3));
        assert_eq!(ShareFunction::Step.eval(Some(3)), q(0, 1));
        for r in [ShareFunction::Exp, ShareFunction::Frac, ShareFunction::Step] {
            assert_eq!(r.eval(Some(0)), q(1, 1));
            assert_eq!(r.eval(None), q(0, 1));
        }
        assert!(ShareFunction::Step.is_step());
        assert!(!ShareFunction::Exp.is_step());
    }

    #[test]
    fn share_validation() {
        let ones = vec![q(1, 1); 3];
        assert_eq!(
            ShareFunction::custom_with_tail(ones.clone(), q(1, 1)),
            Err(MeasureError::ShareNotVanishing)
        );
        assert!(ShareFunction::custom(ones).is_ok());
        assert_eq!(
            ShareFunction::custom(vec![q(1, 2)]),
            Err(MeasureError::ShareNotNormalized)
        );
        assert_eq!(
            ShareFunction::custom(vec![q(1, 1), q(1, 4), q(1, 2)]),
            Err(MeasureError::ShareNotMonotone)
        );
        let t: ShareFunction = "1,1/2,1/8".parse().unwrap();
        assert_eq!(t.eval(Some(2)), q(1, 8));
        assert_eq!(t.eval(Some(3)), q(0, 1));
        assert!("bogus".parse::<ShareFunction>().is_err());
    }

    #[test]
    fn kappa_instances() {
        let abs = ConstancyMeasure::Abs;
        assert_eq!(abs.eval(&q(3, 4)).unwrap(), Value::Exact(q(1, 2)));
        assert_eq!(abs.eval(&q(1, 1)).unwrap(), Value::Exact(q(1, 1)));
        assert_eq!(ConstancyMeasure::Quad.eval(&q(1, 2)).unwrap(), Value::zero());
        let l = ConstancyMeasure::Log;
        assert!((l.eval(&q(0, 1)).unwrap().to_f64() - 1.0).abs() < FLOAT_TOLERANCE);
        assert!(l.eval(&q(1, 2)).unwrap().to_f64().abs() < FLOAT_TOLERANCE);
        assert!(abs.eval(&q(3, 2)).is_err());
    }

    #[test]
    fn kappa_validation() {
        assert!(ConstancyMeasure::custom("sq", |a| (2.0 * a - 1.0).powi(2)).is_ok());
        assert_eq!(
            ConstancyMeasure::custom("skew", |a| if a < 0.5 { 1.0 - 2.0 * a } else { (2.0 * a - 1.0).powi(2) })
                .unwrap_err(),
            MeasureError::KappaNotSymmetric
        );
        assert_eq!(
            ConstancyMeasure::custom("bump", |a| {
                let d = (2.0 * a - 1.0).abs();
                d.sqrt()
            })
            .unwrap_err(),
            MeasureError::KappaNotConvex
        );
        assert_eq!(
            ConstancyMeasure::custom("off", |_| 1.0).unwrap_err(),
            MeasureError::KappaNotNormalized
        );
    }

    #[test]
    fn quad_identity_on_grid() {
        let k = ConstancyMeasure::Quad;
        let half = q(1, 2);
        for i in 0..=16 {
            for j in 0..=16 {
                let (a, b) = (q(i, 16), q(j, 16));
                let lhs = k.eval(&a).unwrap().scale(&half)
                    .add(&k.eval(&b).unwrap().scale(&half))
                    .sub(&k.eval(&((&a + &b) * &half)).unwrap());
                let d = &a - &b;
                assert_eq!(lhs, Value::Exact(&d * &d));
            }
        }
    }

    #[test]
    fn formatting() {
        assert_eq!(format_sig(0.625, 6), "0.625");
        assert_eq!(format_sig(0.71875, 6), "0.71875");
        assert_eq!(format_sig(1.0 / 3.0, 6), "0.333333");
        assert_eq!(format_sig(0.0, 6), "0");
        assert_eq!(Value::Exact(q(5, 8)).to_string(), "5/8 = 0.625");
        assert_eq!(Value::Exact(q(1, 1)).to_string(), "1");
        assert_eq!(parse_rational("5/8"), Some(q(5, 8)));
        assert_eq!(parse_rational("3"), Some(q(3, 1)));
        assert_eq!(parse_rational("1/0"), None);
    }
}
