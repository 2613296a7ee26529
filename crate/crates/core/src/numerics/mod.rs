//! Scalar arithmetic behind every geometric predicate.
//!
//! Three representations share one [`Scalar`] type: exact rationals, values of a
//! single quadratic extension `p + q*sqrt(c)`, and outward-rounded dyadic
//! intervals that remember their defining expression. Comparisons are exact for
//! the first two; interval comparisons escalate the working precision
//! (64, 128, 256, ... bits up to [`precision_cap`]) before giving up with
//! [`Comparison::Indeterminate`].

mod interval;
mod quad;
mod rational;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_traits::Signed;
use thiserror::Error;

pub use interval::{Expr, Interval};
pub use quad::QuadExt;
pub use rational::{sqrt_lower_upper, square_free_split, Rational};

/// Environment variable overriding the interval precision cap (bits).
pub const PRECISION_CAP_ENV: &str = "DISPERSAL_PRECISION_CAP";
const DEFAULT_PRECISION_CAP: u32 = 1024;
const BASE_PRECISION: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumericsError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Upper limit for interval precision escalation.
pub fn precision_cap() -> u32 {
    static CAP: OnceLock<u32> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var(PRECISION_CAP_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<u32>().ok())
            .filter(|&v| v >= BASE_PRECISION)
            .unwrap_or(DEFAULT_PRECISION_CAP)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Comparison {
    Less,
    Equal,
    Greater,
    Indeterminate,
}

impl Comparison {
    pub fn from_ordering(o: Ordering) -> Self {
        match o {
            Ordering::Less => Comparison::Less,
            Ordering::Equal => Comparison::Equal,
            Ordering::Greater => Comparison::Greater,
        }
    }

    pub fn ordering(self) -> Option<Ordering> {
        match self {
            Comparison::Less => Some(Ordering::Less),
            Comparison::Equal => Some(Ordering::Equal),
            Comparison::Greater => Some(Ordering::Greater),
            Comparison::Indeterminate => None,
        }
    }

    pub fn reverse(self) -> Self {
        match self {
            Comparison::Less => Comparison::Greater,
            Comparison::Greater => Comparison::Less,
            c => c,
        }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub enum Scalar {
    Rational(Rational),
    Quad(QuadExt),
    Interval(Interval),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Rational(Rational::zero())
    }

    /// Wraps a quadratic-extension value, collapsing it to a rational when the
    /// radical vanishes.
    pub fn quad(v: QuadExt) -> Self {
        match v.as_rational() {
            Some(r) => Scalar::Rational(r.clone()),
            None => Scalar::Quad(v),
        }
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Scalar::Rational(r) => Some(r),
            Scalar::Quad(v) => v.as_rational(),
            Scalar::Interval(_) => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, Scalar::Interval(_))
    }

    fn as_quad(&self) -> Option<QuadExt> {
        match self {
            Scalar::Rational(r) => Some(QuadExt::new(r.clone(), Rational::zero(), Rational::zero())),
            Scalar::Quad(v) => Some(v.clone()),
            Scalar::Interval(_) => None,
        }
    }

    pub fn to_expr(&self) -> Arc<Expr> {
        match self {
            Scalar::Rational(r) => Arc::new(Expr::Const(r.clone())),
            Scalar::Quad(v) => v.to_expr(),
            Scalar::Interval(i) => i.expr().clone(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Rational(r) => r.to_f64(),
            Scalar::Quad(v) => v.to_f64(),
            Scalar::Interval(i) => i.midpoint().to_f64(),
        }
    }

    /// Enclosure of the value at the given precision.
    pub fn enclosure(&self, prec: u32) -> (Rational, Rational) {
        match self {
            Scalar::Rational(r) => (r.clone(), r.clone()),
            _ => self.to_expr().eval(prec),
        }
    }

    fn combine(
        &self,
        other: &Scalar,
        quad_op: impl Fn(&QuadExt, &QuadExt) -> Option<QuadExt>,
        expr_op: impl Fn(Arc<Expr>, Arc<Expr>) -> Expr,
    ) -> Scalar {
        if let (Some(a), Some(b)) = (self.as_quad(), other.as_quad()) {
            if let Some(v) = quad_op(&a, &b) {
                return Scalar::quad(v);
            }
        }
        let expr = Arc::new(expr_op(self.to_expr(), other.to_expr()));
        Scalar::Interval(Interval::from_expr(expr, BASE_PRECISION))
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        if let (Scalar::Rational(a), Scalar::Rational(b)) = (self, other) {
            return Scalar::Rational(a + b);
        }
        self.combine(other, QuadExt::add, Expr::Add)
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        if let (Scalar::Rational(a), Scalar::Rational(b)) = (self, other) {
            return Scalar::Rational(a - b);
        }
        self.combine(other, QuadExt::sub, Expr::Sub)
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        if let (Scalar::Rational(a), Scalar::Rational(b)) = (self, other) {
            return Scalar::Rational(a * b);
        }
        self.combine(other, QuadExt::mul, Expr::Mul)
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rational(r) => Scalar::Rational(-r),
            Scalar::Quad(v) => Scalar::Quad(v.neg()),
            Scalar::Interval(i) => {
                Scalar::Interval(Interval::from_expr(Arc::new(Expr::Neg(i.expr().clone())), i.precision()))
            }
        }
    }

    pub fn square(&self) -> Scalar {
        self.mul(self)
    }
}

impl From<Rational> for Scalar {
    fn from(r: Rational) -> Self {
        Scalar::Rational(r)
    }
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Self {
        Scalar::Rational(Rational::from(v))
    }
}

/// Three-way comparison, exact for rationals and same-radicand quadratic values.
pub fn compare(a: &Scalar, b: &Scalar) -> Comparison {
    compare_with_cap(a, b, precision_cap())
}

pub fn compare_with_cap(a: &Scalar, b: &Scalar, cap: u32) -> Comparison {
    if let (Scalar::Rational(x), Scalar::Rational(y)) = (a, b) {
        return Comparison::from_ordering(x.cmp(y));
    }
    if let (Some(x), Some(y)) = (a.as_quad(), b.as_quad()) {
        if let Some(diff) = x.sub(&y) {
            return Comparison::from_ordering(diff.signum().cmp(&0));
        }
    }
    let diff = Expr::Sub(a.to_expr(), b.to_expr());
    let mut prec = BASE_PRECISION;
    loop {
        let (lo, hi) = diff.eval(prec);
        if lo.is_positive() {
            return Comparison::Greater;
        }
        if hi.is_negative() {
            return Comparison::Less;
        }
        if lo.is_zero() && hi.is_zero() {
            return Comparison::Equal;
        }
        if prec >= cap {
            return Comparison::Indeterminate;
        }
        prec = (prec * 2).min(cap);
    }
}

/// Tightens an interval by re-evaluating its expression; raw enclosures are returned as is.
pub fn refine(x: &Interval, precision: u32) -> Interval {
    x.refine(precision)
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => write!(f, "{r}"),
            Scalar::Quad(v) => write!(f, "{v}"),
            Scalar::Interval(i) => f.write_str(&interval_to_tilde(i)),
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Scalar {
    type Err = NumericsError;

    /// Accepts a rational, `p+q*sqrt(c)`, or a tilde decimal such as `1.7320508~`.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let text = text.trim();
        if let Some(body) = text.strip_suffix('~') {
            return parse_tilde(body).map(Scalar::Interval);
        }
        if let Some(idx) = text.find("*sqrt(") {
            let bad = || NumericsError::Parse(format!("bad quadratic literal `{text}`"));
            let head = &text[..idx];
            let tail = &text[idx + "*sqrt(".len()..];
            let radicand = tail.strip_suffix(')').ok_or_else(bad)?;
            let split = head[1..].rfind('+').map(|i| i + 1).ok_or_else(bad)?;
            let p: Rational = head[..split].parse()?;
            let q: Rational = head[split + 1..].parse()?;
            let c: Rational = radicand.parse()?;
            if c.is_negative() {
                return Err(NumericsError::Domain(format!("negative radicand in `{text}`")));
            }
            return Ok(Scalar::quad(QuadExt::new(p, q, c)));
        }
        Ok(Scalar::Rational(text.parse()?))
    }
}

fn parse_tilde(body: &str) -> Result<Interval, NumericsError> {
    let bad = || NumericsError::Parse(format!("bad approximate decimal `{body}~`"));
    let (neg, digits) = match body.as_bytes().first() {
        Some(b'-') => (true, &body[1..]),
        Some(b'+') => (false, &body[1..]),
        _ => (false, body),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    let all_digits = |s: &str| s.bytes().all(|b| b.is_ascii_digit());
    if !all_digits(int_part) || !all_digits(frac_part) {
        return Err(bad());
    }
    let places = frac_part.len() as u32;
    let mantissa: BigInt = format!("{int_part}{frac_part}").parse().map_err(|_| bad())?;
    let scale = BigInt::from(10u32).pow(places);
    let mut value = Rational::new(mantissa, scale.clone());
    if neg {
        value = -value;
    }
    let ulp = Rational::new(1, scale);
    let prec = BASE_PRECISION.max(4 * (int_part.len() as u32 + places) + 16);
    Ok(Interval::raw(&value - &ulp, &value + &ulp, prec))
}

/// Decimal midpoint with enough digits that `value ± 10^-digits` still encloses the interval.
fn interval_to_tilde(i: &Interval) -> String {
    const MAX_PLACES: u32 = 400;
    let width = i.width();
    let ten = Rational::from(10);
    let mut places: u32 = 0;
    let mut unit = Rational::one();
    loop {
        let next = &unit / &ten;
        if places >= MAX_PLACES || next < width {
            break;
        }
        unit = next;
        places += 1;
    }
    let scaled = i.midpoint() * Rational::from_integer(BigInt::from(10u32).pow(places));
    let rounded = (scaled + Rational::new(1, 2)).floor();
    let negative = rounded.is_negative();
    let digits = format!("{:0>width$}", rounded.abs().to_string(), width = places as usize + 1);
    let (ip, fp) = digits.split_at(digits.len() - places as usize);
    let sign = if negative { "-" } else { "" };
    if fp.is_empty() {
        format!("{sign}{ip}~")
    } else {
        format!("{sign}{ip}.{fp}~")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(text: &str) -> Scalar {
        text.parse().unwrap()
    }

    #[test]
    fn compare_examples() {
        assert_eq!(compare(&s("3"), &s("3/1")), Comparison::Equal);
        assert_eq!(compare(&s("0+1*sqrt(3)"), &s("2")), Comparison::Less);
        // distinct radicands fall back to intervals but still resolve
        assert_eq!(compare(&s("1+1*sqrt(2)"), &s("1+1*sqrt(3)")), Comparison::Less);
    }

    #[test]
    fn equal_values_with_distinct_radicands_are_indeterminate() {
        // sqrt(2)*sqrt(3) - sqrt(6) == 0 but mixes radicands
        let a = s("0+1*sqrt(2)").mul(&s("0+1*sqrt(3)"));
        let b = s("0+1*sqrt(6)");
        assert_eq!(compare_with_cap(&a, &b, 256), Comparison::Indeterminate);
    }

    #[test]
    fn quad_literal_round_trip() {
        for lit in ["0+1*sqrt(3)", "-1/2+-3/4*sqrt(5)", "7+2*sqrt(2)"] {
            assert_eq!(s(lit).to_string(), lit);
        }
        assert_eq!(s("1+2*sqrt(4)"), s("5"));
        assert!("1+1*sqrt(-3)".parse::<Scalar>().is_err());
    }

    #[test]
    fn tilde_decimal_encloses_its_digits() {
        let v = s("1.7320508~");
        let Scalar::Interval(i) = &v else { panic!("expected interval") };
        assert!(i.contains(&"17320508/10000000".parse().unwrap()));
        assert!(i.width() <= "3/10000000".parse().unwrap());
        assert_eq!(compare(&v, &s("0+1*sqrt(3)")), Comparison::Indeterminate);
        assert_eq!(compare(&v, &s("2")), Comparison::Less);
    }

    #[test]
    fn tilde_text_reparses_to_enclosure() {
        let v = s("-2.5~");
        let text = v.to_string();
        let Scalar::Interval(orig) = &v else { unreachable!() };
        let Scalar::Interval(back) = s(&text) else { panic!("{text}") };
        assert!(orig.is_within(&back), "{text}");
    }

    #[test]
    fn mixed_arithmetic_stays_exact_when_possible() {
        let a = s("1+1*sqrt(3)");
        let b = s("2+-1*sqrt(3)");
        assert_eq!(a.add(&b), s("3"));
        assert!(matches!(a.mul(&s("0+1*sqrt(2)")), Scalar::Interval(_)));
    }
}
