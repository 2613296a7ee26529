use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::NumericsError;

/// Arbitrary-precision rational, always in lowest terms with a positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Self {
        Rational(BigRational::new(numer.into(), denom.into()))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn signum(&self) -> i32 {
        match self.0.numer().sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn square(&self) -> Self {
        Rational(&self.0 * &self.0)
    }

    pub fn recip(&self) -> Self {
        Rational(self.0.recip())
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn ceil(&self) -> BigInt {
        self.0.ceil().to_integer()
    }

    /// Multiplies by `2^exp` (exp may be negative).
    pub fn mul_pow2(&self, exp: i64) -> Self {
        if exp >= 0 {
            Rational::new(self.numer() << (exp as usize), self.denom().clone())
        } else {
            Rational::new(self.numer().clone(), self.denom() << ((-exp) as usize))
        }
    }

    pub fn to_f64(&self) -> f64 {
        if let Some(v) = self.0.to_f64() {
            if v.is_finite() {
                return v;
            }
        }
        // Very large numerators or denominators: scale through bit lengths.
        let nb = self.numer().bits() as i64;
        let db = self.denom().bits() as i64;
        let shift = nb - db - 60;
        let scaled = self.mul_pow2(-shift);
        scaled.0.to_f64().unwrap_or(0.0) * 2f64.powi(shift as i32)
    }

    /// Exact conversion of a finite `f64` (every finite double is a dyadic rational).
    pub fn from_f64(v: f64) -> Option<Self> {
        BigRational::from_float(v).map(Rational)
    }

    /// Exact square root when `self` is the square of a rational.
    pub fn exact_sqrt(&self) -> Option<Rational> {
        if self.is_negative() {
            return None;
        }
        let n = self.numer().sqrt();
        let d = self.denom().sqrt();
        if &(&n * &n) == self.numer() && &(&d * &d) == self.denom() {
            Some(Rational::new(n, d))
        } else {
            None
        }
    }

    pub fn is_perfect_square(&self) -> bool {
        self.exact_sqrt().is_some()
    }

    /// Floor of log2 of the absolute value; `None` for zero.
    pub fn log2_floor(&self) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        let n = self.numer().abs();
        let d = self.denom();
        let mut e = n.bits() as i64 - d.bits() as i64;
        // 2^e <= n/d < 2^(e+1) after adjustment
        let lhs = |e: i64| -> Ordering {
            if e >= 0 {
                n.cmp(&(d << (e as usize)))
            } else {
                (&n << ((-e) as usize)).cmp(d)
            }
        };
        if lhs(e) == Ordering::Less {
            e -= 1;
        }
        Some(e)
    }

    pub fn min(self, other: Rational) -> Rational {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Rational) -> Rational {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }
}

impl From<i64> for Rational {
    fn from(v: i64) -> Self {
        Rational::from_integer(v)
    }
}

impl From<BigInt> for Rational {
    fn from(v: BigInt) -> Self {
        Rational::from_integer(v)
    }
}

impl From<BigRational> for Rational {
    fn from(v: BigRational) -> Self {
        Rational(v)
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

fn parse_int(s: &str) -> Option<BigInt> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigInt::from_str(s).ok()
}

impl FromStr for Rational {
    type Err = NumericsError;

    /// Optional sign, then an integer or `p/q` with `q > 0`.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let bad = || NumericsError::Parse(format!("bad rational `{text}`"));
        let (neg, body) = match text.as_bytes().first() {
            Some(b'-') => (true, &text[1..]),
            Some(b'+') => (false, &text[1..]),
            _ => (false, text),
        };
        let value = match body.split_once('/') {
            None => Rational::from_integer(parse_int(body).ok_or_else(bad)?),
            Some((p, q)) => {
                let p = parse_int(p).ok_or_else(bad)?;
                let q = parse_int(q).ok_or_else(bad)?;
                if q.is_zero() {
                    return Err(bad());
                }
                Rational::new(p, q)
            }
        };
        Ok(if neg { -value } else { value })
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational(self.0.$method(&rhs.0))
            }
        }
        impl $trait<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((&self.0).$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

/// Rational bracket of a square root: `lo <= sqrt(x) <= hi`, `hi - lo <= 1/denom_bound`.
///
/// The root is returned exactly when it is a rational whose denominator fits the
/// bound; otherwise both ends are multiples of `1/denom_bound`.
pub fn sqrt_lower_upper(x: &Rational, denom_bound: &BigInt) -> Result<(Rational, Rational), NumericsError> {
    if x.is_negative() {
        return Err(NumericsError::Domain(format!("square root of negative value {x}")));
    }
    if !denom_bound.is_positive() {
        return Err(NumericsError::Domain("denominator bound must be positive".into()));
    }
    if let Some(root) = x.exact_sqrt() {
        if root.denom() <= &(denom_bound * 2) {
            return Ok((root.clone(), root));
        }
    }
    // m = floor(sqrt(x) * B) = isqrt(floor(x * B^2))
    let b2 = denom_bound * denom_bound;
    let scaled = (x.numer() * &b2).div_floor(x.denom());
    let m = scaled.sqrt();
    let exact = &m * &m * x.denom() == x.numer() * &b2;
    let lo = Rational::new(m.clone(), denom_bound.clone());
    let hi = if exact { lo.clone() } else { Rational::new(m + 1, denom_bound.clone()) };
    Ok((lo, hi))
}

/// Splits a positive integer into `(f, r)` with `n = f^2 * r`, pulling out square
/// factors found by trial division and a final perfect-square test.
pub fn square_free_split(n: &BigInt) -> (BigInt, BigInt) {
    debug_assert!(n.is_positive());
    let mut rest = n.clone();
    let mut factor = BigInt::one();
    let mut p: u64 = 2;
    while p <= 10_000 {
        let pp = BigInt::from(p * p);
        if pp > rest {
            break;
        }
        let pb = BigInt::from(p);
        while (&rest % &pp).is_zero() {
            rest /= &pp;
            factor *= &pb;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let s = rest.sqrt();
    if &s * &s == rest {
        factor *= s;
        rest = BigInt::one();
    }
    (factor, rest)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn parses_sign_and_fraction() {
        assert_eq!(q("-6/4"), Rational::new(-3, 2));
        assert_eq!(q("+7"), Rational::from(7));
        assert!("1/0".parse::<Rational>().is_err());
        assert!("1/-2".parse::<Rational>().is_err());
        assert!("1.5".parse::<Rational>().is_err());
        assert!("".parse::<Rational>().is_err());
        assert_eq!(q("-6/4").to_string(), "-3/2");
    }

    #[test]
    fn sqrt_bracket_examples() {
        let b = BigInt::from(100);
        assert_eq!(sqrt_lower_upper(&q("4"), &b).unwrap(), (q("2"), q("2")));
        assert_eq!(sqrt_lower_upper(&q("0"), &BigInt::from(10)).unwrap(), (q("0"), q("0")));
        let (lo, hi) = sqrt_lower_upper(&q("3"), &BigInt::from(1000)).unwrap();
        assert_eq!((lo.clone(), hi.clone()), (q("1732/1000"), q("1733/1000")));
        assert!(lo.square() <= q("3") && q("3") <= hi.square());
        assert!(sqrt_lower_upper(&q("-1"), &b).is_err());
    }

    #[test]
    fn sqrt_of_square_with_large_denominator_brackets() {
        // sqrt(1/9) = 1/3 does not fit denominators <= 2
        let (lo, hi) = sqrt_lower_upper(&q("1/9"), &BigInt::from(1)).unwrap();
        assert_eq!((lo, hi), (q("0"), q("1")));
    }

    #[test]
    fn square_free_split_pulls_squares() {
        let (f, r) = square_free_split(&BigInt::from(12));
        assert_eq!((f, r), (BigInt::from(2), BigInt::from(3)));
        let (f, r) = square_free_split(&BigInt::from(49));
        assert_eq!((f, r), (BigInt::from(7), BigInt::from(1)));
    }

    #[test]
    fn log2_floor_matches_powers() {
        assert_eq!(q("1").log2_floor(), Some(0));
        assert_eq!(q("3").log2_floor(), Some(1));
        assert_eq!(q("1/3").log2_floor(), Some(-2));
        assert_eq!(q("-8").log2_floor(), Some(3));
    }
}
