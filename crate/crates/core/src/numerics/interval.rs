use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use super::rational::Rational;

/// Defining expression of an interval value, kept so the value can be re-evaluated
/// at a higher working precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Const(Rational),
    /// Square root of a non-negative rational.
    Sqrt(Rational),
    /// An enclosure with no known defining expression.
    Raw(Rational, Rational),
    Add(Arc<Expr>, Arc<Expr>),
    Sub(Arc<Expr>, Arc<Expr>),
    Mul(Arc<Expr>, Arc<Expr>),
    Neg(Arc<Expr>),
}

impl Expr {
    pub fn is_raw(&self) -> bool {
        matches!(self, Expr::Raw(..))
    }

    /// Evaluates to an outward-rounded enclosure with `prec` significant bits per bound.
    pub fn eval(&self, prec: u32) -> (Rational, Rational) {
        match self {
            Expr::Const(v) => (round_down(v, prec), round_up(v, prec)),
            Expr::Sqrt(v) => sqrt_enclosure(v, prec),
            Expr::Raw(lo, hi) => (lo.clone(), hi.clone()),
            Expr::Add(a, b) => {
                let (al, ah) = a.eval(prec);
                let (bl, bh) = b.eval(prec);
                (round_down(&(al + bl), prec), round_up(&(ah + bh), prec))
            }
            Expr::Sub(a, b) => {
                let (al, ah) = a.eval(prec);
                let (bl, bh) = b.eval(prec);
                (round_down(&(al - bh), prec), round_up(&(ah - bl), prec))
            }
            Expr::Mul(a, b) => {
                let (al, ah) = a.eval(prec);
                let (bl, bh) = b.eval(prec);
                let products = [&al * &bl, &al * &bh, &ah * &bl, &ah * &bh];
                let lo = products.iter().min().unwrap();
                let hi = products.iter().max().unwrap();
                (round_down(lo, prec), round_up(hi, prec))
            }
            Expr::Neg(a) => {
                let (l, h) = a.eval(prec);
                (-h, -l)
            }
        }
    }
}

/// Closed enclosure `[lo, hi]` with dyadic endpoints, tied to the expression it
/// was computed from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: Rational,
    hi: Rational,
    precision: u32,
    expr: Arc<Expr>,
}

impl Interval {
    pub fn from_expr(expr: Arc<Expr>, precision: u32) -> Self {
        let (lo, hi) = expr.eval(precision);
        Interval { lo, hi, precision, expr }
    }

    /// Enclosure without a defining expression; refinement leaves it unchanged.
    pub fn raw(lo: Rational, hi: Rational, precision: u32) -> Self {
        assert!(lo <= hi, "interval bounds out of order");
        let lo = round_down(&lo, precision);
        let hi = round_up(&hi, precision);
        let expr = Arc::new(Expr::Raw(lo.clone(), hi.clone()));
        Interval { lo, hi, precision, expr }
    }

    pub fn point(v: &Rational, precision: u32) -> Self {
        Interval::from_expr(Arc::new(Expr::Const(v.clone())), precision)
    }

    pub fn sqrt_of(v: &Rational, precision: u32) -> Self {
        Interval::from_expr(Arc::new(Expr::Sqrt(v.clone())), precision)
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn expr(&self) -> &Arc<Expr> {
        &self.expr
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, v: &Rational) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn is_within(&self, outer: &Interval) -> bool {
        outer.lo <= self.lo && self.hi <= outer.hi
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from(2)
    }

    /// Re-evaluates the defining expression at a higher precision. The result is
    /// intersected with the current enclosure so refinement never widens.
    pub fn refine(&self, precision: u32) -> Interval {
        if self.expr.is_raw() || precision <= self.precision {
            return self.clone();
        }
        let (lo, hi) = self.expr.eval(precision);
        Interval { lo: lo.max(self.lo.clone()), hi: hi.min(self.hi.clone()), precision, expr: self.expr.clone() }
    }
}

fn scale_for(v: &Rational, prec: u32) -> i64 {
    // bits after the binary point so that |v| keeps about `prec` significant bits
    match v.log2_floor() {
        Some(e) => prec as i64 - 1 - e,
        None => 0,
    }
}

pub(crate) fn round_down(v: &Rational, prec: u32) -> Rational {
    if v.is_zero() || v.is_integer() && v.numer().bits() <= prec as u64 {
        return v.clone();
    }
    let s = scale_for(v, prec);
    let m = v.mul_pow2(s).floor();
    Rational::from_integer(m).mul_pow2(-s)
}

pub(crate) fn round_up(v: &Rational, prec: u32) -> Rational {
    if v.is_zero() || v.is_integer() && v.numer().bits() <= prec as u64 {
        return v.clone();
    }
    let s = scale_for(v, prec);
    let m = v.mul_pow2(s).ceil();
    Rational::from_integer(m).mul_pow2(-s)
}

fn sqrt_enclosure(v: &Rational, prec: u32) -> (Rational, Rational) {
    assert!(!v.is_negative(), "sqrt of negative value in interval expression");
    if v.is_zero() {
        return (Rational::zero(), Rational::zero());
    }
    if let Some(r) = v.exact_sqrt() {
        return (round_down(&r, prec), round_up(&r, prec));
    }
    // fractional bits s: floor(sqrt(v * 4^s)) / 2^s
    let e = v.log2_floor().unwrap_or(0);
    let s = (prec as i64 + 2 - Integer::div_floor(&e, &2)).max(1);
    let scaled = v.mul_pow2(2 * s);
    let lo_int = scaled.floor().sqrt();
    let hi_sq = scaled.ceil();
    let mut hi_int = hi_sq.sqrt();
    if &hi_int * &hi_int != hi_sq {
        hi_int += BigInt::one();
    }
    (Rational::from_integer(lo_int).mul_pow2(-s), Rational::from_integer(hi_int).mul_pow2(-s))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn sqrt3_refines_below_2_pow_minus_120() {
        let coarse = Interval::sqrt_of(&q("3"), 8);
        assert!(coarse.contains(&q("1732/1000")) || coarse.width() > q("0"));
        let fine = coarse.refine(128);
        assert!(fine.is_within(&coarse));
        assert!(fine.width() < Rational::one().mul_pow2(-120));
        assert!(fine.lo().square() <= q("3") && q("3") <= fine.hi().square());
    }

    #[test]
    fn exact_value_refines_to_point() {
        let p = Interval::point(&q("5/8"), 64).refine(256);
        assert_eq!(p.lo(), p.hi());
        let z = Interval::point(&q("0"), 64).refine(64);
        assert_eq!((z.lo().clone(), z.hi().clone()), (q("0"), q("0")));
    }

    #[test]
    fn raw_interval_is_not_refined() {
        let r = Interval::raw(q("17/10"), q("18/10"), 64);
        assert_eq!(r.refine(128), r);
        assert!(r.contains(&q("17/10")) && r.contains(&q("18/10")));
    }

    #[test]
    fn rounding_is_outward() {
        let third = q("1/3");
        assert!(round_down(&third, 20) <= third && third <= round_up(&third, 20));
        assert!(round_up(&third, 20) - round_down(&third, 20) <= Rational::one().mul_pow2(-20));
    }
}
