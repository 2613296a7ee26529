use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_traits::One;

use super::interval::Expr;
use super::rational::{square_free_split, Rational};

/// `p + q * sqrt(c)` over the rationals with a single radicand.
///
/// Construction normalizes the radicand to an integer with its square factors
/// pulled into `q`, so equal radicals compare structurally. A value whose radical
/// vanishes is reported through [`QuadExt::as_rational`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadExt {
    p: Rational,
    q: Rational,
    c: Rational,
}

impl QuadExt {
    /// Builds `p + q*sqrt(c)`. Panics if `c < 0`.
    pub fn new(p: Rational, q: Rational, c: Rational) -> Self {
        assert!(!c.is_negative(), "negative radicand");
        if q.is_zero() || c.is_zero() {
            return QuadExt { p, q: Rational::zero(), c: Rational::zero() };
        }
        // sqrt(n/m) = sqrt(n*m)/m, then n*m = f^2 * r
        let nm = c.numer() * c.denom();
        let (f, r) = square_free_split(&nm);
        let q = q * Rational::new(f, c.denom().clone());
        if r.is_one() {
            return QuadExt { p: p + q, q: Rational::zero(), c: Rational::zero() };
        }
        QuadExt { p, q, c: Rational::from_integer(r) }
    }

    pub fn p(&self) -> &Rational {
        &self.p
    }

    pub fn q(&self) -> &Rational {
        &self.q
    }

    pub fn radicand(&self) -> &Rational {
        &self.c
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        if self.q.is_zero() {
            Some(&self.p)
        } else {
            None
        }
    }

    pub fn same_radicand(&self, other: &QuadExt) -> bool {
        self.q.is_zero() || other.q.is_zero() || self.c == other.c
    }

    fn radicand_with(&self, other: &QuadExt) -> Rational {
        if self.q.is_zero() {
            other.c.clone()
        } else {
            self.c.clone()
        }
    }

    /// Sum; `None` when the radicands differ.
    pub fn add(&self, other: &QuadExt) -> Option<QuadExt> {
        self.same_radicand(other)
            .then(|| QuadExt::new(&self.p + &other.p, &self.q + &other.q, self.radicand_with(other)))
    }

    pub fn sub(&self, other: &QuadExt) -> Option<QuadExt> {
        self.same_radicand(other)
            .then(|| QuadExt::new(&self.p - &other.p, &self.q - &other.q, self.radicand_with(other)))
    }

    pub fn mul(&self, other: &QuadExt) -> Option<QuadExt> {
        self.same_radicand(other).then(|| {
            let c = self.radicand_with(other);
            let p = &self.p * &other.p + &self.q * &other.q * &c;
            let q = &self.p * &other.q + &self.q * &other.p;
            QuadExt::new(p, q, c)
        })
    }

    pub fn neg(&self) -> QuadExt {
        QuadExt { p: -&self.p, q: -&self.q, c: self.c.clone() }
    }

    pub fn scale(&self, k: &Rational) -> QuadExt {
        QuadExt::new(&self.p * k, &self.q * k, self.c.clone())
    }

    /// Exact sign of the value.
    pub fn signum(&self) -> i32 {
        let sp = self.p.signum();
        let sq = self.q.signum();
        if sq == 0 {
            return sp;
        }
        if sp == 0 || sp == sq {
            return sq;
        }
        // opposite signs: compare p^2 against q^2 c
        let p2 = self.p.square();
        let q2c = self.q.square() * &self.c;
        match p2.cmp(&q2c) {
            Ordering::Greater => sp,
            Ordering::Less => sq,
            Ordering::Equal => 0,
        }
    }

    pub fn to_expr(&self) -> Arc<Expr> {
        let p = Arc::new(Expr::Const(self.p.clone()));
        if self.q.is_zero() {
            return p;
        }
        let radical = Arc::new(Expr::Mul(Arc::new(Expr::Const(self.q.clone())), Arc::new(Expr::Sqrt(self.c.clone()))));
        Arc::new(Expr::Add(p, radical))
    }

    pub fn to_f64(&self) -> f64 {
        self.p.to_f64() + self.q.to_f64() * self.c.to_f64().sqrt()
    }
}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}*sqrt({})", self.p, self.q, self.c)
    }
}

impl fmt::Debug for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn normalizes_radicand() {
        let v = QuadExt::new(q("0"), q("1"), q("12"));
        assert_eq!((v.q().clone(), v.radicand().clone()), (q("2"), q("3")));
        let w = QuadExt::new(q("1"), q("1"), q("1/4"));
        assert_eq!(w.as_rational(), Some(&q("3/2")));
        let h = QuadExt::new(q("0"), q("1"), q("3/4"));
        assert_eq!((h.q().clone(), h.radicand().clone()), (q("1/2"), q("3")));
    }

    #[test]
    fn squares_radical_away() {
        let s3 = QuadExt::new(q("0"), q("1"), q("3"));
        assert_eq!(s3.mul(&s3).unwrap().as_rational(), Some(&q("3")));
    }

    #[test]
    fn sign_of_mixed_terms() {
        assert_eq!(QuadExt::new(q("-2"), q("1"), q("3")).signum(), -1);
        assert_eq!(QuadExt::new(q("2"), q("-1"), q("3")).signum(), 1);
        assert_eq!(QuadExt::new(q("-2"), q("1"), q("5")).signum(), 1);
    }
}
