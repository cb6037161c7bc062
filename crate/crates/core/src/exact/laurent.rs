use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::zpoly::ZPoly;
use super::Rational;

/// Finitely supported Laurent polynomial in the formal variable `v`.
///
/// Stored densely from the lowest exponent upward; neither end carries a
/// zero coefficient, and the zero polynomial has no coefficients at all.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentPoly {
    low: i64,
    coeffs: Vec<Rational>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, 0)
    }

    /// `c * v^e`.
    pub fn monomial(c: Rational, e: i64) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LaurentPoly { low: e, coeffs: vec![c] }
    }

    /// The variable `v` itself.
    pub fn var() -> Self {
        Self::monomial(Rational::one(), 1)
    }

    /// Builds from `(exponent, coefficient)` pairs; repeated exponents add up.
    pub fn from_terms<I: IntoIterator<Item = (i64, Rational)>>(terms: I) -> Self {
        let mut acc = Self::zero();
        for (e, c) in terms {
            acc = acc + Self::monomial(c, e);
        }
        acc
    }

    pub(crate) fn from_dense(low: i64, mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        let lead = coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead == coeffs.len() {
            return Self::zero();
        }
        coeffs.drain(..lead);
        LaurentPoly { low: low + lead as i64, coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.low == 0 && self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Lowest exponent with a nonzero coefficient (`None` for zero).
    pub fn min_exp(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.low)
    }

    pub fn max_exp(&self) -> Option<i64> {
        (!self.is_zero()).then(|| self.low + self.coeffs.len() as i64 - 1)
    }

    pub fn coeff(&self, e: i64) -> Rational {
        let k = e - self.low;
        if k < 0 || k >= self.coeffs.len() as i64 {
            return Rational::zero();
        }
        self.coeffs[k as usize].clone()
    }

    /// Nonzero terms in ascending exponent order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i64, &Rational)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(k, c)| (self.low + k as i64, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms().count()
    }

    pub fn leading_coeff(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LaurentPoly { low: self.low, coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    /// Multiplies by `v^k`.
    pub fn shift(&self, k: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        LaurentPoly { low: self.low + k, coeffs: self.coeffs.clone() }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Exact value at a nonzero rational point, or at zero when no negative
    /// powers are present.
    pub fn eval(&self, v0: &Rational) -> Option<Rational> {
        if self.is_zero() {
            return Some(Rational::zero());
        }
        if v0.is_zero() {
            if self.low < 0 {
                return None;
            }
            return Some(self.coeff(0));
        }
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * v0 + c;
        }
        Some(acc * pow_rational(v0, self.low))
    }

    /// Splits into `(scale, shift, integer polynomial)` with
    /// `self = scale * v^shift * poly`, the polynomial having integer
    /// coefficients and nonzero constant term.
    pub(crate) fn to_scaled_zpoly(&self) -> (Rational, i64, ZPoly) {
        let mut l = BigInt::one();
        for c in &self.coeffs {
            l = l.lcm(c.denom());
        }
        let ints = self.coeffs.iter().map(|c| (c * &l).to_integer()).collect();
        (Rational::new(BigInt::one(), l), self.low, ZPoly::from_vec(ints))
    }

    pub(crate) fn from_zpoly(scale: &Rational, shift: i64, p: &ZPoly) -> Self {
        let coeffs = p.0.iter().map(|c| Rational::from_integer(c.clone()) * scale).collect();
        Self::from_dense(shift, coeffs)
    }
}

pub(crate) fn pow_rational(x: &Rational, e: i64) -> Rational {
    if e >= 0 {
        num_traits::pow(x.clone(), e as usize)
    } else {
        num_traits::pow(x.recip(), e.unsigned_abs() as usize)
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, o: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let low = self.low.min(o.low);
        let high = self.max_exp().unwrap().max(o.max_exp().unwrap());
        let mut c = vec![Rational::zero(); (high - low + 1) as usize];
        for (e, x) in self.terms().chain(o.terms()) {
            c[(e - low) as usize] += x;
        }
        LaurentPoly::from_dense(low, c)
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly { low: self.low, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, o: &LaurentPoly) -> LaurentPoly {
        self + &(-o)
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, o: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() || o.is_zero() {
            return LaurentPoly::zero();
        }
        let mut c = vec![Rational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        LaurentPoly::from_dense(self.low + o.low, c)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, o: LaurentPoly) -> LaurentPoly {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}

impl From<Rational> for LaurentPoly {
    fn from(c: Rational) -> Self {
        LaurentPoly::constant(c)
    }
}

impl From<i64> for LaurentPoly {
    fn from(c: i64) -> Self {
        LaurentPoly::constant(Rational::from_integer(c.into()))
    }
}

/// Writes terms in descending powers with no spaces, e.g. `v^30-2*v+1/3`.
/// The output is accepted by [`parse_ratfunc`](super::parse_ratfunc).
impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (idx, (e, c)) in self.terms().rev().enumerate() {
            let neg = c.is_negative();
            if neg {
                f.write_str("-")?;
            } else if idx > 0 {
                f.write_str("+")?;
            }
            let a = c.abs();
            match (e, a.is_one()) {
                (0, _) => write!(f, "{a}")?,
                (_, true) => write_power(f, e)?,
                (_, false) => {
                    write!(f, "{a}*")?;
                    write_power(f, e)?;
                }
            }
        }
        Ok(())
    }
}

fn write_power(f: &mut fmt::Formatter<'_>, e: i64) -> fmt::Result {
    if e == 1 {
        f.write_str("v")
    } else {
        write!(f, "v^{e}")
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn display_descending() {
        let p = LaurentPoly::from_terms([(0, q(1)), (30, q(1))]);
        assert_eq!(p.to_string(), "v^30+1");
        let p = LaurentPoly::from_terms([(-10, q(-1)), (1, q(2)), (0, Rational::new(1.into(), 3.into()))]);
        assert_eq!(p.to_string(), "2*v+1/3-v^-10");
    }

    #[test]
    fn product_and_eval() {
        let a = LaurentPoly::from_terms([(1, q(1)), (0, q(-1))]);
        let b = LaurentPoly::from_terms([(1, q(1)), (0, q(1))]);
        let p = &a * &b;
        assert_eq!(p, LaurentPoly::from_terms([(2, q(1)), (0, q(-1))]));
        assert_eq!(p.eval(&q(3)), Some(q(8)));
        assert_eq!(LaurentPoly::monomial(q(1), -1).eval(&q(0)), None);
    }

    #[test]
    fn cancellation_trims_both_ends() {
        let a = LaurentPoly::from_terms([(-2, q(1)), (0, q(1)), (5, q(1))]);
        let b = LaurentPoly::from_terms([(-2, q(1)), (5, q(1))]);
        assert_eq!(&a - &b, LaurentPoly::one());
    }
}
