use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::laurent::{pow_rational, LaurentPoly};
use super::zpoly::{self, ZPoly};
use super::Rational;
use crate::error::{Error, Result};

/// Element of the rational function field Q(v), always in canonical form.
///
/// Internally `scale * v^shift * num(v) / den(v)` where `num` and `den` are
/// coprime primitive integer polynomials with positive leading coefficient
/// and nonzero constant term. This is unique, so equality is structural.
/// [`numerator`](Self::numerator) and [`denominator`](Self::denominator)
/// expose the equivalent form with a monic denominator of lowest exponent 0.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    scale: Rational,
    shift: i64,
    num: ZPoly,
    den: ZPoly,
}

impl RatFunc {
    pub fn zero() -> Self {
        RatFunc { scale: Rational::zero(), shift: 0, num: ZPoly::one(), den: ZPoly::one() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, 0)
    }

    pub fn from_int(c: i64) -> Self {
        Self::constant(Rational::from_integer(c.into()))
    }

    /// `c * v^e`.
    pub fn monomial(c: Rational, e: i64) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        RatFunc { scale: c, shift: e, num: ZPoly::one(), den: ZPoly::one() }
    }

    /// `v^e`.
    pub fn v_pow(e: i64) -> Self {
        Self::monomial(Rational::one(), e)
    }

    pub fn var() -> Self {
        Self::v_pow(1)
    }

    /// Canonical representative of `num / den`.
    pub fn new(num: &LaurentPoly, den: &LaurentPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Malformed("rational function with zero denominator".into()));
        }
        let (sn, en, pn) = num.to_scaled_zpoly();
        let (sd, ed, pd) = den.to_scaled_zpoly();
        Ok(Self::from_parts(sn / sd, en - ed, pn, pd))
    }

    pub fn from_laurent(p: &LaurentPoly) -> Self {
        let (s, e, z) = p.to_scaled_zpoly();
        Self::from_parts(s, e, z, ZPoly::one())
    }

    fn from_parts(mut scale: Rational, mut shift: i64, num: ZPoly, den: ZPoly) -> Self {
        debug_assert!(!den.is_zero());
        if scale.is_zero() || num.is_zero() {
            return Self::zero();
        }
        let vn = num.valuation();
        let vd = den.valuation();
        shift += vn as i64 - vd as i64;
        let (cn, mut num) = num.shift_down(vn).primitive();
        let (cd, mut den) = den.shift_down(vd).primitive();
        scale *= Rational::new(cn, cd);
        let g = zpoly::gcd(&num, &den);
        if !g.is_one() {
            num = num.div_exact(&g).expect("gcd divides numerator");
            den = den.div_exact(&g).expect("gcd divides denominator");
        }
        RatFunc { scale, shift, num, den }
    }

    pub fn is_zero(&self) -> bool {
        self.scale.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.shift == 0 && self.scale.is_one() && self.num.is_one() && self.den.is_one()
    }

    /// True when the value is a Laurent polynomial (denominator 1).
    pub fn is_laurent(&self) -> bool {
        self.den.is_one()
    }

    /// True when the value is `c * v^e`.
    pub fn as_monomial(&self) -> Option<(Rational, i64)> {
        (self.num.is_one() && self.den.is_one()).then(|| (self.scale.clone(), self.shift))
    }

    /// Numerator of the canonical form `p / q` with `q` monic, `q(0) != 0`.
    pub fn numerator(&self) -> LaurentPoly {
        if self.is_zero() {
            return LaurentPoly::zero();
        }
        let lc = Rational::from_integer(self.den.lc().clone());
        LaurentPoly::from_zpoly(&(&self.scale / lc), self.shift, &self.num)
    }

    /// Monic denominator with lowest exponent 0.
    pub fn denominator(&self) -> LaurentPoly {
        let lc = Rational::new(BigInt::one(), self.den.lc().clone());
        LaurentPoly::from_zpoly(&lc, 0, &self.den)
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(RatFunc {
            scale: self.scale.recip(),
            shift: -self.shift,
            num: self.den.clone(),
            den: self.num.clone(),
        })
    }

    pub fn checked_div(&self, o: &RatFunc) -> Result<Self> {
        Ok(self * &o.inv()?)
    }

    /// Integer power; negative exponents of zero are an error.
    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut b = base;
        let mut acc = RatFunc::one();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &b;
            }
            k >>= 1;
            if k > 0 {
                b = &b * &b;
            }
        }
        Ok(acc)
    }

    /// Exact substitution `v = v0`.
    pub fn evaluate(&self, v0: &Rational) -> Result<Rational> {
        if self.is_zero() {
            return Ok(Rational::zero());
        }
        let d = eval_zpoly(&self.den, v0);
        if d.is_zero() {
            return Err(Error::Pole(format!("denominator of {self} vanishes at v = {v0}")));
        }
        if v0.is_zero() {
            return match self.shift.cmp(&0) {
                std::cmp::Ordering::Less => Err(Error::Pole(format!("{self} has negative powers of v at v = 0"))),
                std::cmp::Ordering::Greater => Ok(Rational::zero()),
                std::cmp::Ordering::Equal => Ok(&self.scale * eval_zpoly(&self.num, v0) / d),
            };
        }
        Ok(&self.scale * pow_rational(v0, self.shift) * eval_zpoly(&self.num, v0) / d)
    }

    /// Double-precision evaluation at a complex point. Poles yield
    /// non-finite values; callers decide how to treat them.
    pub fn eval_complex(&self, v0: Complex64) -> Complex64 {
        if self.is_zero() {
            return Complex64::zero();
        }
        let s = self.scale.to_f64().unwrap_or(f64::NAN);
        let n = eval_zpoly_c(&self.num, v0);
        let d = eval_zpoly_c(&self.den, v0);
        n / d * v0.powi(self.shift as i32) * s
    }

    /// Total degree span used to order work heuristically.
    pub fn complexity(&self) -> usize {
        self.num.degree() + self.den.degree()
    }
}

fn eval_zpoly(p: &ZPoly, x: &Rational) -> Rational {
    let mut acc = Rational::zero();
    for c in p.0.iter().rev() {
        acc = acc * x + Rational::from_integer(c.clone());
    }
    acc
}

fn eval_zpoly_c(p: &ZPoly, x: Complex64) -> Complex64 {
    let mut acc = Complex64::zero();
    for c in p.0.iter().rev() {
        acc = acc * x + c.to_f64().unwrap_or(f64::NAN);
    }
    acc
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, o: &RatFunc) -> RatFunc {
        if self.is_zero() || o.is_zero() {
            return RatFunc::zero();
        }
        let scale = &self.scale * &o.scale;
        let shift = self.shift + o.shift;
        // cross-cancel: num1 against den2, num2 against den1
        let (n1, d2) = cancel(&self.num, &o.den);
        let (n2, d1) = cancel(&o.num, &self.den);
        RatFunc { scale, shift, num: n1.mul(&n2), den: d1.mul(&d2) }
    }
}

fn cancel(n: &ZPoly, d: &ZPoly) -> (ZPoly, ZPoly) {
    if n.is_one() || d.is_one() {
        return (n.clone(), d.clone());
    }
    let g = zpoly::gcd(n, d);
    if g.is_one() {
        (n.clone(), d.clone())
    } else {
        (n.div_exact(&g).unwrap(), d.div_exact(&g).unwrap())
    }
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, o: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let shift = self.shift.min(o.shift);
        let (g, e1, e2) = if self.den == o.den {
            (self.den.clone(), ZPoly::one(), ZPoly::one())
        } else {
            let g = zpoly::gcd(&self.den, &o.den);
            let e1 = self.den.div_exact(&g).unwrap();
            let e2 = o.den.div_exact(&g).unwrap();
            (g, e1, e2)
        };
        let (p1, q1) = (self.scale.numer(), self.scale.denom());
        let (p2, q2) = (o.scale.numer(), o.scale.denom());
        let l = q1.lcm(q2);
        let t1 = self.num.shift_up((self.shift - shift) as usize).mul(&e2).scale(&(p1 * (&l / q1)));
        let t2 = o.num.shift_up((o.shift - shift) as usize).mul(&e1).scale(&(p2 * (&l / q2)));
        let m = t1.add(&t2);
        if m.is_zero() {
            return RatFunc::zero();
        }
        // Only factors of the common part g can cancel against the new
        // numerator: e1 and e2 are coprime to it by construction.
        let vm = m.valuation();
        let (cm, m) = m.shift_down(vm).primitive();
        let (m, g) = cancel(&m, &g);
        RatFunc {
            scale: Rational::new(cm, l),
            shift: shift + vm as i64,
            num: m,
            den: g.mul(&e1).mul(&e2),
        }
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc { scale: -&self.scale, ..self.clone() }
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, o: &RatFunc) -> RatFunc {
        self + &(-o)
    }
}

/// Panics on division by zero; use [`RatFunc::checked_div`] to get an error.
impl Div for &RatFunc {
    type Output = RatFunc;
    fn div(self, o: &RatFunc) -> RatFunc {
        self.checked_div(o).expect("division by zero rational function")
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RatFunc {
            type Output = RatFunc;
            fn $m(self, o: RatFunc) -> RatFunc {
                (&self).$m(&o)
            }
        }
        impl $tr<&RatFunc> for RatFunc {
            type Output = RatFunc;
            fn $m(self, o: &RatFunc) -> RatFunc {
                (&self).$m(o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(mut self) -> RatFunc {
        self.scale = -self.scale;
        self
    }
}

impl Zero for RatFunc {
    fn zero() -> Self {
        RatFunc::zero()
    }
    fn is_zero(&self) -> bool {
        RatFunc::is_zero(self)
    }
}

impl One for RatFunc {
    fn one() -> Self {
        RatFunc::one()
    }
}

impl From<Rational> for RatFunc {
    fn from(c: Rational) -> Self {
        RatFunc::constant(c)
    }
}

impl From<i64> for RatFunc {
    fn from(c: i64) -> Self {
        RatFunc::from_int(c)
    }
}

impl From<LaurentPoly> for RatFunc {
    fn from(p: LaurentPoly) -> Self {
        RatFunc::from_laurent(&p)
    }
}

/// `p/(q)` in descending powers, e.g. `v^24/(v^30-1)`.
impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = self.numerator();
        if self.den.is_one() {
            return write!(f, "{num}");
        }
        if num.num_terms() > 1 {
            write!(f, "({num})/({})", self.denominator())
        } else {
            write!(f, "{num}/({})", self.denominator())
        }
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for RatFunc {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        super::parse_ratfunc(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rf(s: &str) -> RatFunc {
        s.parse().unwrap()
    }

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn canonical_examples() {
        assert_eq!(rf("(v^2-1)/(v-1)"), rf("v+1"));
        let c = rf("v^24/(v^30-1)");
        assert_eq!(c.to_string(), "v^24/(v^30-1)");
        assert_eq!(c.numerator().to_string(), "v^24");
        assert_eq!(c.denominator().to_string(), "v^30-1");
        assert!(rf("0/(v^5-1)").is_zero());
        assert_eq!(rf("0/(v^5-1)").to_string(), "0");
        assert!(RatFunc::new(&LaurentPoly::one(), &LaurentPoly::zero()).is_err());
    }

    #[test]
    fn sign_normalized_into_numerator() {
        let c = rf("v^-10/(1-v^5)");
        assert_eq!(c.to_string(), "-v^-10/(v^5-1)");
        assert_eq!(c.denominator().to_string(), "v^5-1");
    }

    #[test]
    fn evaluate_examples() {
        let c = rf("v^24/(v^30-1)");
        let two = q(2);
        let expect = Rational::new(BigInt::from(2).pow(24), BigInt::from(2).pow(30) - 1);
        assert_eq!(c.evaluate(&two).unwrap(), expect);
        assert_eq!(rf("v+1").evaluate(&q(1)).unwrap(), q(2));
        assert!(matches!(rf("1/(v-1)").evaluate(&q(1)), Err(Error::Pole(_))));
        assert!(matches!(rf("v^-1").evaluate(&q(0)), Err(Error::Pole(_))));
        assert_eq!(rf("v^2/(v+1)").evaluate(&q(0)).unwrap(), q(0));
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(RatFunc::one().checked_div(&RatFunc::zero()), Err(Error::DivisionByZero));
        assert_eq!(RatFunc::zero().pow(-1), Err(Error::DivisionByZero));
    }

    #[test]
    fn complex_evaluation_matches_exact() {
        let c = rf("(v^12+v^2)/(v^35-v^30-v^5+1)");
        let exact = c.evaluate(&Rational::new(3.into(), 2.into())).unwrap().to_f64().unwrap();
        let approx = c.eval_complex(Complex64::new(1.5, 0.0));
        assert!((approx.re - exact).abs() < 1e-12 * exact.abs());
    }

    fn arb_laurent() -> impl Strategy<Value = LaurentPoly> {
        prop::collection::vec((-4i64..6, -3i64..4), 0..4).prop_map(|ts| {
            LaurentPoly::from_terms(ts.into_iter().map(|(e, c)| (e, Rational::from_integer(c.into()))))
        })
    }

    fn arb_ratfunc() -> impl Strategy<Value = RatFunc> {
        (arb_laurent(), arb_laurent(), 1i64..4).prop_map(|(n, d, k)| {
            let d = if d.is_zero() { LaurentPoly::from(k) } else { d };
            RatFunc::new(&n, &d).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn field_axioms(a in arb_ratfunc(), b in arb_ratfunc(), c in arb_ratfunc()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert!((&a - &a).is_zero());
            if !a.is_zero() {
                prop_assert!((&a * &a.inv().unwrap()).is_one());
            }
        }

        #[test]
        fn canonical_form_is_idempotent(a in arb_ratfunc()) {
            let again = RatFunc::new(&a.numerator(), &a.denominator()).unwrap();
            prop_assert_eq!(&again, &a);
            let reparsed: RatFunc = a.to_string().parse().unwrap();
            prop_assert_eq!(reparsed, a);
        }

        #[test]
        fn evaluation_is_a_homomorphism(a in arb_ratfunc(), b in arb_ratfunc(), p in 1i64..7, s in 1i64..5) {
            let v0 = Rational::new(p.into(), s.into());
            if let (Ok(x), Ok(y)) = (a.evaluate(&v0), b.evaluate(&v0)) {
                prop_assert_eq!((&a * &b).evaluate(&v0).unwrap(), &x * &y);
                prop_assert_eq!((&a + &b).evaluate(&v0).unwrap(), x + y);
            }
        }
    }
}
