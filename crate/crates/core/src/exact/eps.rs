use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;

use super::{RatFunc, Rational};

/// Polynomial in ε with coefficients in Q(v), indexed by ε-degree.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct EpsPoly {
    coeffs: Vec<RatFunc>,
}

impl EpsPoly {
    pub fn zero() -> Self {
        EpsPoly::default()
    }

    pub fn one() -> Self {
        Self::constant(RatFunc::one())
    }

    pub fn constant(c: RatFunc) -> Self {
        Self::term(c, 0)
    }

    /// `c * ε^d`.
    pub fn term(c: RatFunc, d: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![RatFunc::zero(); d + 1];
        coeffs[d] = c;
        EpsPoly { coeffs }
    }

    pub fn from_coeffs(mut coeffs: Vec<RatFunc>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        EpsPoly { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Highest ε-degree; `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, d: usize) -> RatFunc {
        self.coeffs.get(d).cloned().unwrap_or_else(RatFunc::zero)
    }

    pub fn coeffs(&self) -> &[RatFunc] {
        &self.coeffs
    }

    /// Nonzero `(degree, coefficient)` pairs.
    pub fn terms(&self) -> impl Iterator<Item = (usize, &RatFunc)> {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero())
    }

    /// Drops every term of ε-degree above `cap`.
    pub fn truncate(&self, cap: usize) -> Self {
        Self::from_coeffs(self.coeffs.iter().take(cap + 1).cloned().collect())
    }

    pub fn scale(&self, c: &RatFunc) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        EpsPoly { coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    /// Product keeping only ε-degrees `<= cap` when a cap is given.
    pub fn mul_capped(&self, o: &EpsPoly, cap: Option<usize>) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut len = self.coeffs.len() + o.coeffs.len() - 1;
        if let Some(c) = cap {
            len = len.min(c + 1);
        }
        let mut out = vec![RatFunc::zero(); len];
        for (i, a) in self.terms() {
            for (j, b) in o.terms() {
                if i + j < len {
                    out[i + j] = &out[i + j] + &(a * b);
                }
            }
        }
        Self::from_coeffs(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Substitutes `ε = eps0`.
    pub fn at_eps(&self, eps0: &RatFunc) -> RatFunc {
        let mut acc = RatFunc::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * eps0) + c;
        }
        acc
    }

    /// Applies a map to every coefficient (e.g. specialization of v).
    pub fn try_map<E>(&self, mut f: impl FnMut(&RatFunc) -> Result<RatFunc, E>) -> Result<Self, E> {
        Ok(Self::from_coeffs(self.coeffs.iter().map(&mut f).collect::<Result<_, E>>()?))
    }

    pub fn from_rational(c: Rational) -> Self {
        Self::constant(RatFunc::constant(c))
    }
}

impl Add for &EpsPoly {
    type Output = EpsPoly;
    fn add(self, o: &EpsPoly) -> EpsPoly {
        let len = self.coeffs.len().max(o.coeffs.len());
        let out = (0..len)
            .map(|d| match (self.coeffs.get(d), o.coeffs.get(d)) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) | (None, Some(a)) => a.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        EpsPoly::from_coeffs(out)
    }
}

impl Neg for &EpsPoly {
    type Output = EpsPoly;
    fn neg(self) -> EpsPoly {
        EpsPoly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Sub for &EpsPoly {
    type Output = EpsPoly;
    fn sub(self, o: &EpsPoly) -> EpsPoly {
        self + &(-o)
    }
}

impl Mul for &EpsPoly {
    type Output = EpsPoly;
    fn mul(self, o: &EpsPoly) -> EpsPoly {
        self.mul_capped(o, None)
    }
}

impl Add for EpsPoly {
    type Output = EpsPoly;
    fn add(self, o: EpsPoly) -> EpsPoly {
        &self + &o
    }
}

impl Sub for EpsPoly {
    type Output = EpsPoly;
    fn sub(self, o: EpsPoly) -> EpsPoly {
        &self - &o
    }
}

impl Mul for EpsPoly {
    type Output = EpsPoly;
    fn mul(self, o: EpsPoly) -> EpsPoly {
        &self * &o
    }
}

impl Neg for EpsPoly {
    type Output = EpsPoly;
    fn neg(self) -> EpsPoly {
        -&self
    }
}

impl Zero for EpsPoly {
    fn zero() -> Self {
        EpsPoly::zero()
    }
    fn is_zero(&self) -> bool {
        EpsPoly::is_zero(self)
    }
}

impl From<RatFunc> for EpsPoly {
    fn from(c: RatFunc) -> Self {
        EpsPoly::constant(c)
    }
}

/// `(c0) + (c1)*eps + (c2)*eps^2 ...`; single-term coefficients lose the
/// parentheses.
impl fmt::Display for EpsPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (idx, (d, c)) in self.terms().enumerate() {
            if idx > 0 {
                f.write_str(" + ")?;
            }
            let s = c.to_string();
            let simple = !s[1..].contains(['+', '-', '/']);
            let body = if simple { s } else { format!("({s})") };
            match d {
                0 => write!(f, "{body}")?,
                1 => write!(f, "{body}*eps")?,
                _ => write!(f, "{body}*eps^{d}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for EpsPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rf(s: &str) -> RatFunc {
        s.parse().unwrap()
    }

    #[test]
    fn truncated_product() {
        let a = &EpsPoly::one() + &EpsPoly::term(rf("v"), 1);
        let sq = a.mul_capped(&a, Some(1));
        assert_eq!(sq, &EpsPoly::one() + &EpsPoly::term(rf("2*v"), 1));
        let full = &a * &a;
        assert_eq!(full.degree(), Some(2));
        assert_eq!(full.coeff(2), rf("v^2"));
        assert_eq!(full.truncate(1), sq);
    }

    #[test]
    fn cancellation_trims() {
        let a = EpsPoly::term(rf("v/(v-1)"), 3);
        assert!((&a - &a).is_zero());
        assert_eq!((&a - &a).degree(), None);
    }

    #[test]
    fn substitution() {
        let a = &EpsPoly::one() + &EpsPoly::term(rf("v"), 2);
        assert_eq!(a.at_eps(&rf("2")), rf("1+4*v"));
        assert_eq!(a.to_string(), "1 + v*eps^2");
    }
}
