//! Dense univariate polynomials over the integers.
//!
//! This is the kernel behind [`RatFunc`](super::RatFunc): every rational
//! function is stored as a rational scale times a ratio of primitive integer
//! polynomials, so the hot paths (products, sums, gcds) never touch
//! `BigRational` coefficients.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Coefficients in ascending degree; no trailing zeros. The zero polynomial
/// is the empty vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub(crate) struct ZPoly(pub(crate) Vec<BigInt>);

impl ZPoly {
    pub(crate) fn zero() -> Self {
        ZPoly(Vec::new())
    }

    pub(crate) fn one() -> Self {
        ZPoly(vec![BigInt::one()])
    }

    pub(crate) fn from_vec(mut c: Vec<BigInt>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        ZPoly(c)
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub(crate) fn is_one(&self) -> bool {
        self.0.len() == 1 && self.0[0].is_one()
    }

    /// Degree; the zero polynomial reports 0.
    pub(crate) fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub(crate) fn lc(&self) -> &BigInt {
        self.0.last().expect("leading coefficient of zero polynomial")
    }

    /// Number of leading zero coefficients at the low end.
    pub(crate) fn valuation(&self) -> usize {
        self.0.iter().take_while(|c| c.is_zero()).count()
    }

    pub(crate) fn shift_down(&self, k: usize) -> Self {
        ZPoly(self.0[k..].to_vec())
    }

    pub(crate) fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = vec![BigInt::zero(); k];
        c.extend(self.0.iter().cloned());
        ZPoly(c)
    }

    pub(crate) fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.0 {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    pub(crate) fn scale(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return ZPoly::zero();
        }
        ZPoly(self.0.iter().map(|c| c * k).collect())
    }

    pub(crate) fn div_scalar(&self, k: &BigInt) -> Self {
        ZPoly(self.0.iter().map(|c| c / k).collect())
    }

    /// Splits off content and sign so the result has positive leading
    /// coefficient. Returns `(signed content, primitive part)`.
    pub(crate) fn primitive(&self) -> (BigInt, ZPoly) {
        if self.is_zero() {
            return (BigInt::zero(), ZPoly::zero());
        }
        let mut g = self.content();
        if self.lc().is_negative() {
            g = -g;
        }
        if g.is_one() {
            (g, self.clone())
        } else {
            let p = self.div_scalar(&g);
            (g, p)
        }
    }

    pub(crate) fn add(&self, o: &ZPoly) -> ZPoly {
        let (long, short) = if self.0.len() >= o.0.len() { (self, o) } else { (o, self) };
        let mut c = long.0.clone();
        for (x, y) in c.iter_mut().zip(short.0.iter()) {
            *x += y;
        }
        ZPoly::from_vec(c)
    }

    pub(crate) fn mul(&self, o: &ZPoly) -> ZPoly {
        if self.is_zero() || o.is_zero() {
            return ZPoly::zero();
        }
        if self.is_one() {
            return o.clone();
        }
        if o.is_one() {
            return self.clone();
        }
        let mut c = vec![BigInt::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                if !b.is_zero() {
                    c[i + j] += a * b;
                }
            }
        }
        ZPoly::from_vec(c)
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`
    /// over the integers.
    pub(crate) fn div_exact(&self, d: &ZPoly) -> Option<ZPoly> {
        assert!(!d.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(ZPoly::zero());
        }
        if d.is_one() {
            return Some(self.clone());
        }
        if d.0.len() == 1 {
            let k = &d.0[0];
            if self.0.iter().all(|c| c.is_multiple_of(k)) {
                return Some(self.div_scalar(k));
            }
            return None;
        }
        if self.0.len() < d.0.len() {
            return None;
        }
        let mut r = self.0.clone();
        let dl = d.0.len();
        let lc = d.lc();
        let qlen = r.len() - dl + 1;
        let mut q = vec![BigInt::zero(); qlen];
        for k in (0..qlen).rev() {
            let top = &r[k + dl - 1];
            if top.is_zero() {
                continue;
            }
            let (qq, rem) = top.div_rem(lc);
            if !rem.is_zero() {
                return None;
            }
            for (i, dc) in d.0.iter().enumerate() {
                r[k + i] -= &qq * dc;
            }
            q[k] = qq;
        }
        if r.iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(ZPoly::from_vec(q))
    }

    /// Pseudo-remainder of `self` by `d` (`deg self >= deg d`).
    fn prem(&self, d: &ZPoly) -> ZPoly {
        let mut r = self.0.clone();
        let dl = d.0.len();
        let lc = d.lc().clone();
        while r.len() >= dl && !r.is_empty() {
            let top = r.last().unwrap().clone();
            let shift = r.len() - dl;
            for c in r.iter_mut() {
                *c *= &lc;
            }
            for (i, dc) in d.0.iter().enumerate() {
                r[shift + i] -= &top * dc;
            }
            while r.last().is_some_and(|x| x.is_zero()) {
                r.pop();
            }
        }
        ZPoly(r)
    }

    pub(crate) fn eval_int(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    fn max_norm(&self) -> BigInt {
        self.0.iter().map(|c| c.abs()).max().unwrap_or_default()
    }
}

/// Greatest common divisor of two primitive polynomials, normalized to be
/// primitive with positive leading coefficient.
pub(crate) fn gcd(a: &ZPoly, b: &ZPoly) -> ZPoly {
    if a.is_zero() {
        return b.primitive().1;
    }
    if b.is_zero() {
        return a.primitive().1;
    }
    if a.degree() == 0 || b.degree() == 0 {
        return ZPoly::one();
    }
    if a == b {
        return a.primitive().1;
    }
    let a = a.primitive().1;
    let b = b.primitive().1;
    if let Some(g) = gcd_heuristic(&a, &b) {
        return g;
    }
    gcd_prs(&a, &b)
}

/// Heuristic gcd: evaluate at a large integer, take the integer gcd and
/// lift it back by symmetric xi-adic expansion. Accepted only after trial
/// division confirms it.
fn gcd_heuristic(a: &ZPoly, b: &ZPoly) -> Option<ZPoly> {
    let bound = a.max_norm().min(b.max_norm());
    let mut xi: BigInt = bound * 2u32 + 29u32;
    for _ in 0..6 {
        let ga = a.eval_int(&xi);
        let gb = b.eval_int(&xi);
        let gamma = ga.gcd(&gb);
        if !gamma.is_zero() {
            let cand = lift(&gamma, &xi).primitive().1;
            if !cand.is_zero() && a.div_exact(&cand).is_some() && b.div_exact(&cand).is_some() {
                return Some(cand);
            }
        }
        xi = (&xi * 73794u32) / 27011u32 + 1u32;
    }
    None
}

fn lift(gamma: &BigInt, xi: &BigInt) -> ZPoly {
    let mut g = gamma.clone();
    let half: BigInt = xi / 2;
    let mut out = Vec::new();
    while !g.is_zero() {
        let mut r = g.mod_floor(xi);
        if r > half {
            r -= xi;
        }
        out.push(r.clone());
        g = (g - r) / xi;
    }
    ZPoly::from_vec(out)
}

/// Primitive polynomial remainder sequence; the slow but always-correct path.
fn gcd_prs(a: &ZPoly, b: &ZPoly) -> ZPoly {
    let (mut a, mut b) = if a.degree() >= b.degree() { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
    while !b.is_zero() {
        let r = a.prem(&b);
        a = b;
        b = r.primitive().1;
    }
    a.primitive().1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zp(c: &[i64]) -> ZPoly {
        ZPoly::from_vec(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    #[test]
    fn gcd_of_cyclotomic_products() {
        // (v^5 - 1)(v + 2) and (v^10 - 1)
        let a = zp(&[-1, 0, 0, 0, 0, 1]).mul(&zp(&[2, 1]));
        let b = zp(&[-1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1]);
        assert_eq!(gcd(&a, &b), zp(&[-1, 0, 0, 0, 0, 1]));
        assert_eq!(gcd_prs(&a, &b), zp(&[-1, 0, 0, 0, 0, 1]));
    }

    #[test]
    fn coprime_inputs() {
        assert_eq!(gcd(&zp(&[1, 1]), &zp(&[-1, 1])), ZPoly::one());
    }

    #[test]
    fn exact_division_detects_remainder() {
        let a = zp(&[-1, 0, 1]);
        assert_eq!(a.div_exact(&zp(&[-1, 1])), Some(zp(&[1, 1])));
        assert_eq!(a.div_exact(&zp(&[2, 1])), None);
        assert_eq!(zp(&[2, 4]).div_exact(&zp(&[2])), Some(zp(&[1, 2])));
    }
}
