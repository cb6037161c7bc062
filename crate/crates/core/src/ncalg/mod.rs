//! Free associative algebra on `x_0..x_{n-1}` with quadratic rewriting.

mod filtration;
mod rewrite;

use std::collections::BTreeMap;
use std::fmt;

pub use filtration::FiltrationOracle;
pub use rewrite::{DiamondReport, OverlapFailure, RewriteSystem, Rule, Strategy};

use crate::exact::{EpsPoly, Field};
use crate::weights::Weight;

/// Element of the free monoid; letters are generator indices.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(pub Vec<u8>);

impl Word {
    pub fn new(letters: &[usize]) -> Self {
        Word(letters.iter().map(|&x| u8::try_from(x).expect("generator index below 256")).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Commutative weight: letter multiplicities.
    pub fn weight(&self, n: usize) -> Weight {
        let mut w = vec![0i64; n];
        for &c in &self.0 {
            w[c as usize] += 1;
        }
        Weight(w)
    }

    pub fn concat(&self, o: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&o.0);
        Word(v)
    }

    /// No adjacent pair `x_b x_a` with `b > a`.
    pub fn is_nondecreasing(&self) -> bool {
        self.0.windows(2).all(|p| p[0] <= p[1])
    }

    /// All words of the given length over `n` letters, lexicographically.
    pub fn all(n: usize, len: usize) -> Vec<Word> {
        let mut out = vec![Word::default()];
        for _ in 0..len {
            out = out
                .into_iter()
                .flat_map(|w| {
                    (0..n).map(move |c| {
                        let mut v = w.0.clone();
                        v.push(c as u8);
                        Word(v)
                    })
                })
                .collect();
        }
        out
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self.0.iter().map(|c| format!("x{c}")).collect();
        f.write_str(&parts.join("*"))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Coefficient ring for rewriting. `mul_capped` lets ε-polynomials drop
/// every ε-degree above a cap; other rings ignore the cap.
pub trait Coeff: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul_capped(&self, o: &Self, cap: Option<usize>) -> Self;
}

impl<F: Field + fmt::Display + 'static> Coeff for F {
    fn zero() -> Self {
        Field::zero()
    }
    fn one() -> Self {
        Field::one()
    }
    fn is_zero(&self) -> bool {
        Field::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        Field::add(self, o)
    }
    fn neg(&self) -> Self {
        Field::neg(self)
    }
    fn mul_capped(&self, o: &Self, _cap: Option<usize>) -> Self {
        Field::mul(self, o)
    }
}

impl Coeff for EpsPoly {
    fn zero() -> Self {
        EpsPoly::zero()
    }
    fn one() -> Self {
        EpsPoly::one()
    }
    fn is_zero(&self) -> bool {
        EpsPoly::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul_capped(&self, o: &Self, cap: Option<usize>) -> Self {
        EpsPoly::mul_capped(self, o, cap)
    }
}

/// Finitely supported map from words to nonzero coefficients.
#[derive(Clone, PartialEq)]
pub struct NCPoly<C> {
    terms: BTreeMap<Word, C>,
}

impl<C: Coeff> Default for NCPoly<C> {
    fn default() -> Self {
        NCPoly { terms: BTreeMap::new() }
    }
}

impl<C: Coeff> NCPoly<C> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn term(w: Word, c: C) -> Self {
        let mut p = Self::zero();
        p.add_term(w, c);
        p
    }

    pub fn word(w: Word) -> Self {
        Self::term(w, C::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, w: &Word) -> Option<&C> {
        self.terms.get(w)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Word, &C)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, w: Word, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().add(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    /// `self += c * p`.
    pub fn add_scaled(&mut self, p: &NCPoly<C>, c: &C, cap: Option<usize>) {
        for (w, x) in &p.terms {
            self.add_term(w.clone(), c.mul_capped(x, cap));
        }
    }

    pub fn sub(&self, o: &NCPoly<C>) -> NCPoly<C> {
        let mut out = self.clone();
        for (w, x) in &o.terms {
            out.add_term(w.clone(), x.neg());
        }
        out
    }

    pub fn add(&self, o: &NCPoly<C>) -> NCPoly<C> {
        let mut out = self.clone();
        for (w, x) in &o.terms {
            out.add_term(w.clone(), x.clone());
        }
        out
    }

    /// Applies `f` to every coefficient, dropping those that become zero.
    pub fn map<D: Coeff>(&self, mut f: impl FnMut(&C) -> D) -> NCPoly<D> {
        let mut out = NCPoly::zero();
        for (w, x) in &self.terms {
            out.add_term(w.clone(), f(x));
        }
        out
    }

    pub fn try_map<D: Coeff, E>(&self, mut f: impl FnMut(&C) -> Result<D, E>) -> Result<NCPoly<D>, E> {
        let mut out = NCPoly::zero();
        for (w, x) in &self.terms {
            out.add_term(w.clone(), f(x)?);
        }
        Ok(out)
    }

    /// Terms sorted from largest to smallest in the filtration order.
    pub fn sorted_terms(&self, oracle: &FiltrationOracle) -> Vec<(&Word, &C)> {
        let mut v: Vec<(&Word, &C)> = self.terms.iter().collect();
        v.sort_by(|a, b| oracle.compare(b.0, a.0));
        v
    }

    /// `c1*w1 + c2*w2 ...` with terms in descending order.
    pub fn render(&self, oracle: &FiltrationOracle) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.sorted_terms(oracle)
            .into_iter()
            .map(|(w, c)| format!("({c})*{w}"))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl<C: Coeff> fmt::Display for NCPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(w, c)| format!("({c})*{w}")).collect();
        f.write_str(&parts.join(" + "))
    }
}

impl<C: Coeff> fmt::Debug for NCPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
