use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;

use super::{Coeff, FiltrationOracle, NCPoly, Word};
use crate::error::{Error, Result};

/// Nested rewrites beyond this depth are reported as non-termination.
const MAX_DEPTH: usize = 1000;

/// `x_b x_a -> Σ c x_k x_l` for `b > a`.
#[derive(Clone, Debug, PartialEq)]
pub struct Rule<C> {
    pub b: usize,
    pub a: usize,
    pub terms: Vec<(usize, usize, C)>,
}

impl<C: Coeff> Rule<C> {
    pub fn lead(&self) -> Word {
        Word::new(&[self.b, self.a])
    }

    pub fn rhs(&self) -> NCPoly<C> {
        let mut p = NCPoly::zero();
        for (k, l, c) in &self.terms {
            p.add_term(Word::new(&[*k, *l]), c.clone());
        }
        p
    }
}

/// Which reducible position a single rewrite step acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    Leftmost,
    Rightmost,
}

#[derive(Clone, Debug)]
pub struct OverlapFailure<C: Coeff> {
    /// `(c, b, a)` for the overlap word `x_c x_b x_a`.
    pub triple: (usize, usize, usize),
    pub residue: NCPoly<C>,
}

#[derive(Clone, Debug)]
pub struct DiamondReport<C: Coeff> {
    pub checked: usize,
    pub failures: Vec<OverlapFailure<C>>,
}

impl<C: Coeff> DiamondReport<C> {
    pub fn is_confluent(&self) -> bool {
        self.failures.is_empty()
    }
}

type Cache<C> = Mutex<HashMap<Word, Arc<NCPoly<C>>>>;

/// Quadratic rewriting system with leading words `x_b x_a`, `b > a`, whose
/// right-hand sides are smaller in the filtration order.
pub struct RewriteSystem<C> {
    n: usize,
    rules: Vec<Rule<C>>,
    /// `index[b * n + a]` points into `rules`.
    index: Vec<Option<usize>>,
    cap: Option<usize>,
    oracle: Arc<FiltrationOracle>,
    left: Cache<C>,
    right: Cache<C>,
}

impl<C: Coeff> Clone for RewriteSystem<C> {
    fn clone(&self) -> Self {
        Self::assemble(self.n, self.rules.clone(), self.cap, self.oracle.clone())
    }
}

impl<C: Coeff> std::fmt::Debug for RewriteSystem<C> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RewriteSystem").field("n", &self.n).field("rules", &self.rules).field("cap", &self.cap).finish()
    }
}

impl<C: Coeff> RewriteSystem<C> {
    /// Validates the rules and checks that every rewrite decreases in the
    /// filtration order, including inside flanking words of length up to 2.
    /// `cap` bounds the ε-degree kept during reduction.
    pub fn new(n: usize, rules: Vec<Rule<C>>, oracle: Arc<FiltrationOracle>, cap: Option<usize>) -> Result<Self> {
        if oracle.n() != n {
            return Err(Error::Malformed(format!("order is on {} generators, rules on {n}", oracle.n())));
        }
        let mut seen = vec![false; n * n];
        for r in &rules {
            if r.b >= n || r.a >= r.b {
                return Err(Error::Malformed(format!("leading word x{}*x{} is not a descending pair", r.b, r.a)));
            }
            if std::mem::replace(&mut seen[r.b * n + r.a], true) {
                return Err(Error::Malformed(format!("two rules for x{}*x{}", r.b, r.a)));
            }
            if let Some((k, l, _)) = r.terms.iter().find(|(k, l, _)| *k >= n || *l >= n) {
                return Err(Error::Malformed(format!("term x{k}*x{l} uses a generator outside 0..{n}")));
            }
        }
        let rules: Vec<Rule<C>> = rules
            .into_iter()
            .map(|r| Rule { terms: r.terms.into_iter().filter(|t| !t.2.is_zero()).collect(), ..r })
            .collect();
        check_order(n, &rules, &oracle)?;
        Ok(Self::assemble(n, rules, cap, oracle))
    }

    /// A system on the same leading words whose terms are a subset of this
    /// one's, so the order check carries over.
    pub(crate) fn sibling<D: Coeff>(&self, rules: Vec<Rule<D>>, cap: Option<usize>) -> RewriteSystem<D> {
        debug_assert!(rules.iter().all(|r| {
            let own = self.rule(r.b, r.a).expect("sibling rule on a known leading word");
            r.terms.iter().all(|(k, l, _)| own.terms.iter().any(|(k2, l2, _)| k == k2 && l == l2))
        }));
        let rules = rules
            .into_iter()
            .map(|r| Rule { terms: r.terms.into_iter().filter(|t| !t.2.is_zero()).collect(), ..r })
            .collect();
        RewriteSystem::assemble(self.n, rules, cap, self.oracle.clone())
    }

    fn assemble(n: usize, rules: Vec<Rule<C>>, cap: Option<usize>, oracle: Arc<FiltrationOracle>) -> Self {
        let mut index = vec![None; n * n];
        for (i, r) in rules.iter().enumerate() {
            index[r.b * n + r.a] = Some(i);
        }
        RewriteSystem {
            n,
            rules,
            index,
            cap,
            oracle,
            left: Mutex::new(HashMap::new()),
            right: Mutex::new(HashMap::new()),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cap(&self) -> Option<usize> {
        self.cap
    }

    pub fn rules(&self) -> &[Rule<C>] {
        &self.rules
    }

    pub fn rule(&self, b: usize, a: usize) -> Option<&Rule<C>> {
        if b >= self.n || a >= self.n {
            return None;
        }
        self.index[b * self.n + a].map(|i| &self.rules[i])
    }

    pub fn oracle(&self) -> &Arc<FiltrationOracle> {
        &self.oracle
    }

    /// Same leading words with coefficients transformed by `f`. The order
    /// check is skipped: dropping terms cannot break it.
    pub fn map_coeffs<D: Coeff>(&self, mut f: impl FnMut(&C) -> Result<D>, cap: Option<usize>) -> Result<RewriteSystem<D>> {
        let mut rules = Vec::with_capacity(self.rules.len());
        for r in &self.rules {
            let mut terms = Vec::with_capacity(r.terms.len());
            for (k, l, c) in &r.terms {
                let d = f(c)?;
                if !d.is_zero() {
                    terms.push((*k, *l, d));
                }
            }
            rules.push(Rule { b: r.b, a: r.a, terms });
        }
        Ok(RewriteSystem::assemble(self.n, rules, cap, self.oracle.clone()))
    }

    fn is_reducible_at(&self, w: &Word, i: usize) -> Option<usize> {
        let (b, a) = (w.0[i] as usize, w.0[i + 1] as usize);
        self.index[b * self.n + a]
    }

    pub fn is_normal(&self, w: &Word) -> bool {
        (0..w.len().saturating_sub(1)).all(|i| self.is_reducible_at(w, i).is_none())
    }

    pub fn reduce(&self, p: &NCPoly<C>) -> Result<NCPoly<C>> {
        self.reduce_with(p, Strategy::Leftmost)
    }

    pub fn reduce_with(&self, p: &NCPoly<C>, strategy: Strategy) -> Result<NCPoly<C>> {
        let mut out = NCPoly::zero();
        for (w, c) in p.iter() {
            let nf = self.normal_form(w, strategy, 0)?;
            out.add_scaled(&nf, c, self.cap);
        }
        Ok(out)
    }

    pub fn reduce_word(&self, w: &Word) -> Result<NCPoly<C>> {
        Ok((*self.normal_form(w, Strategy::Leftmost, 0)?).clone())
    }

    fn normal_form(&self, w: &Word, strategy: Strategy, depth: usize) -> Result<Arc<NCPoly<C>>> {
        let cache = match strategy {
            Strategy::Leftmost => &self.left,
            Strategy::Rightmost => &self.right,
        };
        if let Some(p) = cache.lock().expect("cache lock").get(w) {
            return Ok(p.clone());
        }
        if depth > MAX_DEPTH {
            return Err(Error::InternalConsistency(format!("reduction of {w} did not terminate")));
        }
        let positions = 0..w.len().saturating_sub(1);
        let hit = match strategy {
            Strategy::Leftmost => positions.into_iter().find_map(|i| self.is_reducible_at(w, i).map(|r| (i, r))),
            Strategy::Rightmost => positions.rev().find_map(|i| self.is_reducible_at(w, i).map(|r| (i, r))),
        };
        let result = match hit {
            None => NCPoly::word(w.clone()),
            Some((i, r)) => {
                let mut out = NCPoly::zero();
                for (k, l, c) in &self.rules[r].terms {
                    let mut next = w.0.clone();
                    next[i] = *k as u8;
                    next[i + 1] = *l as u8;
                    let sub = self.normal_form(&Word(next), strategy, depth + 1)?;
                    out.add_scaled(&sub, c, self.cap);
                }
                out
            }
        };
        let result = Arc::new(result);
        cache.lock().expect("cache lock").insert(w.clone(), result.clone());
        Ok(result)
    }

    /// Descending triples `c > b > a` where both `x_c x_b` and `x_b x_a`
    /// are leading words.
    pub fn overlaps(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for c in 0..self.n {
            for b in 0..c {
                for a in 0..b {
                    if self.rule(c, b).is_some() && self.rule(b, a).is_some() {
                        out.push((c, b, a));
                    }
                }
            }
        }
        out
    }

    /// Difference of the two ways of reducing `x_c x_b x_a`: first
    /// rewriting `x_c x_b`, versus first rewriting `x_b x_a`.
    pub fn overlap_residue(&self, c: usize, b: usize, a: usize) -> Result<NCPoly<C>> {
        let (Some(cb), Some(ba)) = (self.rule(c, b), self.rule(b, a)) else {
            return Err(Error::Precondition(format!("x{c}*x{b}*x{a} is not an overlap")));
        };
        let mut left = NCPoly::zero();
        for (k, l, g) in &cb.terms {
            let nf = self.normal_form(&Word::new(&[*k, *l, a]), Strategy::Leftmost, 0)?;
            left.add_scaled(&nf, g, self.cap);
        }
        let mut right = NCPoly::zero();
        for (k, l, g) in &ba.terms {
            let nf = self.normal_form(&Word::new(&[c, *k, *l]), Strategy::Leftmost, 0)?;
            right.add_scaled(&nf, g, self.cap);
        }
        Ok(left.sub(&right))
    }

    /// Resolves every overlap; the system is confluent iff all residues vanish.
    pub fn check_diamond(&self) -> Result<DiamondReport<C>> {
        let triples = self.overlaps();
        let residues: Vec<NCPoly<C>> =
            triples.par_iter().map(|&(c, b, a)| self.overlap_residue(c, b, a)).collect::<Result<_>>()?;
        let mut failures = Vec::new();
        for (&triple, residue) in triples.iter().zip(residues) {
            if !residue.is_zero() {
                failures.push(OverlapFailure { triple, residue });
            }
        }
        Ok(DiamondReport { checked: triples.len(), failures })
    }

    /// Number of normal words of each degree `0..=max_degree`. Only
    /// meaningful, and only allowed, for a confluent system.
    pub fn hilbert_function(&self, max_degree: usize) -> Result<Vec<u64>> {
        let report = self.check_diamond()?;
        if !report.is_confluent() {
            let bad: Vec<String> = report.failures.iter().map(|f| format!("{:?}", f.triple)).collect();
            return Err(Error::Precondition(format!("system is not confluent at {}", bad.join(", "))));
        }
        Ok(self.count_normal_words(max_degree))
    }

    /// Counts words avoiding every leading word, without a confluence check.
    pub fn count_normal_words(&self, max_degree: usize) -> Vec<u64> {
        let n = self.n;
        let mut out = vec![1u64];
        if max_degree == 0 {
            return out;
        }
        let mut ending = vec![1u64; n];
        out.push(n as u64);
        for _ in 2..=max_degree {
            let next: Vec<u64> = (0..n)
                .map(|y| (0..n).filter(|&x| self.index[x * n + y].is_none()).map(|x| ending[x]).sum())
                .collect();
            ending = next;
            out.push(ending.iter().sum());
        }
        out
    }
}

fn check_order<C: Coeff>(n: usize, rules: &[Rule<C>], oracle: &FiltrationOracle) -> Result<()> {
    let mut flanks = vec![Word::default()];
    flanks.extend(Word::all(n, 1));
    flanks.extend(Word::all(n, 2));
    for r in rules {
        let lead = r.lead();
        for (k, l, _) in &r.terms {
            let t = Word::new(&[*k, *l]);
            for pre in &flanks {
                for post in &flanks {
                    let big = pre.concat(&lead).concat(post);
                    let small = pre.concat(&t).concat(post);
                    if oracle.compare(&small, &big) != Ordering::Less {
                        return Err(Error::Precondition(format!(
                            "rewrite {lead} -> {t} does not decrease the order inside {pre}*(..)*{post}"
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{EpsPoly, RatFunc, Rational};
    use crate::fixtures;
    use crate::weights::Weight;
    use proptest::prelude::{prop_assert, prop_assert_eq, proptest, ProptestConfig};

    fn q(e: i64) -> RatFunc {
        RatFunc::v_pow(e)
    }

    fn undeformed() -> RewriteSystem<RatFunc> {
        let m = fixtures::two_chain_exponent_matrix();
        let mut rules = Vec::new();
        for b in 0..5 {
            for a in 0..b {
                rules.push(Rule { b, a, terms: vec![(a, b, q(m.exp(b, a)))] });
            }
        }
        RewriteSystem::new(5, rules, Arc::new(FiltrationOracle::trivial(5)), None).unwrap()
    }

    fn two_chain_oracle() -> Arc<FiltrationOracle> {
        let w = |v: &[i64]| Weight(v.to_vec());
        Arc::new(
            FiltrationOracle::new(5, vec![w(&[2, -1, -1, 0, 0]), w(&[0, 2, -1, -1, 0]), w(&[-1, 0, 1, 1, -1])])
                .unwrap(),
        )
    }

    fn e(c: RatFunc, d: usize) -> EpsPoly {
        EpsPoly::term(c, d)
    }

    /// Two-chain deformation with the single free coefficient `c40` on
    /// `x_1^2` in the `x_4 x_0` relation.
    fn two_chain_deformed(c40: RatFunc) -> RewriteSystem<EpsPoly> {
        let m = fixtures::two_chain_exponent_matrix();
        let one = RatFunc::one;
        let c41 = "v^-10/(1-v^5)".parse::<RatFunc>().unwrap();
        let c42 = "v^2*(1+v^10)/((1-v^5)*(1-v^30))".parse::<RatFunc>().unwrap();
        let mut rules = Vec::new();
        for b in 0..5 {
            for a in 0..b {
                let mut terms = vec![(a, b, e(q(m.exp(b, a)), 0))];
                match (b, a) {
                    (4, 0) => {
                        terms.push((2, 3, e(one(), 1)));
                        terms.push((1, 1, e(c40.clone(), 2)));
                    }
                    (2, 1) => terms.push((0, 0, e(one(), 1))),
                    (4, 1) => terms.push((0, 3, e(c41.clone(), 2))),
                    (3, 2) => terms.push((1, 1, e(one(), 1))),
                    (4, 2) => terms.push((0, 1, e(c42.clone(), 3))),
                    _ => {}
                }
                rules.push(Rule { b, a, terms });
            }
        }
        RewriteSystem::new(5, rules, two_chain_oracle(), None).unwrap()
    }

    fn c40() -> RatFunc {
        "v^24/(v^30-1)".parse().unwrap()
    }

    #[test]
    fn undeformed_normal_forms_are_monomial() {
        let s = undeformed();
        let m = fixtures::two_chain_exponent_matrix();
        let nf = s.reduce_word(&Word::new(&[4, 3, 0])).unwrap();
        // x4 x3 x0 = q43 q40 q30 x0 x3 x4
        let c = q(m.exp(4, 3) + m.exp(4, 0) + m.exp(3, 0));
        assert_eq!(nf, NCPoly::term(Word::new(&[0, 3, 4]), c));
        assert!(s.check_diamond().unwrap().is_confluent());
        assert_eq!(s.hilbert_function(4).unwrap(), vec![1, 5, 15, 35, 70]);
    }

    #[test]
    fn two_chain_reduction_of_overlap() {
        let s = two_chain_deformed(c40());
        let nf = s.reduce_word(&Word::new(&[4, 3, 0])).unwrap();
        let coeff = |w: &[usize]| nf.coeff(&Word::new(w)).cloned().unwrap_or_else(EpsPoly::zero);
        assert_eq!(coeff(&[0, 3, 4]), e(q(-9), 0));
        assert_eq!(coeff(&[2, 3, 3]), e(q(-3), 1));
        let expected = &q(-9) * &(&RatFunc::one() + &(&c40() * &q(-24)));
        assert_eq!(coeff(&[1, 1, 3]).coeff(2), expected);
    }

    #[test]
    fn two_chain_is_confluent_with_solved_coefficients() {
        let s = two_chain_deformed(c40());
        let report = s.check_diamond().unwrap();
        assert_eq!(report.checked, 10);
        assert!(report.is_confluent(), "{:?}", report.failures);
        assert_eq!(s.hilbert_function(5).unwrap(), vec![1, 5, 15, 35, 70, 126]);
    }

    #[test]
    fn dropping_a_coefficient_breaks_the_430_overlap() {
        let s = two_chain_deformed(RatFunc::zero());
        let report = s.check_diamond().unwrap();
        let triples: Vec<_> = report.failures.iter().map(|f| f.triple).collect();
        assert!(triples.contains(&(4, 3, 0)), "{triples:?}");
        // the residue on x4 x3 x0 is the unmatched ε² x1^2 x3 term
        let f = report.failures.iter().find(|f| f.triple == (4, 3, 0)).unwrap();
        assert_eq!(f.residue.len(), 1);
        assert!(f.residue.coeff(&Word::new(&[1, 1, 3])).is_some());
        assert!(matches!(s.hilbert_function(3), Err(Error::Precondition(_))));
    }

    #[test]
    fn strategies_agree_on_confluent_system() {
        let s = two_chain_deformed(c40());
        for w in Word::all(5, 3) {
            let p = NCPoly::word(w);
            assert_eq!(s.reduce_with(&p, Strategy::Leftmost).unwrap(), s.reduce_with(&p, Strategy::Rightmost).unwrap());
        }
    }

    #[test]
    fn order_violation_is_rejected() {
        // x1 x0 -> x1 x1 raises deglex
        let rules = vec![Rule { b: 1, a: 0, terms: vec![(1, 1, Rational::from_integer(1.into()))] }];
        let r = RewriteSystem::new(2, rules, Arc::new(FiltrationOracle::trivial(2)), None);
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn malformed_rules_are_rejected() {
        let one = Rational::from_integer(1.into());
        let o = Arc::new(FiltrationOracle::trivial(3));
        let up = vec![Rule { b: 0, a: 1, terms: vec![(0, 1, one.clone())] }];
        assert!(matches!(RewriteSystem::new(3, up, o.clone(), None), Err(Error::Malformed(_))));
        let twice: Vec<Rule<Rational>> = vec![Rule { b: 1, a: 0, terms: vec![] }, Rule { b: 1, a: 0, terms: vec![] }];
        assert!(matches!(RewriteSystem::new(3, twice, o, None), Err(Error::Malformed(_))));
    }

    #[test]
    fn truncation_drops_high_eps_terms() {
        let full = two_chain_deformed(c40());
        let capped = full.map_coeffs(|c: &EpsPoly| Ok(c.clone()), Some(1)).unwrap();
        let nf = capped.reduce_word(&Word::new(&[4, 3, 0])).unwrap();
        assert!(nf.iter().all(|(_, c)| c.degree().unwrap_or(0) <= 1));
        assert!(nf.coeff(&Word::new(&[1, 1, 3])).is_none());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn normal_forms_are_normal_and_linear(
            w1 in proptest::collection::vec(0usize..5, 0..5),
            w2 in proptest::collection::vec(0usize..5, 0..5),
            k in -5i64..5,
        ) {
            let s = two_chain_deformed(c40());
            let a = Word::new(&w1);
            let b = Word::new(&w2);
            let ra = s.reduce_word(&a).unwrap();
            prop_assert!(ra.iter().all(|(w, _)| s.is_normal(w)));
            let kk = EpsPoly::constant(RatFunc::from_int(k));
            let mut p = NCPoly::word(a.clone());
            p.add_term(b.clone(), kk.clone());
            let mut expect = ra.clone();
            expect.add_scaled(&s.reduce_word(&b).unwrap(), &kk, None);
            prop_assert_eq!(s.reduce(&p).unwrap(), expect);
            // idempotent
            prop_assert_eq!(s.reduce(&ra).unwrap(), ra);
        }

        #[test]
        fn rightmost_matches_leftmost(w in proptest::collection::vec(0usize..5, 0..6)) {
            let s = two_chain_deformed(c40());
            let p = NCPoly::word(Word::new(&w));
            prop_assert_eq!(
                s.reduce_with(&p, Strategy::Leftmost).unwrap(),
                s.reduce_with(&p, Strategy::Rightmost).unwrap()
            );
        }
    }
}
