use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::RwLock;

use num_traits::{Signed, ToPrimitive};

use super::Word;
use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::linalg;
use crate::weights::Weight;

/// Filtration level of commutative weights with respect to a linearly
/// independent family of smoothable weights: the largest `Σ ν_i` over
/// `ν >= 0` with `w - Σ ν_i θ_i >= 0` componentwise.
#[derive(Debug)]
pub struct FiltrationOracle {
    n: usize,
    thetas: Vec<Weight>,
    /// Row `i` of a left inverse of the matrix with columns `θ`, as
    /// absolute row sums: `ν_i <= coef[i] * (max|w| + max(sum w, 0))`.
    coef: Vec<Rational>,
    /// `raise[i][j]`: some `θ_k`, `k >= i`, has a negative entry `j`, so
    /// subtracting it can still lift residual coordinate `j`.
    raise: Vec<Vec<bool>>,
    cache: RwLock<HashMap<Weight, usize>>,
}

impl Clone for FiltrationOracle {
    fn clone(&self) -> Self {
        FiltrationOracle {
            n: self.n,
            thetas: self.thetas.clone(),
            coef: self.coef.clone(),
            raise: self.raise.clone(),
            cache: RwLock::new(self.cache.read().expect("cache lock").clone()),
        }
    }
}

impl FiltrationOracle {
    /// Fails with a cycle-present error when the weights are dependent.
    pub fn new(n: usize, thetas: Vec<Weight>) -> Result<Self> {
        if let Some(t) = thetas.iter().find(|t| t.len() != n) {
            return Err(Error::Malformed(format!("weight {t} has length {}, expected {n}", t.len())));
        }
        let rows: Vec<Vec<Rational>> = thetas.iter().map(Weight::to_rationals).collect();
        let r = thetas.len();
        if linalg::bareiss_rank(&rows) != r {
            return Err(Error::CyclePresent("smoothable weights are linearly dependent".into()));
        }
        let coef = if r == 0 {
            Vec::new()
        } else {
            // left inverse L = (T T^t)^{-1} T with T the r x n matrix of rows θ_i
            let tt: Vec<Vec<Rational>> = (0..r)
                .map(|i| (0..r).map(|j| rows[i].iter().zip(&rows[j]).map(|(a, b)| a * b).sum()).collect())
                .collect();
            let g = linalg::inverse(&tt).expect("Gram matrix of independent rows is invertible");
            let l = linalg::mat_mul(&g, &rows);
            l.iter().map(|row| row.iter().map(|x| x.abs()).sum()).collect()
        };
        let raise = (0..=r)
            .map(|i| (0..n).map(|j| thetas[i..].iter().any(|t| t.0[j] < 0)).collect())
            .collect();
        Ok(FiltrationOracle { n, thetas, coef, raise, cache: RwLock::new(HashMap::new()) })
    }

    /// Oracle with no smoothable weights: every level is 0.
    pub fn trivial(n: usize) -> Self {
        Self::new(n, Vec::new()).expect("empty family is independent")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn thetas(&self) -> &[Weight] {
        &self.thetas
    }

    pub fn level(&self, w: &Weight) -> usize {
        if let Some(&l) = self.cache.read().expect("cache lock").get(w) {
            return l;
        }
        let l = self.compute(w);
        self.cache.write().expect("cache lock").insert(w.clone(), l);
        l
    }

    pub fn word_level(&self, w: &Word) -> usize {
        self.level(&w.weight(self.n))
    }

    fn compute(&self, w: &Weight) -> usize {
        if self.thetas.is_empty() {
            return 0;
        }
        let scale = w.0.iter().map(|x| x.abs()).max().unwrap_or(0) + w.sum().max(0);
        let bounds: Vec<i64> = self
            .coef
            .iter()
            .map(|c| (c * Rational::from_integer(scale.into())).floor().to_integer().to_i64().unwrap_or(i64::MAX))
            .collect();
        let mut best: Option<usize> = None;
        self.dfs(0, w.0.clone(), 0, &bounds, &mut best);
        best.unwrap_or(0)
    }

    fn dfs(&self, idx: usize, residual: Vec<i64>, total: usize, bounds: &[i64], best: &mut Option<usize>) {
        // coordinates that are negative and can no longer be raised
        if residual.iter().enumerate().any(|(j, &x)| x < 0 && !self.raise[idx][j]) {
            return;
        }
        if idx == self.thetas.len() {
            if best.is_none_or(|b| total > b) {
                *best = Some(total);
            }
            return;
        }
        let t = &self.thetas[idx].0;
        let mut r = residual;
        for k in 0..=bounds[idx].max(0) {
            self.dfs(idx + 1, r.clone(), total + k as usize, bounds, best);
            for (x, d) in r.iter_mut().zip(t) {
                *x -= d;
            }
        }
    }

    /// Filtration order: higher level is smaller; ties broken by
    /// degree-lexicographic order (shorter first, then letterwise).
    pub fn compare(&self, a: &Word, b: &Word) -> Ordering {
        let (la, lb) = (self.word_level(a), self.word_level(b));
        lb.cmp(&la).then_with(|| deglex(a, b))
    }
}

pub fn deglex(a: &Word, b: &Word) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.0.cmp(&b.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(v: &[i64]) -> Weight {
        Weight(v.to_vec())
    }

    fn two_chain() -> FiltrationOracle {
        FiltrationOracle::new(5, vec![w(&[2, -1, -1, 0, 0]), w(&[0, 2, -1, -1, 0]), w(&[-1, 0, 1, 1, -1])]).unwrap()
    }

    fn four_chain() -> FiltrationOracle {
        FiltrationOracle::new(
            5,
            vec![w(&[-1, -1, 1, 1, 0]), w(&[2, -1, -1, 0, 0]), w(&[0, 0, -1, -1, 2]), w(&[0, 1, 1, -1, -1])],
        )
        .unwrap()
    }

    /// Level of `w` by brute force over every ν with `Σ ν <= cap`.
    fn brute_level(o: &FiltrationOracle, w: &Weight, cap: usize) -> usize {
        let r = o.thetas.len();
        let mut best = 0;
        let mut nu = vec![0usize; r];
        loop {
            let total: usize = nu.iter().sum();
            if total <= cap {
                let mut x = w.clone();
                for (i, &k) in nu.iter().enumerate() {
                    x = x.sub(&o.thetas[i].scale(k as i64));
                }
                if x.is_nonnegative() {
                    best = best.max(total);
                }
            }
            let mut i = 0;
            while i < r {
                nu[i] += 1;
                if nu[i] <= cap {
                    break;
                }
                nu[i] = 0;
                i += 1;
            }
            if i == r {
                return best;
            }
        }
    }

    #[test]
    fn example_levels() {
        let o = two_chain();
        assert_eq!(o.level(&w(&[1, 1, -1, 0, -1])), 3);
        assert_eq!(o.level(&w(&[2, -1, -1, 0, 0])), 1);
        assert_eq!(o.level(&w(&[0, 1, 1, 0, 0])), 0);
        assert_eq!(o.level(&w(&[-1, 0, 0, 0, 0])), 0);
        let o = four_chain();
        assert_eq!(o.level(&w(&[0, -1, 2, -1, 0])), 6);
        assert_eq!(o.level(&w(&[-1, 0, 1, -1, 1])), 3);
        assert_eq!(o.level(&w(&[1, -1, 0, -1, 1])), 4);
    }

    #[test]
    fn order_examples() {
        let o = two_chain();
        let x10 = Word::new(&[1, 0]);
        let x01 = Word::new(&[0, 1]);
        assert_eq!(o.compare(&x01, &x10), Ordering::Less);
        assert_eq!(o.compare(&Word::new(&[0, 0]), &Word::new(&[2, 1])), Ordering::Less);
        assert_eq!(o.compare(&x10, &x10), Ordering::Equal);
    }

    #[test]
    fn dependent_weights_are_rejected() {
        let r = FiltrationOracle::new(3, vec![w(&[1, -1, 0]), w(&[2, -2, 0])]);
        assert!(matches!(r, Err(Error::CyclePresent(_))));
    }

    #[test]
    fn dfs_matches_brute_force() {
        for o in [two_chain(), four_chain()] {
            for d in 1..=4 {
                for word in Word::all(5, d) {
                    if !word.is_nondecreasing() {
                        continue;
                    }
                    let wt = word.weight(5);
                    assert_eq!(o.level(&wt), brute_level(&o, &wt, 3 * d), "{word}");
                }
            }
        }
    }

    #[test]
    fn monotone_under_adding_thetas() {
        let o = four_chain();
        for word in Word::all(5, 3) {
            let wt = word.weight(5);
            for t in o.thetas().to_vec() {
                let up = wt.add(&t);
                if up.is_nonnegative() {
                    assert!(o.level(&up) > o.level(&wt));
                }
            }
        }
    }
}
