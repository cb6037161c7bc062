//! Torus weights: enumeration of relevant weights, the contributing
//! predicates, smoothable and obstructed weights, and the genericity report.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{rat, Rational};
use crate::linalg;
use crate::matrix::AltMatrix;

/// Integer vector indexed by generators.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Weight(pub Vec<i64>);

impl Weight {
    pub fn zero(n: usize) -> Self {
        Weight(vec![0; n])
    }

    /// Standard basis vector `e_i`.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut w = vec![0; n];
        w[i] = 1;
        Weight(w)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn sum(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn count(&self, value: i64) -> usize {
        self.0.iter().filter(|&&x| x == value).count()
    }

    pub fn is_relevant(&self) -> bool {
        self.0.iter().all(|&x| x >= -1) && self.sum() == 0
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&x| x >= 0)
    }

    pub fn add(&self, o: &Weight) -> Weight {
        Weight(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &Weight) -> Weight {
        Weight(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: i64) -> Weight {
        Weight(self.0.iter().map(|a| a * k).collect())
    }

    pub fn to_rationals(&self) -> Vec<Rational> {
        self.0.iter().map(|&x| rat(x)).collect()
    }
}

impl From<Vec<i64>> for Weight {
    fn from(v: Vec<i64>) -> Self {
        Weight(v)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(i64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// All weights with entries `>= -1` summing to zero, in lexicographic order.
pub fn relevant_weights(n: usize) -> Vec<Weight> {
    fn rec(n: usize, prefix: &mut Vec<i64>, remaining: i64, out: &mut Vec<Weight>) {
        let slots_left = (n - prefix.len()) as i64;
        if slots_left == 0 {
            if remaining == 0 {
                out.push(Weight(prefix.clone()));
            }
            return;
        }
        // each later slot contributes at least -1
        let hi = remaining + (slots_left - 1);
        for x in -1..=hi {
            prefix.push(x);
            rec(n, prefix, remaining - x, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, &mut Vec::with_capacity(n), 0, &mut out);
    out
}

fn contributing_with(a: &AltMatrix, w: &Weight) -> bool {
    if w.0.iter().any(|&x| x < -1) {
        return false;
    }
    (0..a.n()).filter(|&i| w.0[i] >= 0).all(|i| {
        a.row(i).iter().zip(&w.0).fold(Rational::zero(), |acc, (l, &wj)| acc + l * rat(wj)).is_zero()
    })
}

/// `w_i >= -1` everywhere and `Σ_j λ_ij w_j = 0` whenever `w_i >= 0`.
pub fn is_poisson_contributing(lambda: &AltMatrix, w: &Weight) -> bool {
    contributing_with(lambda, w)
}

/// Multiplicative condition `Π_j q_ij^{w_j} = 1` for `q = v^m` with formal
/// `v`, which reads `Σ_j m_ij w_j = 0` on exponents.
pub fn is_hochschild_contributing(m: &AltMatrix, w: &Weight) -> Result<bool> {
    if !m.is_integral() {
        return Err(Error::Modeling("Hochschild test needs an integer exponent matrix".into()));
    }
    if w.0.iter().any(|&x| x < -1) {
        return Ok(false);
    }
    let ok = (0..m.n()).filter(|&i| w.0[i] >= 0).all(|i| {
        let s: i64 = (0..m.n()).map(|j| m.int_entry(i, j).expect("integral") * w.0[j]).sum();
        s == 0
    });
    Ok(ok)
}

/// Whether `w` lies in the span of the given rows of `b`, decided by exact
/// rank comparison.
pub fn in_row_span(b: &AltMatrix, rows: &[usize], w: &Weight) -> bool {
    let base: Vec<Vec<Rational>> = rows.iter().map(|&i| b.row(i).to_vec()).collect();
    let r0 = linalg::bareiss_rank(&base);
    let mut ext = base;
    ext.push(w.to_rationals());
    linalg::bareiss_rank(&ext) == r0
}

/// Contributing test through the biresidue: a relevant `w` contributes iff
/// it is a combination of the rows `b_i` with `w_i = -1`.
pub fn is_contributing_by_span(b: &AltMatrix, w: &Weight) -> bool {
    if !w.is_relevant() {
        return false;
    }
    let rows: Vec<usize> = (0..w.len()).filter(|&i| w.0[i] == -1).collect();
    in_row_span(b, &rows, w)
}

/// Smoothable weights of `b`, keyed by the vertex pair `(i, j)`, `i < j`.
///
/// For `b_ij != 0` the candidate is `w_k = (b_jk + b_ki) / b_ij` with
/// `w_i = w_j = -1`; it is kept when every other entry is a nonnegative
/// integer.
pub fn smoothable_weights(b: &AltMatrix) -> BTreeMap<(usize, usize), Weight> {
    let n = b.n();
    let mut out = BTreeMap::new();
    for i in 0..n {
        for j in i + 1..n {
            let bij = b.get(i, j);
            if bij.is_zero() {
                continue;
            }
            let mut w = vec![0i64; n];
            let mut ok = true;
            for k in 0..n {
                if k == i || k == j {
                    w[k] = -1;
                    continue;
                }
                let x = (b.get(j, k) + b.get(k, i)) / bij;
                match (x.is_integer(), x.to_integer().to_i64()) {
                    (true, Some(v)) if v >= 0 => w[k] = v,
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                out.insert((i, j), Weight(w));
            }
        }
    }
    out
}

/// Exactly three entries equal to `-1`, the rest nonnegative, and `w` in
/// the span of the corresponding three rows of `b`.
pub fn is_obstructed(b: &AltMatrix, w: &Weight) -> bool {
    if w.count(-1) != 3 || w.0.iter().any(|&x| x < -1) {
        return false;
    }
    let rows: Vec<usize> = (0..w.len()).filter(|&i| w.0[i] == -1).collect();
    in_row_span(b, &rows, w)
}

/// Nonnegative integer combinations `Σ ν_i θ_i` with `1 <= Σ ν_i <= max_total`
/// that are obstructed. An empty result is the expected outcome for any
/// cycle-free choice of smoothable weights.
pub fn obstructed_combinations(b: &AltMatrix, thetas: &[Weight], max_total: usize) -> Vec<(Vec<usize>, Weight)> {
    let n = b.n();
    let mut found = Vec::new();
    let mut nu = vec![0usize; thetas.len()];
    fn rec(
        idx: usize,
        left: usize,
        nu: &mut Vec<usize>,
        acc: Weight,
        b: &AltMatrix,
        thetas: &[Weight],
        found: &mut Vec<(Vec<usize>, Weight)>,
    ) {
        if idx == thetas.len() {
            if nu.iter().any(|&x| x > 0) && is_obstructed(b, &acc) {
                found.push((nu.clone(), acc));
            }
            return;
        }
        for k in 0..=left {
            nu[idx] = k;
            let next = acc.add(&thetas[idx].scale(k as i64));
            rec(idx + 1, left - k, nu, next, b, thetas, found);
        }
        nu[idx] = 0;
    }
    rec(0, max_total, &mut nu, Weight::zero(n), b, thetas, &mut found);
    found
}

/// Dimensions by cohomological degree `0..=n` of the weight-`w` piece of
/// Hochschild cohomology: degree `p` has dimension
/// `C(#{w_j >= 0}, p - #{w_j = -1})`. Only meaningful for contributing `w`.
pub fn hh_weight_dims(w: &Weight) -> Vec<u64> {
    let free = w.0.iter().filter(|&&x| x >= 0).count() as u64;
    let minus = w.count(-1) as u64;
    (0..=w.len() as u64)
        .map(|p| if p < minus { 0 } else { binomial(free, p - minus) })
        .collect()
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Corank check plus both contributing sets over the relevant weights.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenericityReport {
    pub corank_ok: bool,
    pub contributing_equal: bool,
    pub relevant_contributing: Vec<Weight>,
    pub diagnostics: String,
}

/// Genericity of `λ` with exponent matrix `m = d λ`. Under formal `v` the
/// two contributing sets agree by construction; both are still computed
/// independently and compared.
pub fn genericity_report(lambda: &AltMatrix, d: i64) -> Result<GenericityReport> {
    let n = lambda.n();
    let m = lambda.scale(&rat(d));
    if !m.is_integral() {
        return Err(Error::Modeling(format!("{d} * λ is not an integer matrix")));
    }
    let corank = lambda.corank();
    let rel = relevant_weights(n);
    let poisson: Vec<bool> = rel.par_iter().map(|w| is_poisson_contributing(lambda, w)).collect();
    let hochschild: Vec<bool> = rel
        .par_iter()
        .map(|w| is_hochschild_contributing(&m, w))
        .collect::<Result<_>>()?;
    let mismatches: Vec<&Weight> = rel.iter().zip(poisson.iter().zip(&hochschild)).filter(|(_, (p, h))| p != h).map(|(w, _)| w).collect();
    let relevant_contributing: Vec<Weight> = rel.iter().zip(&poisson).filter(|(_, &p)| p).map(|(w, _)| w.clone()).collect();
    let mut diagnostics = format!(
        "corank {corank}; {} of {} relevant weights contribute",
        relevant_contributing.len(),
        rel.len()
    );
    if !mismatches.is_empty() {
        diagnostics.push_str(&format!("; predicates disagree on {mismatches:?}"));
    }
    Ok(GenericityReport {
        corank_ok: corank == 1,
        contributing_equal: mismatches.is_empty(),
        relevant_contributing,
        diagnostics,
    })
}
