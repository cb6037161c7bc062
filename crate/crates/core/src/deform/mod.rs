//! Flat filtered deformations of quantum polynomial rings along a
//! cycle-free set of smoothable edges.
//!
//! Each relation `x_b x_a = q_ba x_a x_b` acquires correction terms
//! `ε^m C x_k x_l` whose weights `-e_a - e_b + e_k + e_l` are sums of `m`
//! smoothable weights. Level-1 coefficients are the chosen scalars γ; the
//! rest are found by forcing every overlap `x_c x_b x_a` to resolve.

mod mixed;
mod solve;

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

pub use mixed::{assemble_mixed, Factor, MixedParams, MixedSystem, NumericRelation};
pub use solve::{solve_confluence, LevelLog, Relation, RelationTerm, SolvedSystem, SolverLog};

use crate::diagram::{build_diagram, decompose};
use crate::error::{Error, Result};
use crate::exact::{RatFunc, Rational};
use crate::linalg;
use crate::matrix::ExponentMatrix;
use crate::weights::{genericity_report, Weight};

/// Where a quadratic weight can sit: relation `x_b x_a` (`a < b`) gains a
/// term `x_k x_l` (`k <= l`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Placement {
    pub a: usize,
    pub b: usize,
    pub k: usize,
    pub l: usize,
}

impl Placement {
    pub fn weight(&self, n: usize) -> Weight {
        let mut w = vec![0i64; n];
        w[self.a] -= 1;
        w[self.b] -= 1;
        w[self.k] += 1;
        w[self.l] += 1;
        Weight(w)
    }

    /// Coefficient name in the `C_{ba}^{kl}` style, e.g. `C40^11`.
    pub fn name(&self, n: usize) -> String {
        if n <= 10 {
            format!("C{}{}^{}{}", self.b, self.a, self.k, self.l)
        } else {
            format!("C{},{}^{},{}", self.b, self.a, self.k, self.l)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuadraticWeight {
    pub weight: Weight,
    /// Multiplicities of the smoothable weights; they sum to the level.
    pub coords: Vec<u64>,
    pub placements: Vec<Placement>,
}

impl QuadraticWeight {
    pub fn level(&self) -> usize {
        self.coords.iter().sum::<u64>() as usize
    }

    /// Of the form `e_x - e_y`: such weights admit several placements and
    /// break uniqueness of the solved coefficients.
    pub fn is_difference(&self) -> bool {
        self.weight.count(1) == 1 && self.weight.count(-1) == 1 && self.weight.count(0) + 2 == self.weight.len()
    }
}

/// Quadratic weights lying in the monoid spanned by `thetas`, by level.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuadraticWeights {
    pub levels: BTreeMap<usize, Vec<QuadraticWeight>>,
}

impl QuadraticWeights {
    pub fn max_level(&self) -> usize {
        self.levels.keys().next_back().copied().unwrap_or(0)
    }

    pub fn at(&self, level: usize) -> &[QuadraticWeight] {
        self.levels.get(&level).map_or(&[], Vec::as_slice)
    }

    pub fn difference_weights(&self) -> Vec<Weight> {
        self.levels.values().flatten().filter(|q| q.is_difference()).map(|q| q.weight.clone()).collect()
    }
}

/// Every placement whose weight is a nonnegative integer combination of the
/// (linearly independent) `thetas`.
pub fn quadratic_weights(thetas: &[Weight], n: usize) -> Result<QuadraticWeights> {
    let rows: Vec<Vec<Rational>> = thetas.iter().map(Weight::to_rationals).collect();
    if linalg::bareiss_rank(&rows) != thetas.len() {
        return Err(Error::CyclePresent("smoothable weights are linearly dependent".into()));
    }
    // columns are the θ's
    let a: Vec<Vec<Rational>> = (0..n).map(|j| rows.iter().map(|r| r[j].clone()).collect()).collect();
    let mut by_weight: BTreeMap<Weight, QuadraticWeight> = BTreeMap::new();
    for pa in 0..n {
        for pb in pa + 1..n {
            for k in 0..n {
                for l in k..n {
                    if (k, l) == (pa, pb) {
                        continue;
                    }
                    let p = Placement { a: pa, b: pb, k, l };
                    let w = p.weight(n);
                    if let Some(q) = by_weight.get_mut(&w) {
                        q.placements.push(p);
                        continue;
                    }
                    let Some(coords) = monoid_coords(&a, &w, thetas.len()) else { continue };
                    if coords.iter().sum::<u64>() == 0 {
                        continue;
                    }
                    by_weight.insert(w.clone(), QuadraticWeight { weight: w, coords, placements: vec![p] });
                }
            }
        }
    }
    let mut levels: BTreeMap<usize, Vec<QuadraticWeight>> = BTreeMap::new();
    for q in by_weight.into_values() {
        levels.entry(q.level()).or_default().push(q);
    }
    for v in levels.values_mut() {
        v.sort_by(|x, y| x.placements[0].cmp(&y.placements[0]));
    }
    Ok(QuadraticWeights { levels })
}

fn monoid_coords(a: &[Vec<Rational>], w: &Weight, r: usize) -> Option<Vec<u64>> {
    let sol = linalg::solve(a, &w.to_rationals(), r)?;
    sol.x
        .iter()
        .map(|x| if x.is_integer() && *x >= Rational::from_integer(0.into()) { x.to_integer().try_into().ok() } else { None })
        .collect()
}

/// Coefficient of a correction term: a chosen scalar at level 1, an
/// unknown (index into [`Ansatz::unknowns`]) above.
#[derive(Clone, Debug, PartialEq)]
pub enum TermCoeff {
    Fixed(RatFunc),
    Unknown(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnsatzTerm {
    pub placement: Placement,
    pub level: usize,
    pub coeff: TermCoeff,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Unknown {
    pub name: String,
    pub placement: Placement,
    pub level: usize,
}

/// Deformed relation skeleton over a cycle-free edge set.
#[derive(Clone, Debug)]
pub struct Ansatz {
    pub exponents: ExponentMatrix,
    pub edges: Vec<(usize, usize)>,
    pub thetas: Vec<Weight>,
    pub gammas: Vec<Rational>,
    pub quadratic: QuadraticWeights,
    pub terms: Vec<AnsatzTerm>,
    pub unknowns: Vec<Unknown>,
}

impl Ansatz {
    pub fn n(&self) -> usize {
        self.exponents.n()
    }

    pub fn max_level(&self) -> usize {
        self.quadratic.max_level()
    }

    pub fn unknown_index(&self, name: &str) -> Option<usize> {
        self.unknowns.iter().position(|u| u.name == name)
    }

    pub fn unknowns_at(&self, level: usize) -> Vec<usize> {
        (0..self.unknowns.len()).filter(|&i| self.unknowns[i].level == level).collect()
    }
}

impl fmt::Display for Ansatz {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.n();
        for b in 0..n {
            for a in 0..b {
                write!(f, "x{b}*x{a} = v^{}*x{a}*x{b}", self.exponents.exp(b, a))?;
                for t in self.terms.iter().filter(|t| (t.placement.b, t.placement.a) == (b, a)) {
                    let c = match &t.coeff {
                        TermCoeff::Fixed(c) => c.to_string(),
                        TermCoeff::Unknown(i) => self.unknowns[*i].name.clone(),
                    };
                    write!(f, " + ({c})*eps^{}*x{}*x{}", t.level, t.placement.k, t.placement.l)?;
                }
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

/// Sets up the relation skeleton for the exponent matrix `m` deformed along
/// `edges` with first-order scalars `gammas`.
pub fn build_ansatz(m: &ExponentMatrix, edges: &[(usize, usize)], gammas: &[Rational]) -> Result<Ansatz> {
    let n = m.n();
    if edges.len() != gammas.len() {
        return Err(Error::Parameter(format!("{} edges but {} scalars", edges.len(), gammas.len())));
    }
    if edges.is_empty() {
        // the undeformed ring needs no genericity
        return Ok(Ansatz {
            exponents: m.clone(),
            edges: Vec::new(),
            thetas: Vec::new(),
            gammas: Vec::new(),
            quadratic: quadratic_weights(&[], n)?,
            terms: Vec::new(),
            unknowns: Vec::new(),
        });
    }
    let lambda = m.lambda();
    let report = genericity_report(&lambda, m.denominator())?;
    if !report.corank_ok || !report.contributing_equal {
        return Err(Error::Precondition(format!("matrix is not generic: {}", report.diagnostics)));
    }
    let diagram = build_diagram(&lambda.biresidue()?);
    let mut normalized: Vec<((usize, usize), Rational)> = Vec::new();
    for (&(i, j), g) in edges.iter().zip(gammas) {
        let key = (i.min(j), i.max(j));
        if normalized.iter().any(|(e, _)| *e == key) {
            return Err(Error::Parameter(format!("edge {}-{} listed twice", key.0, key.1)));
        }
        normalized.push((key, g.clone()));
    }
    normalized.sort_by_key(|(e, _)| *e);
    let keys: Vec<(usize, usize)> = normalized.iter().map(|(e, _)| *e).collect();
    let sub = diagram.restrict(&keys)?;
    let dec = decompose(&sub)?;
    if !dec.cycles.is_empty() {
        return Err(Error::CyclePresent(format!("{dec}")));
    }
    let thetas: Vec<Weight> = keys.iter().map(|&(i, j)| sub.edge(i, j).expect("restricted edge").weight.clone()).collect();
    let gammas: Vec<Rational> = normalized.into_iter().map(|(_, g)| g).collect();
    let quadratic = quadratic_weights(&thetas, n)?;

    let mut terms = Vec::new();
    let mut unknowns = Vec::new();
    for (&level, qs) in &quadratic.levels {
        for q in qs {
            for p in &q.placements {
                let coeff = if level == 1 {
                    let i = q.coords.iter().position(|&c| c == 1).expect("level-1 weight is a single θ");
                    TermCoeff::Fixed(RatFunc::constant(gammas[i].clone()))
                } else {
                    unknowns.push(Unknown { name: p.name(n), placement: *p, level });
                    TermCoeff::Unknown(usize::MAX)
                };
                terms.push(AnsatzTerm { placement: *p, level, coeff });
            }
        }
    }
    unknowns.sort_by_key(|u| (u.level, u.placement));
    for t in &mut terms {
        if let TermCoeff::Unknown(i) = &mut t.coeff {
            *i = unknowns.iter().position(|u| u.placement == t.placement).expect("unknown registered");
        }
    }
    terms.sort_by_key(|t| (t.placement.b, t.placement.a, t.level, t.placement.k, t.placement.l));
    Ok(Ansatz { exponents: m.clone(), edges: keys, thetas, gammas, quadratic, terms, unknowns })
}

/// Scalar identity behind the braided assembly: `q_cb q_ca = q_ck q_cl`
/// for each deformed term of `x_b x_a` and each generator `c` at which all
/// the smoothable weights building the term are nonnegative (in particular
/// every `c` off the edge set). Returns `(c, placement)` for every violation.
pub fn cross_relation_defects(ansatz: &Ansatz) -> Vec<(usize, Placement)> {
    let m = &ansatz.exponents;
    let n = ansatz.n();
    let mut out = Vec::new();
    for q in ansatz.quadratic.levels.values().flatten() {
        let used: Vec<&Weight> = ansatz.thetas.iter().zip(&q.coords).filter(|(_, &c)| c > 0).map(|(t, _)| t).collect();
        for c in (0..n).filter(|&c| used.iter().all(|t| t.0[c] >= 0)) {
            for p in &q.placements {
                if m.exp(c, p.b) + m.exp(c, p.a) != m.exp(c, p.k) + m.exp(c, p.l) {
                    out.push((c, *p));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use crate::fixtures;

    fn w(v: &[i64]) -> Weight {
        Weight(v.to_vec())
    }

    fn two_chain_thetas() -> Vec<Weight> {
        vec![w(&[2, -1, -1, 0, 0]), w(&[0, 2, -1, -1, 0]), w(&[-1, 0, 1, 1, -1])]
    }

    fn four_chain_thetas() -> Vec<Weight> {
        vec![w(&[-1, -1, 1, 1, 0]), w(&[2, -1, -1, 0, 0]), w(&[0, 0, -1, -1, 2]), w(&[0, 1, 1, -1, -1])]
    }

    fn weights_at(q: &QuadraticWeights, m: usize) -> Vec<Weight> {
        let mut v: Vec<Weight> = q.at(m).iter().map(|x| x.weight.clone()).collect();
        v.sort();
        v
    }

    #[test]
    fn two_chain_levels() {
        let t = two_chain_thetas();
        let q = quadratic_weights(&t, 5).unwrap();
        assert_eq!(q.max_level(), 3);
        let mut l2 = vec![t[0].add(&t[2]), t[1].add(&t[2])];
        l2.sort();
        assert_eq!(weights_at(&q, 2), l2);
        assert_eq!(weights_at(&q, 3), vec![t[0].add(&t[1]).add(&t[2])]);
        assert!(q.difference_weights().is_empty());
    }

    #[test]
    fn four_chain_levels() {
        let q = quadratic_weights(&four_chain_thetas(), 5).unwrap();
        let mut l2 = vec![w(&[-1, -1, 0, 0, 2]), w(&[-1, 0, 2, 0, -1]), w(&[2, 0, 0, -1, -1])];
        l2.sort();
        assert_eq!(weights_at(&q, 2), l2);
        let mut l3 = vec![w(&[-1, 0, 1, -1, 1]), w(&[1, -1, 1, 0, -1])];
        l3.sort();
        assert_eq!(weights_at(&q, 3), l3);
        assert_eq!(weights_at(&q, 4), vec![w(&[1, -1, 0, -1, 1])]);
        assert!(q.at(5).is_empty());
        assert_eq!(weights_at(&q, 6), vec![w(&[0, -1, 2, -1, 0])]);
        assert_eq!(q.max_level(), 6);
        assert!(q.difference_weights().is_empty());
    }

    #[test]
    fn single_edge_has_only_level_one() {
        let q = quadratic_weights(&two_chain_thetas()[..1], 5).unwrap();
        assert_eq!(q.max_level(), 1);
        assert_eq!(q.at(1).len(), 1);
    }

    #[test]
    fn dependent_thetas_route_to_cycle_error() {
        let t = vec![w(&[1, -1, 0]), w(&[-1, 1, 0])];
        assert!(matches!(quadratic_weights(&t, 3), Err(Error::CyclePresent(_))));
    }

    #[test]
    fn two_chain_ansatz_unknowns() {
        let m = fixtures::two_chain_exponent_matrix();
        let a = build_ansatz(&m, &[(1, 2), (2, 3), (0, 4)], &[rat(1), rat(1), rat(1)]).unwrap();
        let names: Vec<&str> = a.unknowns.iter().map(|u| u.name.as_str()).collect();
        assert_eq!(names, vec!["C40^11", "C41^03", "C42^01"]);
        let fixed = a.terms.iter().filter(|t| matches!(t.coeff, TermCoeff::Fixed(_))).count();
        assert_eq!(fixed, 3);
        assert_eq!(a.max_level(), 3);
    }

    #[test]
    fn four_chain_ansatz_unknowns() {
        let m = fixtures::four_chain_exponent_matrix();
        let a = build_ansatz(&m, &[(0, 1), (1, 2), (2, 3), (3, 4)], &vec![rat(1); 4]).unwrap();
        let mut names: Vec<&str> = a.unknowns.iter().map(|u| u.name.as_str()).collect();
        names.sort();
        assert_eq!(names, vec!["C10^44", "C30^24", "C31^04", "C31^22", "C40^22", "C41^02", "C43^00"]);
    }

    #[test]
    fn single_edge_ansatz_is_the_first_order_relation() {
        let m = fixtures::two_chain_exponent_matrix();
        let a = build_ansatz(&m, &[(2, 1)], &[rat(1)]).unwrap();
        assert!(a.unknowns.is_empty());
        assert_eq!(a.terms.len(), 1);
        let t = &a.terms[0];
        assert_eq!(t.placement, Placement { a: 1, b: 2, k: 0, l: 0 });
        assert_eq!(m.exp(2, 1), 12);
        assert!(a.to_string().contains("x2*x1 = v^12*x1*x2 + (1)*eps^1*x0*x0"));
    }

    #[test]
    fn non_smoothable_edge_is_a_parameter_error() {
        let m = fixtures::two_chain_exponent_matrix();
        assert!(matches!(build_ansatz(&m, &[(0, 1)], &[rat(1)]), Err(Error::Parameter(_))));
        assert!(matches!(build_ansatz(&m, &[(1, 2)], &[]), Err(Error::Parameter(_))));
    }
}
