use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::{Ansatz, TermCoeff};
use crate::error::{Error, Result};
use crate::exact::{EpsPoly, RatFunc, Rational};
use crate::linalg;
use crate::ncalg::{FiltrationOracle, NCPoly, RewriteSystem, Rule, Word};
use crate::weights::Weight;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelLog {
    pub level: usize,
    pub unknowns: Vec<String>,
    pub equations: usize,
    pub rank: usize,
    /// Unknowns left undetermined and set to zero.
    pub free: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolverLog {
    pub max_level: usize,
    pub levels: Vec<LevelLog>,
    /// Quadratic weights of the form `e_x - e_y`; when empty the solved
    /// coefficients are unique.
    pub difference_weights: Vec<Weight>,
    pub gauge_dimension: usize,
    pub overlaps_checked: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelationTerm {
    pub k: usize,
    pub l: usize,
    pub eps_power: usize,
    pub coeff: String,
}

/// `x_b x_a = Σ coeff ε^eps_power x_k x_l`, the commutation term included.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Relation {
    pub a: usize,
    pub b: usize,
    pub terms: Vec<RelationTerm>,
}

/// Deformed relations with every coefficient determined.
#[derive(Clone, Debug)]
pub struct SolvedSystem {
    pub ansatz: Ansatz,
    pub values: Vec<RatFunc>,
    pub log: SolverLog,
    system: RewriteSystem<EpsPoly>,
}

/// Rules with each unknown given by `value`; terms above `cap` are dropped.
fn rules(ansatz: &Ansatz, value: impl Fn(usize) -> RatFunc, cap: Option<usize>) -> Vec<Rule<EpsPoly>> {
    let n = ansatz.n();
    let m = &ansatz.exponents;
    let mut out = Vec::new();
    for b in 0..n {
        for a in 0..b {
            let mut terms = vec![(a, b, EpsPoly::constant(RatFunc::v_pow(m.exp(b, a))))];
            for t in ansatz.terms.iter().filter(|t| (t.placement.b, t.placement.a) == (b, a)) {
                if cap.is_some_and(|c| t.level > c) {
                    continue;
                }
                let c = match &t.coeff {
                    TermCoeff::Fixed(c) => c.clone(),
                    TermCoeff::Unknown(i) => value(*i),
                };
                terms.push((t.placement.k, t.placement.l, EpsPoly::term(c, t.level)));
            }
            out.push(Rule { b, a, terms });
        }
    }
    out
}

/// Validated system with every term present, used as the template for
/// the per-level variants.
fn template(ansatz: &Ansatz) -> Result<RewriteSystem<EpsPoly>> {
    let oracle = Arc::new(FiltrationOracle::new(ansatz.n(), ansatz.thetas.clone())?);
    RewriteSystem::new(ansatz.n(), rules(ansatz, |_| RatFunc::one(), None), oracle, None)
}

fn residues(sys: &RewriteSystem<EpsPoly>) -> Result<Vec<NCPoly<EpsPoly>>> {
    sys.overlaps().into_iter().map(|(c, b, a)| sys.overlap_residue(c, b, a)).collect()
}

/// Solves the overlap equations level by level, then certifies the result
/// with a full-precision diamond check.
pub fn solve_confluence(ansatz: &Ansatz) -> Result<SolvedSystem> {
    let tmpl = template(ansatz)?;
    let mut values: Vec<Option<RatFunc>> = vec![None; ansatz.unknowns.len()];
    let mut levels = Vec::new();
    for level in 2..=ansatz.max_level() {
        let unknowns = ansatz.unknowns_at(level);
        if unknowns.is_empty() {
            continue;
        }
        let known = values.clone();
        let at = |extra: Option<usize>| {
            let known = &known;
            tmpl.sibling(
                rules(
                    ansatz,
                    |i| match (&known[i], extra) {
                        (Some(v), _) => v.clone(),
                        (None, Some(j)) if j == i => RatFunc::one(),
                        _ => RatFunc::zero(),
                    },
                    Some(level),
                ),
                Some(level),
            )
        };
        // residue of every overlap with all level-m unknowns zero, then with
        // each one set to 1: the ε^m part is affine in the unknowns
        let variants: Vec<Option<usize>> = std::iter::once(None).chain(unknowns.iter().map(|&u| Some(u))).collect();
        let res: Vec<Vec<NCPoly<EpsPoly>>> =
            variants.par_iter().map(|&v| residues(&at(v))).collect::<Result<_>>()?;
        let mut rows: BTreeMap<(usize, Word), (Vec<RatFunc>, RatFunc)> = BTreeMap::new();
        let coeff = |p: &NCPoly<EpsPoly>, w: &Word| p.coeff(w).map_or_else(RatFunc::zero, |c| c.coeff(level));
        for (t, base) in res[0].iter().enumerate() {
            let mut words: Vec<&Word> = base.iter().map(|(w, _)| w).collect();
            for r in &res[1..] {
                words.extend(r[t].iter().map(|(w, _)| w));
            }
            for w in words {
                if rows.contains_key(&(t, w.clone())) {
                    continue;
                }
                let c0 = coeff(base, w);
                let row: Vec<RatFunc> = res[1..].iter().map(|r| &coeff(&r[t], w) - &c0).collect();
                if row.iter().all(RatFunc::is_zero) && c0.is_zero() {
                    continue;
                }
                rows.insert((t, w.clone()), (row, -&c0));
            }
        }
        let (a, b): (Vec<Vec<RatFunc>>, Vec<RatFunc>) = rows.into_values().unzip();
        let names = |idx: &[usize]| idx.iter().map(|&i| ansatz.unknowns[unknowns[i]].name.clone()).collect::<Vec<_>>();
        let sol = linalg::solve(&a, &b, unknowns.len()).ok_or_else(|| Error::Unsolvable {
            level,
            msg: format!("no values for {} satisfy {} equations", names(&(0..unknowns.len()).collect::<Vec<_>>()).join(", "), a.len()),
        })?;
        for (j, &u) in unknowns.iter().enumerate() {
            values[u] = Some(sol.x[j].clone());
        }
        levels.push(LevelLog {
            level,
            unknowns: names(&(0..unknowns.len()).collect::<Vec<_>>()),
            equations: a.len(),
            rank: unknowns.len() - sol.free.len(),
            free: names(&sol.free),
        });
    }
    let values: Vec<RatFunc> = values.into_iter().map(|v| v.unwrap_or_else(RatFunc::zero)).collect();
    let system = tmpl.sibling(rules(ansatz, |i| values[i].clone(), None), None);
    let report = system.check_diamond()?;
    if !report.is_confluent() {
        let bad: Vec<String> = report.failures.iter().map(|f| format!("{:?}", f.triple)).collect();
        return Err(Error::InternalConsistency(format!("solved system fails to resolve overlaps {}", bad.join(", "))));
    }
    let gauge_dimension = levels.iter().map(|l| l.free.len()).sum();
    let log = SolverLog {
        max_level: ansatz.max_level(),
        levels,
        difference_weights: ansatz.quadratic.difference_weights(),
        gauge_dimension,
        overlaps_checked: report.checked,
    };
    Ok(SolvedSystem { ansatz: ansatz.clone(), values, log, system })
}

impl SolvedSystem {
    pub fn n(&self) -> usize {
        self.ansatz.n()
    }

    pub fn value(&self, name: &str) -> Option<&RatFunc> {
        self.ansatz.unknown_index(name).map(|i| &self.values[i])
    }

    /// `(name, value)` in the ansatz's unknown order.
    pub fn named_values(&self) -> Vec<(String, RatFunc)> {
        self.ansatz.unknowns.iter().zip(&self.values).map(|(u, v)| (u.name.clone(), v.clone())).collect()
    }

    /// Rewriting system over `ℚ(v)[ε]`, full precision.
    pub fn system(&self) -> &RewriteSystem<EpsPoly> {
        &self.system
    }

    /// Replaces one solved value without re-solving or re-certifying.
    /// Meant for negative controls.
    pub fn with_value(&self, name: &str, value: RatFunc) -> Result<SolvedSystem> {
        let i = self
            .ansatz
            .unknown_index(name)
            .ok_or_else(|| Error::Parameter(format!("no unknown named {name}")))?;
        let mut values = self.values.clone();
        values[i] = value;
        let system = self.system.sibling(rules(&self.ansatz, |j| values[j].clone(), None), None);
        Ok(SolvedSystem { ansatz: self.ansatz.clone(), values, log: self.log.clone(), system })
    }

    pub fn relations(&self) -> Vec<Relation> {
        self.system
            .rules()
            .iter()
            .map(|r| {
                let mut terms: Vec<RelationTerm> = r
                    .terms
                    .iter()
                    .flat_map(|(k, l, c)| {
                        c.terms().map(move |(d, x)| RelationTerm { k: *k, l: *l, eps_power: d, coeff: x.to_string() })
                    })
                    .collect();
                terms.sort_by_key(|t| (t.eps_power, t.k, t.l));
                Relation { a: r.a, b: r.b, terms }
            })
            .collect()
    }

    /// Relations at `ε = eps0` with `v` kept formal.
    pub fn specialize_formal(&self, eps0: &Rational) -> Result<RewriteSystem<RatFunc>> {
        let e = RatFunc::constant(eps0.clone());
        self.system.map_coeffs(|c| Ok(c.at_eps(&e)), None)
    }

    /// Relations at `ε = eps0`, `v = v0`.
    pub fn specialize_at(&self, eps0: &Rational, v0: &Rational) -> Result<RewriteSystem<Rational>> {
        let e = RatFunc::constant(eps0.clone());
        self.system.map_coeffs(|c| c.at_eps(&e).evaluate(v0), None)
    }
}

#[cfg(test)]
mod tests {
    use super::super::build_ansatz;
    use super::*;
    use crate::exact::{rat, ratio};
    use crate::fixtures;
    use proptest::prelude::{prop_assert_eq, proptest, ProptestConfig};

    fn two_chain(gammas: &[Rational]) -> SolvedSystem {
        let m = fixtures::two_chain_exponent_matrix();
        solve_confluence(&build_ansatz(&m, &[(1, 2), (2, 3), (0, 4)], gammas).unwrap()).unwrap()
    }

    fn rf(s: &str) -> RatFunc {
        s.parse().unwrap()
    }

    #[test]
    fn two_chain_coefficients() {
        let s = two_chain(&[rat(1), rat(1), rat(1)]);
        assert_eq!(s.value("C40^11").unwrap(), &rf("v^24/(v^30-1)"));
        assert_eq!(s.value("C41^03").unwrap(), &rf("v^-10/(1-v^5)"));
        assert_eq!(s.value("C42^01").unwrap(), &rf("v^2*(1+v^10)/((1-v^5)*(1-v^30))"));
        assert_eq!(s.log.gauge_dimension, 0);
        assert!(s.log.difference_weights.is_empty());
        assert_eq!(s.log.overlaps_checked, 10);
    }

    #[test]
    fn four_chain_coefficients() {
        let m = fixtures::four_chain_exponent_matrix();
        let a = build_ansatz(&m, &[(0, 1), (1, 2), (2, 3), (3, 4)], &vec![rat(1); 4]).unwrap();
        let s = solve_confluence(&a).unwrap();
        let c10 = rf("-v^12/(1-v^15)");
        assert_eq!(s.value("C10^44").unwrap(), &c10);
        assert_eq!(s.value("C43^00").unwrap(), &c10);
        assert_eq!(s.value("C31^04").unwrap(), &rf("v^5*(1-v^5)*(1+v^10)/((1-v^10)^2*(1-v^15)^2)"));
        assert_eq!(s.value("C40^22").unwrap(), &rf("1/(v^5*(1-v^10))"));
        let c30 = rf("(1+v^10)/(v^5*(1-v^10)*(1-v^15))");
        assert_eq!(s.value("C30^24").unwrap(), &c30);
        assert_eq!(s.value("C41^02").unwrap(), &c30);
        assert_eq!(
            s.value("C31^22").unwrap(),
            &rf("v^2*(1+v^5+v^15)/((1-v^5)^3*(1+v^5)^4*(1-v^15)^2)")
        );
        assert_eq!(s.log.gauge_dimension, 0);
        let levels: Vec<usize> = s.log.levels.iter().map(|l| l.level).collect();
        assert_eq!(levels, vec![2, 3, 4, 6]);
    }

    #[test]
    fn empty_edge_set_is_undeformed() {
        let m = fixtures::two_chain_exponent_matrix();
        let s = solve_confluence(&build_ansatz(&m, &[], &[]).unwrap()).unwrap();
        assert!(s.values.is_empty());
        assert!(s.log.levels.is_empty());
        assert!(s.relations().iter().all(|r| r.terms.len() == 1));
    }

    #[test]
    fn negative_control_is_not_confluent() {
        let s = two_chain(&[rat(1), rat(1), rat(1)]).with_value("C40^11", RatFunc::zero()).unwrap();
        let report = s.system().check_diamond().unwrap();
        assert!(report.failures.iter().any(|f| f.triple == (4, 3, 0)));
        assert!(matches!(s.with_value("C99^00", RatFunc::zero()), Err(Error::Parameter(_))));
    }

    #[test]
    fn specializations_stay_confluent() {
        let s = two_chain(&[rat(1), rat(1), rat(1)]);
        let formal = s.specialize_formal(&rat(1)).unwrap();
        assert!(formal.check_diamond().unwrap().is_confluent());
        let num = s.specialize_at(&rat(1), &rat(2)).unwrap();
        assert!(num.check_diamond().unwrap().is_confluent());
        // ε = 0 returns the undeformed commutation relations
        let zero = s.specialize_formal(&rat(0)).unwrap();
        assert!(zero.rules().iter().all(|r| r.terms.len() == 1));
        // v = 1 is a pole of C40^11
        assert!(matches!(s.specialize_at(&rat(1), &rat(1)), Err(Error::Pole(_))));
    }

    #[test]
    fn relation_listing() {
        let s = two_chain(&[rat(1), rat(1), rat(1)]);
        let rels = s.relations();
        let r40 = rels.iter().find(|r| (r.b, r.a) == (4, 0)).unwrap();
        let shown: Vec<(usize, usize, usize, &str)> =
            r40.terms.iter().map(|t| (t.k, t.l, t.eps_power, t.coeff.as_str())).collect();
        assert_eq!(shown, vec![(0, 4, 0, "v^3"), (2, 3, 1, "1"), (1, 1, 2, "v^24/(v^30-1)")]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(6))]

        /// Rescaling the first-order scalars rescales each solved
        /// coefficient by `Π γ_i^{ν_i}`, ν its coordinates in the θ basis.
        #[test]
        fn gauge_rescaling(g in proptest::collection::vec((1i64..6, 1i64..4, proptest::bool::ANY), 3)) {
            let gammas: Vec<Rational> =
                g.iter().map(|&(p, q, neg)| ratio(if neg { -p } else { p }, q)).collect();
            let base = two_chain(&[rat(1), rat(1), rat(1)]);
            let scaled = two_chain(&gammas);
            for (u, v) in scaled.ansatz.unknowns.iter().zip(&scaled.values) {
                let q = scaled.ansatz.quadratic.at(u.level).iter()
                    .find(|q| q.placements.contains(&u.placement)).unwrap();
                let mut factor = rat(1);
                for (c, gi) in q.coords.iter().zip(&scaled.ansatz.gammas) {
                    for _ in 0..*c {
                        factor *= gi;
                    }
                }
                let expect = base.value(&u.name).unwrap() * &RatFunc::constant(factor);
                prop_assert_eq!(v, &expect);
            }
        }
    }
}
