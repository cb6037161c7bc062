//! Numeric assembly of a deformation along an edge set that may contain
//! cycles: the cycle-free part is solved exactly and evaluated, each cycle
//! becomes a Feigin-Odesskii factor, and distinct factors q-commute.

use std::collections::BTreeSet;

use num_complex::Complex64;
use serde::Serialize;

use super::{build_ansatz, solve_confluence, SolverLog};
use crate::diagram::{build_diagram, classify_cycle, decompose, CycleClassification, Decomposition};
use crate::error::{Error, Result};
use crate::exact::{RatFunc, Rational};
use crate::fo::{fo_relation_coeffs, ThetaParams};
use crate::matrix::ExponentMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Factor {
    Chain,
    /// Index into [`MixedSystem::cycles`].
    Cycle(usize),
    Cross,
}

/// `Σ c x_left x_right = 0`.
#[derive(Clone, Debug, Serialize)]
pub struct NumericRelation {
    pub factor: Factor,
    pub terms: Vec<(usize, usize, Complex64)>,
}

#[derive(Clone, Copy, Debug)]
pub struct MixedParams {
    /// Deformation parameter of the cycle-free factor.
    pub eps0: Complex64,
    pub v: Complex64,
    pub z: Complex64,
    /// Modular parameter shared by the cycle factors.
    pub tau: Complex64,
}

#[derive(Clone, Debug)]
pub struct MixedSystem {
    pub n: usize,
    pub decomposition: Decomposition,
    pub chain_vertices: Vec<usize>,
    pub cycles: Vec<CycleClassification>,
    pub relations: Vec<NumericRelation>,
    pub solver_log: Option<SolverLog>,
}

impl MixedSystem {
    pub fn relations_of(&self, f: Factor) -> impl Iterator<Item = &NumericRelation> {
        self.relations.iter().filter(move |r| r.factor == f)
    }
}

fn eval(c: &RatFunc, v: Complex64) -> Result<Complex64> {
    let x = c.eval_complex(v);
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Pole(format!("{c} at v = {v}")))
    }
}

/// Braided tensor product of the deformed chain factor with one FO
/// algebra per cycle of `edges`. `gammas` pair with `edges`; scalars on
/// cycle edges are unused.
pub fn assemble_mixed(
    m: &ExponentMatrix,
    edges: &[(usize, usize)],
    gammas: &[Rational],
    params: &MixedParams,
) -> Result<MixedSystem> {
    let n = m.n();
    if edges.len() != gammas.len() {
        return Err(Error::Parameter(format!("{} edges but {} scalars", edges.len(), gammas.len())));
    }
    let lambda = m.lambda();
    let keys: Vec<(usize, usize)> = edges.iter().map(|&(i, j)| (i.min(j), i.max(j))).collect();
    let diagram = build_diagram(&lambda.biresidue()?).restrict(&keys)?;
    let decomposition = decompose(&diagram)?;

    let mut owner: Vec<Option<usize>> = vec![None; n];
    let mut cycles = Vec::new();
    for (s, cyc) in decomposition.cycles.iter().enumerate() {
        for &x in cyc {
            owner[x] = Some(s);
        }
        cycles.push(classify_cycle(&lambda, cyc)?);
    }
    let chain_vertices: Vec<usize> = (0..n).filter(|&x| owner[x].is_none()).collect();
    let in_chain: BTreeSet<usize> = chain_vertices.iter().copied().collect();

    let mut relations = Vec::new();
    let one = Complex64::new(1.0, 0.0);

    // chain factor
    let (chain_edges, chain_gammas): (Vec<_>, Vec<_>) = keys
        .iter()
        .zip(gammas)
        .filter(|((i, j), _)| in_chain.contains(i) && in_chain.contains(j))
        .map(|(e, g)| (*e, g.clone()))
        .unzip();
    let mut solver_log = None;
    if chain_edges.is_empty() {
        for &b in &chain_vertices {
            for &a in chain_vertices.iter().filter(|&&a| a < b) {
                let q = eval(&RatFunc::v_pow(m.exp(b, a)), params.v)?;
                relations.push(NumericRelation { factor: Factor::Chain, terms: vec![(b, a, one), (a, b, -q)] });
            }
        }
    } else {
        let solved = solve_confluence(&build_ansatz(m, &chain_edges, &chain_gammas)?)?;
        for r in solved.system().rules() {
            if !(in_chain.contains(&r.a) && in_chain.contains(&r.b)) {
                continue;
            }
            let mut terms = vec![(r.b, r.a, one)];
            for (k, l, c) in &r.terms {
                let mut x = Complex64::new(0.0, 0.0);
                for (d, cd) in c.terms() {
                    x += eval(cd, params.v)? * params.eps0.powi(d as i32);
                }
                terms.push((*k, *l, -x));
            }
            relations.push(NumericRelation { factor: Factor::Chain, terms });
        }
        solver_log = Some(solved.log.clone());
    }

    // cycle factors
    for (s, cls) in cycles.iter().enumerate() {
        let ns = cls.n_s;
        let p = ThetaParams::new(ns, params.tau)?;
        let fo = fo_relation_coeffs(ns, cls.k_s, params.z, &p)?;
        for i in 0..ns {
            for j in 0..ns {
                let terms =
                    fo.relation(i, j).into_iter().map(|(l, r, c)| (cls.permutation[l], cls.permutation[r], c)).collect();
                relations.push(NumericRelation { factor: Factor::Cycle(s), terms });
            }
        }
    }

    // cross relations between distinct factors
    for b in 0..n {
        for a in 0..b {
            let same = match (owner[a], owner[b]) {
                (None, None) => true,
                (Some(x), Some(y)) => x == y,
                _ => false,
            };
            if !same {
                let q = eval(&RatFunc::v_pow(m.exp(b, a)), params.v)?;
                relations.push(NumericRelation { factor: Factor::Cross, terms: vec![(b, a, one), (a, b, -q)] });
            }
        }
    }

    Ok(MixedSystem { n, decomposition, chain_vertices, cycles, relations, solver_log })
}
