//! Superpotentials and the Calabi-Yau witness.
//!
//! For a quadratic algebra `T(V)/(R)` with `n` generators the top Koszul
//! syzygy is `∩_i V^{⊗i} ⊗ R ⊗ V^{⊗(n-i-2)}`. When it is one-dimensional
//! it is spanned by a superpotential, and the algebra is Calabi-Yau when
//! that superpotential is invariant under the signed cyclic rotation.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{Field, RatFunc, Rational};
use crate::linalg;
use crate::matrix::ExponentMatrix;
use crate::ncalg::{Coeff, NCPoly, RewriteSystem, Word};

/// Degree-homogeneous element of `V^{⊗d}`; words of length `d`.
pub type TensorElement<C> = NCPoly<C>;

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// `x_0 ∧_q x_1 ∧_q … ∧_q x_{n-1}` with `x_i ∧_q x_j = x_i x_j - q_ij x_j x_i`:
/// the word `x_σ` carries `Π (-q_{σ_j σ_i})` over inversions `i < j`,
/// `σ_i > σ_j`.
pub fn superpotential_q(m: &ExponentMatrix) -> TensorElement<RatFunc> {
    let n = m.n();
    let mut phi = NCPoly::zero();
    for s in permutations(n) {
        let mut e = 0i64;
        let mut sign = 1i64;
        for i in 0..n {
            for j in i + 1..n {
                if s[i] > s[j] {
                    e += m.exp(s[j], s[i]);
                    sign = -sign;
                }
            }
        }
        phi.add_term(Word::new(&s), &RatFunc::from_int(sign) * &RatFunc::v_pow(e));
    }
    phi
}

/// Left partial derivative: strips a leading `x_i`.
pub fn left_derivative<C: Coeff>(phi: &TensorElement<C>, i: usize) -> TensorElement<C> {
    let mut out = NCPoly::zero();
    for (w, c) in phi.iter() {
        if w.0.first() == Some(&(i as u8)) {
            out.add_term(Word(w.0[1..].to_vec()), c.clone());
        }
    }
    out
}

fn index_of(w: &Word, n: usize) -> usize {
    w.0.iter().fold(0, |acc, &c| acc * n + c as usize)
}

fn word_of(mut idx: usize, n: usize, len: usize) -> Word {
    let mut v = vec![0u8; len];
    for slot in v.iter_mut().rev() {
        *slot = (idx % n) as u8;
        idx /= n;
    }
    Word(v)
}

/// Relation space `R ⊂ V⊗V`, one dense vector per rule `x_b x_a - rhs`.
pub fn relation_space<F: Field + Coeff>(sys: &RewriteSystem<F>) -> Vec<Vec<F>> {
    let n = sys.n();
    sys.rules()
        .iter()
        .map(|r| {
            let mut v = vec![<F as Field>::zero(); n * n];
            v[r.b * n + r.a] = <F as Field>::one();
            for (k, l, c) in &r.terms {
                let slot = &mut v[k * n + l];
                *slot = Field::sub(slot, c);
            }
            v
        })
        .collect()
}

/// Basis of `∩_{0 <= i <= d-2} V^{⊗i} ⊗ R ⊗ V^{⊗(d-2-i)}` in `V^{⊗d}`,
/// built one tensor factor at a time: `K_{m+1} = (K_m ⊗ V) ∩ (V^{⊗(m-1)} ⊗ R)`.
pub fn koszul_component(sys: &RewriteSystem<Rational>, d: usize) -> Vec<Vec<Rational>> {
    let n = sys.n();
    let rel = relation_space(sys);
    if d < 2 {
        return Vec::new();
    }
    let mut basis = linalg::rref(rel.clone(), n * n).rows;
    // annihilator of R
    let perp = linalg::nullspace(&rel, n * n);
    let zero = Rational::from_integer(0.into());
    for m in 2..d {
        if basis.is_empty() {
            break;
        }
        let cols = basis.len() * n;
        let prefixes = n.pow((m - 1) as u32);
        // unknown α_{b,t}: coefficient of basis[b] ⊗ x_t
        let mut rows = Vec::new();
        for p in 0..prefixes {
            for phi in &perp {
                let mut row = vec![zero.clone(); cols];
                let mut any = false;
                for (b, vec) in basis.iter().enumerate() {
                    for t in 0..n {
                        let mut s = zero.clone();
                        for y in 0..n {
                            let x = &vec[p * n + y];
                            let f = &phi[y * n + t];
                            if !Field::is_zero(x) && !Field::is_zero(f) {
                                s += x * f;
                            }
                        }
                        if !Field::is_zero(&s) {
                            any = true;
                            row[b * n + t] = s;
                        }
                    }
                }
                if any {
                    rows.push(row);
                }
            }
        }
        let kernel = linalg::nullspace(&rows, cols);
        let len = n.pow((m + 1) as u32);
        basis = kernel
            .iter()
            .map(|alpha| {
                let mut u = vec![zero.clone(); len];
                for (b, vec) in basis.iter().enumerate() {
                    for t in 0..n {
                        let a = &alpha[b * n + t];
                        if Field::is_zero(a) {
                            continue;
                        }
                        for (idx, x) in vec.iter().enumerate() {
                            if !Field::is_zero(x) {
                                u[idx * n + t] += a * x;
                            }
                        }
                    }
                }
                u
            })
            .collect();
        basis = linalg::rref(basis, len).rows;
    }
    basis
}

/// The top syzygy, normalized so the coefficient of `x_0 x_1 … x_{n-1}` is 1
/// (or, if that vanishes, the first nonzero coefficient in word order).
pub fn top_syzygy(sys: &RewriteSystem<Rational>) -> Result<TensorElement<Rational>> {
    let n = sys.n();
    let basis = koszul_component(sys, n);
    if basis.len() != 1 {
        return Err(Error::SyzygyDimension(basis.len()));
    }
    let v = &basis[0];
    let id = index_of(&Word::new(&(0..n).collect::<Vec<_>>()), n);
    let pivot = if Field::is_zero(&v[id]) { v.iter().position(|x| !Field::is_zero(x)).expect("nonzero basis vector") } else { id };
    let scale = v[pivot].clone();
    let mut phi = NCPoly::zero();
    for (idx, x) in v.iter().enumerate() {
        if !Field::is_zero(x) {
            phi.add_term(word_of(idx, n, n), x / &scale);
        }
    }
    Ok(phi)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TwistReport {
    /// `T` with `x_i ↦ Σ_j T_ij x_j`, when one exists.
    pub twist_matrix: Option<Vec<Vec<String>>>,
    pub is_identity: bool,
    pub caveat: Option<String>,
}

/// Writes `Φ = Σ x_i ⊗ v_i` and solves `Φ = (-1)^{d-1} Σ v_i ⊗ x'_i` for the
/// twist `x_i ↦ x'_i`.
pub fn cyclic_check(phi: &TensorElement<Rational>, n: usize) -> TwistReport {
    let Some(d) = phi.iter().next().map(|(w, _)| w.len()) else {
        return TwistReport { twist_matrix: None, is_identity: false, caveat: Some("zero tensor".into()) };
    };
    let zero = Rational::from_integer(0.into());
    let tail_len = n.pow((d - 1) as u32);
    // v[i][w] = Φ[x_i w]
    let mut v = vec![vec![zero.clone(); tail_len]; n];
    // u[j][w] = Φ[w x_j]
    let mut u = vec![vec![zero.clone(); tail_len]; n];
    for (w, c) in phi.iter() {
        let first = w.0[0] as usize;
        let last = *w.0.last().expect("nonempty word") as usize;
        v[first][index_of(&Word(w.0[1..].to_vec()), n)] = c.clone();
        u[last][index_of(&Word(w.0[..d - 1].to_vec()), n)] = c.clone();
    }
    let sign = if (d - 1) % 2 == 0 { Rational::from_integer(1.into()) } else { Rational::from_integer((-1).into()) };
    // for each j: u_j = sign * Σ_i T_ij v_i, a system in the column T_·j
    let a: Vec<Vec<Rational>> = (0..tail_len).map(|w| (0..n).map(|i| &sign * &v[i][w]).collect()).collect();
    let mut t = vec![vec![zero.clone(); n]; n];
    let mut caveat = None;
    for j in 0..n {
        match linalg::solve(&a, &u[j], n) {
            None => {
                return TwistReport {
                    twist_matrix: None,
                    is_identity: false,
                    caveat: Some("Φ is not a twisted rotation of itself".into()),
                }
            }
            Some(sol) => {
                if !sol.free.is_empty() {
                    caveat = Some(format!("slices v_i are dependent; {} free entries set to 0", sol.free.len()));
                }
                for i in 0..n {
                    t[i][j] = sol.x[i].clone();
                }
            }
        }
    }
    let one = Rational::from_integer(1.into());
    let is_identity = (0..n).all(|i| (0..n).all(|j| t[i][j] == if i == j { one.clone() } else { zero.clone() }));
    let twist_matrix = Some(t.iter().map(|row| row.iter().map(|x| x.to_string()).collect()).collect());
    TwistReport { twist_matrix, is_identity, caveat }
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessReport {
    pub dimension: usize,
    pub twist: Option<TwistReport>,
    /// `(ε, v)` as strings.
    pub specialization: (String, String),
}

impl WitnessReport {
    pub fn is_calabi_yau(&self) -> bool {
        self.dimension == 1 && self.twist.as_ref().is_some_and(|t| t.is_identity)
    }
}

/// Dimension of the top syzygy and the twist of its generator for a
/// rational system; dimension mismatch is reported rather than raised.
pub fn witness(sys: &RewriteSystem<Rational>, eps0: &Rational, v0: &Rational) -> WitnessReport {
    let n = sys.n();
    let specialization = (eps0.to_string(), v0.to_string());
    match top_syzygy(sys) {
        Ok(phi) => WitnessReport { dimension: 1, twist: Some(cyclic_check(&phi, n)), specialization },
        Err(_) => WitnessReport { dimension: koszul_component(sys, n).len(), twist: None, specialization },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deform::{build_ansatz, solve_confluence};
    use crate::exact::{rat, ratio};
    use crate::fixtures;
    use crate::matrix::AltMatrix;
    use crate::ncalg::{FiltrationOracle, Rule};
    use proptest::prelude::{prop_assert_eq, proptest, ProptestConfig, Strategy as _};
    use std::sync::Arc;

    fn exponent(rows: &[Vec<i64>]) -> ExponentMatrix {
        ExponentMatrix::new(AltMatrix::from_upper(rows.len(), |i, j| rat(rows[i][j])), 1).unwrap()
    }

    /// `x_b x_a -> q_ba x_a x_b` at `v = v0`.
    fn commutation(m: &ExponentMatrix, v0: &Rational) -> RewriteSystem<Rational> {
        let n = m.n();
        let mut rules = Vec::new();
        for b in 0..n {
            for a in 0..b {
                let q = RatFunc::v_pow(m.exp(b, a)).evaluate(v0).unwrap();
                rules.push(Rule { b, a, terms: vec![(a, b, q)] });
            }
        }
        RewriteSystem::new(n, rules, Arc::new(FiltrationOracle::trivial(n)), None).unwrap()
    }

    #[test]
    fn two_generator_superpotential() {
        let m = ExponentMatrix::new(AltMatrix::from_upper(2, |_, _| rat(3)), 1).unwrap();
        let phi = superpotential_q(&m);
        assert_eq!(phi.len(), 2);
        assert_eq!(phi.coeff(&Word::new(&[0, 1])), Some(&RatFunc::one()));
        // -q_01 = -v^3
        assert_eq!(phi.coeff(&Word::new(&[1, 0])), Some(&-RatFunc::v_pow(3)));
    }

    #[test]
    fn superpotential_has_every_permutation() {
        let phi = superpotential_q(&fixtures::two_chain_exponent_matrix());
        assert_eq!(phi.len(), 120);
    }

    #[test]
    fn derivatives_span_the_relations() {
        let m = exponent(&[vec![0, 1, -1], vec![-1, 0, 1], vec![1, -1, 0]]);
        let phi = superpotential_q(&m);
        let n = 3;
        let mut rules = Vec::new();
        for b in 0..n {
            for a in 0..b {
                rules.push(Rule { b, a, terms: vec![(a, b, RatFunc::v_pow(m.exp(b, a)))] });
            }
        }
        let sys = RewriteSystem::new(n, rules, Arc::new(FiltrationOracle::trivial(n)), None).unwrap();
        let mut rows = Vec::new();
        for i in 0..n {
            let d = left_derivative(&phi, i);
            assert!(sys.reduce(&d).unwrap().is_zero());
            let mut row = vec![RatFunc::zero(); n * n];
            for (w, c) in d.iter() {
                row[index_of(w, n)] = c.clone();
            }
            rows.push(row);
        }
        assert_eq!(linalg::rank(&rows, n * n), 3);
    }

    #[test]
    fn undeformed_syzygy_is_the_superpotential() {
        let m = exponent(&[vec![0, 2, -2], vec![-2, 0, 2], vec![2, -2, 0]]);
        let v0 = rat(3);
        let phi = top_syzygy(&commutation(&m, &v0)).unwrap();
        let expect = superpotential_q(&m).try_map(|c| c.evaluate(&v0)).unwrap();
        assert_eq!(phi, expect);
        assert!(cyclic_check(&phi, 3).is_identity);
    }

    #[test]
    fn golden_systems_are_calabi_yau() {
        let m = fixtures::two_chain_exponent_matrix();
        let a = build_ansatz(&m, &[(1, 2), (2, 3), (0, 4)], &[rat(1), rat(1), rat(1)]).unwrap();
        let s = solve_confluence(&a).unwrap();
        let (e, v) = (rat(1), rat(2));
        let sys = s.specialize_at(&e, &v).unwrap();
        let r = witness(&sys, &e, &v);
        assert!(r.is_calabi_yau(), "{r:?}");
        let broken = s.with_value("C40^11", RatFunc::zero()).unwrap().specialize_at(&e, &v).unwrap();
        match top_syzygy(&broken) {
            Err(Error::SyzygyDimension(d)) => assert_eq!(d, 0),
            other => panic!("expected a dimension error, got {other:?}"),
        }
    }

    #[test]
    fn non_normalized_matrix_twists() {
        // adding 1 to one exponent pair breaks normalization
        let m = exponent(&[vec![0, 3, -2], vec![-3, 0, 1], vec![2, -1, 0]]);
        assert!(!m.matrix().is_normalized());
        let phi = top_syzygy(&commutation(&m, &rat(2))).unwrap();
        assert!(!cyclic_check(&phi, 3).is_identity);
    }

    fn alt_rows(n: usize) -> impl proptest::strategy::Strategy<Value = Vec<Vec<i64>>> {
        proptest::collection::vec(-3i64..=3, n * (n - 1) / 2).prop_map(move |upper| {
            let mut rows = vec![vec![0i64; n]; n];
            let mut it = upper.into_iter();
            for i in 0..n {
                for j in i + 1..n {
                    let x = it.next().unwrap();
                    rows[i][j] = x;
                    rows[j][i] = -x;
                }
            }
            rows
        })
    }

    /// Random alternating matrix, normalized with probability about 1/2 by
    /// correcting the last row and column.
    fn maybe_normalized(n: usize) -> impl proptest::strategy::Strategy<Value = Vec<Vec<i64>>> {
        (alt_rows(n), proptest::bool::ANY).prop_map(move |(mut rows, fix)| {
            if fix {
                for i in 0..n - 1 {
                    rows[i][n - 1] = 0;
                    rows[n - 1][i] = 0;
                }
                // rows 0..n-1 must sum to zero using the last column
                for i in 0..n - 1 {
                    let s: i64 = rows[i].iter().sum();
                    rows[i][n - 1] = -s;
                    rows[n - 1][i] = s;
                }
            }
            rows
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn cyclic_invariance_iff_normalized(rows in (3usize..=5).prop_flat_map(maybe_normalized)) {
            let m = exponent(&rows);
            let phi = superpotential_q(&m).try_map(|c| c.evaluate(&ratio(3, 2))).unwrap();
            prop_assert_eq!(cyclic_check(&phi, rows.len()).is_identity, m.matrix().is_normalized());
        }
    }
}
