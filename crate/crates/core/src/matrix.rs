//! Alternating matrices over Q: Poisson matrices λ, biresidue matrices b
//! and integer exponent matrices m with `q_ij = v^{m_ij}`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{rat, Rational};
use crate::linalg;

/// Square matrix with zero diagonal and `a_ij = -a_ji`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AltMatrix {
    n: usize,
    entries: Vec<Vec<Rational>>,
}

impl AltMatrix {
    /// Checks shape and antisymmetry. On failure the error names the first
    /// offending cell and lists all of them.
    pub fn validate(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let n = rows.len();
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::Malformed(format!("row {i} has {} entries, expected {n}", r.len())));
        }
        if n < 3 {
            return Err(Error::Malformed(format!("dimension {n} is below the minimum of 3")));
        }
        let mut cells = Vec::new();
        for i in 0..n {
            for j in i..n {
                let bad = if i == j { !rows[i][i].is_zero() } else { rows[i][j] != -&rows[j][i] };
                if bad {
                    cells.push((i, j));
                }
            }
        }
        if let Some(&(i, j)) = cells.first() {
            let msg = if i == j {
                format!("diagonal entry is {}", rows[i][i])
            } else {
                format!("entries {} and {} are not opposite", rows[i][j], rows[j][i])
            };
            return Err(Error::Validation { i, j, msg, cells });
        }
        Ok(AltMatrix { n, entries: rows })
    }

    /// Builds `a` from its strict upper triangle given by `f(i, j)`, `i < j`.
    /// Alternating by construction; any `n` is accepted.
    pub fn from_upper(n: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut e = vec![vec![Rational::zero(); n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let x = f(i, j);
                e[j][i] = -&x;
                e[i][j] = x;
            }
        }
        AltMatrix { n, entries: e }
    }

    pub fn from_integers(rows: &[Vec<i64>]) -> Result<Self> {
        Self::validate(rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect())
    }

    pub fn zero(n: usize) -> Self {
        AltMatrix { n, entries: vec![vec![Rational::zero(); n]; n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i][j]
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.entries[i]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(Zero::is_zero)
    }

    /// Every row sums to zero.
    pub fn is_normalized(&self) -> bool {
        self.entries.iter().all(|r| r.iter().sum::<Rational>().is_zero())
    }

    pub fn rank(&self) -> usize {
        linalg::bareiss_rank(&self.entries)
    }

    pub fn corank(&self) -> usize {
        self.n - self.rank()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        AltMatrix { n: self.n, entries: self.entries.iter().map(|r| r.iter().map(|x| x * c).collect()).collect() }
    }

    /// Principal submatrix on `idx`, in the given order.
    pub fn submatrix(&self, idx: &[usize]) -> Self {
        AltMatrix {
            n: idx.len(),
            entries: idx.iter().map(|&i| idx.iter().map(|&j| self.entries[i][j].clone()).collect()).collect(),
        }
    }

    pub fn is_integral(&self) -> bool {
        self.entries.iter().flatten().all(|x| x.is_integer())
    }

    /// Entry as a machine integer; `None` if fractional or too large.
    pub fn int_entry(&self, i: usize, j: usize) -> Option<i64> {
        let x = &self.entries[i][j];
        if x.is_integer() {
            x.to_integer().to_i64()
        } else {
            None
        }
    }

    /// The biresidue matrix: the unique normalized alternating `b` that is
    /// inverse to `λ` on the sum-zero hyperplane.
    pub fn biresidue(&self) -> Result<AltMatrix> {
        if !self.is_normalized() {
            return Err(Error::Precondition("biresidue needs a normalized matrix".into()));
        }
        let c = self.corank();
        if c != 1 {
            return Err(Error::Rank { expected: 1, found: c });
        }
        let n = self.n;
        let l = &self.entries;
        let reduced: Vec<Vec<Rational>> = (1..n)
            .map(|i| (1..n).map(|j| &l[i][j] + &l[j][0] + &l[0][i]).collect())
            .collect();
        let inv = linalg::inverse(&reduced).ok_or_else(|| Error::InternalConsistency("reduced matrix is singular".into()))?;
        let mut b = vec![vec![Rational::zero(); n]; n];
        for i in 1..n {
            for j in 1..n {
                b[i][j] = inv[i - 1][j - 1].clone();
            }
            let s: Rational = inv[i - 1].iter().sum();
            b[i][0] = -s;
            b[0][i] = -&b[i][0];
        }
        AltMatrix::validate(b)
    }

    /// `(entries * L)` as integers together with `L`, the lcm of all
    /// denominators.
    pub fn to_integer_form(&self) -> (Vec<Vec<i64>>, i64) {
        let l = self.entries.iter().flatten().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
        let nums = self
            .entries
            .iter()
            .map(|r| r.iter().map(|x| (x * &l).to_integer().to_i64().expect("entry fits in i64")).collect())
            .collect();
        (nums, l.to_i64().expect("denominator fits in i64"))
    }

    pub fn to_json(&self) -> MatrixJson {
        let (numerators, denominator) = self.to_integer_form();
        MatrixJson { n: self.n, numerators, denominator }
    }
}

impl fmt::Display for AltMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<Vec<String>> = self.entries.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
        let w = cells.iter().flatten().map(String::len).max().unwrap_or(1);
        for row in cells {
            let line: Vec<String> = row.iter().map(|c| format!("{c:>w$}")).collect();
            writeln!(f, "[{}]", line.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for AltMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AltMatrix{:?}", self.entries.iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>())
    }
}

/// Serialized matrix: `entries = numerators / denominator`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub n: usize,
    pub numerators: Vec<Vec<i64>>,
    pub denominator: i64,
}

impl MatrixJson {
    pub fn to_matrix(&self) -> Result<AltMatrix> {
        if self.denominator <= 0 {
            return Err(Error::Malformed("denominator must be a positive integer".into()));
        }
        if self.numerators.len() != self.n {
            return Err(Error::Malformed(format!("expected {} rows, found {}", self.n, self.numerators.len())));
        }
        let d = BigInt::from(self.denominator);
        AltMatrix::validate(
            self.numerators
                .iter()
                .map(|r| r.iter().map(|&x| Rational::new(x.into(), d.clone())).collect())
                .collect(),
        )
    }
}

/// Integer exponent matrix `m` of a q-symmetric algebra together with the
/// denominator `d` relating it to the Poisson matrix: `λ = m / d`, and the
/// formal variable stands for `e^{1/d}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentMatrix {
    m: AltMatrix,
    d: i64,
}

impl ExponentMatrix {
    pub fn new(m: AltMatrix, d: i64) -> Result<Self> {
        if !m.is_integral() {
            return Err(Error::Modeling("exponent matrix must have integer entries".into()));
        }
        if d <= 0 {
            return Err(Error::Malformed("denominator must be positive".into()));
        }
        Ok(ExponentMatrix { m, d })
    }

    /// Exponents for a rational λ, using the lcm of its denominators.
    pub fn from_lambda(lambda: &AltMatrix) -> Self {
        let (nums, d) = lambda.to_integer_form();
        let m = AltMatrix::from_upper(lambda.n(), |i, j| rat(nums[i][j]));
        ExponentMatrix { m, d }
    }

    pub fn from_json(j: &MatrixJson) -> Result<Self> {
        let m = AltMatrix::validate(j.numerators.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect())?;
        if j.n != m.n() {
            return Err(Error::Malformed(format!("declared n = {} but matrix is {}x{}", j.n, m.n(), m.n())));
        }
        Self::new(m, j.denominator)
    }

    pub fn n(&self) -> usize {
        self.m.n()
    }

    pub fn denominator(&self) -> i64 {
        self.d
    }

    pub fn matrix(&self) -> &AltMatrix {
        &self.m
    }

    /// `m_ij`, so that `q_ij = v^{m_ij}`.
    pub fn exp(&self, i: usize, j: usize) -> i64 {
        self.m.int_entry(i, j).expect("integral exponent")
    }

    pub fn lambda(&self) -> AltMatrix {
        self.m.scale(&Rational::new(BigInt::one(), self.d.into()))
    }

    pub fn to_json(&self) -> MatrixJson {
        let (numerators, _) = self.m.to_integer_form();
        MatrixJson { n: self.n(), numerators, denominator: self.d }
    }
}

/// The Feigin-Odesskii Poisson matrix:
/// `λ_ij = (j - i mod n) + (k (j - i) mod n) - n` off the diagonal.
pub fn fo_matrix(n: usize, k: usize) -> Result<AltMatrix> {
    if n < 2 || k == 0 || k >= n {
        return Err(Error::Parameter(format!("need 0 < k < n, got n = {n}, k = {k}")));
    }
    if n.gcd(&k) != 1 {
        return Err(Error::Parameter(format!("gcd({n}, {k}) != 1")));
    }
    let ni = n as i64;
    let ki = k as i64;
    Ok(AltMatrix::from_upper(n, |i, j| {
        let d = j as i64 - i as i64;
        rat(d.rem_euclid(ni) + (ki * d).rem_euclid(ni) - ni)
    }))
}

/// `k^{-1} mod n`.
pub fn mod_inverse(k: i64, n: i64) -> Option<i64> {
    let g = k.extended_gcd(&n);
    (g.gcd.abs() == 1).then(|| (g.x * g.gcd).rem_euclid(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::exact::ratio;
    use proptest::prelude::*;

    #[test]
    fn validation() {
        assert!(AltMatrix::from_integers(&fixtures::two_chain_exponents()).is_ok());
        let id: Vec<Vec<i64>> = (0..3).map(|i| (0..3).map(|j| (i == j) as i64).collect()).collect();
        match AltMatrix::from_integers(&id) {
            Err(Error::Validation { i, j, cells, .. }) => {
                assert_eq!((i, j), (0, 0));
                assert_eq!(cells, vec![(0, 0), (1, 1), (2, 2)]);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(AltMatrix::validate(vec![vec![rat(0); 4]; 4]).is_ok());
        assert!(matches!(AltMatrix::validate(vec![vec![rat(0); 2]; 3]), Err(Error::Malformed(_))));
    }

    #[test]
    fn normalization() {
        assert!(fixtures::two_chain_biresidue().is_normalized());
        let m = AltMatrix::from_upper(4, |i, j| rat((i == 0 && j == 1) as i64));
        assert!(!m.is_normalized());
        assert!(fo_matrix(5, 1).unwrap().is_normalized());
    }

    #[test]
    fn coranks() {
        assert_eq!(fixtures::two_chain_lambda().corank(), 1);
        assert_eq!(AltMatrix::zero(5).corank(), 5);
        assert_eq!(fo_matrix(5, 1).unwrap().corank(), 1);
    }

    #[test]
    fn biresidue_examples() {
        let lam = fixtures::two_chain_lambda();
        let b = lam.biresidue().unwrap();
        assert_eq!(b, fixtures::two_chain_biresidue());
        assert_eq!(b.biresidue().unwrap(), lam);
        assert_eq!(fixtures::four_chain_lambda().biresidue().unwrap(), fixtures::four_chain_biresidue());
        assert!(matches!(AltMatrix::zero(4).biresidue(), Err(Error::Rank { expected: 1, found: 4 })));
        let skew = AltMatrix::from_upper(3, |i, j| rat((i == 0 && j == 1) as i64));
        assert!(matches!(skew.biresidue(), Err(Error::Precondition(_))));
    }

    #[test]
    fn fo_examples() {
        let m = fo_matrix(3, 1).unwrap();
        let want = AltMatrix::from_integers(&[vec![0, -1, 1], vec![1, 0, -1], vec![-1, 1, 0]]).unwrap();
        assert_eq!(m, want);
        assert_eq!(fo_matrix(5, 2).unwrap().get(0, 1), &rat(-2));
        assert!(matches!(fo_matrix(6, 2), Err(Error::Parameter(_))));
        assert!(matches!(fo_matrix(5, 0), Err(Error::Parameter(_))));
    }

    #[test]
    fn fo_matrices_exhaustive() {
        for n in 3..=9usize {
            for k in 1..n {
                let Ok(m) = fo_matrix(n, k) else { continue };
                assert!(m.is_normalized(), "({n},{k})");
                if n.gcd(&(k + 1)) == 1 {
                    assert_eq!(m.corank(), 1, "({n},{k})");
                }
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let b = fixtures::two_chain_lambda();
        let j = b.to_json();
        assert_eq!(j.denominator, 30);
        assert_eq!(j.to_matrix().unwrap(), b);
        let e = ExponentMatrix::from_lambda(&b);
        assert_eq!(e.denominator(), 30);
        assert_eq!(e.exp(1, 0), -1);
        assert_eq!(e.lambda(), b);
    }

    #[test]
    fn non_integer_exponents_are_a_modeling_error() {
        let m = AltMatrix::from_upper(3, |_, _| ratio(1, 2));
        assert!(matches!(ExponentMatrix::new(m, 1), Err(Error::Modeling(_))));
    }

    fn arb_normalized(n: usize) -> impl Strategy<Value = AltMatrix> {
        // Alternating with zero row sums: choose the block on indices 1..n
        // freely, then fill row and column 0.
        prop::collection::vec(-4i64..5, n * n).prop_map(move |v| {
            let inner = AltMatrix::from_upper(n, |i, j| if i == 0 { rat(0) } else { rat(v[i * n + j]) });
            let mut rows = inner.rows().to_vec();
            for i in 1..n {
                let s: Rational = rows[i].iter().sum();
                rows[i][0] = -&s;
                rows[0][i] = s;
            }
            AltMatrix::validate(rows).unwrap()
        })
    }

    proptest! {
        #[test]
        fn biresidue_is_an_involution(m in arb_normalized(5)) {
            if m.corank() == 1 {
                let b = m.biresidue().unwrap();
                prop_assert!(b.is_normalized());
                prop_assert_eq!(b.corank(), 1);
                prop_assert_eq!(b.biresidue().unwrap(), m);
            }
        }
    }
}
