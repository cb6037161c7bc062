//! Dense exact linear algebra over any [`Field`], plus fraction-free
//! (Bareiss) routines for rational matrices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::exact::{Field, Rational};

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug)]
pub struct Echelon<F> {
    pub rows: Vec<Vec<F>>,
    pub pivots: Vec<usize>,
}

/// Gauss-Jordan elimination. The pivot in each column is the first
/// remaining row with a nonzero entry, which keeps results deterministic.
pub fn rref<F: Field>(mut m: Vec<Vec<F>>, ncols: usize) -> Echelon<F> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].inv().expect("nonzero pivot");
        if inv != F::one() {
            for x in m[r][c..].iter_mut() {
                *x = x.mul(&inv);
            }
        }
        let prow = std::mem::take(&mut m[r]);
        for (i, row) in m.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c].clone();
            if f.is_zero() {
                continue;
            }
            for k in c..ncols {
                if !prow[k].is_zero() {
                    row[k] = row[k].sub(&f.mul(&prow[k]));
                }
            }
        }
        m[r] = prow;
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    Echelon { rows: m, pivots }
}

pub fn rank<F: Field>(m: &[Vec<F>], ncols: usize) -> usize {
    rref(m.to_vec(), ncols).pivots.len()
}

/// Solution of `A x = b` with every free unknown set to zero.
#[derive(Clone, Debug)]
pub struct Solution<F> {
    pub x: Vec<F>,
    /// Indices of unknowns left undetermined by the system.
    pub free: Vec<usize>,
}

/// Solves `A x = b`; `None` when the system is inconsistent.
pub fn solve<F: Field>(a: &[Vec<F>], b: &[F], nvars: usize) -> Option<Solution<F>> {
    let aug: Vec<Vec<F>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let e = rref(aug, nvars + 1);
    if e.pivots.last() == Some(&nvars) {
        return None;
    }
    let mut x = vec![F::zero(); nvars];
    for (row, &p) in e.rows.iter().zip(&e.pivots) {
        x[p] = row[nvars].clone();
    }
    let free = (0..nvars).filter(|c| !e.pivots.contains(c)).collect();
    Some(Solution { x, free })
}

/// Basis of `{x : A x = 0}`, one vector per free column in increasing
/// order, each with a 1 in its free coordinate.
pub fn nullspace<F: Field>(a: &[Vec<F>], ncols: usize) -> Vec<Vec<F>> {
    let e = rref(a.to_vec(), ncols);
    let mut is_pivot = vec![false; ncols];
    for &p in &e.pivots {
        is_pivot[p] = true;
    }
    (0..ncols)
        .filter(|&c| !is_pivot[c])
        .map(|f| {
            let mut v = vec![F::zero(); ncols];
            v[f] = F::one();
            for (row, &p) in e.rows.iter().zip(&e.pivots) {
                v[p] = row[f].neg();
            }
            v
        })
        .collect()
}

/// Clears denominators row by row, producing an integer matrix with the
/// same row space.
fn integer_rows(m: &[Vec<Rational>]) -> Vec<Vec<BigInt>> {
    m.iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
            row.iter().map(|x| (x * &l).to_integer()).collect()
        })
        .collect()
}

/// Rank by fraction-free Bareiss elimination on the integer-cleared matrix.
pub fn bareiss_rank(m: &[Vec<Rational>]) -> usize {
    if m.is_empty() {
        return 0;
    }
    let ncols = m[0].len();
    let mut a = integer_rows(m);
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        for i in r + 1..a.len() {
            for k in c + 1..ncols {
                let v = (&a[r][c] * &a[i][k] - &a[i][c] * &a[r][k]) / &prev;
                a[i][k] = v;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        r += 1;
        if r == a.len() {
            break;
        }
    }
    r
}

/// Inverse of a square rational matrix via fraction-free elimination on
/// `[A | I]`; `None` when singular.
pub fn inverse(m: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = m.len();
    let ints = integer_rows(m);
    let scales: Vec<BigInt> = m
        .iter()
        .map(|row| row.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom())))
        .collect();
    // [A' | I] with A' = D A, D = diag(scales); A^{-1} = A'^{-1} D.
    let mut a: Vec<Vec<BigInt>> = ints
        .into_iter()
        .enumerate()
        .map(|(i, mut row)| {
            row.extend((0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
            row
        })
        .collect();
    let w = 2 * n;
    let mut prev = BigInt::one();
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero())?;
        a.swap(c, p);
        for i in 0..n {
            if i == c {
                continue;
            }
            for k in 0..w {
                if k == c {
                    continue;
                }
                a[i][k] = (&a[c][c] * &a[i][k] - &a[i][c] * &a[c][k]) / &prev;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[c][c].clone();
    }
    // Now a = [det*I | det*A'^{-1}] up to the Bareiss invariant.
    let det = prev;
    Some(
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| Rational::new(a[i][n + j].clone() * &scales[j], det.clone()))
                    .collect()
            })
            .collect(),
    )
}

pub fn mat_mul<F: Field>(a: &[Vec<F>], b: &[Vec<F>]) -> Vec<Vec<F>> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    (0..inner).fold(F::zero(), |acc, k| {
                        if row[k].is_zero() || b[k][j].is_zero() {
                            acc
                        } else {
                            acc.add(&row[k].mul(&b[k][j]))
                        }
                    })
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, ratio};
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect()
    }

    /// Rank by the largest nonvanishing minor, computed by Laplace expansion.
    fn minor_rank(a: &[Vec<Rational>]) -> usize {
        fn det(a: &[Vec<Rational>]) -> Rational {
            if a.is_empty() {
                return rat(1);
            }
            let mut acc = rat(0);
            for j in 0..a.len() {
                let sub: Vec<Vec<Rational>> = a[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, x)| x.clone()).collect())
                    .collect();
                let t = &a[0][j] * det(&sub);
                if j % 2 == 0 {
                    acc += t
                } else {
                    acc -= t
                }
            }
            acc
        }
        fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            (k - 1..n)
                .flat_map(|last| {
                    subsets(last, k - 1).into_iter().map(move |mut s| {
                        s.push(last);
                        s
                    })
                })
                .collect()
        }
        let (r, c) = (a.len(), a.first().map_or(0, Vec::len));
        for k in (1..=r.min(c)).rev() {
            for rs in subsets(r, k) {
                for cs in subsets(c, k) {
                    let sub: Vec<Vec<Rational>> = rs.iter().map(|&i| cs.iter().map(|&j| a[i][j].clone()).collect()).collect();
                    if det(&sub) != rat(0) {
                        return k;
                    }
                }
            }
        }
        0
    }

    #[test]
    fn solve_and_nullspace() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6]]);
        let s = solve(&a, &[rat(1), rat(2)], 3).unwrap();
        assert_eq!(s.x, vec![rat(1), rat(0), rat(0)]);
        assert_eq!(s.free, vec![1, 2]);
        assert!(solve(&a, &[rat(1), rat(3)], 3).is_none());
        let ns = nullspace(&a, 3);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            let prod = mat_mul(&a, &v.iter().map(|x| vec![x.clone()]).collect::<Vec<_>>());
            assert!(prod.iter().all(|r| r[0] == rat(0)));
        }
    }

    #[test]
    fn inverse_round_trip() {
        let a = vec![vec![ratio(1, 2), rat(3)], vec![rat(-1), ratio(2, 3)]];
        let inv = inverse(&a).unwrap();
        let id = mat_mul(&a, &inv);
        assert_eq!(id, m(&[&[1, 0], &[0, 1]]));
        assert!(inverse(&m(&[&[1, 2], &[2, 4]])).is_none());
    }

    proptest! {
        #[test]
        fn elimination_ranks_agree_with_minors(
            entries in prop::collection::vec(-3i64..4, 16),
            rows in 1usize..5,
        ) {
            let a: Vec<Vec<Rational>> = (0..rows).map(|i| (0..4).map(|j| rat(entries[i * 4 + j])).collect()).collect();
            let want = minor_rank(&a);
            prop_assert_eq!(bareiss_rank(&a), want);
            prop_assert_eq!(rank(&a, 4), want);
        }

        #[test]
        fn inverse_is_two_sided(entries in prop::collection::vec(-5i64..6, 9), d in 1i64..4) {
            let a: Vec<Vec<Rational>> = (0..3).map(|i| (0..3).map(|j| ratio(entries[i * 3 + j], d)).collect()).collect();
            if let Some(inv) = inverse(&a) {
                let id: Vec<Vec<Rational>> = (0..3).map(|i| (0..3).map(|j| rat((i == j) as i64)).collect()).collect();
                prop_assert_eq!(mat_mul(&a, &inv), id.clone());
                prop_assert_eq!(mat_mul(&inv, &a), id);
            } else {
                prop_assert!(bareiss_rank(&a) < 3);
            }
        }
    }
}
