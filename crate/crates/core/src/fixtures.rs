//! Reference matrices used throughout the tests, the guide and the CLI
//! fixture files.
//!
//! The "two-chain" data has a smoothing diagram made of the chains 1-2-3 and
//! 0-4; the "four-chain" data has a single chain through all five vertices.
//! Both Poisson matrices are given as integer exponents over the common
//! denominator 30.

use crate::exact::{rat, Rational};
use crate::matrix::{AltMatrix, ExponentMatrix};

pub const DENOMINATOR: i64 = 30;

pub fn two_chain_exponents() -> Vec<Vec<i64>> {
    vec![
        vec![0, 1, -1, 3, -3],
        vec![-1, 0, -12, 12, 1],
        vec![1, 12, 0, -6, -7],
        vec![-3, -12, 6, 0, 9],
        vec![3, -1, 7, -9, 0],
    ]
}

pub fn two_chain_biresidue_entries() -> Vec<Vec<i64>> {
    vec![
        vec![0, 2, -4, -4, 6],
        vec![-2, 0, 3, 1, -2],
        vec![4, -3, 0, 1, -2],
        vec![4, -1, -1, 0, -2],
        vec![-6, 2, 2, 2, 0],
    ]
}

pub fn four_chain_exponents() -> Vec<Vec<i64>> {
    vec![
        vec![0, -6, 6, -2, 2],
        vec![6, 0, -3, -1, -2],
        vec![-6, 3, 0, -3, 6],
        vec![2, 1, 3, 0, -6],
        vec![-2, 2, -6, 6, 0],
    ]
}

pub fn four_chain_biresidue_entries() -> Vec<Vec<i64>> {
    vec![
        vec![0, 3, -1, -1, -1],
        vec![-3, 0, 2, 2, -1],
        vec![1, -2, 0, 2, -1],
        vec![1, -2, -2, 0, 3],
        vec![1, 1, 1, -3, 0],
    ]
}

fn scaled(rows: Vec<Vec<i64>>, d: i64) -> AltMatrix {
    let inv = Rational::new(1.into(), d.into());
    AltMatrix::from_integers(&rows).expect("fixture is alternating").scale(&inv)
}

pub fn two_chain_lambda() -> AltMatrix {
    scaled(two_chain_exponents(), DENOMINATOR)
}

pub fn two_chain_biresidue() -> AltMatrix {
    scaled(two_chain_biresidue_entries(), 1)
}

pub fn two_chain_exponent_matrix() -> ExponentMatrix {
    ExponentMatrix::new(AltMatrix::from_integers(&two_chain_exponents()).unwrap(), DENOMINATOR).unwrap()
}

pub fn four_chain_lambda() -> AltMatrix {
    scaled(four_chain_exponents(), DENOMINATOR)
}

pub fn four_chain_biresidue() -> AltMatrix {
    scaled(four_chain_biresidue_entries(), 1)
}

pub fn four_chain_exponent_matrix() -> ExponentMatrix {
    ExponentMatrix::new(AltMatrix::from_integers(&four_chain_exponents()).unwrap(), DENOMINATOR).unwrap()
}

/// A normalized corank-1 exponent matrix whose biresidue has no smoothable
/// edges left once an empty edge set is chosen; used for undeformed runs.
pub fn undeformed_exponent_matrix() -> ExponentMatrix {
    two_chain_exponent_matrix()
}

/// Integer vector helper for weights written inline.
pub fn ints(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| rat(x)).collect()
}
