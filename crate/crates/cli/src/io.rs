//! JSON shapes read and written by the command-line tool.

use std::collections::BTreeMap;

use num_complex::Complex64;
use qdeform::deform::{Relation, SolverLog};
use qdeform::diagram::{Decomposition, SmoothingDiagram};
use qdeform::exact::Rational;
use qdeform::matrix::{ExponentMatrix, MatrixJson};
use qdeform::weights::{GenericityReport, Weight};
use qdeform::{Error, Result};
use serde::{Deserialize, Serialize};

/// A scalar written either as a JSON integer or as a string like `"3/2"`.
#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(untagged)]
pub enum Scalar {
    Int(i64),
    Text(String),
}

impl Scalar {
    pub fn to_rational(&self) -> Result<Rational> {
        match self {
            Scalar::Int(x) => Ok(Rational::from_integer((*x).into())),
            Scalar::Text(s) => parse_rational(s),
        }
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    s.trim().parse::<Rational>().map_err(|e| Error::Parameter(format!("bad rational {s:?}: {e}")))
}

pub fn parse_complex(s: &str) -> Result<Complex64> {
    s.trim().replace(' ', "").parse::<Complex64>().map_err(|e| Error::Parameter(format!("bad complex number {s:?}: {e}")))
}

/// Exponent matrix `m` with `λ = m / denominator`, plus an optional
/// deformation request.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SystemInput {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(alias = "numerators")]
    pub matrix: Vec<Vec<i64>>,
    pub denominator: i64,
    #[serde(default)]
    pub edges: Vec<(usize, usize)>,
    /// One scalar per edge; all ones when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gammas: Option<Vec<Scalar>>,
    /// Solved coefficients to replace after solving, by name.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub overrides: BTreeMap<String, String>,
}

impl SystemInput {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse { pos: e.column(), msg: format!("line {}: {e}", e.line()) })
    }

    pub fn exponent_matrix(&self) -> Result<ExponentMatrix> {
        let n = self.n.unwrap_or(self.matrix.len());
        ExponentMatrix::from_json(&MatrixJson { n, numerators: self.matrix.clone(), denominator: self.denominator })
    }

    pub fn gammas(&self) -> Result<Vec<Rational>> {
        match &self.gammas {
            None => Ok(vec![Rational::from_integer(1.into()); self.edges.len()]),
            Some(g) => g.iter().map(Scalar::to_rational).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SmoothableEdge {
    pub i: usize,
    pub j: usize,
    pub weight: Weight,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalyzeOutput {
    pub n: usize,
    pub lambda: MatrixJson,
    pub biresidue: MatrixJson,
    pub normalized: bool,
    pub corank: usize,
    pub genericity: GenericityReport,
    pub relevant_weight_count: usize,
    pub smoothable: Vec<SmoothableEdge>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiagramOutput {
    pub diagram: SmoothingDiagram,
    pub decomposition: Decomposition,
}

#[derive(Clone, Debug, Serialize)]
pub struct DeformOutput {
    pub relations: Vec<Relation>,
    pub coefficients: BTreeMap<String, String>,
    pub solver_log: SolverLog,
}

#[derive(Clone, Debug, Serialize)]
pub struct OverlapFailureJson {
    pub triple: (usize, usize, usize),
    pub residue: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyOutput {
    pub pass: bool,
    pub eps: String,
    pub overlaps_checked: usize,
    pub failures: Vec<OverlapFailureJson>,
    pub hilbert: Option<Vec<u64>>,
    pub expected_hilbert: Vec<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FoTerm {
    pub left: usize,
    pub right: usize,
    pub re: f64,
    pub im: f64,
    pub log_abs: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FoRelation {
    pub i: usize,
    pub j: usize,
    pub terms: Vec<FoTerm>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuperpotentialOutput {
    pub dimension: usize,
    pub twist_matrix: Option<Vec<Vec<String>>>,
    pub is_identity: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub caveat: Option<String>,
    pub specialization: BTreeMap<String, String>,
}
