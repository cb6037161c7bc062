//! Batch front end: one job in, one JSON (or text) artifact out.

pub mod io;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use qdeform::deform::{build_ansatz, solve_confluence, Relation, SolvedSystem};
use qdeform::diagram::{build_diagram, decompose};
use qdeform::exact::{RatFunc, Rational};
use qdeform::fo::{degeneration_check, fo_relation_coeffs, ThetaParams};
use qdeform::potential::witness;
use qdeform::weights::{binomial, genericity_report, relevant_weights, smoothable_weights};
use qdeform::{Error, Result};
use serde::Serialize;

use io::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Analyze,
    Diagram,
    Deform,
    Verify,
    Fo,
    Superpotential,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Json,
    Text,
}

#[derive(Clone, Debug)]
pub struct Options {
    pub dmax: usize,
    pub eps: String,
    pub v0: String,
    pub z: String,
    pub tau: String,
    /// Modular parameters for the degeneration fit.
    pub taus: Vec<String>,
    pub gammas: Option<Vec<String>>,
    pub n: Option<usize>,
    pub k: Option<usize>,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            dmax: 6,
            eps: "1".into(),
            v0: "2".into(),
            z: "0.07+0.02i".into(),
            tau: "12i".into(),
            taus: vec!["8i".into(), "10i".into(), "12i".into()],
            gammas: None,
            n: None,
            k: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct JobSpec {
    pub command: Command,
    /// JSON text of the input system; `fo` takes none.
    pub input: Option<String>,
    pub format: Format,
    pub options: Options,
}

/// Rendered artifact plus the exit status it warrants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub output: String,
    pub status: i32,
}

impl Outcome {
    fn ok(output: String) -> Self {
        Outcome { output, status: 0 }
    }
}

fn to_json<T: Serialize>(x: &T) -> String {
    let mut s = serde_json::to_string_pretty(x).expect("output types serialize");
    s.push('\n');
    s
}

fn input(spec: &JobSpec) -> Result<SystemInput> {
    let text = spec.input.as_deref().ok_or_else(|| Error::Parameter("this command needs an input system".into()))?;
    let mut sys = SystemInput::parse(text)?;
    if let Some(g) = &spec.options.gammas {
        sys.gammas = Some(g.iter().map(|s| Scalar::Text(s.clone())).collect());
    }
    Ok(sys)
}

fn solve(sys: &SystemInput) -> Result<SolvedSystem> {
    let m = sys.exponent_matrix()?;
    let mut solved = solve_confluence(&build_ansatz(&m, &sys.edges, &sys.gammas()?)?)?;
    for (name, value) in &sys.overrides {
        let value: RatFunc = value.parse()?;
        solved = solved.with_value(name, value)?;
    }
    Ok(solved)
}

pub fn render_relation(r: &Relation) -> String {
    let mut s = format!("x{}*x{} =", r.b, r.a);
    for (idx, t) in r.terms.iter().enumerate() {
        let sep = if idx == 0 { " " } else { " + " };
        let eps = match t.eps_power {
            0 => String::new(),
            1 => "eps*".into(),
            d => format!("eps^{d}*"),
        };
        let _ = write!(s, "{sep}({})*{eps}x{}*x{}", t.coeff, t.k, t.l);
    }
    s
}

/// Runs one job. Input and parameter problems surface as `Err`; a
/// completed check that fails still yields an artifact, with a nonzero
/// status.
pub fn run(spec: &JobSpec) -> Result<Outcome> {
    let text = spec.format == Format::Text;
    match spec.command {
        Command::Analyze => {
            let sys = input(spec)?;
            let m = sys.exponent_matrix()?;
            let lambda = m.lambda();
            let b = lambda.biresidue()?;
            let out = AnalyzeOutput {
                n: m.n(),
                lambda: m.to_json(),
                biresidue: b.to_json(),
                normalized: lambda.is_normalized(),
                corank: lambda.corank(),
                genericity: genericity_report(&lambda, m.denominator())?,
                relevant_weight_count: relevant_weights(m.n()).len(),
                smoothable: smoothable_weights(&b)
                    .into_iter()
                    .map(|((i, j), weight)| SmoothableEdge { i, j, weight })
                    .collect(),
            };
            if text {
                let mut s = format!("n = {}, corank = {}, normalized = {}\n", out.n, out.corank, out.normalized);
                let _ = writeln!(s, "biresidue:\n{b}");
                let _ = writeln!(
                    s,
                    "generic: {}",
                    out.genericity.corank_ok && out.genericity.contributing_equal
                );
                for e in &out.smoothable {
                    let _ = writeln!(s, "smoothable {}-{}: {:?}", e.i, e.j, e.weight);
                }
                Ok(Outcome::ok(s))
            } else {
                Ok(Outcome::ok(to_json(&out)))
            }
        }
        Command::Diagram => {
            let sys = input(spec)?;
            let m = sys.exponent_matrix()?;
            let mut diagram = build_diagram(&m.lambda().biresidue()?);
            if !sys.edges.is_empty() {
                let keys: Vec<_> = sys.edges.iter().map(|&(i, j)| (i.min(j), i.max(j))).collect();
                diagram = diagram.restrict(&keys)?;
            }
            let decomposition = decompose(&diagram)?;
            if text {
                Ok(Outcome::ok(diagram.render_text()))
            } else {
                Ok(Outcome::ok(to_json(&DiagramOutput { diagram, decomposition })))
            }
        }
        Command::Deform => {
            let solved = solve(&input(spec)?)?;
            let relations = solved.relations();
            if text {
                let mut s = String::new();
                for r in &relations {
                    let _ = writeln!(s, "{}", render_relation(r));
                }
                for (name, v) in solved.named_values() {
                    let _ = writeln!(s, "{name} = {v}");
                }
                return Ok(Outcome::ok(s));
            }
            let coefficients: BTreeMap<String, String> =
                solved.named_values().into_iter().map(|(k, v)| (k, v.to_string())).collect();
            Ok(Outcome::ok(to_json(&DeformOutput { relations, coefficients, solver_log: solved.log.clone() })))
        }
        Command::Verify => {
            let solved = solve(&input(spec)?)?;
            let eps = parse_rational(&spec.options.eps)?;
            let formal = solved.specialize_formal(&eps)?;
            let report = formal.check_diamond()?;
            let hilbert = if report.is_confluent() { Some(formal.hilbert_function(spec.options.dmax)?) } else { None };
            let n = solved.n() as u64;
            let expected_hilbert: Vec<u64> = (0..=spec.options.dmax as u64).map(|d| binomial(n + d - 1, d)).collect();
            let pass = report.is_confluent() && hilbert.as_ref() == Some(&expected_hilbert);
            let out = VerifyOutput {
                pass,
                eps: eps.to_string(),
                overlaps_checked: report.checked,
                failures: report
                    .failures
                    .iter()
                    .map(|f| OverlapFailureJson { triple: f.triple, residue: f.residue.render(formal.oracle()) })
                    .collect(),
                hilbert,
                expected_hilbert,
            };
            let output = if text {
                let mut s = format!("{} ({} overlaps checked)\n", if pass { "PASS" } else { "FAIL" }, out.overlaps_checked);
                for f in &out.failures {
                    let _ = writeln!(s, "overlap {:?}: {}", f.triple, f.residue);
                }
                if let Some(h) = &out.hilbert {
                    let _ = writeln!(s, "hilbert {h:?}");
                }
                s
            } else {
                to_json(&out)
            };
            Ok(Outcome { output, status: if pass { 0 } else { 3 } })
        }
        Command::Fo => {
            let o = &spec.options;
            let n = o.n.ok_or_else(|| Error::Parameter("fo needs --n".into()))?;
            let k = o.k.ok_or_else(|| Error::Parameter("fo needs --k".into()))?;
            let z = parse_complex(&o.z)?;
            let tau = parse_complex(&o.tau)?;
            let taus = o.taus.iter().map(|t| parse_complex(t)).collect::<Result<Vec<Complex64>>>()?;
            let coeffs = fo_relation_coeffs(n, k, z, &ThetaParams::new(n, tau)?)?;
            let relations: Vec<FoRelation> = (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .map(|(i, j)| FoRelation {
                    i,
                    j,
                    terms: (0..n)
                        .map(|r| {
                            let c = coeffs.get(i, j, r);
                            let (left, right, _) = coeffs.relation(i, j)[r];
                            FoTerm { left, right, re: c.re, im: c.im, log_abs: coeffs.log_abs(i, j, r) }
                        })
                        .collect(),
                })
                .collect();
            let degeneration = degeneration_check(n, k, z, &taus)?;
            if text {
                let mut s = format!("FO relations n = {n}, k = {k}, z = {z}, tau = {tau}\n");
                for r in &relations {
                    let _ = write!(s, "rel[{},{}]:", r.i, r.j);
                    for t in &r.terms {
                        let _ = write!(s, " ({:.6e}{:+.6e}i)x{}x{}", t.re, t.im, t.left, t.right);
                    }
                    s.push('\n');
                }
                let _ = writeln!(
                    s,
                    "order-zero deviation {:?}, vanishing {:?}, slope deviation {:.3e}, pattern ok {}",
                    degeneration.order_zero_deviation,
                    degeneration.vanishing_deviation,
                    degeneration.slope_deviation,
                    degeneration.first_order_pattern_ok
                );
                return Ok(Outcome::ok(s));
            }
            #[derive(Serialize)]
            struct FoOutput<'a> {
                n: usize,
                k: usize,
                z: (f64, f64),
                tau: (f64, f64),
                relations: &'a [FoRelation],
                degeneration: &'a qdeform::fo::DegenerationReport,
            }
            Ok(Outcome::ok(to_json(&FoOutput {
                n,
                k,
                z: (z.re, z.im),
                tau: (tau.re, tau.im),
                relations: &relations,
                degeneration: &degeneration,
            })))
        }
        Command::Superpotential => {
            let solved = solve(&input(spec)?)?;
            let eps: Rational = parse_rational(&spec.options.eps)?;
            let v0: Rational = parse_rational(&spec.options.v0)?;
            let sys = solved.specialize_at(&eps, &v0)?;
            let w = witness(&sys, &eps, &v0);
            let out = SuperpotentialOutput {
                dimension: w.dimension,
                twist_matrix: w.twist.as_ref().and_then(|t| t.twist_matrix.clone()),
                is_identity: w.twist.as_ref().is_some_and(|t| t.is_identity),
                caveat: w.twist.as_ref().and_then(|t| t.caveat.clone()),
                specialization: BTreeMap::from([("eps".to_string(), eps.to_string()), ("v".to_string(), v0.to_string())]),
            };
            let status = if w.dimension == 1 { 0 } else { Error::SyzygyDimension(w.dimension).exit_code() };
            let output = if text {
                let mut s = format!(
                    "top syzygy dimension {} at eps = {eps}, v = {v0}; twist is identity: {}\n",
                    out.dimension, out.is_identity
                );
                if let Some(t) = &out.twist_matrix {
                    for row in t {
                        let _ = writeln!(s, "  [{}]", row.join(", "));
                    }
                }
                s
            } else {
                to_json(&out)
            };
            Ok(Outcome { output, status })
        }
    }
}
