//! Smoothing diagrams: smoothable edges with shaded angles, their
//! decomposition into chains and cycles, and matching cycles against
//! Feigin-Odesskii matrices.

use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::matrix::{fo_matrix, mod_inverse, AltMatrix};
use crate::weights::{smoothable_weights, Weight};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shade {
    /// `θ_k = 2`
    Dark,
    /// `θ_k = 1`
    Light,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub weight: Weight,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Angle {
    pub apex: usize,
    pub edge: (usize, usize),
    pub shade: Shade,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmoothingDiagram {
    pub n: usize,
    pub edges: Vec<Edge>,
    pub angles: Vec<Angle>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub chains: Vec<Vec<usize>>,
    pub cycles: Vec<Vec<usize>>,
}

/// A cycle identified with `scale * fo_matrix(n_s, k_s)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleClassification {
    pub n_s: usize,
    pub k_s: usize,
    pub scale: Rational,
    /// `permutation[label]` is the original vertex carrying FO label `label`.
    pub permutation: Vec<usize>,
}

/// Edges from the smoothable weights of `b`; an angle at `k` for every
/// positive entry `θ_k`.
pub fn build_diagram(b: &AltMatrix) -> SmoothingDiagram {
    let mut edges = Vec::new();
    let mut angles = Vec::new();
    for ((i, j), w) in smoothable_weights(b) {
        for (k, &t) in w.0.iter().enumerate() {
            let shade = match t {
                2 => Shade::Dark,
                1 => Shade::Light,
                _ => continue,
            };
            angles.push(Angle { apex: k, edge: (i, j), shade });
        }
        edges.push(Edge { i, j, weight: w });
    }
    SmoothingDiagram { n: b.n(), edges, angles }
}

impl SmoothingDiagram {
    pub fn edge(&self, i: usize, j: usize) -> Option<&Edge> {
        let (a, c) = (i.min(j), i.max(j));
        self.edges.iter().find(|e| e.i == a && e.j == c)
    }

    fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|e| {
                if e.i == v {
                    Some(e.j)
                } else if e.j == v {
                    Some(e.i)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Restriction to a subset of edges given as vertex pairs.
    pub fn restrict(&self, keep: &[(usize, usize)]) -> Result<SmoothingDiagram> {
        let mut edges = Vec::new();
        for &(i, j) in keep {
            let e = self
                .edge(i, j)
                .ok_or_else(|| Error::Parameter(format!("edge {i}-{j} is not smoothable")))?;
            edges.push(e.clone());
        }
        edges.sort_by_key(|e| (e.i, e.j));
        edges.dedup_by_key(|e| (e.i, e.j));
        let pairs: BTreeSet<(usize, usize)> = edges.iter().map(|e| (e.i, e.j)).collect();
        let angles = self.angles.iter().filter(|a| pairs.contains(&a.edge)).cloned().collect();
        Ok(SmoothingDiagram { n: self.n, edges, angles })
    }

    /// For adjacent edges `i-j`, `j-k` the ratio `b_ij / b_jk` must be a
    /// positive rational.
    pub fn check_adjacent_ratios(&self, b: &AltMatrix) -> Result<()> {
        for j in 0..self.n {
            let nb = self.neighbors(j);
            for (x, &i) in nb.iter().enumerate() {
                for &k in &nb[x + 1..] {
                    let r = b.get(i, j) / b.get(j, k);
                    if !r.is_positive() {
                        return Err(Error::InvariantViolation(format!(
                            "b[{i}][{j}] / b[{j}][{k}] = {r} is not positive"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Plain-text listing of edges, angles and the decomposition.
    pub fn render_text(&self) -> String {
        let mut s = format!("smoothing diagram on {} vertices\n", self.n);
        if self.edges.is_empty() {
            s.push_str("no smoothable edges\n");
        }
        for e in &self.edges {
            s.push_str(&format!("edge {}-{}  theta={}", e.i, e.j, e.weight));
            let angles: Vec<String> = self
                .angles
                .iter()
                .filter(|a| a.edge == (e.i, e.j))
                .map(|a| format!("{} at {}", if a.shade == Shade::Dark { "dark" } else { "light" }, a.apex))
                .collect();
            if !angles.is_empty() {
                s.push_str(&format!("  angles: {}", angles.join(", ")));
            }
            s.push('\n');
        }
        match decompose(self) {
            Ok(d) => s.push_str(&d.to_string()),
            Err(e) => s.push_str(&format!("decomposition failed: {e}\n")),
        }
        s
    }
}

impl fmt::Display for Decomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |v: &Vec<Vec<usize>>| {
            if v.is_empty() {
                "none".to_string()
            } else {
                v.iter()
                    .map(|c| c.iter().map(usize::to_string).collect::<Vec<_>>().join("-"))
                    .collect::<Vec<_>>()
                    .join(", ")
            }
        };
        writeln!(f, "chains: {}", show(&self.chains))?;
        writeln!(f, "cycles: {}", show(&self.cycles))
    }
}

/// Splits the edges into maximal chains and cycles. Chains start at the
/// endpoint with the smaller index; cycles start at their smallest vertex
/// and continue towards its smaller neighbour. Both lists are sorted.
pub fn decompose(d: &SmoothingDiagram) -> Result<Decomposition> {
    let n = d.n;
    let nb: Vec<Vec<usize>> = (0..n).map(|v| d.neighbors(v)).collect();
    if let Some(v) = (0..n).find(|&v| nb[v].len() >= 3) {
        return Err(Error::InvariantViolation(format!("vertex {v} meets {} smoothable edges", nb[v].len())));
    }
    let mut seen = vec![false; n];
    let mut out = Decomposition::default();
    // chains from their endpoints
    for start in 0..n {
        if seen[start] || nb[start].len() != 1 {
            continue;
        }
        let path = walk(start, &nb);
        for &v in &path {
            seen[v] = true;
        }
        out.chains.push(path);
    }
    for start in 0..n {
        if seen[start] || nb[start].len() != 2 {
            continue;
        }
        let cycle = walk(start, &nb);
        for &v in &cycle {
            seen[v] = true;
        }
        out.cycles.push(cycle);
    }
    out.chains.sort();
    out.cycles.sort();
    for c in &out.cycles {
        let inside: BTreeSet<usize> = c.iter().copied().collect();
        for a in &d.angles {
            if inside.contains(&a.edge.0) && inside.contains(&a.edge.1) && !inside.contains(&a.apex) {
                return Err(Error::InvariantViolation(format!(
                    "angle at {} of cycle edge {}-{} lies outside the cycle",
                    a.apex, a.edge.0, a.edge.1
                )));
            }
        }
    }
    Ok(out)
}

/// Follows edges from `start`, always choosing the smaller unvisited
/// neighbour first.
fn walk(start: usize, nb: &[Vec<usize>]) -> Vec<usize> {
    let mut path = vec![start];
    let mut prev = usize::MAX;
    let mut cur = start;
    loop {
        let next = nb[cur].iter().copied().find(|&x| x != prev && x != start && !path.contains(&x));
        match next {
            Some(x) => {
                path.push(x);
                prev = cur;
                cur = x;
            }
            None => return path,
        }
    }
}

/// `λ_{i1 j} = λ_{i2 j}` for all `i1, i2` in the cycle and `j` outside.
pub fn cycle_block_uniform(lambda: &AltMatrix, cycle: &[usize]) -> bool {
    let inside: BTreeSet<usize> = cycle.iter().copied().collect();
    (0..lambda.n())
        .filter(|j| !inside.contains(j))
        .all(|j| cycle.windows(2).all(|p| lambda.get(p[0], j) == lambda.get(p[1], j)))
}

/// Identifies the principal submatrix of `λ` on a cycle with a multiple of
/// an FO matrix. The FO cycle visits labels `0, k'+1, 2(k'+1), ...` with
/// `k' = k^{-1} mod n`, so each `k`, starting point and direction along
/// the cycle fixes a relabeling; the first exact match with positive scale
/// wins.
pub fn classify_cycle(lambda: &AltMatrix, cycle: &[usize]) -> Result<CycleClassification> {
    let ns = cycle.len();
    if ns < 3 {
        return Err(Error::Classification(format!("cycle of length {ns} is too short")));
    }
    for k in 1..ns {
        if ns.gcd(&k) != 1 {
            continue;
        }
        let fo = fo_matrix(ns, k)?;
        let kp = mod_inverse(k as i64, ns as i64).expect("k is invertible") as usize;
        let step = (kp + 1) % ns;
        if ns.gcd(&step) != 1 {
            continue;
        }
        for dir in [1usize, ns - 1] {
            for s in 0..ns {
                let mut perm = vec![usize::MAX; ns];
                for t in 0..ns {
                    let label = (t * step) % ns;
                    perm[label] = cycle[(s + t * dir) % ns];
                }
                // Reversing the labels negates an FO matrix, so every cycle
                // matches with both signs; keep the positive one.
                if let Some(scale) = match_scaled(lambda, &perm, &fo).filter(|s| s.is_positive()) {
                    return Ok(CycleClassification { n_s: ns, k_s: k, scale, permutation: perm });
                }
            }
        }
    }
    Err(Error::Classification(format!("cycle {cycle:?} does not match any FO matrix")))
}

fn match_scaled(lambda: &AltMatrix, perm: &[usize], fo: &AltMatrix) -> Option<Rational> {
    let n = perm.len();
    let (a0, b0) = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).find(|&(a, b)| !fo.get(a, b).is_zero())?;
    let scale = lambda.get(perm[a0], perm[b0]) / fo.get(a0, b0);
    if scale.is_zero() {
        return None;
    }
    for a in 0..n {
        for b in 0..n {
            if *lambda.get(perm[a], perm[b]) != fo.get(a, b) * &scale {
                return None;
            }
        }
    }
    Some(scale)
}

/// The smoothable weight of the FO cycle edge starting at label `i`:
/// `-e_i - e_{i+k'+1} + e_{i+1} + e_{i+k'}`.
pub fn fo_cycle_weight(n: usize, k: usize, i: usize) -> Weight {
    let kp = mod_inverse(k as i64, n as i64).expect("k invertible mod n") as usize;
    let mut w = vec![0i64; n];
    w[i % n] -= 1;
    w[(i + kp + 1) % n] -= 1;
    w[(i + 1) % n] += 1;
    w[(i + kp) % n] += 1;
    Weight(w)
}

/// `(n, k)` pairs with `3 <= n <= max_n` whose FO matrix has corank 1.
pub fn valid_fo_pairs(max_n: usize) -> Vec<(usize, usize)> {
    (3..=max_n)
        .flat_map(|n| (1..n).map(move |k| (n, k)))
        .filter(|&(n, k)| n.gcd(&k) == 1 && n.gcd(&(k + 1)) == 1)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use crate::fixtures;

    fn w(v: &[i64]) -> Weight {
        Weight(v.to_vec())
    }

    #[test]
    fn two_chain_diagram() {
        let b = fixtures::two_chain_biresidue();
        let d = build_diagram(&b);
        let pairs: Vec<(usize, usize)> = d.edges.iter().map(|e| (e.i, e.j)).collect();
        assert_eq!(pairs, vec![(0, 4), (1, 2), (2, 3)]);
        assert!(d.angles.contains(&Angle { apex: 0, edge: (1, 2), shade: Shade::Dark }));
        assert!(d.angles.contains(&Angle { apex: 2, edge: (0, 4), shade: Shade::Light }));
        assert!(d.angles.contains(&Angle { apex: 3, edge: (0, 4), shade: Shade::Light }));
        d.check_adjacent_ratios(&b).unwrap();
        let dec = decompose(&d).unwrap();
        assert_eq!(dec.chains, vec![vec![0, 4], vec![1, 2, 3]]);
        assert!(dec.cycles.is_empty());
    }

    #[test]
    fn four_chain_diagram() {
        let b = fixtures::four_chain_biresidue();
        let d = build_diagram(&b);
        assert_eq!(d.edges.len(), 4);
        d.check_adjacent_ratios(&b).unwrap();
        let dec = decompose(&d).unwrap();
        assert_eq!(dec.chains, vec![vec![0, 1, 2, 3, 4]]);
        assert!(dec.cycles.is_empty());
    }

    #[test]
    fn empty_diagram() {
        let d = build_diagram(&AltMatrix::zero(5));
        assert!(d.edges.is_empty() && d.angles.is_empty());
        assert_eq!(decompose(&d).unwrap(), Decomposition::default());
    }

    #[test]
    fn degree_three_is_rejected() {
        let star = SmoothingDiagram {
            n: 4,
            edges: (1..4).map(|j| Edge { i: 0, j, weight: Weight::zero(4) }).collect(),
            angles: vec![],
        };
        assert!(matches!(decompose(&star), Err(Error::InvariantViolation(_))));
    }

    #[test]
    fn fo_cycles_exhaustive() {
        for (n, k) in valid_fo_pairs(9) {
            let lam = fo_matrix(n, k).unwrap();
            let b = lam.biresidue().unwrap();
            let d = build_diagram(&b);
            assert_eq!(d.edges.len(), n, "({n},{k})");
            let dec = decompose(&d).unwrap();
            assert!(dec.chains.is_empty(), "({n},{k})");
            assert_eq!(dec.cycles.len(), 1);
            assert_eq!(dec.cycles[0].len(), n);
            let kp = mod_inverse(k as i64, n as i64).unwrap() as usize;
            for i in 0..n {
                let j = (i + kp + 1) % n;
                let e = d.edge(i, j).unwrap_or_else(|| panic!("({n},{k}) missing {i}-{j}"));
                assert_eq!(e.weight, fo_cycle_weight(n, k, i));
            }
        }
        assert_eq!(fo_cycle_weight(5, 2, 0), w(&[-1, 1, 0, 1, -1]));
    }

    #[test]
    fn classification_round_trips() {
        for (n, k) in valid_fo_pairs(9) {
            let lam = fo_matrix(n, k).unwrap();
            let dec = decompose(&build_diagram(&lam.biresidue().unwrap())).unwrap();
            let c = classify_cycle(&lam, &dec.cycles[0]).unwrap();
            // fo(n, k) and fo(n, k^{-1}) differ by a relabeling; the search
            // reports the smaller parameter.
            let kinv = mod_inverse(k as i64, n as i64).unwrap() as usize;
            assert_eq!(c.k_s, k.min(kinv), "({n},{k})");
            assert_eq!((c.n_s, c.scale.clone()), (n, rat(1)), "({n},{k})");
            let relabeled = lam.submatrix(&c.permutation);
            assert_eq!(relabeled, fo_matrix(n, c.k_s).unwrap());
        }
        let lam = fo_matrix(5, 1).unwrap().scale(&rat(3));
        let dec = decompose(&build_diagram(&lam.biresidue().unwrap())).unwrap();
        let c = classify_cycle(&lam, &dec.cycles[0]).unwrap();
        assert_eq!(c.scale, rat(3));
        assert_eq!(c.k_s, 1);
    }

    #[test]
    fn classification_failure() {
        let lam = fixtures::two_chain_lambda();
        assert!(matches!(classify_cycle(&lam, &[0, 1, 2]), Err(Error::Classification(_))));
    }

    #[test]
    fn block_condition_on_constructed_example() {
        // FO block on {0,1,2}, plus a vertex 3 seeing the block uniformly.
        let fo = fo_matrix(3, 1).unwrap();
        let lam = AltMatrix::from_upper(4, |i, j| if j < 3 { fo.get(i, j).clone() } else { rat(2) });
        assert!(cycle_block_uniform(&lam, &[0, 1, 2]));
        let bad = AltMatrix::from_upper(4, |i, j| if j < 3 { fo.get(i, j).clone() } else { rat(i as i64) });
        assert!(!cycle_block_uniform(&bad, &[0, 1, 2]));
    }

    #[test]
    fn text_rendering_lists_edges() {
        let t = build_diagram(&fixtures::two_chain_biresidue()).render_text();
        assert!(t.contains("edge 1-2  theta=(2,-1,-1,0,0)  angles: dark at 0"));
        assert!(t.contains("chains: 0-4, 1-2-3"));
        assert!(t.contains("cycles: none"));
    }
}
