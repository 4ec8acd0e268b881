//! Cluster trees of root configurations over ℤ localized at `p`.
//!
//! A vertex at level `n` is a class of roots that agree modulo `p^n` and has
//! at least two members. Classes are represented by their index sets: two
//! roots share a class at level `n` iff `v(a_i − a_j) ≥ n`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::arith::rational::{display_rational, p_valuation, rat};
use crate::arith::{is_prime, Valuation};
use crate::error::{Error, Result};

/// `y² = A·∏(x − a_i)` over `ℤ_(p)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RootConfig {
    pub g: usize,
    pub p: u64,
    pub a: BigRational,
    pub roots: Vec<BigRational>,
}

impl RootConfig {
    /// Checks the structural requirements; the reduction assumptions are
    /// reported separately by [`validate`].
    pub fn new(g: usize, p: u64, a: BigRational, roots: Vec<BigRational>) -> Result<Self> {
        if g < 1 {
            return Err(Error::invalid("genus must be positive"));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if roots.len() != 2 * g + 2 {
            return Err(Error::invalid(format!(
                "expected {} roots for genus {g}, got {}",
                2 * g + 2,
                roots.len()
            )));
        }
        if p_valuation(&a, p)? != Valuation::Finite(0) {
            return Err(Error::invalid(format!(
                "A = {} is not a {p}-adic unit",
                display_rational(&a)
            )));
        }
        for r in &roots {
            if p_valuation(r, p)? < Valuation::Finite(0) {
                return Err(Error::invalid(format!(
                    "root {} is not {p}-integral",
                    display_rational(r)
                )));
            }
        }
        let cfg = Self { g, p, a, roots };
        cfg.pairwise_valuations()?;
        Ok(cfg)
    }

    /// Symmetric matrix of `v(a_i − a_j)`; the diagonal is left at zero.
    pub fn pairwise_valuations(&self) -> Result<Vec<Vec<i64>>> {
        let n = self.roots.len();
        let mut v = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let d = &self.roots[i] - &self.roots[j];
                match p_valuation(&d, self.p)? {
                    Valuation::Finite(k) => {
                        v[i][j] = k;
                        v[j][i] = k;
                    }
                    Valuation::Infinite => {
                        return Err(Error::invalid(format!(
                            "roots {} and {} coincide",
                            i + 1,
                            j + 1
                        )))
                    }
                }
            }
        }
        Ok(v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AssumptionReport {
    /// Every `v(a_i − a_j)` is even.
    pub evenness_ok: bool,
    /// At least three distinct residues mod `p`.
    pub residues_ok: bool,
    /// Residue characteristic is odd.
    pub odd_residue_char: bool,
    pub messages: Vec<String>,
}

impl AssumptionReport {
    pub fn all_ok(&self) -> bool {
        self.evenness_ok && self.residues_ok && self.odd_residue_char
    }

    /// Fails with [`Error::AssumptionViolated`] unless every assumption holds
    /// or `override_assumptions` is set.
    pub fn require(&self, override_assumptions: bool) -> Result<()> {
        if self.all_ok() || override_assumptions {
            Ok(())
        } else {
            Err(Error::AssumptionViolated(self.messages.join("; ")))
        }
    }
}

pub fn validate(config: &RootConfig) -> Result<AssumptionReport> {
    let v = config.pairwise_valuations()?;
    let mut messages = Vec::new();
    let n = config.roots.len();
    let mut evenness_ok = true;
    for i in 0..n {
        for j in i + 1..n {
            if v[i][j] % 2 != 0 {
                evenness_ok = false;
                messages.push(format!("v(a{} - a{}) = {} is odd", i + 1, j + 1, v[i][j]));
            }
        }
    }
    // roots in the same residue class mod p are exactly those at positive distance
    let mut classes = 0;
    let mut seen = vec![false; n];
    for i in 0..n {
        if !seen[i] {
            classes += 1;
            for j in i..n {
                if i == j || v[i][j] > 0 {
                    seen[j] = true;
                }
            }
        }
    }
    let residues_ok = classes >= 3;
    if !residues_ok {
        messages.push(format!("only {classes} distinct residues mod {}", config.p));
    }
    let odd_residue_char = config.p != 2;
    if !odd_residue_char {
        messages.push("residue characteristic 2".into());
    }
    Ok(AssumptionReport {
        evenness_ok,
        residues_ok,
        odd_residue_char,
        messages,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Vertex {
    pub id: usize,
    pub level: i64,
    /// Root indices, 1-based and sorted.
    pub members: Vec<usize>,
    pub parent: Option<usize>,
}

impl Vertex {
    pub fn name(&self) -> String {
        format!("V{}", self.id)
    }

    pub fn phi(&self) -> usize {
        self.members.len()
    }

    pub fn parity(&self) -> u8 {
        u8::from(self.level % 2 == 1 && self.phi() % 2 == 1)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClusterTree {
    pub g: usize,
    /// Ordered by level, then by smallest member; `vertices[0]` is the root.
    pub vertices: Vec<Vertex>,
    pub report: AssumptionReport,
    #[serde(skip)]
    valuations: Vec<Vec<i64>>,
}

fn classes_at_level(v: &[Vec<i64>], level: i64) -> Vec<Vec<usize>> {
    let n = v.len();
    let mut assigned = vec![false; n];
    let mut out = Vec::new();
    for i in 0..n {
        if assigned[i] {
            continue;
        }
        let class: Vec<usize> = (0..n).filter(|&j| j == i || v[i][j] >= level).collect();
        for &j in &class {
            assigned[j] = true;
        }
        if class.len() >= 2 {
            out.push(class);
        }
    }
    out
}

impl ClusterTree {
    /// Builds the tree from a symmetric matrix of pairwise valuations. This
    /// is the entry point for valuations that do not come from `ℤ_(p)`.
    pub fn from_valuations(g: usize, v: Vec<Vec<i64>>, report: AssumptionReport) -> Result<Self> {
        let n = v.len();
        if n != 2 * g + 2 || v.iter().any(|r| r.len() != n) {
            return Err(Error::invalid("valuation matrix has the wrong shape"));
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && (v[i][j] != v[j][i] || v[i][j] < 0) {
                    return Err(Error::invalid(
                        "valuation matrix is not symmetric and nonnegative",
                    ));
                }
                for k in 0..n {
                    if i != j && j != k && i != k && v[i][j] < v[i][k].min(v[k][j]) {
                        return Err(Error::invalid("valuations are not ultrametric"));
                    }
                }
            }
        }
        let max_level = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| v[i][j])
            .max()
            .unwrap_or(0);
        let mut vertices: Vec<Vertex> = Vec::new();
        let mut previous: Vec<usize> = Vec::new();
        for level in 0..=max_level {
            let mut current = Vec::new();
            for class in classes_at_level(&v, level) {
                let members: Vec<usize> = class.iter().map(|i| i + 1).collect();
                let parent = previous
                    .iter()
                    .copied()
                    .find(|&pid| members.iter().all(|m| vertices[pid].members.contains(m)));
                let id = vertices.len();
                vertices.push(Vertex {
                    id,
                    level,
                    members,
                    parent,
                });
                current.push(id);
            }
            previous = current;
        }
        Ok(Self {
            g,
            vertices,
            report,
            valuations: v,
        })
    }

    pub fn root(&self) -> &Vertex {
        &self.vertices[0]
    }

    pub fn vertex(&self, id: usize) -> Result<&Vertex> {
        self.vertices
            .get(id)
            .ok_or_else(|| Error::invalid(format!("no vertex V{id}")))
    }

    pub fn find(&self, name: &str) -> Result<&Vertex> {
        self.vertices
            .iter()
            .find(|v| v.name() == name)
            .ok_or_else(|| Error::invalid(format!("no vertex {name}")))
    }

    pub fn children(&self, id: usize) -> impl Iterator<Item = &Vertex> {
        self.vertices.iter().filter(move |v| v.parent == Some(id))
    }

    /// Vertices `V₁, …, V_n = V` on the path from the root, excluding `V₀`.
    pub fn path(&self, id: usize) -> Result<Vec<&Vertex>> {
        let mut out = Vec::new();
        let mut cur = self.vertex(id)?;
        while let Some(p) = cur.parent {
            out.push(cur);
            cur = self.vertex(p)?;
        }
        out.reverse();
        Ok(out)
    }

    pub fn valuations(&self) -> &[Vec<i64>] {
        &self.valuations
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph cluster_tree {\n");
        for v in &self.vertices {
            let _ = writeln!(
                s,
                "  {} [label=\"{}: n={}, φ={}, C={}\"];",
                v.name(),
                v.name(),
                v.level,
                v.phi(),
                v.parity()
            );
        }
        for v in &self.vertices {
            if let Some(p) = v.parent {
                let _ = writeln!(s, "  V{p} -> {};", v.name());
            }
        }
        s.push_str("}\n");
        s
    }
}

pub fn build_tree(config: &RootConfig) -> Result<ClusterTree> {
    let report = validate(config)?;
    ClusterTree::from_valuations(config.g, config.pairwise_valuations()?, report)
}

/// `Σ_{i=1}^{n(V)} φ(V_i)` along the path from the root. The counting
/// identity `Σ_i min(n(V), v(a_m − a_i)) = Σ φ(V_i)` is evaluated for every
/// member `m` and must agree.
pub fn path_phi_sum(tree: &ClusterTree, id: usize) -> Result<i64> {
    let path = tree.path(id)?;
    let sum: i64 = path.iter().map(|v| v.phi() as i64).sum();
    let v = tree.vertex(id)?;
    for &m in &v.members {
        let row = &tree.valuations[m - 1];
        let direct: i64 = (0..row.len())
            .map(|i| {
                if i == m - 1 {
                    v.level
                } else {
                    v.level.min(row[i])
                }
            })
            .sum();
        if direct != sum {
            return Err(Error::Internal(format!(
                "counting identity fails at {}: {direct} != {sum}",
                v.name()
            )));
        }
    }
    Ok(sum)
}

fn vertex_e_term(phi: usize) -> BigRational {
    let phi = phi as i64;
    if phi % 2 == 0 {
        let h = phi / 2;
        rat(h * (h - 1)) / rat(2)
    } else {
        let h = (phi - 1) / 2;
        rat(h * h) / rat(2)
    }
}

/// The invariant `e`, a half-sum of quadratic terms in `φ(V)` over the
/// non-root vertices.
pub fn compute_e(tree: &ClusterTree) -> Result<BigRational> {
    let e: BigRational = tree.vertices[1..]
        .iter()
        .map(|v| vertex_e_term(v.phi()))
        .sum();
    if tree.report.evenness_ok && !e.is_integer() {
        return Err(Error::Internal(format!(
            "e = {} is not integral",
            display_rational(&e)
        )));
    }
    Ok(e)
}

/// Multiplicities of the residual divisor on the components over vertices
/// with `C(V) = 0`, keyed by vertex id.
pub fn residual_divisor(
    tree: &ClusterTree,
    override_assumptions: bool,
) -> Result<BTreeMap<usize, BigRational>> {
    tree.report.require(override_assumptions)?;
    let g = tree.g as i64;
    let e = compute_e(tree)?;
    let in_range = tree.vertices[1..].iter().all(|v| v.phi() as i64 <= 2 * g);
    let mut out = BTreeMap::new();
    for v in tree.vertices.iter().filter(|v| v.parity() == 0) {
        let path = path_phi_sum(tree, v.id)?;
        let mult = &e - rat(g * path) / rat(2) + rat(g * (g + 1) / 2 * v.level);
        if in_range && mult < BigRational::zero() {
            return Err(Error::Internal(format!(
                "negative multiplicity {} at {}",
                display_rational(&mult),
                v.name()
            )));
        }
        out.insert(v.id, mult);
    }
    Ok(out)
}

/// Sum of the multiplicities, `Σ_{i<j} v(a_i − a_j)`, used for the bound on
/// the vertex count.
pub fn total_pair_valuation(tree: &ClusterTree) -> i64 {
    let v = &tree.valuations;
    (0..v.len())
        .flat_map(|i| (i + 1..v.len()).map(move |j| (i, j)))
        .map(|(i, j)| v[i][j])
        .sum()
}

impl Default for AssumptionReport {
    fn default() -> Self {
        Self {
            evenness_ok: true,
            residues_ok: true,
            odd_residue_char: true,
            messages: Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example_ex() -> RootConfig {
        let roots = [1, 2, 3, 0, 49, 392].iter().map(|&r| rat(r)).collect();
        RootConfig::new(2, 7, rat(1), roots).unwrap()
    }

    #[test]
    fn example_ex_tree() {
        let tree = build_tree(&example_ex()).unwrap();
        let phis: Vec<_> = tree.vertices.iter().map(Vertex::phi).collect();
        assert_eq!(phis, vec![6, 3, 3, 2]);
        let parity: Vec<_> = tree.vertices.iter().map(Vertex::parity).collect();
        assert_eq!(parity, vec![0, 1, 0, 0]);
        assert_eq!(path_phi_sum(&tree, 2).unwrap(), 6);
        assert_eq!(path_phi_sum(&tree, 3).unwrap(), 8);
        assert_eq!(compute_e(&tree).unwrap(), rat(1));
        assert!(!tree.report.evenness_ok);
        assert!(residual_divisor(&tree, false).is_err());
        let res = residual_divisor(&tree, true).unwrap();
        let expected: BTreeMap<_, _> = [(0, rat(1)), (2, rat(1)), (3, rat(2))].into();
        assert_eq!(res, expected);
    }

    #[test]
    fn validate_examples() {
        let q = |v: &[i64]| v.iter().map(|&r| rat(r)).collect::<Vec<_>>();
        let r = validate(&RootConfig::new(2, 7, rat(1), q(&[0, 1, 2, 3, 4, 5])).unwrap()).unwrap();
        assert!(r.evenness_ok && r.residues_ok);
        let r = validate(&RootConfig::new(2, 5, rat(1), q(&[0, 5, 10, 1, 2, 3])).unwrap()).unwrap();
        assert!(!r.evenness_ok);
        let r =
            validate(&RootConfig::new(2, 5, rat(1), q(&[0, 25, 1, 26, 51, 50])).unwrap()).unwrap();
        assert!(!r.residues_ok);
        assert!(r.evenness_ok);
    }

    #[test]
    fn config_errors() {
        let q = |v: &[i64]| v.iter().map(|&r| rat(r)).collect::<Vec<_>>();
        assert!(RootConfig::new(2, 6, rat(1), q(&[0, 1, 2, 3, 4, 5])).is_err());
        assert!(RootConfig::new(2, 7, rat(7), q(&[0, 1, 2, 3, 4, 5])).is_err());
        assert!(RootConfig::new(2, 7, rat(1), q(&[0, 1, 2, 3, 4, 4])).is_err());
        assert!(RootConfig::new(2, 7, rat(1), q(&[0, 1, 2, 3, 4])).is_err());
    }

    #[test]
    fn trivial_tree() {
        let q: Vec<_> = [0, 1, 2, 3, 4, 5].iter().map(|&r| rat(r)).collect();
        let tree = build_tree(&RootConfig::new(2, 7, rat(1), q).unwrap()).unwrap();
        assert_eq!(tree.vertices.len(), 1);
        assert_eq!(compute_e(&tree).unwrap(), rat(0));
        let res = residual_divisor(&tree, false).unwrap();
        assert_eq!(res.get(&0), Some(&rat(0)));
    }

    #[test]
    fn dot_output() {
        let dot = build_tree(&example_ex()).unwrap().to_dot();
        assert!(dot.contains("V0 [label=\"V0: n=0, φ=6, C=0\"]"));
        assert!(dot.contains("V2 -> V3;"));
    }
}
