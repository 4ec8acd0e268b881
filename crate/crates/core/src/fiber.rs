//! Special fibers given by their component graph: exact intersection
//! pairing, ω-degrees, the correction divisors `Φ_P`, and the local
//! identities relating them to discriminant valuations.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::linalg::{is_negative_definite, solve_rational, Matrix};
use crate::arith::rational::{display_rational, rat};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub name: String,
    /// Multiplicity in the fiber.
    pub m: i64,
    /// Genus of the normalization.
    pub pa: i64,
    /// Nodes of the component that do not lie on other components.
    pub internal_nodes: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectionIncidence {
    pub name: String,
    pub meets: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComponentGraph {
    pub g: usize,
    pub components: Vec<Component>,
    pub intersection: Vec<Vec<i64>>,
    omega: Vec<i64>,
}

impl ComponentGraph {
    /// Validates the graph. `omega_override`, when given, must agree with the
    /// degrees derived by adjunction.
    pub fn new(
        g: usize,
        components: Vec<Component>,
        intersection: Vec<Vec<i64>>,
        omega_override: Option<&[i64]>,
    ) -> Result<Self> {
        let n = components.len();
        if n == 0 {
            return Err(Error::invalid("fiber has no components"));
        }
        if intersection.len() != n || intersection.iter().any(|r| r.len() != n) {
            return Err(Error::invalid("intersection matrix has the wrong shape"));
        }
        for (i, c) in components.iter().enumerate() {
            if c.m < 1 || c.pa < 0 || c.internal_nodes < 0 {
                return Err(Error::invalid(format!(
                    "component {} has invalid data",
                    c.name
                )));
            }
            if components[..i].iter().any(|d| d.name == c.name) {
                return Err(Error::invalid(format!("duplicate component {}", c.name)));
            }
        }
        for i in 0..n {
            for j in 0..n {
                if intersection[i][j] != intersection[j][i] {
                    return Err(Error::invalid("intersection matrix is not symmetric"));
                }
                if i != j && intersection[i][j] < 0 {
                    return Err(Error::invalid(
                        "negative intersection of distinct components",
                    ));
                }
            }
            let dot: i64 = (0..n).map(|j| intersection[i][j] * components[j].m).sum();
            if dot != 0 {
                return Err(Error::invalid(format!(
                    "fiber meets {} with degree {dot}",
                    components[i].name
                )));
            }
        }
        let omega: Vec<i64> = components
            .iter()
            .enumerate()
            .map(|(i, c)| 2 * c.pa - 2 - intersection[i][i] + 2 * c.internal_nodes)
            .collect();
        if let Some(given) = omega_override {
            if given != omega.as_slice() {
                return Err(Error::invalid(format!(
                    "given ω-degrees {given:?} disagree with adjunction {omega:?}"
                )));
            }
        }
        if let Some((c, w)) = components.iter().zip(&omega).find(|(_, &w)| w < -2) {
            return Err(Error::invalid(format!("(ω, {}) = {w} < -2", c.name)));
        }
        let total: i64 = components.iter().zip(&omega).map(|(c, w)| c.m * w).sum();
        if total != 2 * g as i64 - 2 {
            return Err(Error::invalid(format!(
                "fiber has ω-degree {total}, expected {}",
                2 * g as i64 - 2
            )));
        }
        let graph = Self {
            g,
            components,
            intersection,
            omega,
        };
        if !graph.is_connected() {
            return Err(Error::invalid("dual graph is not connected"));
        }
        Ok(graph)
    }

    fn is_connected(&self) -> bool {
        let n = self.components.len();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if !seen[j] && self.intersection[i][j] > 0 {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.components
            .iter()
            .position(|c| c.name == name)
            .ok_or_else(|| Error::invalid(format!("unknown component {name}")))
    }

    /// `(ω, C)` for each component, by adjunction.
    pub fn omega_degrees(&self) -> &[i64] {
        &self.omega
    }

    /// The full fiber `Σ m_C C`.
    pub fn fiber(&self) -> VerticalQDivisor {
        let coeffs = self.components.iter().map(|c| rat(c.m)).collect();
        VerticalQDivisor::from_vec(self, coeffs)
    }

    pub fn divisor(&self, entries: &[(&str, BigRational)]) -> Result<VerticalQDivisor> {
        let mut coeffs = vec![BigRational::zero(); self.components.len()];
        for (name, c) in entries {
            coeffs[self.index_of(name)?] += c;
        }
        Ok(VerticalQDivisor::from_vec(self, coeffs))
    }

    fn matrix(&self) -> Matrix {
        self.intersection
            .iter()
            .map(|r| r.iter().map(|&x| rat(x)).collect())
            .collect()
    }

    /// Zariski's lemma: the pairing is negative definite on the span of any
    /// `n − 1` components.
    pub fn check_semidefinite(&self) -> Result<bool> {
        let n = self.components.len();
        let m = self.matrix();
        let sub: Matrix = m[..n - 1].iter().map(|r| r[..n - 1].to_vec()).collect();
        is_negative_definite(&sub)
    }
}

/// A ℚ-linear combination of the components of one graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerticalQDivisor {
    names: Vec<String>,
    coeffs: Vec<BigRational>,
}

impl VerticalQDivisor {
    fn from_vec(graph: &ComponentGraph, coeffs: Vec<BigRational>) -> Self {
        let names = graph.components.iter().map(|c| c.name.clone()).collect();
        Self { names, coeffs }
    }

    pub fn zero(graph: &ComponentGraph) -> Self {
        Self::from_vec(graph, vec![BigRational::zero(); graph.components.len()])
    }

    pub fn coeff(&self, name: &str) -> Option<&BigRational> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| &self.coeffs[i])
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Nonzero coefficients keyed by component name.
    pub fn to_map(&self) -> BTreeMap<String, BigRational> {
        self.names
            .iter()
            .zip(&self.coeffs)
            .filter(|(_, c)| !c.is_zero())
            .map(|(n, c)| (n.clone(), c.clone()))
            .collect()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            names: self.names.clone(),
            coeffs,
        })
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self {
            names: self.names.clone(),
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.names != other.names {
            return Err(Error::invalid("divisors live on different fibers"));
        }
        Ok(())
    }

    fn check_on(&self, graph: &ComponentGraph) -> Result<()> {
        if self.names.len() != graph.components.len()
            || self
                .names
                .iter()
                .zip(&graph.components)
                .any(|(n, c)| *n != c.name)
        {
            return Err(Error::invalid("divisor is not supported on this fiber"));
        }
        Ok(())
    }
}

impl fmt::Display for VerticalQDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (name, c) in self.names.iter().zip(&self.coeffs) {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            let abs = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            if abs.is_one() {
                write!(f, "{name}")?;
            } else {
                write!(f, "{}{name}", display_rational(&abs))?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// The intersection pairing `ᵗx₁ M x₂`.
pub fn pair(
    graph: &ComponentGraph,
    d1: &VerticalQDivisor,
    d2: &VerticalQDivisor,
) -> Result<BigRational> {
    d1.check_on(graph)?;
    d2.check_on(graph)?;
    let mut acc = BigRational::zero();
    for (i, a) in d1.coeffs.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, b) in d2.coeffs.iter().enumerate() {
            let mij = graph.intersection[i][j];
            if mij != 0 && !b.is_zero() {
                acc += a * b * rat(mij);
            }
        }
    }
    Ok(acc)
}

/// `deg ω|_D = Σ coeff(C)·(ω, C)`.
pub fn omega_degree(graph: &ComponentGraph, d: &VerticalQDivisor) -> Result<BigRational> {
    d.check_on(graph)?;
    Ok(d.coeffs
        .iter()
        .zip(&graph.omega)
        .map(|(c, &w)| c * rat(w))
        .sum())
}

fn section_component(graph: &ComponentGraph, p: &SectionIncidence) -> Result<usize> {
    let i = graph.index_of(&p.meets)?;
    if graph.components[i].m != 1 {
        return Err(Error::invalid(format!(
            "section {} meets {} of multiplicity {}",
            p.name, p.meets, graph.components[i].m
        )));
    }
    Ok(i)
}

/// The vertical divisor `Φ` with `((2g−2)P − ω + Φ, C) = 0` for every
/// component `C`, normalized so that `(Φ, P) = 0`.
pub fn phi_divisor(graph: &ComponentGraph, p: &SectionIncidence) -> Result<VerticalQDivisor> {
    let cp = section_component(graph, p)?;
    let n = graph.components.len();
    let two_g_minus_two = 2 * graph.g as i64 - 2;
    let b: Vec<BigRational> = (0..n)
        .map(|c| rat(graph.omega[c] - if c == cp { two_g_minus_two } else { 0 }))
        .collect();
    let orth: BigRational = graph
        .components
        .iter()
        .zip(&b)
        .map(|(c, bc)| rat(c.m) * bc)
        .sum();
    if !orth.is_zero() {
        return Err(Error::Inconsistent(
            "right-hand side is not orthogonal to the fiber".into(),
        ));
    }
    let sol = solve_rational(&graph.matrix(), &b)?;
    if sol.rank + 1 != n {
        return Err(Error::Inconsistent(format!(
            "intersection matrix has rank {}, expected {}",
            sol.rank,
            n - 1
        )));
    }
    let x = VerticalQDivisor::from_vec(graph, sol.particular);
    let shift = -x.coeffs[cp].clone();
    let phi = x.add(&graph.fiber().scale(&shift))?;
    for (c, bc) in b.iter().enumerate() {
        let row: BigRational = phi
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, a)| a * rat(graph.intersection[c][j]))
            .sum();
        if row != *bc {
            return Err(Error::Internal("Φ fails its defining equations".into()));
        }
    }
    Ok(phi)
}

/// `(Φ_P, Φ_P)`, which is never positive.
pub fn phi_self_intersection(graph: &ComponentGraph, p: &SectionIncidence) -> Result<BigRational> {
    let phi = phi_divisor(graph, p)?;
    let sq = pair(graph, &phi, &phi)?;
    if sq > BigRational::zero() {
        return Err(Error::Internal(format!(
            "Φ² = {} is positive",
            display_rational(&sq)
        )));
    }
    Ok(sq)
}

/// Number of nodes of the geometric fiber.
pub fn node_count(graph: &ComponentGraph) -> i64 {
    let n = graph.components.len();
    let between: i64 = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(i, j)| graph.intersection[i][j])
        .sum();
    between
        + graph
            .components
            .iter()
            .map(|c| c.internal_nodes)
            .sum::<i64>()
}

fn check_section_count(graph: &ComponentGraph, sections: &[SectionIncidence]) -> Result<()> {
    let want = 2 * graph.g + 2;
    if sections.len() != want {
        return Err(Error::invalid(format!(
            "expected {want} sections, got {}",
            sections.len()
        )));
    }
    Ok(())
}

/// `Σ_P (Φ_P, Φ_P)` over the given sections.
pub fn sum_phi_squares(
    graph: &ComponentGraph,
    sections: &[SectionIncidence],
) -> Result<BigRational> {
    sections
        .iter()
        .map(|p| phi_self_intersection(graph, p))
        .sum()
}

/// `ord ξ = −ΣΦ_P² + (4g−2)(g+1)·ord Δ + 8·deg ω|_E`.
pub fn ord_xi(
    graph: &ComponentGraph,
    sections: &[SectionIncidence],
    e: &VerticalQDivisor,
) -> Result<BigRational> {
    check_section_count(graph, sections)?;
    let g = graph.g as i64;
    let s = sum_phi_squares(graph, sections)?;
    Ok(-s + rat((4 * g - 2) * (g + 1) * node_count(graph)) + rat(8) * omega_degree(graph, e)?)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalIdentity {
    pub lhs: BigRational,
    pub rhs: BigRational,
    pub residual: BigRational,
    pub sum_phi_sq: BigRational,
    pub ord_delta: i64,
    pub e_omega_degree: BigRational,
}

impl LocalIdentity {
    pub fn holds(&self) -> bool {
        self.residual.is_zero()
    }
}

/// Both sides of `(3g−1)·ord Λ = −½ΣΦ_P² + (2g−1)(g+1)·ord Δ + 4·deg ω|_E`.
pub fn verify_local_identity(
    graph: &ComponentGraph,
    sections: &[SectionIncidence],
    e: &VerticalQDivisor,
    ord_lambda: i64,
) -> Result<LocalIdentity> {
    check_section_count(graph, sections)?;
    let g = graph.g as i64;
    let sum_phi_sq = sum_phi_squares(graph, sections)?;
    let ord_delta = node_count(graph);
    let e_omega_degree = omega_degree(graph, e)?;
    let lhs = rat((3 * g - 1) * ord_lambda);
    let rhs =
        -&sum_phi_sq / rat(2) + rat((2 * g - 1) * (g + 1) * ord_delta) + rat(4) * &e_omega_degree;
    let residual = &lhs - &rhs;
    Ok(LocalIdentity {
        lhs,
        rhs,
        residual,
        sum_phi_sq,
        ord_delta,
        e_omega_degree,
    })
}

/// The Example-ex fiber: an elliptic curve `A`, a rational curve `B` meeting
/// it once, and a rational curve `D` meeting `B` twice.
pub fn example_ex_graph() -> (ComponentGraph, Vec<SectionIncidence>) {
    let comp = |name: &str, pa| Component {
        name: name.into(),
        m: 1,
        pa,
        internal_nodes: 0,
    };
    let graph = ComponentGraph::new(
        2,
        vec![comp("A", 1), comp("B", 0), comp("D", 0)],
        vec![vec![-1, 1, 0], vec![1, -3, 2], vec![0, 2, -2]],
        Some(&[1, 1, 0]),
    )
    .expect("example fiber is valid");
    let meets = ["A", "A", "A", "B", "D", "D"];
    let sections = meets
        .iter()
        .enumerate()
        .map(|(i, m)| SectionIncidence {
            name: format!("P{}", i + 1),
            meets: (*m).into(),
        })
        .collect();
    (graph, sections)
}
