//! JSON file formats. Exact quantities travel as `"num/den"` strings;
//! inputs also accept bare integers. Every output carries
//! [`SCHEMA_VERSION`].

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_rational::BigRational;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::analytic::{EllipticTorus, HyperellipticCurve, PeriodMatrix};
use crate::arith::rational::{format_rational, parse_rational, rat};
use crate::arith::{CoefficientField, Polynomial};
use crate::cluster::{AssumptionReport, RootConfig};
use crate::error::{Error, Result};
use crate::fiber::{Component, ComponentGraph, SectionIncidence, VerticalQDivisor};
use crate::height::{ArchLedgerEntry, GlobalHeightInput, LocalLedgerEntry};
use crate::hyperelliptic::HyperellipticEquation;

pub const SCHEMA_VERSION: u32 = 1;

/// A rational number in `"num/den"` form.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Rat(pub BigRational);

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Rat;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer or a \"num/den\" string")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Rat, E> {
                Ok(Rat(rat(v)))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Rat, E> {
                i64::try_from(v).map(|v| Rat(rat(v))).map_err(E::custom)
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Rat, E> {
                parse_rational(v).map(Rat).map_err(E::custom)
            }
        }
        d.deserialize_any(V)
    }
}

impl From<BigRational> for Rat {
    fn from(q: BigRational) -> Self {
        Rat(q)
    }
}

fn rats(v: &[Rat]) -> Vec<BigRational> {
    v.iter().map(|r| r.0.clone()).collect()
}

pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RootConfigJson {
    pub g: usize,
    pub p: u64,
    #[serde(rename = "A")]
    pub a: Rat,
    pub roots: Vec<Rat>,
}

impl RootConfigJson {
    pub fn to_config(&self) -> Result<RootConfig> {
        RootConfig::new(self.g, self.p, self.a.0.clone(), rats(&self.roots))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComponentJson {
    pub name: String,
    pub m: i64,
    pub pa: i64,
    #[serde(default)]
    pub internal_nodes: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<i64>,
    /// Cluster-tree vertex this component lies over.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SectionJson {
    pub name: String,
    pub meets: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FiberJson {
    pub g: usize,
    pub components: Vec<ComponentJson>,
    pub intersection: Vec<Vec<i64>>,
    pub sections: Vec<SectionJson>,
    /// Residual divisor `E`, by component name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<BTreeMap<String, Rat>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ord_lambda: Option<i64>,
}

impl FiberJson {
    pub fn to_graph(&self) -> Result<(ComponentGraph, Vec<SectionIncidence>)> {
        let components = self
            .components
            .iter()
            .map(|c| Component {
                name: c.name.clone(),
                m: c.m,
                pa: c.pa,
                internal_nodes: c.internal_nodes,
            })
            .collect();
        let omega: Option<Vec<i64>> = self.components.iter().map(|c| c.omega).collect();
        let graph = ComponentGraph::new(
            self.g,
            components,
            self.intersection.clone(),
            omega.as_deref(),
        )?;
        let sections = self
            .sections
            .iter()
            .map(|s| SectionIncidence {
                name: s.name.clone(),
                meets: s.meets.clone(),
            })
            .collect();
        Ok((graph, sections))
    }

    pub fn residual_divisor(&self, graph: &ComponentGraph) -> Result<VerticalQDivisor> {
        match &self.residual {
            None => Ok(VerticalQDivisor::zero(graph)),
            Some(map) => {
                let entries: Vec<(&str, BigRational)> =
                    map.iter().map(|(k, v)| (k.as_str(), v.0.clone())).collect();
                graph.divisor(&entries)
            }
        }
    }

    /// Component names keyed by cluster-tree vertex name.
    pub fn vertex_map(&self) -> BTreeMap<String, String> {
        self.components
            .iter()
            .filter_map(|c| c.vertex.clone().map(|v| (v, c.name.clone())))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FieldJson {
    Q,
    Fp(u64),
}

impl<'de> Deserialize<'de> for FieldJsonRepr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match &v {
            serde_json::Value::String(s) if s == "Q" => Ok(FieldJsonRepr(FieldJson::Q)),
            serde_json::Value::Object(m) if m.len() == 1 => {
                match m.get("Fp").and_then(|p| p.as_u64()) {
                    Some(p) => Ok(FieldJsonRepr(FieldJson::Fp(p))),
                    None => Err(de::Error::custom("field must be \"Q\" or {\"Fp\": p}")),
                }
            }
            _ => Err(de::Error::custom("field must be \"Q\" or {\"Fp\": p}")),
        }
    }
}

/// `"Q"` or `{"Fp": p}`.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldJsonRepr(pub FieldJson);

impl Serialize for FieldJsonRepr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0 {
            FieldJson::Q => s.serialize_str("Q"),
            FieldJson::Fp(p) => {
                let mut m = BTreeMap::new();
                m.insert("Fp", p);
                m.serialize(s)
            }
        }
    }
}

impl FieldJsonRepr {
    pub fn to_field(&self) -> Result<CoefficientField> {
        match self.0 {
            FieldJson::Q => Ok(CoefficientField::Rationals),
            FieldJson::Fp(p) => CoefficientField::prime_field(p),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurveJson {
    pub g: usize,
    pub field: FieldJsonRepr,
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    pub a_const: Option<Rat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roots: Option<Vec<Rat>>,
    /// `y² + a(x)y = b(x)`, coefficients from the constant term up.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<Rat>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<Rat>>,
    /// Expansion points for the Wronskian identity.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Rat>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<usize>,
}

impl CurveJson {
    pub fn to_equation(&self) -> Result<HyperellipticEquation> {
        let field = self.field.to_field()?;
        match (&self.roots, &self.a, &self.b) {
            (Some(roots), None, None) => {
                let a = self
                    .a_const
                    .as_ref()
                    .map_or_else(|| rat(1), |r| r.0.clone());
                HyperellipticEquation::from_roots(self.g, field, &a, &rats(roots))
            }
            (None, Some(a), Some(b)) => HyperellipticEquation::from_general(
                self.g,
                &Polynomial::new(field, rats(a))?,
                &Polynomial::new(field, rats(b))?,
            ),
            _ => Err(Error::Parse(
                "curve needs either \"roots\" or both \"a\" and \"b\"".into(),
            )),
        }
    }
}

pub type ComplexJson = [f64; 2];

pub fn to_complex(c: &ComplexJson) -> Complex64 {
    Complex64::new(c[0], c[1])
}

pub fn from_complex(c: Complex64) -> ComplexJson {
    [c.re, c.im]
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ThetaJson {
    /// Row-major `τ`.
    pub tau: Vec<Vec<ComplexJson>>,
    pub z: Vec<ComplexJson>,
    /// Arguments `w₁..w_g` of `‖J‖`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<Vec<Vec<ComplexJson>>>,
}

impl ThetaJson {
    pub fn period_matrix(&self, eps: f64) -> Result<PeriodMatrix> {
        let rows: Vec<Vec<Complex64>> = self
            .tau
            .iter()
            .map(|r| r.iter().map(to_complex).collect())
            .collect();
        PeriodMatrix::from_rows(&rows, eps)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum AnalyticCurveJson {
    Torus {
        tau: ComplexJson,
    },
    Hyperelliptic {
        roots: Vec<ComplexJson>,
        #[serde(default = "one")]
        lc: ComplexJson,
    },
}

fn one() -> ComplexJson {
    [1.0, 0.0]
}

pub enum BuiltCurve {
    Torus(EllipticTorus),
    Hyperelliptic(HyperellipticCurve),
}

impl BuiltCurve {
    pub fn as_dyn(&self) -> &dyn crate::analytic::AnalyticCurve {
        match self {
            BuiltCurve::Torus(t) => t,
            BuiltCurve::Hyperelliptic(h) => h,
        }
    }
}

impl AnalyticCurveJson {
    pub fn build(&self, tol: f64) -> Result<BuiltCurve> {
        match self {
            AnalyticCurveJson::Torus { tau } => {
                Ok(BuiltCurve::Torus(EllipticTorus::new(to_complex(tau))?))
            }
            AnalyticCurveJson::Hyperelliptic { roots, lc } => {
                let roots: Vec<Complex64> = roots.iter().map(to_complex).collect();
                Ok(BuiltCurve::Hyperelliptic(HyperellipticCurve::new(
                    &roots,
                    to_complex(lc),
                    tol,
                )?))
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TinvJson {
    pub curve: AnalyticCurveJson,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_samples() -> usize {
    5
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LocalJson {
    pub place: String,
    pub log_residue_size: f64,
    pub ord_delta: i64,
    pub sum_phi_sq: Rat,
    pub e_omega_degree: Rat,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ArchJson {
    pub embedding: String,
    #[serde(rename = "log_T")]
    pub log_t: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LedgerJson {
    pub g: usize,
    #[serde(rename = "degree_K")]
    pub degree_k: usize,
    pub nt_heights: Vec<f64>,
    #[serde(default)]
    pub local: Vec<LocalJson>,
    pub arch: Vec<ArchJson>,
}

impl LedgerJson {
    pub fn to_input(&self) -> GlobalHeightInput {
        GlobalHeightInput {
            g: self.g,
            degree_k: self.degree_k,
            nt_heights: self.nt_heights.clone(),
            local: self
                .local
                .iter()
                .map(|l| LocalLedgerEntry {
                    place: l.place.clone(),
                    log_residue_size: l.log_residue_size,
                    ord_delta: l.ord_delta,
                    sum_phi_sq: l.sum_phi_sq.0.clone(),
                    e_omega_degree: l.e_omega_degree.0.clone(),
                })
                .collect(),
            arch: self
                .arch
                .iter()
                .map(|a| ArchLedgerEntry {
                    embedding: a.embedding.clone(),
                    log_t: a.log_t,
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EmbeddingJson {
    pub embedding: String,
    pub curve: AnalyticCurveJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportJson {
    pub g: usize,
    #[serde(rename = "degree_K")]
    pub degree_k: usize,
    pub embeddings: Vec<EmbeddingJson>,
    #[serde(default = "default_samples")]
    pub t_samples: usize,
    #[serde(default = "default_bost_samples")]
    pub bost_samples: usize,
}

fn default_bost_samples() -> usize {
    2000
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssumptionJson {
    pub evenness_ok: bool,
    pub residues_ok: bool,
    pub odd_residue_char: bool,
    pub messages: Vec<String>,
}

impl From<&AssumptionReport> for AssumptionJson {
    fn from(r: &AssumptionReport) -> Self {
        Self {
            evenness_ok: r.evenness_ok,
            residues_ok: r.residues_ok,
            odd_residue_char: r.odd_residue_char,
            messages: r.messages.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexJson {
    pub name: String,
    pub level: i64,
    pub phi: usize,
    pub parity: u8,
    pub members: Vec<usize>,
    pub parent: Option<String>,
    pub path_phi_sum: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeOutput {
    pub schema_version: u32,
    pub command: String,
    pub g: usize,
    pub p: u64,
    pub vertices: Vec<VertexJson>,
    pub e: Rat,
    pub assumptions: AssumptionJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualOutput {
    pub schema_version: u32,
    pub command: String,
    pub e: Rat,
    pub multiplicities: BTreeMap<String, Rat>,
    pub ord_lambda: i64,
    pub assumptions: AssumptionJson,
    pub overridden: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectionPhiJson {
    pub name: String,
    pub meets: String,
    pub phi: BTreeMap<String, Rat>,
    pub phi_display: String,
    pub self_intersection: Rat,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiOutput {
    pub schema_version: u32,
    pub command: String,
    pub sections: Vec<SectionPhiJson>,
    pub sum_phi_sq: Rat,
    pub node_count: i64,
    pub omega_degrees: BTreeMap<String, i64>,
    pub e_omega_degree: Rat,
    pub ord_xi: Option<Rat>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyOutput {
    pub schema_version: u32,
    pub command: String,
    pub g: usize,
    pub ord_lambda: i64,
    pub sum_phi_sq: Rat,
    pub ord_delta: i64,
    pub e_omega_degree: Rat,
    pub lhs: Rat,
    pub rhs: Rat,
    pub residual: Rat,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointCheckJson {
    pub x0: Rat,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapOrderJson {
    pub point: String,
    pub order: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WronskianOutput {
    pub schema_version: u32,
    pub command: String,
    pub g: usize,
    pub field: FieldJsonRepr,
    pub precision: usize,
    pub discriminant: Rat,
    pub checks: Vec<PointCheckJson>,
    pub gap_orders: Vec<GapOrderJson>,
    pub weierstrass_total: usize,
    pub expected_total: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaOutput {
    pub schema_version: u32,
    pub command: String,
    pub theta: ComplexJson,
    pub theta_norm: f64,
    pub gradient: Vec<ComplexJson>,
    pub j_norm: Option<f64>,
    pub tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TinvOutput {
    pub schema_version: u32,
    pub command: String,
    pub g: usize,
    pub seed: u64,
    pub tau: Vec<Vec<ComplexJson>>,
    pub samples: Vec<f64>,
    pub mean: f64,
    pub relative_spread: f64,
    /// For genus one, `(2π)^{−2}‖Δ‖^{−1/4}`.
    pub closed_form: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeightOutput {
    pub schema_version: u32,
    pub command: String,
    pub g: usize,
    pub degree_k: usize,
    pub heights_term: f64,
    pub local_term: f64,
    pub local_coefficients: BTreeMap<String, Rat>,
    pub arch_term: f64,
    pub combination: f64,
    pub deg_lambda: f64,
    pub faltings_height: f64,
    pub lower_bound: f64,
    pub rounding_error: f64,
    pub slope_constant: Rat,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingReportJson {
    pub embedding: String,
    pub log_t: f64,
    pub bost_mean: f64,
    pub bost_standard_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportOutput {
    pub schema_version: u32,
    pub command: String,
    pub g: usize,
    pub degree_k: usize,
    pub seed: u64,
    pub embeddings: Vec<EmbeddingReportJson>,
    pub t_lower_bound: f64,
    pub bost_bound: f64,
    pub bost_bound_error: f64,
}
