//! Bookkeeping for the closed formula of `deg λ` over a semistable model,
//! the lower bound it implies, and the Bost bound.
//!
//! Local terms are exact rationals multiplied by `log #κ(s)`; archimedean
//! terms are floating point. The total is floated at the last step.

use std::f64::consts::PI;

use num_rational::BigRational;
use num_traits::Signed;
use serde::Serialize;

use crate::arith::rational::{display_rational, rat, to_f64};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct LocalLedgerEntry {
    pub place: String,
    /// `log #κ(s)`.
    pub log_residue_size: f64,
    pub ord_delta: i64,
    /// `Σ_{P∈W(S)} (Φ_P, Φ_P)` at this place, with multiplicity.
    pub sum_phi_sq: BigRational,
    /// Local part of `(E, ω̄)` in units of `log #κ(s)`.
    pub e_omega_degree: BigRational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArchLedgerEntry {
    pub embedding: String,
    pub log_t: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GlobalHeightInput {
    pub g: usize,
    pub degree_k: usize,
    /// `ĥ(P)` for the `g³ − g` points of `W(S)`, with multiplicity.
    pub nt_heights: Vec<f64>,
    pub local: Vec<LocalLedgerEntry>,
    pub arch: Vec<ArchLedgerEntry>,
}

impl GlobalHeightInput {
    pub fn validate(&self) -> Result<()> {
        let g = self.g;
        if g < 2 {
            return Err(Error::invalid("the height formula needs g >= 2"));
        }
        if self.degree_k == 0 {
            return Err(Error::invalid("[K:Q] must be positive"));
        }
        if self.arch.len() != self.degree_k {
            return Err(Error::invalid(format!(
                "{} archimedean entries for [K:Q] = {}",
                self.arch.len(),
                self.degree_k
            )));
        }
        if self.nt_heights.len() != g * g * g - g {
            return Err(Error::invalid(format!(
                "expected {} Néron–Tate heights, got {}",
                g * g * g - g,
                self.nt_heights.len()
            )));
        }
        if self.nt_heights.iter().any(|h| !h.is_finite() || *h < 0.0) {
            return Err(Error::invalid(
                "Néron–Tate heights must be finite and nonnegative",
            ));
        }
        for e in &self.local {
            if !(e.log_residue_size.is_finite() && e.log_residue_size > 0.0) {
                return Err(Error::invalid(format!(
                    "place {}: log #κ must be positive",
                    e.place
                )));
            }
            if e.ord_delta < 0 || e.sum_phi_sq.is_positive() || e.e_omega_degree.is_negative() {
                return Err(Error::invalid(format!(
                    "place {}: local term has the wrong sign",
                    e.place
                )));
            }
        }
        if self.arch.iter().any(|a| !a.log_t.is_finite()) {
            return Err(Error::invalid("log T must be finite"));
        }
        Ok(())
    }
}

fn coef(g: i64) -> (i64, i64, i64, i64) {
    // (3g−1)(8g+4), (2g−1)(g+1), 4g(2g−1)(g+1), 8g²
    (
        (3 * g - 1) * (8 * g + 4),
        (2 * g - 1) * (g + 1),
        4 * g * (2 * g - 1) * (g + 1),
        8 * g * g,
    )
}

/// Exact coefficient of `log #κ(s)` contributed by one place.
pub fn local_coefficient(g: usize, entry: &LocalLedgerEntry) -> BigRational {
    let g = g as i64;
    let (_, delta_coef, _, _) = coef(g);
    -&entry.sum_phi_sq / rat(g * (g - 1))
        + rat(delta_coef * entry.ord_delta)
        + rat(4) * &entry.e_omega_degree
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeightReport {
    pub heights_term: f64,
    pub local_term: f64,
    pub local_coefficients: Vec<(String, String)>,
    pub arch_term: f64,
    /// `(3g−1)(8g+4)·deg λ`.
    pub combination: f64,
    pub deg_lambda: f64,
    /// `deg λ / [K:ℚ]`, the stable Faltings height.
    pub faltings_height: f64,
    pub lower_bound: f64,
    pub rounding_error: f64,
}

pub fn deg_lambda(input: &GlobalHeightInput) -> Result<HeightReport> {
    input.validate()?;
    let g = input.g as i64;
    let d = input.degree_k as f64;
    let (lhs_coef, _, pi_coef, t_coef) = coef(g);
    let gg = (g * (g - 1)) as f64;
    let heights_term = 2.0 * d / gg * input.nt_heights.iter().sum::<f64>();
    let mut local_term = 0.0;
    let mut rounding_error = 0.0;
    let mut local_coefficients = Vec::new();
    for e in &input.local {
        let c = local_coefficient(input.g, e);
        let v = to_f64(&c) * e.log_residue_size;
        local_term += v;
        rounding_error += 4.0 * f64::EPSILON * v.abs();
        local_coefficients.push((e.place.clone(), display_rational(&c)));
    }
    let sum_log_t: f64 = input.arch.iter().map(|a| a.log_t).sum();
    let arch_term = -(pi_coef as f64) * d * (2.0 * PI).ln() + t_coef as f64 * sum_log_t;
    let combination = heights_term + local_term + arch_term;
    rounding_error +=
        4.0 * f64::EPSILON * (heights_term.abs() + arch_term.abs() + combination.abs());
    let deg = combination / lhs_coef as f64;
    let logs: Vec<f64> = input.arch.iter().map(|a| a.log_t).collect();
    Ok(HeightReport {
        heights_term,
        local_term,
        local_coefficients,
        arch_term,
        combination,
        deg_lambda: deg,
        faltings_height: deg / d,
        lower_bound: faltings_lower_bound(input.g, input.degree_k, &logs)?,
        rounding_error: rounding_error / lhs_coef as f64,
    })
}

/// `[−4g(2g−1)(g+1)·log 2π + (8g²/[K:ℚ])·Σ log T] / ((3g−1)(8g+4))`.
pub fn faltings_lower_bound(g: usize, degree_k: usize, log_t: &[f64]) -> Result<f64> {
    if g < 1 || degree_k == 0 || log_t.len() != degree_k {
        return Err(Error::invalid(
            "lower bound needs g >= 1 and one log T per embedding",
        ));
    }
    let (lhs_coef, pi_coef, t_coef) = {
        let c = coef(g as i64);
        (c.0 as f64, c.2 as f64, c.3 as f64)
    };
    let s: f64 = log_t.iter().sum();
    Ok((-pi_coef * (2.0 * PI).ln() + t_coef / degree_k as f64 * s) / lhs_coef)
}

/// `−g·log 2π − (2/[K:ℚ])·Σ ∫ log‖ϑ‖` and the propagated standard error.
pub fn bost_bound(g: usize, degree_k: usize, integrals: &[(f64, f64)]) -> Result<(f64, f64)> {
    if degree_k == 0 || integrals.len() != degree_k {
        return Err(Error::invalid(
            "Bost bound needs one integral per embedding",
        ));
    }
    let d = degree_k as f64;
    let value =
        -(g as f64) * (2.0 * PI).ln() - 2.0 / d * integrals.iter().map(|(m, _)| m).sum::<f64>();
    let err = 2.0 / d * integrals.iter().map(|(_, e)| e * e).sum::<f64>().sqrt();
    Ok((value, err))
}

/// `(3g−1)(8g+4) / ((2g−1)(g+1))`.
pub fn slope_constant(g: usize) -> Result<BigRational> {
    if g < 2 {
        return Err(Error::invalid("slope constant needs g >= 2"));
    }
    let (a, b, _, _) = coef(g as i64);
    Ok(rat(a) / rat(b))
}
