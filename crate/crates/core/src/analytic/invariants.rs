//! The T-invariant, Monte-Carlo Bost integrals and the norm constant.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::curve::AnalyticCurve;
use super::period::PeriodMatrix;
use super::theta::{j_norm, theta_norm};
use crate::error::{Error, Result};

type C = Complex64;

/// Sample points whose ‖ϑ‖ or ‖J‖ factor falls below this are rejected.
pub const DEGENERACY_FLOOR: f64 = 1e-8;
pub const MAX_RESAMPLES: usize = 50;

#[derive(Clone, Debug, PartialEq)]
pub struct TSample {
    pub value: f64,
    pub log_value: f64,
    /// Rejected draws before this one.
    pub rejected: usize,
}

fn combine(terms: &[(&[C], f64)], k: &[C]) -> Vec<C> {
    (0..k.len())
        .map(|i| terms.iter().map(|(v, c)| v[i] * *c).sum::<C>() + k[i])
        .collect()
}

/// One evaluation of the T-invariant at given Abel–Jacobi images `u` of
/// `P₁..P_g` and `q` of `Q`. Returns `None` when some factor is below the
/// degeneracy floor.
pub fn t_invariant_at(
    curve: &dyn AnalyticCurve,
    u: &[Vec<C>],
    q: &[C],
    tol: f64,
) -> Result<Option<f64>> {
    let g = curve.genus();
    let gf = g as f64;
    let tau = curve.period_matrix();
    let k = curve.riemann_constant();
    let mut log_t = 0.0;
    let mut log_factor = |z: Vec<C>, exponent: f64| -> Result<bool> {
        if exponent == 0.0 {
            return Ok(true);
        }
        let v = theta_norm(&z, tau, tol)?;
        if v < DEGENERACY_FLOOR {
            return Ok(false);
        }
        log_t += exponent * v.ln();
        Ok(true)
    };
    let outer = 2.0 * gf - 2.0;
    let mut terms: Vec<(&[C], f64)> = u.iter().map(|v| (v.as_slice(), 1.0)).collect();
    terms.push((q, -1.0));
    if !log_factor(combine(&terms, k), outer)? {
        return Ok(None);
    }
    for uk in u {
        if !log_factor(combine(&[(uk, gf), (q, -1.0)], k), -outer / gf)? {
            return Ok(None);
        }
    }
    for (a, uk) in u.iter().enumerate() {
        for (b, ul) in u.iter().enumerate() {
            if a != b && !log_factor(combine(&[(uk, gf), (ul, -1.0)], k), 1.0 / gf)? {
                return Ok(None);
            }
        }
    }
    let w_exp = (gf - 1.0) / gf.powi(4);
    for r in curve.weierstrass_images() {
        for uk in u {
            if !log_factor(combine(&[(uk, gf), (&r, -1.0)], k), w_exp)? {
                return Ok(None);
            }
        }
    }
    let ws: Vec<Vec<C>> = (0..g)
        .map(|a| {
            let others: Vec<(&[C], f64)> = u
                .iter()
                .enumerate()
                .filter(|(b, _)| *b != a)
                .map(|(_, v)| (v.as_slice(), 1.0))
                .collect();
            combine(&others, k)
        })
        .collect();
    let j = j_norm(&ws, tau, tol)?;
    if j < DEGENERACY_FLOOR {
        return Ok(None);
    }
    log_t -= 2.0 * j.ln();
    Ok(Some(log_t))
}

/// The T-invariant at randomly drawn `P₁..P_g, Q`, redrawing up to
/// [`MAX_RESAMPLES`] times when a factor degenerates.
pub fn t_invariant(curve: &dyn AnalyticCurve, rng: &mut dyn RngCore, tol: f64) -> Result<TSample> {
    let g = curve.genus();
    for rejected in 0..=MAX_RESAMPLES {
        let draw = (|| -> Result<(Vec<Vec<C>>, Vec<C>)> {
            let u = (0..g)
                .map(|_| curve.random_point(rng))
                .collect::<Result<Vec<_>>>()?;
            Ok((u, curve.random_point(rng)?))
        })();
        let (u, q) = match draw {
            Ok(d) => d,
            Err(Error::NonConvergence(_)) => continue,
            Err(e) => return Err(e),
        };
        if let Some(log_value) = t_invariant_at(curve, &u, &q, tol)? {
            return Ok(TSample {
                value: log_value.exp(),
                log_value,
                rejected,
            });
        }
    }
    Err(Error::NonConvergence(format!(
        "no generic sample in {} draws",
        MAX_RESAMPLES + 1
    )))
}

/// `(2π)^{−2g}·‖Δ‖^{−(3g−1)/(8ng)}` with `n = C(2g, g+1)`, the closed form
/// of `T` for hyperelliptic curves, given `log ‖Δ‖`.
pub fn t_from_delta(g: usize, log_delta: f64) -> f64 {
    let n = binomial(2 * g as u64, g as u64 + 1) as f64;
    let gf = g as f64;
    (-2.0 * gf * (2.0 * PI).ln() - (3.0 * gf - 1.0) / (8.0 * n * gf) * log_delta).exp()
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// `log[(2π)^{−4g(2g−1)(g+1)}·T^{8g²}]`.
pub fn log_norm_constant(g: usize, t: f64) -> f64 {
    let g = g as f64;
    -4.0 * g * (2.0 * g - 1.0) * (g + 1.0) * (2.0 * PI).ln() + 8.0 * g * g * t.ln()
}

/// Monte-Carlo estimate of `∫ log‖ϑ‖ dμ` over the torus with Haar measure.
#[derive(Clone, Debug, PartialEq)]
pub struct BostEstimate {
    pub mean: f64,
    pub standard_error: f64,
    pub samples: usize,
}

pub fn bost_integral(
    tau: &PeriodMatrix,
    seed: u64,
    samples: usize,
    tol: f64,
) -> Result<BostEstimate> {
    if samples == 0 {
        return Err(Error::invalid("at least one sample is needed"));
    }
    let g = tau.genus();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..samples {
        let a: Vec<f64> = (0..g).map(|_| rng.random()).collect();
        let b: Vec<f64> = (0..g).map(|_| rng.random()).collect();
        let v = theta_norm(&tau.torus_point(&a, &b), tau, tol)?
            .max(f64::MIN_POSITIVE)
            .ln();
        sum += v;
        sum_sq += v * v;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = if samples > 1 {
        ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(BostEstimate {
        mean,
        standard_error: (var / n).sqrt(),
        samples,
    })
}
