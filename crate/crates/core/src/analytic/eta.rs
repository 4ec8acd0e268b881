//! Dedekind eta and the Petersson norm of the modular discriminant.
//!
//! `‖Δ‖(τ) = (Im τ)^6·|η(τ)|^24`, an `SL₂(ℤ)`-invariant function.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::period::reduce_to_fundamental_domain;
use crate::error::{Error, Result};

/// `log |∏_{n≥1} (1 − qⁿ)|` by the product, truncated once the remaining
/// factors are provably within `tol` of one in logarithm.
fn log_abs_euler_product(q: Complex64, tol: f64) -> Result<f64> {
    let r = q.norm();
    if r >= 1.0 {
        return Err(Error::invalid("|q| must be below one"));
    }
    let mut acc = 0.0;
    let mut qn = q;
    for _ in 0..100_000 {
        acc += (Complex64::new(1.0, 0.0) - qn).norm().ln();
        qn *= q;
        // |log(1 − w)| ≤ 2|w| for |w| ≤ ½, summed geometrically
        let rn = qn.norm();
        if rn <= 0.5 && 2.0 * rn / (1.0 - r) < tol {
            return Ok(acc);
        }
    }
    Err(Error::NonConvergence("eta product".into()))
}

/// `|∏(1 − qⁿ)|` by Euler's pentagonal series `Σ_k (−1)^k q^{k(3k−1)/2}`.
fn abs_pentagonal_series(q: Complex64, tol: f64) -> Result<f64> {
    let r = q.norm();
    let mut sum = Complex64::new(1.0, 0.0);
    for k in 1..10_000i64 {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let e1 = k * (3 * k - 1) / 2;
        let e2 = k * (3 * k + 1) / 2;
        sum += (q.powi(e1 as i32) + q.powi(e2 as i32)) * sign;
        // remaining terms are bounded by a geometric series starting at r^{e_next}
        let next = (k + 1) * (3 * (k + 1) - 1) / 2;
        if 2.0 * r.powi(next as i32) / (1.0 - r) < tol {
            return Ok(sum.norm());
        }
    }
    Err(Error::NonConvergence("pentagonal series".into()))
}

fn check_tau(tau: Complex64) -> Result<()> {
    if !(tau.im > 0.0) || !tau.re.is_finite() {
        return Err(Error::invalid("τ must lie in the upper half plane"));
    }
    Ok(())
}

/// `log ‖Δ‖(τ)` through the product formula, after reduction to the
/// fundamental domain.
pub fn log_petersson_delta_norm(tau: Complex64, tol: f64) -> Result<f64> {
    check_tau(tau)?;
    let (t, _) = reduce_to_fundamental_domain(tau)?;
    let q = Complex64::from_polar((-2.0 * PI * t.im).exp(), 2.0 * PI * t.re);
    // |q^{1/24}|^{24} = |q|
    Ok(6.0 * t.im.ln() - 2.0 * PI * t.im + 24.0 * log_abs_euler_product(q, tol / 24.0)?)
}

pub fn petersson_delta_norm(tau: Complex64, tol: f64) -> Result<f64> {
    Ok(log_petersson_delta_norm(tau, tol)?.exp())
}

/// The same quantity through the pentagonal-number series, without any
/// reduction of `τ`.
pub fn petersson_delta_norm_series(tau: Complex64, tol: f64) -> Result<f64> {
    check_tau(tau)?;
    let q = Complex64::from_polar((-2.0 * PI * tau.im).exp(), 2.0 * PI * tau.re);
    let p = abs_pentagonal_series(q, tol)?;
    Ok(tau.im.powi(6) * (-2.0 * PI * tau.im).exp() * p.powi(24))
}

/// `|η(τ)|`.
pub fn eta_abs(tau: Complex64, tol: f64) -> Result<f64> {
    check_tau(tau)?;
    let q = Complex64::from_polar((-2.0 * PI * tau.im).exp(), 2.0 * PI * tau.re);
    Ok((-PI * tau.im / 12.0 + log_abs_euler_product(q, tol)?).exp())
}
