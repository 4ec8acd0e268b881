//! Riemann theta `ϑ(z; τ) = Σ_{n∈ℤ^g} exp(πi ᵗnτn + 2πi ᵗnz)` and its
//! gradient, with rigorous truncation bounds.
//!
//! All sums are evaluated in normalized form
//! `S̃(z) = exp(−π ᵗy Y⁻¹ y)·ϑ(z)`, whose terms have modulus
//! `exp(−π ᵗ(n+c) Y (n+c))` with `c = Y⁻¹y`. The lattice points are
//! enumerated inside an ellipsoid around `−c`, and the mass outside it is
//! bounded by comparing each point with a ball of half the minimal lattice
//! distance.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use statrs::function::gamma::{gamma, gamma_ur};

use super::period::PeriodMatrix;
use crate::error::{Error, Result};

const MAX_RADIUS: f64 = 60.0;
const MAX_POINTS: usize = 5_000_000;

/// Bound on `Σ_{v ∈ L+w, |v| ≥ R} (a|v| + b)^k e^{−|v|²}` for a shifted
/// lattice whose points are at least `2·r0` apart, valid for `R ≥ 2·r0`.
pub fn tail_bound(g: usize, r0: f64, radius: f64, a: f64, b: f64, k: usize) -> f64 {
    let lower = radius - 2.0 * r0;
    if lower < 0.0 {
        return f64::INFINITY;
    }
    // (s + r0)^{g−1} (a s + 2 a r0 + b)^k expanded in s
    let mut poly = vec![1.0];
    let mul = |p: &[f64], c0: f64, c1: f64| {
        let mut out = vec![0.0; p.len() + 1];
        for (i, x) in p.iter().enumerate() {
            out[i] += x * c0;
            out[i + 1] += x * c1;
        }
        out
    };
    for _ in 0..g.saturating_sub(1) {
        poly = mul(&poly, r0, 1.0);
    }
    for _ in 0..k {
        poly = mul(&poly, 2.0 * a * r0 + b, a);
    }
    let x = lower * lower;
    let integral: f64 = poly
        .iter()
        .enumerate()
        .map(|(j, q)| {
            let s = (j as f64 + 1.0) / 2.0;
            let upper = if x > 0.0 { gamma_ur(s, x) } else { 1.0 };
            q * 0.5 * upper * gamma(s)
        })
        .sum();
    g as f64 / r0.powi(g as i32) * integral
}

/// A normalized sum `S̃` and, when requested, the normalized gradient.
#[derive(Clone, Debug)]
pub struct NormalizedTheta {
    pub value: Complex64,
    pub gradient: Vec<Complex64>,
    /// `π ᵗy Y⁻¹ y`, the logarithm of the normalizing factor.
    pub log_scale: f64,
    /// Truncation error bounds for value and gradient entries.
    pub value_error: f64,
    pub gradient_error: f64,
}

fn check_point(z: &[Complex64], tau: &PeriodMatrix, tol: f64) -> Result<()> {
    if z.len() != tau.genus() {
        return Err(Error::invalid(format!(
            "point has {} coordinates, genus is {}",
            z.len(),
            tau.genus()
        )));
    }
    if z.iter().any(|w| !w.re.is_finite() || !w.im.is_finite()) {
        return Err(Error::invalid("point has non-finite coordinates"));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    Ok(())
}

fn offset(tau: &PeriodMatrix, z: &[Complex64]) -> DVector<f64> {
    let y = DVector::from_fn(z.len(), |i, _| z[i].im);
    tau.imag_inverse() * y
}

/// Lattice points `n` with `π·|T(n + c)|² ≤ R²`, passed to `visit` together
/// with `|√π·T(n + c)|²`.
fn enumerate(
    tau: &PeriodMatrix,
    c: &DVector<f64>,
    radius: f64,
    visit: &mut dyn FnMut(&[i64], f64),
) -> Result<usize> {
    let g = tau.genus();
    let t = tau.cholesky_upper() * PI.sqrt();
    let mut n = vec![0i64; g];
    let mut count = 0usize;
    fn rec(
        i: usize,
        t: &DMatrix<f64>,
        c: &DVector<f64>,
        n: &mut Vec<i64>,
        budget: f64,
        acc: f64,
        count: &mut usize,
        visit: &mut dyn FnMut(&[i64], f64),
    ) -> Result<()> {
        let g = n.len();
        let off: f64 = (i + 1..g).map(|j| t[(i, j)] * (n[j] as f64 + c[j])).sum();
        let r = budget.max(0.0).sqrt();
        let tii = t[(i, i)];
        let lo = ((-off - r) / tii - c[i]).ceil() as i64;
        let hi = ((-off + r) / tii - c[i]).floor() as i64;
        for k in lo..=hi {
            n[i] = k;
            let comp = tii * (k as f64 + c[i]) + off;
            let q = comp * comp;
            if q > budget {
                continue;
            }
            if i == 0 {
                *count += 1;
                if *count > MAX_POINTS {
                    return Err(Error::NonConvergence("too many lattice points".into()));
                }
                visit(n, acc + q);
            } else {
                rec(i - 1, t, c, n, budget - q, acc + q, count, visit)?;
            }
        }
        Ok(())
    }
    rec(
        g - 1,
        &t,
        c,
        &mut n,
        radius * radius,
        0.0,
        &mut count,
        visit,
    )?;
    Ok(count)
}

/// Normalized sum at a point whose offset `c` is already small, truncated at
/// the given radius. Returns the sums and the truncation bounds.
fn sum_at_radius(
    tau: &PeriodMatrix,
    z: &[Complex64],
    radius: f64,
    with_gradient: bool,
) -> Result<(Complex64, Vec<Complex64>, f64, f64)> {
    let g = tau.genus();
    let c = offset(tau, z);
    let x: Vec<f64> = z.iter().map(|w| w.re).collect();
    let re_tau = tau.tau().map(|w| w.re);
    let mut value = Complex64::new(0.0, 0.0);
    let mut grad = vec![Complex64::new(0.0, 0.0); g];
    enumerate(tau, &c, radius, &mut |n, q| {
        let mut phase = 0.0;
        for i in 0..g {
            let ni = n[i] as f64;
            phase += 2.0 * ni * x[i];
            for j in 0..g {
                phase += ni * re_tau[(i, j)] * n[j] as f64;
            }
        }
        let term = Complex64::from_polar((-q).exp(), PI * phase);
        value += term;
        if with_gradient {
            for i in 0..g {
                grad[i] += term * Complex64::new(0.0, 2.0 * PI * n[i] as f64);
            }
        }
    })?;
    let r0 = 0.5 * (PI * tau.min_eigenvalue()).sqrt();
    let value_error = tail_bound(g, r0, radius, 0.0, 1.0, 0);
    let gradient_error = if with_gradient {
        let a = 2.0 * PI.sqrt() / tau.min_eigenvalue().sqrt();
        let b = 2.0 * PI * c.norm();
        tail_bound(g, r0, radius, a, b, 1)
    } else {
        0.0
    };
    Ok((value, grad, value_error, gradient_error))
}

/// Smallest radius, on a grid of step 1/4, whose bounds are below `tol`.
fn radius_for(tau: &PeriodMatrix, c_norm: f64, tol: f64, with_gradient: bool) -> Result<f64> {
    let g = tau.genus();
    let r0 = 0.5 * (PI * tau.min_eigenvalue()).sqrt();
    let a = 2.0 * PI.sqrt() / tau.min_eigenvalue().sqrt();
    let b = 2.0 * PI * c_norm;
    let mut radius = 2.0 * r0;
    while radius <= MAX_RADIUS {
        let ok = tail_bound(g, r0, radius, 0.0, 1.0, 0) < tol
            && (!with_gradient || tail_bound(g, r0, radius, a, b, 1) < tol);
        if ok {
            return Ok(radius);
        }
        radius += 0.25;
    }
    Err(Error::NonConvergence(format!(
        "tolerance {tol:e} needs radius beyond {MAX_RADIUS}"
    )))
}

/// Normalized theta sum at an arbitrary point. The point is first moved by
/// lattice vectors so that `c = Y⁻¹y` has entries in `[−½, ½]`, and the
/// quasi-periodicity factor is carried through.
pub fn normalized_theta(
    z: &[Complex64],
    tau: &PeriodMatrix,
    tol: f64,
    with_gradient: bool,
) -> Result<NormalizedTheta> {
    check_point(z, tau, tol)?;
    let g = tau.genus();
    let c = offset(tau, z);
    let log_scale = PI * z.iter().enumerate().map(|(i, w)| w.im * c[i]).sum::<f64>();
    let k: Vec<i64> = c.iter().map(|ci| ci.round() as i64).collect();
    let zero = vec![0i64; g];
    let shift = tau.lattice_vector(&zero, &k);
    let mut zr: Vec<Complex64> = z.iter().zip(&shift).map(|(a, b)| a - b).collect();
    for w in zr.iter_mut() {
        w.re -= w.re.round();
    }
    let cr = offset(tau, &zr);
    let radius = radius_for(tau, cr.norm(), tol, with_gradient)?;
    let (value, grad, value_error, gradient_error) =
        sum_at_radius(tau, &zr, radius, with_gradient)?;
    // ψ = −π ᵗk Re(τ) k − 2π ᵗk Re(z')
    let mut psi = 0.0;
    for i in 0..g {
        let ki = k[i] as f64;
        psi -= 2.0 * PI * ki * zr[i].re;
        for j in 0..g {
            psi -= PI * ki * tau.tau()[(i, j)].re * k[j] as f64;
        }
    }
    let phase = Complex64::from_polar(1.0, psi);
    let gradient = if with_gradient {
        (0..g)
            .map(|i| phase * (grad[i] - Complex64::new(0.0, 2.0 * PI * k[i] as f64) * value))
            .collect()
    } else {
        Vec::new()
    };
    let kn = k.iter().map(|&x| (x as f64).powi(2)).sum::<f64>().sqrt();
    Ok(NormalizedTheta {
        value: phase * value,
        gradient,
        log_scale,
        value_error,
        gradient_error: gradient_error + 2.0 * PI * kn * value_error,
    })
}

/// Truncated normalized sum at an explicit radius, without lattice
/// reduction, and its tail bound.
pub fn theta_at_radius(
    z: &[Complex64],
    tau: &PeriodMatrix,
    radius: f64,
) -> Result<(Complex64, f64)> {
    check_point(z, tau, 1.0)?;
    let (v, _, err, _) = sum_at_radius(tau, z, radius, false)?;
    let c = offset(tau, z);
    let log_scale = PI * z.iter().enumerate().map(|(i, w)| w.im * c[i]).sum::<f64>();
    let scale = log_scale.exp();
    Ok((v * scale, err * scale))
}

pub fn theta(z: &[Complex64], tau: &PeriodMatrix, tol: f64) -> Result<Complex64> {
    let nt = normalized_theta(z, tau, tol, false)?;
    Ok(nt.value * nt.log_scale.exp())
}

/// `(∂ϑ/∂z_k)(z)`.
pub fn theta_gradient(z: &[Complex64], tau: &PeriodMatrix, tol: f64) -> Result<Vec<Complex64>> {
    let nt = normalized_theta(z, tau, tol, true)?;
    let s = nt.log_scale.exp();
    Ok(nt.gradient.into_iter().map(|d| d * s).collect())
}

/// `‖ϑ‖(z) = (det Y)^{1/4} exp(−π ᵗy Y⁻¹ y)|ϑ(z)|`.
pub fn theta_norm(z: &[Complex64], tau: &PeriodMatrix, tol: f64) -> Result<f64> {
    let nt = normalized_theta(z, tau, tol, false)?;
    Ok(tau.det_imag().powf(0.25) * nt.value.norm())
}

/// `‖J‖(w₁, …, w_g) = (det Y)^{(g+2)/4} exp(−π Σ ᵗy_k Y⁻¹ y_k)·|det(∂ϑ/∂z_k(w_l))|`.
pub fn j_norm(ws: &[Vec<Complex64>], tau: &PeriodMatrix, tol: f64) -> Result<f64> {
    let g = tau.genus();
    if ws.len() != g {
        return Err(Error::invalid(format!(
            "‖J‖ takes {g} points, got {}",
            ws.len()
        )));
    }
    let mut m = DMatrix::from_element(g, g, Complex64::new(0.0, 0.0));
    for (l, w) in ws.iter().enumerate() {
        let nt = normalized_theta(w, tau, tol, true)?;
        for k in 0..g {
            m[(k, l)] = nt.gradient[k];
        }
    }
    Ok(tau.det_imag().powf((g as f64 + 2.0) / 4.0) * m.determinant().norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    const THETA_I: f64 = 1.086_434_811_213_308;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn theta_null_at_i() {
        let tau = PeriodMatrix::genus1(c(0.0, 1.0)).unwrap();
        let v = theta(&[c(0.0, 0.0)], &tau, 1e-14).unwrap();
        assert!((v.re - THETA_I).abs() < 1e-12 && v.im.abs() < 1e-14);
        assert!((theta_norm(&[c(0.0, 0.0)], &tau, 1e-14).unwrap() - THETA_I).abs() < 1e-12);
    }

    #[test]
    fn zero_at_half_period() {
        let tau = PeriodMatrix::genus1(c(0.0, 1.0)).unwrap();
        assert!(theta_norm(&[c(0.5, 0.5)], &tau, 1e-14).unwrap() < 1e-13);
        let d = theta_gradient(&[c(0.5, 0.5)], &tau, 1e-14).unwrap();
        assert!(d[0].norm() > 0.1);
    }

    #[test]
    fn gradient_matches_finite_difference() {
        let i = c(0.0, 1.0);
        let tau = PeriodMatrix::from_rows(
            &[
                vec![0.1 + 1.2 * i, 0.2 + 0.3 * i],
                vec![0.2 + 0.3 * i, -0.3 + 0.8 * i],
            ],
            1e-12,
        )
        .unwrap();
        let z = vec![c(0.37, 1.7), c(-0.2, -0.9)];
        let grad = theta_gradient(&z, &tau, 1e-14).unwrap();
        for k in 0..2 {
            let h = 1e-6;
            let mut zp = z.clone();
            let mut zm = z.clone();
            zp[k] += h;
            zm[k] -= h;
            let fd =
                (theta(&zp, &tau, 1e-14).unwrap() - theta(&zm, &tau, 1e-14).unwrap()) / (2.0 * h);
            assert!(
                (fd - grad[k]).norm() < 1e-6 * (1.0 + grad[k].norm()),
                "{fd} vs {}",
                grad[k]
            );
        }
    }

    #[test]
    fn tail_bound_decreases() {
        let b1 = tail_bound(2, 0.8, 4.0, 0.0, 1.0, 0);
        let b2 = tail_bound(2, 0.8, 6.0, 0.0, 1.0, 0);
        assert!(b2 < b1 && b2 > 0.0);
        assert!(tail_bound(2, 0.8, 1.0, 0.0, 1.0, 0).is_infinite());
    }
}
