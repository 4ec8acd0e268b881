//! Period matrices in the Siegel upper half space.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// A symmetric `τ` with positive definite imaginary part, together with the
/// real data derived from it.
#[derive(Clone, Debug)]
pub struct PeriodMatrix {
    tau: DMatrix<Complex64>,
    y: DMatrix<f64>,
    y_inv: DMatrix<f64>,
    /// Upper triangular with `Y = TᵀT`.
    t: DMatrix<f64>,
    det_y: f64,
    lambda_min: f64,
}

impl PeriodMatrix {
    /// Checks `‖τ − ᵗτ‖ ≤ eps` and symmetrizes.
    pub fn new(tau: DMatrix<Complex64>, eps: f64) -> Result<Self> {
        let g = tau.nrows();
        if g == 0 || tau.ncols() != g {
            return Err(Error::invalid("period matrix must be square and nonempty"));
        }
        if tau.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("period matrix has non-finite entries"));
        }
        let asym = (&tau - tau.transpose())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if asym > eps {
            return Err(Error::invalid(format!(
                "period matrix is not symmetric ({asym:e})"
            )));
        }
        let tau = (&tau + tau.transpose()) * Complex64::new(0.5, 0.0);
        let y = tau.map(|z| z.im);
        let chol = y
            .clone()
            .cholesky()
            .ok_or_else(|| Error::invalid("imaginary part is not positive definite"))?;
        let t = chol.l().transpose();
        let det_y = t.diagonal().iter().map(|d| d * d).product();
        let y_inv = chol.inverse();
        let lambda_min = y.clone().symmetric_eigenvalues().min();
        Ok(Self {
            tau,
            y,
            y_inv,
            t,
            det_y,
            lambda_min,
        })
    }

    pub fn from_rows(rows: &[Vec<Complex64>], eps: f64) -> Result<Self> {
        let g = rows.len();
        if rows.iter().any(|r| r.len() != g) {
            return Err(Error::invalid("period matrix rows have the wrong length"));
        }
        Self::new(DMatrix::from_fn(g, g, |i, j| rows[i][j]), eps)
    }

    pub fn genus1(tau: Complex64) -> Result<Self> {
        Self::new(DMatrix::from_element(1, 1, tau), 0.0)
    }

    pub fn genus(&self) -> usize {
        self.tau.nrows()
    }

    pub fn tau(&self) -> &DMatrix<Complex64> {
        &self.tau
    }

    pub fn imag(&self) -> &DMatrix<f64> {
        &self.y
    }

    pub fn imag_inverse(&self) -> &DMatrix<f64> {
        &self.y_inv
    }

    pub fn cholesky_upper(&self) -> &DMatrix<f64> {
        &self.t
    }

    pub fn det_imag(&self) -> f64 {
        self.det_y
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.lambda_min
    }

    /// `m + τ·n` for integer vectors.
    pub fn lattice_vector(&self, m: &[i64], n: &[i64]) -> Vec<Complex64> {
        let g = self.genus();
        (0..g)
            .map(|i| {
                let mut s = Complex64::new(m[i] as f64, 0.0);
                for j in 0..g {
                    s += self.tau[(i, j)] * n[j] as f64;
                }
                s
            })
            .collect()
    }

    /// `a + τ·b` for real vectors, the torus point with real coordinates
    /// `(a, b)`.
    pub fn torus_point(&self, a: &[f64], b: &[f64]) -> Vec<Complex64> {
        let bv = DVector::from_fn(self.genus(), |i, _| Complex64::new(b[i], 0.0));
        let tb = &self.tau * bv;
        (0..self.genus()).map(|i| tb[i] + a[i]).collect()
    }

    /// Real coordinates `(a, b)` with `z = a + τ·b`.
    pub fn torus_coordinates(&self, z: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
        let g = self.genus();
        let y = DVector::from_fn(g, |i, _| z[i].im);
        let b = &self.y_inv * y;
        let a = (0..g)
            .map(|i| {
                let xb: f64 = (0..g).map(|j| self.tau[(i, j)].re * b[j]).sum();
                z[i].re - xb
            })
            .collect();
        (a, b.iter().copied().collect())
    }
}

/// Moves `τ` in the upper half plane to the standard fundamental domain of
/// `SL₂(ℤ)`. Returns the reduced value and the matrix `(a, b, c, d)`.
pub fn reduce_to_fundamental_domain(tau: Complex64) -> Result<(Complex64, [i64; 4])> {
    if tau.im <= 0.0 || !tau.re.is_finite() {
        return Err(Error::invalid("τ must lie in the upper half plane"));
    }
    let mut t = tau;
    let mut m = [1i64, 0, 0, 1];
    for _ in 0..10_000 {
        let k = t.re.round();
        t -= k;
        let k = k as i64;
        m = [m[0] - k * m[2], m[1] - k * m[3], m[2], m[3]];
        if t.norm_sqr() < 1.0 - 1e-15 {
            t = -t.inv();
            m = [-m[2], -m[3], m[0], m[1]];
        } else {
            return Ok((t, m));
        }
    }
    Err(Error::NonConvergence("fundamental domain reduction".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_matrices() {
        let i = Complex64::new(0.0, 1.0);
        assert!(PeriodMatrix::genus1(-i).is_err());
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[i, Complex64::new(0.3, 0.0), Complex64::new(0.0, 0.0), i],
        );
        assert!(PeriodMatrix::new(m, 1e-8).is_err());
    }

    #[test]
    fn coordinates_round_trip() {
        let i = Complex64::new(0.0, 1.0);
        let p = PeriodMatrix::from_rows(
            &[
                vec![0.2 + 1.1 * i, 0.3 + 0.4 * i],
                vec![0.3 + 0.4 * i, -0.1 + 0.9 * i],
            ],
            1e-12,
        )
        .unwrap();
        let z = p.torus_point(&[0.25, -0.5], &[0.125, 0.75]);
        let (a, b) = p.torus_coordinates(&z);
        assert!((a[0] - 0.25).abs() < 1e-12 && (b[1] - 0.75).abs() < 1e-12);
    }

    #[test]
    fn fundamental_domain() {
        let (t, m) = reduce_to_fundamental_domain(Complex64::new(3.2, 0.1)).unwrap();
        assert!(t.norm() >= 1.0 - 1e-12 && t.re.abs() <= 0.5 + 1e-12);
        assert_eq!(m[0] * m[3] - m[1] * m[2], 1);
        let tau = Complex64::new(3.2, 0.1);
        let back = (tau * m[0] as f64 + m[1] as f64) / (tau * m[2] as f64 + m[3] as f64);
        assert!((back - t).norm() < 1e-9);
    }
}
