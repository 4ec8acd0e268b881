//! Exact dense linear algebra over a [`CoefficientField`].

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::field::CoefficientField;
use crate::error::{Error, Result};

pub type Matrix = Vec<Vec<BigRational>>;

fn check_square(m: &Matrix) -> Result<usize> {
    let n = m.len();
    if m.iter().any(|row| row.len() != n) {
        return Err(Error::invalid("matrix is not square"));
    }
    Ok(n)
}

/// Determinant by Gaussian elimination with exact field operations.
pub fn determinant(field: CoefficientField, m: &Matrix) -> Result<BigRational> {
    let n = check_square(m)?;
    let mut a: Matrix = m
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| field.element(x))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let mut det = field.one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Ok(field.zero());
        };
        if pivot != col {
            a.swap(pivot, col);
            det = field.neg(&det);
        }
        det = field.mul(&det, &a[col][col]);
        let inv = field.inv(&a[col][col])?;
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = field.mul(&a[r][col], &inv);
            for c in col..n {
                let t = field.mul(&factor, &a[col][c]);
                a[r][c] = field.sub(&a[r][c], &t);
            }
        }
    }
    Ok(det)
}

/// Result of reducing an augmented system `A x = b` over ℚ.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub rank: usize,
    /// One particular solution with free variables set to zero.
    pub particular: Vec<BigRational>,
}

/// Solves `A x = b` over ℚ. Fails with [`Error::Inconsistent`] when no
/// solution exists.
pub fn solve_rational(a: &Matrix, b: &[BigRational]) -> Result<Solution> {
    let rows = a.len();
    if b.len() != rows {
        return Err(Error::invalid("right-hand side has the wrong length"));
    }
    let cols = a.first().map_or(0, Vec::len);
    if a.iter().any(|r| r.len() != cols) {
        return Err(Error::invalid("ragged matrix"));
    }
    let mut m: Matrix = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(p, r);
        let inv = BigRational::one() / &m[r][c];
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let factor = m[i][c].clone();
                for k in c..=cols {
                    let t = &factor * &m[r][k];
                    m[i][k] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if m[r..].iter().any(|row| !row[cols].is_zero()) {
        return Err(Error::Inconsistent("linear system has no solution".into()));
    }
    let mut x = vec![BigRational::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = m[i][cols].clone();
    }
    Ok(Solution {
        rank: pivots.len(),
        particular: x,
    })
}

/// Leading principal minors `det A[..k, ..k]` for `k = 1..=n`.
pub fn leading_principal_minors(m: &Matrix) -> Result<Vec<BigRational>> {
    let n = check_square(m)?;
    (1..=n)
        .map(|k| {
            let sub: Matrix = m[..k].iter().map(|row| row[..k].to_vec()).collect();
            determinant(CoefficientField::Rationals, &sub)
        })
        .collect()
}

/// Exact negative definiteness test by Sylvester's criterion:
/// `(−1)^k det A_k > 0` for every leading minor.
pub fn is_negative_definite(m: &Matrix) -> Result<bool> {
    let minors = leading_principal_minors(m)?;
    Ok(minors.iter().enumerate().all(|(i, d)| {
        let k = i + 1;
        if k % 2 == 1 {
            *d < BigRational::zero()
        } else {
            *d > BigRational::zero()
        }
    }))
}
