//! Dense univariate polynomials over a [`CoefficientField`].

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::field::CoefficientField;
use super::linalg::determinant;
use super::rational::display_rational;
use super::series::TruncatedSeries;
use crate::error::{Error, Result};

/// Coefficients are stored constant term first with no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    field: CoefficientField,
    coeffs: Vec<BigRational>,
}

impl Polynomial {
    pub fn new(field: CoefficientField, coeffs: Vec<BigRational>) -> Result<Self> {
        let coeffs = coeffs
            .iter()
            .map(|c| field.element(c))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::normalized(field, coeffs))
    }

    fn normalized(field: CoefficientField, mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { field, coeffs }
    }

    pub fn from_ints(field: CoefficientField, coeffs: &[i64]) -> Self {
        Self::normalized(field, coeffs.iter().map(|&c| field.from_int(c)).collect())
    }

    /// `lc · ∏ (x − a)`.
    pub fn from_roots(
        field: CoefficientField,
        lc: &BigRational,
        roots: &[BigRational],
    ) -> Result<Self> {
        let mut p = Self::new(field, vec![lc.clone()])?;
        for a in roots {
            let lin = Self::new(field, vec![-a.clone(), BigRational::one()])?;
            p = p.mul(&lin)?;
        }
        Ok(p)
    }

    pub fn field(&self) -> CoefficientField {
        self.field
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> BigRational {
        self.coeffs
            .last()
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let f = self.field;
        let x = f.element(x).unwrap_or_else(|_| x.clone());
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| f.add(&f.mul(&acc, &x), c))
    }

    pub fn eval_series(&self, s: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.field.check_same(&s.field())?;
        s.compose_poly(&self.coeffs)
    }

    pub fn derivative(&self) -> Self {
        let f = self.field;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| f.mul(&f.from_int(i as i64), c))
            .collect();
        Self::normalized(f, coeffs)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.field.check_same(&other.field)?;
        let f = self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| f.add(&self.coeff(i), &other.coeff(i)))
            .collect();
        Ok(Self::normalized(f, coeffs))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&BigRational::from_integer((-1).into())))
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let f = self.field;
        let c = f.element(c).unwrap_or_else(|_| c.clone());
        Self::normalized(f, self.coeffs.iter().map(|a| f.mul(a, &c)).collect())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.field.check_same(&other.field)?;
        let f = self.field;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::normalized(f, Vec::new()));
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Ok(Self::normalized(
            f,
            out.into_iter().map(|c| f.reduce_int(c)).collect(),
        ))
    }

    /// Exact division by `x − a`; fails unless `a` is a root.
    pub fn deflate(&self, a: &BigRational) -> Result<Self> {
        let f = self.field;
        let n = self.coeffs.len();
        if n == 0 {
            return Ok(self.clone());
        }
        let mut q = vec![BigRational::zero(); n - 1];
        let mut carry = BigRational::zero();
        for i in (1..n).rev() {
            carry = f.add(&self.coeffs[i], &f.mul(&carry, a));
            q[i - 1] = carry.clone();
        }
        let rem = f.add(&self.coeffs[0], &f.mul(&carry, a));
        if !rem.is_zero() {
            return Err(Error::invalid(format!(
                "{} is not a root",
                display_rational(a)
            )));
        }
        Ok(Self::normalized(f, q))
    }

    /// Resultant `Res(self, other)` as the Sylvester determinant.
    pub fn resultant(&self, other: &Self) -> Result<BigRational> {
        self.field.check_same(&other.field)?;
        let f = self.field;
        let (Some(m), Some(n)) = (self.degree(), other.degree()) else {
            return Ok(f.zero());
        };
        let size = m + n;
        if size == 0 {
            return Ok(f.one());
        }
        let mut rows = Vec::with_capacity(size);
        for i in 0..n {
            let mut row = vec![BigRational::zero(); size];
            for (k, c) in self.coeffs.iter().rev().enumerate() {
                row[i + k] = c.clone();
            }
            rows.push(row);
        }
        for i in 0..m {
            let mut row = vec![BigRational::zero(); size];
            for (k, c) in other.coeffs.iter().rev().enumerate() {
                row[i + k] = c.clone();
            }
            rows.push(row);
        }
        determinant(f, &rows)
    }

    /// `(−1)^{d(d−1)/2} Res(f, f′) / lc`, which equals
    /// `lc^{2d−2} ∏_{i<j} (a_i − a_j)²` over a splitting field.
    pub fn discriminant(&self) -> Result<BigRational> {
        let f = self.field;
        let d = self
            .degree()
            .ok_or_else(|| Error::invalid("discriminant of the zero polynomial"))?;
        if d == 0 {
            return Err(Error::invalid("discriminant of a constant"));
        }
        let res = self.resultant(&self.derivative())?;
        let sign = if (d * (d - 1) / 2) % 2 == 0 {
            f.one()
        } else {
            f.from_int(-1)
        };
        f.div(&f.mul(&sign, &res), &self.leading())
    }

    /// Distinct roots lying in the coefficient field, sorted.
    pub fn field_roots(&self) -> Result<Vec<BigRational>> {
        if self.is_zero() {
            return Err(Error::invalid("every element is a root of zero"));
        }
        match self.field {
            CoefficientField::PrimeField(p) => Ok((0..p)
                .map(|a| self.field.from_int(a as i64))
                .filter(|a| self.eval(a).is_zero())
                .collect()),
            CoefficientField::Rationals => self.rational_roots(),
        }
    }

    fn rational_roots(&self) -> Result<Vec<BigRational>> {
        let denom_lcm = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * &denom_lcm).to_integer())
            .collect();
        let mut roots = Vec::new();
        let low = ints.iter().position(|c| !c.is_zero()).unwrap_or(0);
        if low > 0 {
            roots.push(BigRational::zero());
        }
        let ints = &ints[low..];
        let (a0, an) = (ints[0].abs(), ints[ints.len() - 1].abs());
        if ints.len() > 1 {
            let ps = divisors(&a0)?;
            let qs = divisors(&an)?;
            for pn in &ps {
                for qd in &qs {
                    for sign in [1, -1] {
                        let cand = BigRational::new(pn * BigInt::from(sign), qd.clone());
                        if self.eval(&cand).is_zero() && !roots.contains(&cand) {
                            roots.push(cand);
                        }
                    }
                }
            }
        }
        roots.sort();
        Ok(roots)
    }

    /// Coefficients as `f64`, constant term first.
    pub fn to_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(super::rational::to_f64).collect()
    }
}

fn divisors(n: &BigInt) -> Result<Vec<BigInt>> {
    let n = n
        .to_u64()
        .filter(|&n| n < 1 << 48)
        .ok_or_else(|| Error::invalid("coefficient too large for the rational root test"))?;
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(BigInt::from(d));
            if d * d != n {
                out.push(BigInt::from(n / d));
            }
        }
        d += 1;
    }
    Ok(out)
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{}", display_rational(c))?,
                1 => write!(f, "{}*x", display_rational(c))?,
                _ => write!(f, "{}*x^{}", display_rational(c), i)?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::{rat, rat_frac};

    const Q: CoefficientField = CoefficientField::Rationals;

    #[test]
    fn discriminants() {
        assert_eq!(
            Polynomial::from_ints(Q, &[-1, 0, 1])
                .discriminant()
                .unwrap(),
            rat(4)
        );
        // x^3 + a x + b has discriminant -4a^3 - 27b^2
        assert_eq!(
            Polynomial::from_ints(Q, &[1, -1, 0, 1])
                .discriminant()
                .unwrap(),
            rat(-4 * -1 - 27)
        );
        let sq = Polynomial::from_ints(Q, &[1, 2, 1]);
        assert_eq!(sq.discriminant().unwrap(), rat(0));
    }

    #[test]
    fn roots_and_deflation() {
        let roots = vec![rat(0), rat_frac(1, 2), rat(-3)];
        let p = Polynomial::from_roots(Q, &rat(4), &roots).unwrap();
        assert_eq!(
            p.field_roots().unwrap(),
            vec![rat(-3), rat(0), rat_frac(1, 2)]
        );
        let q = p.deflate(&rat(-3)).unwrap();
        assert_eq!(q.degree(), Some(2));
        assert!(p.deflate(&rat(1)).is_err());
        let f5 = CoefficientField::PrimeField(5);
        let x5_minus_x = Polynomial::from_ints(f5, &[0, -1, 0, 0, 0, 1]);
        assert_eq!(x5_minus_x.field_roots().unwrap().len(), 5);
    }

    #[test]
    fn derivative_in_char_p() {
        let f5 = CoefficientField::PrimeField(5);
        let p = Polynomial::from_ints(f5, &[0, 0, 0, 0, 0, 1]);
        assert!(p.derivative().is_zero());
    }
}
