//! Truncated power series `c₀ + c₁t + … + c_{N−1}t^{N−1} + O(t^N)` over a
//! [`CoefficientField`].
//!
//! Binary operations truncate to the smaller operand precision and every
//! operation reports the precision of its result through
//! [`TruncatedSeries::precision`]. Nothing is ever claimed about coefficients
//! at or beyond that index.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::field::CoefficientField;
use super::rational::display_rational;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    field: CoefficientField,
    coeffs: Vec<BigRational>,
}

impl TruncatedSeries {
    /// Builds a series of precision `coeffs.len()`, mapping every coefficient
    /// into the field.
    pub fn new(field: CoefficientField, coeffs: Vec<BigRational>) -> Result<Self> {
        let coeffs = coeffs
            .iter()
            .map(|c| field.element(c))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { field, coeffs })
    }

    pub fn from_ints(field: CoefficientField, coeffs: &[i64]) -> Self {
        let coeffs = coeffs.iter().map(|&c| field.from_int(c)).collect();
        Self { field, coeffs }
    }

    pub fn zero(field: CoefficientField, precision: usize) -> Self {
        Self {
            field,
            coeffs: vec![BigRational::zero(); precision],
        }
    }

    pub fn constant(field: CoefficientField, c: &BigRational, precision: usize) -> Result<Self> {
        let mut s = Self::zero(field, precision);
        if precision > 0 {
            s.coeffs[0] = field.element(c)?;
        }
        Ok(s)
    }

    pub fn one(field: CoefficientField, precision: usize) -> Self {
        Self::monomial(field, 0, precision)
    }

    /// `t^k + O(t^precision)`.
    pub fn monomial(field: CoefficientField, k: usize, precision: usize) -> Self {
        let mut s = Self::zero(field, precision);
        if k < precision {
            s.coeffs[k] = BigRational::one();
        }
        s
    }

    pub fn field(&self) -> CoefficientField {
        self.field
    }

    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Coefficient of `t^i`, or `None` when `i` is beyond the precision.
    pub fn coeff(&self, i: usize) -> Option<&BigRational> {
        self.coeffs.get(i)
    }

    /// Index of the first nonzero coefficient, `None` if the series vanishes
    /// to its full precision.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.order().is_none()
    }

    pub fn truncate(&self, precision: usize) -> Self {
        let n = precision.min(self.precision());
        Self {
            field: self.field,
            coeffs: self.coeffs[..n].to_vec(),
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        self.field.check_same(&other.field)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let f = self.field;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| f.add(a, b))
            .collect();
        Ok(Self { field: f, coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let f = self.field;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| f.sub(a, b))
            .collect();
        Ok(Self { field: f, coeffs })
    }

    pub fn neg(&self) -> Self {
        let f = self.field;
        Self {
            field: f,
            coeffs: self.coeffs.iter().map(|c| f.neg(c)).collect(),
        }
    }

    /// Multiplication by a field scalar.
    pub fn scale(&self, c: &BigRational) -> Result<Self> {
        let f = self.field;
        let c = f.element(c)?;
        Ok(Self {
            field: f,
            coeffs: self.coeffs.iter().map(|a| f.mul(a, &c)).collect(),
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let f = self.field;
        let n = self.precision().min(other.precision());
        let mut out = vec![BigRational::zero(); n];
        for (i, a) in self.coeffs.iter().take(n).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(n - i).enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        let coeffs = out.into_iter().map(|c| f.reduce_int(c)).collect();
        Ok(Self { field: f, coeffs })
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        let mut acc = Self::one(self.field, self.precision());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Multiplication by `t^k`; the precision grows by `k`.
    pub fn shift_up(&self, k: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Self {
            field: self.field,
            coeffs,
        }
    }

    /// Hasse derivative `D_i`, the linear map `t^n ↦ C(n, i) t^{n−i}`.
    /// The result has precision `N − min(i, N)`.
    pub fn hasse_derivative(&self, i: usize) -> Self {
        let f = self.field;
        let n = self.precision();
        let coeffs = (i..n)
            .map(|m| {
                let c = &self.coeffs[m];
                if c.is_zero() {
                    BigRational::zero()
                } else {
                    f.mul(&f.binomial(m as u64, i as u64), c)
                }
            })
            .collect();
        Self { field: f, coeffs }
    }

    /// Formal derivative `d/dt`, equal to `D_1`.
    pub fn derivative(&self) -> Self {
        self.hasse_derivative(1)
    }

    /// Multiplicative inverse to full precision.
    pub fn invert(&self) -> Result<Self> {
        let f = self.field;
        let n = self.precision();
        if n == 0 {
            return Ok(self.clone());
        }
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return Err(Error::NotAUnit);
        }
        let inv0 = f.inv(c0)?;
        let mut out: Vec<BigRational> = Vec::with_capacity(n);
        out.push(inv0.clone());
        for m in 1..n {
            let mut acc = BigRational::zero();
            for k in 1..=m {
                let c = &self.coeffs[k];
                if !c.is_zero() {
                    acc += c * &out[m - k];
                }
            }
            let acc = f.reduce_int(acc);
            out.push(f.neg(&f.mul(&inv0, &acc)));
        }
        Ok(Self {
            field: f,
            coeffs: out,
        })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.mul(&other.invert()?)
    }

    /// Square root by quadratic Newton iteration. The branch is fixed by
    /// `root0`, which must satisfy `root0² = c₀ ≠ 0`.
    pub fn sqrt_with_root(&self, root0: &BigRational) -> Result<Self> {
        let f = self.field;
        if f.characteristic() == 2 {
            return Err(Error::CharacteristicTwo);
        }
        let n = self.precision();
        if n == 0 {
            return Ok(self.clone());
        }
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return Err(Error::NotAUnit);
        }
        let root0 = f.element(root0)?;
        if f.mul(&root0, &root0) != *c0 {
            return Err(Error::NotASquare(display_rational(c0)));
        }
        let half = f.inv(&f.from_int(2))?;
        let mut g = Self {
            field: f,
            coeffs: vec![root0],
        };
        let mut prec = 1;
        while prec < n {
            prec = (2 * prec).min(n);
            let mut padded = g.coeffs.clone();
            padded.resize(prec, BigRational::zero());
            let g_ext = Self {
                field: f,
                coeffs: padded,
            };
            let target = self.truncate(prec);
            g = g_ext.add(&target.div(&g_ext)?)?.scale(&half)?;
        }
        if g.mul(&g)? != *self {
            return Err(Error::Internal(
                "Newton square root failed to converge".into(),
            ));
        }
        Ok(g)
    }

    /// Square root with the field's canonical root of the constant term.
    pub fn sqrt(&self) -> Result<Self> {
        if self.field.characteristic() == 2 {
            return Err(Error::CharacteristicTwo);
        }
        let c0 = self.coeffs.first().ok_or(Error::NotAUnit)?;
        if c0.is_zero() {
            return Err(Error::NotAUnit);
        }
        let r = self
            .field
            .sqrt(c0)
            .ok_or_else(|| Error::NotASquare(display_rational(c0)))?;
        self.sqrt_with_root(&r)
    }

    /// Evaluates the polynomial with coefficients `poly` (constant term
    /// first) at this series, by Horner's rule.
    pub fn compose_poly(&self, poly: &[BigRational]) -> Result<Self> {
        let f = self.field;
        let n = self.precision();
        let mut acc = Self::zero(f, n);
        for c in poly.iter().rev() {
            acc = acc.mul(self)?.add(&Self::constant(f, c, n)?)?;
        }
        Ok(acc)
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{}", display_rational(c))?,
                1 => write!(f, "{}*t", display_rational(c))?,
                _ => write!(f, "{}*t^{}", display_rational(c), i)?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(t^{})", self.precision())
    }
}

/// All permutations of `0..n` with their signs, by Heap's algorithm.
fn signed_permutations(n: usize) -> Vec<(Vec<usize>, bool)> {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut out = vec![(perm.clone(), true)];
    let mut c = vec![0usize; n];
    let mut positive = true;
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            positive = !positive;
            out.push((perm.clone(), positive));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// The Wronskian `det(D_{i−1} f_j)` of `g ≥ 1` series sharing field and
/// precision `N`. The result has precision `N − (g − 1)`.
pub fn wronskian(fs: &[TruncatedSeries]) -> Result<TruncatedSeries> {
    let first = fs
        .first()
        .ok_or_else(|| Error::invalid("wronskian of an empty family"))?;
    for s in &fs[1..] {
        first.field.check_same(&s.field)?;
        if s.precision() != first.precision() {
            return Err(Error::PrecisionMismatch(first.precision(), s.precision()));
        }
    }
    let g = fs.len();
    let field = first.field;
    let out_prec = first.precision().saturating_sub(g - 1);
    // rows[i][j] = D_i f_j, all truncated to the common output precision
    let rows: Vec<Vec<TruncatedSeries>> = (0..g)
        .map(|i| {
            fs.iter()
                .map(|f| f.hasse_derivative(i).truncate(out_prec))
                .collect()
        })
        .collect();
    let mut det = TruncatedSeries::zero(field, out_prec);
    for (perm, positive) in signed_permutations(g) {
        let mut term = TruncatedSeries::one(field, out_prec);
        for (i, &j) in perm.iter().enumerate() {
            term = term.mul(&rows[i][j])?;
            if term.is_zero() {
                break;
            }
        }
        det = if positive {
            det.add(&term)?
        } else {
            det.sub(&term)?
        };
    }
    Ok(det)
}
