//! Coefficient fields ℚ and F_p. Elements of both are carried as
//! [`BigRational`]; in F_p they are kept as integers in `[0, p)`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::rational::is_prime;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CoefficientField {
    Rationals,
    PrimeField(u64),
}

impl fmt::Display for CoefficientField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoefficientField::Rationals => write!(f, "Q"),
            CoefficientField::PrimeField(p) => write!(f, "F_{p}"),
        }
    }
}

fn mod_pow(mut b: u128, mut e: u128, m: u128) -> u128 {
    let mut acc = 1u128 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

/// Square root modulo an odd prime (Tonelli–Shanks); `None` for non-residues.
fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    let (a, p) = (a as u128 % p as u128, p as u128);
    if a == 0 {
        return Some(0);
    }
    if p == 2 {
        return Some(a as u64);
    }
    if mod_pow(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    let (mut q, mut s) = (p - 1, 0u32);
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let mut z = 2u128;
    while mod_pow(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = mod_pow(z, q, p);
    let mut t = mod_pow(a, q, p);
    let mut r = mod_pow(a, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = t2 * t2 % p;
            i += 1;
        }
        let b = mod_pow(c, 1u128 << (m - i - 1), p);
        m = i;
        c = b * b % p;
        t = t * c % p;
        r = r * b % p;
    }
    Some(r as u64)
}

fn int_sqrt_exact(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

impl CoefficientField {
    /// F_p, rejecting composite `p`.
    pub fn prime_field(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(CoefficientField::PrimeField(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            CoefficientField::Rationals => 0,
            CoefficientField::PrimeField(p) => *p,
        }
    }

    /// Maps a rational into the field. In F_p this fails when the denominator
    /// is divisible by `p`.
    pub fn element(&self, q: &BigRational) -> Result<BigRational> {
        match self {
            CoefficientField::Rationals => Ok(q.clone()),
            CoefficientField::PrimeField(p) => {
                let p = BigInt::from(*p);
                let den = q.denom().mod_floor(&p);
                if den.is_zero() {
                    return Err(Error::NotIntegral(format!("{q}")));
                }
                let inv = den.modpow(&(&p - BigInt::from(2)), &p);
                let v = (q.numer().mod_floor(&p) * inv).mod_floor(&p);
                Ok(BigRational::from_integer(v))
            }
        }
    }

    pub fn from_int(&self, n: i64) -> BigRational {
        self.from_bigint(&BigInt::from(n))
    }

    pub fn from_bigint(&self, n: &BigInt) -> BigRational {
        match self {
            CoefficientField::Rationals => BigRational::from_integer(n.clone()),
            CoefficientField::PrimeField(p) => {
                BigRational::from_integer(n.mod_floor(&BigInt::from(*p)))
            }
        }
    }

    pub fn zero(&self) -> BigRational {
        BigRational::zero()
    }

    pub fn one(&self) -> BigRational {
        BigRational::one()
    }

    pub(crate) fn reduce_int(&self, q: BigRational) -> BigRational {
        match self {
            CoefficientField::Rationals => q,
            CoefficientField::PrimeField(p) => {
                debug_assert!(q.is_integer());
                BigRational::from_integer(q.to_integer().mod_floor(&BigInt::from(*p)))
            }
        }
    }

    pub fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        self.reduce_int(a + b)
    }

    pub fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        self.reduce_int(a - b)
    }

    pub fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        self.reduce_int(a * b)
    }

    pub fn neg(&self, a: &BigRational) -> BigRational {
        self.reduce_int(-a)
    }

    pub fn inv(&self, a: &BigRational) -> Result<BigRational> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        match self {
            CoefficientField::Rationals => Ok(a.recip()),
            CoefficientField::PrimeField(_) => self.element(&a.recip()),
        }
    }

    pub fn div(&self, a: &BigRational, b: &BigRational) -> Result<BigRational> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &BigRational, e: u32) -> BigRational {
        let mut acc = self.one();
        for _ in 0..e {
            acc = self.mul(&acc, a);
        }
        acc
    }

    /// `C(n, k)` computed over ℤ and then reduced into the field. In
    /// characteristic p this agrees with Lucas' theorem.
    pub fn binomial(&self, n: u64, k: u64) -> BigRational {
        if k > n {
            return self.zero();
        }
        let k = k.min(n - k);
        let mut c = BigInt::one();
        for i in 0..k {
            c = c * BigInt::from(n - i) / BigInt::from(i + 1);
        }
        self.from_bigint(&c)
    }

    /// A square root of `a` if it exists in the field. The canonical choice
    /// is the non-negative root over ℚ and the root in `[0, p/2]` over F_p.
    pub fn sqrt(&self, a: &BigRational) -> Option<BigRational> {
        match self {
            CoefficientField::Rationals => {
                let n = int_sqrt_exact(a.numer())?;
                let d = int_sqrt_exact(a.denom())?;
                Some(BigRational::new(n, d))
            }
            CoefficientField::PrimeField(p) => {
                let v = a.to_integer().to_u64()?;
                let r = sqrt_mod(v, *p)?;
                Some(BigRational::from_integer(BigInt::from(r.min(p - r))))
            }
        }
    }

    pub fn check_same(&self, other: &CoefficientField) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::FieldMismatch(self.to_string(), other.to_string()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::{rat, rat_frac};

    #[test]
    fn reduction_into_fp() {
        let f = CoefficientField::prime_field(7).unwrap();
        assert_eq!(f.element(&rat_frac(1, 3)).unwrap(), rat(5));
        assert_eq!(f.element(&rat(-1)).unwrap(), rat(6));
        assert!(matches!(
            f.element(&rat_frac(1, 14)),
            Err(Error::NotIntegral(_))
        ));
        assert_eq!(CoefficientField::prime_field(9), Err(Error::NotPrime(9)));
    }

    #[test]
    fn binomials_mod_p() {
        let f2 = CoefficientField::PrimeField(2);
        assert_eq!(f2.binomial(2, 1), rat(0));
        assert_eq!(f2.binomial(2, 2), rat(1));
        let q = CoefficientField::Rationals;
        assert_eq!(q.binomial(5, 2), rat(10));
        assert_eq!(q.binomial(3, 5), rat(0));
    }

    #[test]
    fn square_roots() {
        let q = CoefficientField::Rationals;
        assert_eq!(q.sqrt(&rat_frac(9, 4)), Some(rat_frac(3, 2)));
        assert_eq!(q.sqrt(&rat(3)), None);
        assert_eq!(q.sqrt(&rat(-4)), None);
        for p in [3u64, 5, 11, 13, 17, 1_000_000_007] {
            let f = CoefficientField::PrimeField(p);
            for a in 1..30u64 {
                let a = f.from_int(a as i64);
                let residue = (1..p.min(2000))
                    .any(|x| f.mul(&f.from_int(x as i64), &f.from_int(x as i64)) == a);
                match f.sqrt(&a) {
                    Some(r) => assert_eq!(f.mul(&r, &r), a),
                    None => assert!(!residue || p > 2000),
                }
            }
        }
    }
}
