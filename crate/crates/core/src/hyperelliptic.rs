//! Hyperelliptic equations `Y² = F(x)`, their discriminants, and local
//! Wronskian computations for the basis `x^{i−1} dx / Y`, `i = 1..g`.
//!
//! A model `y² + a(x)y = b(x)` is carried as `Y = 2y + a`, `F = a² + 4b`.
//! The Wronskian identities are homogeneous in `Y`, so `y² = A·f(x)` is
//! carried directly as `F = A·f`.

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::rational::{display_rational, p_valuation, rat};
use crate::arith::{wronskian, CoefficientField, Polynomial, TruncatedSeries, Valuation};
use crate::cluster::{compute_e, ClusterTree, RootConfig};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct HyperellipticEquation {
    pub g: usize,
    pub rhs: Polynomial,
}

/// A point of the curve, identified by its `x`-coordinate. The sign of `Y`
/// never matters for the quantities computed here.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CurvePoint {
    Finite(BigRational),
    Infinity,
}

impl HyperellipticEquation {
    /// `Y² = F(x)` with `deg F ∈ {2g+1, 2g+2}` and `F` separable.
    pub fn new(g: usize, rhs: Polynomial) -> Result<Self> {
        if g < 1 {
            return Err(Error::invalid("genus must be positive"));
        }
        if rhs.field().characteristic() == 2 {
            return Err(Error::CharacteristicTwo);
        }
        let d = rhs.degree().unwrap_or(0);
        if d != 2 * g + 1 && d != 2 * g + 2 {
            return Err(Error::invalid(format!(
                "degree {d} does not give genus {g}"
            )));
        }
        if rhs.discriminant()?.is_zero() {
            return Err(Error::invalid("right-hand side is not separable"));
        }
        Ok(Self { g, rhs })
    }

    /// `y² = A·∏(x − a_i)`.
    pub fn from_roots(
        g: usize,
        field: CoefficientField,
        a: &BigRational,
        roots: &[BigRational],
    ) -> Result<Self> {
        Self::new(g, Polynomial::from_roots(field, a, roots)?)
    }

    /// `y² + a(x)·y = b(x)`.
    pub fn from_general(g: usize, a: &Polynomial, b: &Polynomial) -> Result<Self> {
        let f = a.mul(a)?.add(&b.scale(&rat(4)))?;
        Self::new(g, f)
    }

    pub fn field(&self) -> CoefficientField {
        self.rhs.field()
    }

    pub fn discriminant(&self) -> Result<BigRational> {
        self.rhs.discriminant()
    }

    pub fn is_branch_point(&self, point: &CurvePoint) -> bool {
        match point {
            CurvePoint::Finite(x0) => self.rhs.eval(x0).is_zero(),
            CurvePoint::Infinity => self.rhs.degree() == Some(2 * self.g + 1),
        }
    }

    /// Branch points whose `x`-coordinate lies in the coefficient field.
    pub fn rational_branch_points(&self) -> Result<Vec<CurvePoint>> {
        let mut out: Vec<CurvePoint> = self
            .rhs
            .field_roots()?
            .into_iter()
            .map(CurvePoint::Finite)
            .collect();
        if self.is_branch_point(&CurvePoint::Infinity) {
            out.push(CurvePoint::Infinity);
        }
        Ok(out)
    }

    /// The model `Ỹ² = u^{2g+2} F(1/u)` seen from `x = ∞`. The basis
    /// `x^{i−1}dx/Y` corresponds to `−u^{g−i}du/Ỹ`, the same family reversed.
    fn at_infinity(&self) -> Result<Self> {
        let n = 2 * self.g + 2;
        let coeffs = (0..=n).map(|k| self.rhs.coeff(n - k)).collect();
        Ok(Self {
            g: self.g,
            rhs: Polynomial::new(self.field(), coeffs)?,
        })
    }

    /// Local expansion `(x(t), h(t))` at a finite point, with the basis of
    /// differentials equal to `x^{i−1}·h(t)·dt` up to a nonzero constant.
    fn local_basis(&self, x0: &BigRational, precision: usize) -> Result<Vec<TruncatedSeries>> {
        let field = self.field();
        let x0 = field.element(x0)?;
        let c0 = self.rhs.eval(&x0);
        let (x, h) = if c0.is_zero() {
            // branch point: parameter t = Y, x = x0 + t²/q(x) with F = (x − x0)q
            let q = self.rhs.deflate(&x0)?;
            if q.eval(&x0).is_zero() {
                return Err(Error::invalid("branch point is not simple"));
            }
            let t2 = TruncatedSeries::monomial(field, 2, precision);
            let mut x = TruncatedSeries::constant(field, &x0, precision)?;
            for _ in 0..precision / 2 + 1 {
                let next = TruncatedSeries::constant(field, &x0, precision)?
                    .add(&t2.mul(&q.eval_series(&x)?.invert()?)?)?;
                if next == x {
                    break;
                }
                x = next;
            }
            // dx/Y = 2 dY / F'(x)
            let h = self.rhs.derivative().eval_series(&x)?.invert()?;
            (x, h)
        } else {
            // parameter t = x − x0, Y = c·s with s(0) = 1
            let x = TruncatedSeries::constant(field, &x0, precision)?
                .add(&TruncatedSeries::monomial(field, 1, precision))?;
            let s = self
                .rhs
                .eval_series(&x)?
                .scale(&field.inv(&c0)?)?
                .sqrt_with_root(&BigRational::one())?;
            (x, s.invert()?)
        };
        let mut basis = Vec::with_capacity(self.g);
        let mut xp = TruncatedSeries::one(field, precision);
        for _ in 0..self.g {
            basis.push(xp.mul(&h)?);
            xp = xp.mul(&x)?;
        }
        Ok(basis)
    }

    /// Order of vanishing of the Wronskian of `x^{i−1}dx/Y` at `point`.
    pub fn weierstrass_gap_order(&self, point: &CurvePoint, precision: usize) -> Result<usize> {
        let (model, x0) = match point {
            CurvePoint::Finite(x0) => (self.clone(), x0.clone()),
            CurvePoint::Infinity => (self.at_infinity()?, BigRational::zero()),
        };
        let basis = model.local_basis(&x0, precision)?;
        let w = wronskian(&basis)?;
        w.order().ok_or(Error::InsufficientPrecision {
            needed: precision + 1,
            have: w.precision(),
        })
    }

    /// Sum of the gap orders over the branch points defined over the field.
    pub fn weierstrass_total(&self, precision: usize) -> Result<usize> {
        self.rational_branch_points()?
            .iter()
            .map(|p| self.weierstrass_gap_order(p, precision))
            .sum()
    }

    /// Compares `[ω₁, …, ω_g]` with `Y^{g(g−1)/2}·(dx/Y)^{g(g+1)/2}` for
    /// `ω_i = x^{i−1}dx/Y`, coefficientwise in the parameter `x − x0`.
    pub fn wronskian_check(&self, x0: &BigRational, precision: usize) -> Result<bool> {
        let g = self.g;
        let needed = g * (g + 1) / 2 + 2;
        if precision < needed {
            return Err(Error::InsufficientPrecision {
                needed,
                have: precision,
            });
        }
        let field = self.field();
        let x0 = field.element(x0)?;
        let c0 = self.rhs.eval(&x0);
        if c0.is_zero() {
            return Err(Error::invalid(format!(
                "x = {} is a Weierstrass point",
                display_rational(&x0)
            )));
        }
        // both sides carry the same factor c^{−g} where c² = F(x0); it is dropped
        let x = TruncatedSeries::constant(field, &x0, precision)?
            .add(&TruncatedSeries::monomial(field, 1, precision))?;
        let s = self
            .rhs
            .eval_series(&x)?
            .scale(&field.inv(&c0)?)?
            .sqrt_with_root(&BigRational::one())?;
        let dx = x.derivative();
        let s = s.truncate(dx.precision());
        let x = x.truncate(dx.precision());
        let omega = dx.div(&s)?;
        let mut basis = Vec::with_capacity(g);
        let mut xp = TruncatedSeries::one(field, omega.precision());
        for _ in 0..g {
            basis.push(xp.mul(&omega)?);
            xp = xp.mul(&x)?;
        }
        let lhs = wronskian(&basis)?;
        let rhs = s
            .pow((g * (g - 1) / 2) as u32)?
            .mul(&omega.pow((g * (g + 1) / 2) as u32)?)?;
        let n = lhs.precision().min(rhs.precision());
        Ok(lhs.truncate(n) == rhs.truncate(n))
    }
}

/// `ord Λ = g·v(D) − (8g+4)·e` with `D = ∏_{i<j}(a_i − a_j)²`.
pub fn ord_lambda(config: &RootConfig, tree: &ClusterTree) -> Result<i64> {
    if config.p == 2 {
        return Err(Error::invalid("residue characteristic 2 is not supported"));
    }
    if p_valuation(&config.a, config.p)? != Valuation::Finite(0) {
        return Err(Error::NotAUnit);
    }
    let g = config.g as i64;
    let monic = Polynomial::from_roots(CoefficientField::Rationals, &rat(1), &config.roots)?;
    let vd = p_valuation(&monic.discriminant()?, config.p)?
        .finite()
        .ok_or_else(|| Error::invalid("roots are not distinct"))?;
    let value = rat(g * vd) - rat(8 * g + 4) * compute_e(tree)?;
    if !value.is_integer() {
        return Err(Error::NotIntegral(display_rational(&value)));
    }
    value
        .to_integer()
        .to_i64()
        .ok_or_else(|| Error::Internal("ord Λ overflows".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::build_tree;

    const Q: CoefficientField = CoefficientField::Rationals;

    fn quintic(field: CoefficientField, c: i64) -> HyperellipticEquation {
        HyperellipticEquation::new(2, Polynomial::from_ints(field, &[c, -1, 0, 0, 0, 1])).unwrap()
    }

    #[test]
    fn wronskian_identity_at_non_square() {
        assert!(quintic(Q, 3).wronskian_check(&rat(1), 12).unwrap());
        assert!(matches!(
            quintic(Q, 3).wronskian_check(&rat(1), 4),
            Err(Error::InsufficientPrecision { .. })
        ));
        assert!(quintic(Q, 0).wronskian_check(&rat(0), 12).is_err());
    }

    #[test]
    fn gap_orders_on_x5_minus_x() {
        let c = quintic(Q, 0);
        assert_eq!(
            c.weierstrass_gap_order(&CurvePoint::Finite(rat(0)), 12)
                .unwrap(),
            1
        );
        assert_eq!(
            c.weierstrass_gap_order(&CurvePoint::Finite(rat(2)), 12)
                .unwrap(),
            0
        );
        assert_eq!(
            c.weierstrass_gap_order(&CurvePoint::Infinity, 12).unwrap(),
            1
        );
        let f5 = quintic(CoefficientField::PrimeField(5), 0);
        assert_eq!(f5.rational_branch_points().unwrap().len(), 6);
        assert_eq!(f5.weierstrass_total(12).unwrap(), 6);
    }

    #[test]
    fn ord_lambda_example() {
        let roots = [1, 2, 3, 0, 49, 392].iter().map(|&r| rat(r)).collect();
        let cfg = RootConfig::new(2, 7, rat(1), roots).unwrap();
        let tree = build_tree(&cfg).unwrap();
        assert_eq!(ord_lambda(&cfg, &tree).unwrap(), 8);
    }

    #[test]
    fn general_form() {
        // y² + x·y = x⁵ + 1 gives F = x² + 4x⁵ + 4
        let a = Polynomial::from_ints(Q, &[0, 1]);
        let b = Polynomial::from_ints(Q, &[1, 0, 0, 0, 0, 1]);
        let c = HyperellipticEquation::from_general(2, &a, &b).unwrap();
        assert_eq!(c.rhs, Polynomial::from_ints(Q, &[4, 0, 1, 0, 0, 4]));
        assert!(c.wronskian_check(&rat(1), 10).unwrap());
    }
}
