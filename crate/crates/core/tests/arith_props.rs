use hyperell::arith::{
    p_valuation, rat, rat_frac, wronskian, BigRational, CoefficientField, TruncatedSeries,
    Valuation,
};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;

const Q: CoefficientField = CoefficientField::Rationals;

fn field_strategy() -> impl Strategy<Value = CoefficientField> {
    prop_oneof![
        Just(Q),
        prop::sample::select(vec![2u64, 3, 5, 7, 11]).prop_map(CoefficientField::PrimeField)
    ]
}

fn series(field: CoefficientField, coeffs: &[i64]) -> TruncatedSeries {
    TruncatedSeries::from_ints(field, coeffs)
}

fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    (0..k).fold(BigInt::one(), |acc, i| {
        acc * BigInt::from(n - i) / BigInt::from(i + 1)
    })
}

/// Lucas: C(n, k) mod p is the product of digit binomials.
fn lucas(mut n: u64, mut k: u64, p: u64) -> u64 {
    let mut r = 1;
    while n > 0 || k > 0 {
        let (a, b) = (n % p, k % p);
        if b > a {
            return 0;
        }
        r = r
            * (binomial(a, b) % BigInt::from(p))
                .to_string()
                .parse::<u64>()
                .unwrap()
            % p;
        n /= p;
        k /= p;
    }
    r
}

/// Leibniz expansion over all permutations, independent of the library's
/// signed-permutation helper.
fn leibniz(m: &[Vec<BigRational>]) -> BigRational {
    fn rec(m: &[Vec<BigRational>], row: usize, used: &mut Vec<bool>, sign: i64) -> BigRational {
        if row == m.len() {
            return rat(sign);
        }
        let mut total = BigRational::zero();
        for c in 0..m.len() {
            if used[c] || m[row][c].is_zero() {
                continue;
            }
            let inversions = (0..c).filter(|&j| !used[j]).count() as i64;
            used[c] = true;
            let s = if inversions % 2 == 0 { sign } else { -sign };
            total += &m[row][c] * rec(m, row + 1, used, s);
            used[c] = false;
        }
        total
    }
    rec(m, 0, &mut vec![false; m.len()], 1)
}

#[test]
fn hasse_examples() {
    let t2 = TruncatedSeries::monomial(Q, 2, 6);
    assert_eq!(
        t2.hasse_derivative(1).coeffs(),
        series(Q, &[0, 2, 0, 0, 0]).coeffs()
    );
    let t5 = TruncatedSeries::monomial(Q, 5, 8);
    assert_eq!(t5.hasse_derivative(2).coeff(3), Some(&rat(10)));
    let f2 = CoefficientField::PrimeField(2);
    let t2 = TruncatedSeries::monomial(f2, 2, 6);
    assert!(t2.hasse_derivative(1).is_zero());
    assert_eq!(t2.hasse_derivative(2).coeff(0), Some(&rat(1)));
}

#[test]
fn hasse_binomials_follow_lucas() {
    for p in [2u64, 3, 5, 7] {
        let field = CoefficientField::PrimeField(p);
        for n in 0..30usize {
            let f = TruncatedSeries::monomial(field, n, 31);
            for i in 0..=n {
                let c = f.hasse_derivative(i).coeff(n - i).cloned().unwrap();
                assert_eq!(
                    c,
                    rat(lucas(n as u64, i as u64, p) as i64),
                    "C({n},{i}) mod {p}"
                );
            }
        }
    }
}

#[test]
fn series_examples() {
    let inv = series(Q, &[1, 1, 0, 0, 0]).invert().unwrap();
    assert_eq!(inv.coeffs(), series(Q, &[1, -1, 1, -1, 1]).coeffs());
    let s = series(Q, &[1, 1, 0, 0]).sqrt().unwrap();
    assert_eq!(
        s.coeffs(),
        &[rat(1), rat_frac(1, 2), rat_frac(-1, 8), rat_frac(1, 16)]
    );
    let two = series(Q, &[4, 0, 0]).sqrt().unwrap();
    assert_eq!(two.coeff(0), Some(&rat(2)));
    assert!(series(Q, &[0, 1]).invert().is_err());
    assert!(series(Q, &[2, 1]).sqrt().is_err());
    assert!(series(CoefficientField::PrimeField(2), &[1, 1])
        .sqrt()
        .is_err());
    assert!(series(Q, &[1, 2]).add(&series(Q, &[1, 2, 3])).is_ok());
    assert!(series(Q, &[1])
        .add(&series(CoefficientField::PrimeField(3), &[1]))
        .is_err());
}

#[test]
fn wronskian_of_one_t_t2() {
    let fs: Vec<_> = (0..3).map(|k| TruncatedSeries::monomial(Q, k, 8)).collect();
    let w = wronskian(&fs).unwrap();
    assert_eq!(w.coeff(0), Some(&rat(1)));
    assert_eq!(w.order(), Some(0));
}

#[test]
fn monomial_wronskian_matches_brute_force() {
    let a = [1usize, 2, 5];
    let n = 12;
    let fs: Vec<_> = a
        .iter()
        .map(|&ai| TruncatedSeries::monomial(Q, ai - 1, n))
        .collect();
    let w = wronskian(&fs).unwrap();
    let order: usize = a.iter().enumerate().map(|(i, &ai)| ai - (i + 1)).sum();
    assert_eq!(w.order(), Some(order));
    assert_eq!(order, 2);
    // leading coefficient: det[C(a_j − 1, i)]
    let m: Vec<Vec<BigRational>> = (0..3)
        .map(|i| {
            a.iter()
                .map(|&aj| BigRational::from(binomial(aj as u64 - 1, i as u64)))
                .collect()
        })
        .collect();
    let lead = w.coeff(order).cloned().unwrap();
    assert_eq!(lead, leibniz(&m));
    // the Vandermonde shape: ∏_{i<j}(a_j − a_i) / ∏ i!
    let vdm: i64 = (0..3)
        .flat_map(|i| (i + 1..3).map(move |j| (i, j)))
        .map(|(i, j)| a[j] as i64 - a[i] as i64)
        .product();
    assert_eq!(lead, rat_frac(vdm, 2));
}

#[test]
fn valuation_examples() {
    assert_eq!(p_valuation(&rat(12), 2).unwrap(), Valuation::Finite(2));
    assert_eq!(p_valuation(&rat(1), 7).unwrap(), Valuation::Finite(0));
    assert_eq!(p_valuation(&rat(0), 5).unwrap(), Valuation::Infinite);
    assert_eq!(
        p_valuation(&rat_frac(5, 50), 5).unwrap(),
        Valuation::Finite(-1)
    );
    assert!(p_valuation(&rat(3), 4).is_err());
}

fn rational() -> impl Strategy<Value = BigRational> {
    (-2000i64..2000, 1i64..500).prop_map(|(n, d)| rat_frac(n, d))
}

fn coeff_vec(len: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-9i64..10, len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn valuation_laws(a in rational(), b in rational(), p in prop::sample::select(vec![2u64, 3, 5, 7])) {
        let va = p_valuation(&a, p).unwrap();
        let vb = p_valuation(&b, p).unwrap();
        prop_assert_eq!(p_valuation(&(&a * &b), p).unwrap(), va + vb);
        let vs = p_valuation(&(&a + &b), p).unwrap();
        prop_assert!(vs >= va.min(vb));
    }

    #[test]
    fn hasse_composition(field in field_strategy(), c in coeff_vec(14), i in 0usize..5, j in 0usize..5) {
        let f = series(field, &c);
        let lhs = f.hasse_derivative(j).hasse_derivative(i);
        let b = field.from_bigint(&binomial((i + j) as u64, i as u64));
        let rhs = f.hasse_derivative(i + j).scale(&b).unwrap();
        prop_assert_eq!(lhs.precision(), rhs.precision());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn hasse_is_scaled_derivative_over_q(c in coeff_vec(12), i in 0usize..6) {
        let f = series(Q, &c);
        let mut d = f.clone();
        let mut fact = 1i64;
        for k in 0..i {
            d = d.derivative();
            fact *= (k + 1) as i64;
        }
        let h = f.hasse_derivative(i);
        let n = h.precision().min(d.precision());
        let scaled = d.scale(&rat_frac(1, fact)).unwrap().truncate(n);
        prop_assert_eq!(h.truncate(n), scaled);
    }

    #[test]
    fn wronskian_alternating_multilinear(
        field in field_strategy(),
        rows in prop::collection::vec(coeff_vec(12), 3),
        lambda in -5i64..6,
        a in 0usize..3,
        b in 0usize..3,
    ) {
        prop_assume!(a != b);
        let fs: Vec<_> = rows.iter().map(|r| series(field, r)).collect();
        let w = wronskian(&fs).unwrap();
        let mut swapped = fs.clone();
        swapped.swap(a, b);
        prop_assert_eq!(wronskian(&swapped).unwrap(), w.neg());
        let mut sheared = fs.clone();
        sheared[a] = fs[a].add(&fs[b].scale(&field.from_int(lambda)).unwrap()).unwrap();
        prop_assert_eq!(wronskian(&sheared).unwrap(), w.clone());
        let mut scaled = fs.clone();
        scaled[a] = fs[a].scale(&field.from_int(lambda)).unwrap();
        prop_assert_eq!(wronskian(&scaled).unwrap(), w.scale(&field.from_int(lambda)).unwrap());
    }

    #[test]
    fn wronskian_scaling_law(
        field in field_strategy(),
        rows in prop::collection::vec(coeff_vec(12), 1..4),
        tail in coeff_vec(11),
        u0 in 1i64..20,
    ) {
        let mut uc = vec![u0];
        uc.extend(tail);
        let u = series(field, &uc);
        prop_assume!(!u.coeff(0).unwrap().is_zero());
        let fs: Vec<_> = rows.iter().map(|r| series(field, r)).collect();
        let ufs: Vec<_> = fs.iter().map(|f| u.mul(f).unwrap()).collect();
        let g = fs.len();
        let lhs = wronskian(&ufs).unwrap();
        let rhs = u.pow(g as u32).unwrap().mul(&wronskian(&fs).unwrap()).unwrap();
        let n = lhs.precision().min(rhs.precision());
        prop_assert_eq!(lhs.truncate(n), rhs.truncate(n));
    }

    #[test]
    fn invert_and_sqrt_round_trip(field in field_strategy(), tail in coeff_vec(10)) {
        prop_assume!(field.characteristic() != 2);
        let mut c = vec![1];
        c.extend(tail);
        let f = series(field, &c);
        let inv = f.invert().unwrap();
        prop_assert_eq!(f.mul(&inv).unwrap(), TruncatedSeries::one(field, f.precision()));
        let s = f.sqrt().unwrap();
        prop_assert_eq!(s.mul(&s).unwrap(), f);
    }
}
