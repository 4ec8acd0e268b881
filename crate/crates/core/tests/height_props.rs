use std::f64::consts::PI;

use hyperell::arith::{rat, rat_frac, BigRational};
use hyperell::height::{
    bost_bound, deg_lambda, faltings_lower_bound, local_coefficient, slope_constant,
    ArchLedgerEntry, GlobalHeightInput, LocalLedgerEntry,
};
use proptest::prelude::*;

fn arch(log_t: &[f64]) -> Vec<ArchLedgerEntry> {
    log_t
        .iter()
        .enumerate()
        .map(|(i, &t)| ArchLedgerEntry {
            embedding: format!("s{i}"),
            log_t: t,
        })
        .collect()
}

fn place(
    q: f64,
    ord_delta: i64,
    sum_phi_sq: BigRational,
    e_omega: BigRational,
) -> LocalLedgerEntry {
    LocalLedgerEntry {
        place: format!("{q}"),
        log_residue_size: q.ln(),
        ord_delta,
        sum_phi_sq,
        e_omega_degree: e_omega,
    }
}

fn zeroed(g: usize, log_t: &[f64]) -> GlobalHeightInput {
    GlobalHeightInput {
        g,
        degree_k: log_t.len(),
        nt_heights: vec![0.0; g * g * g - g],
        local: Vec::new(),
        arch: arch(log_t),
    }
}

#[test]
fn synthetic_ledger_by_hand() {
    let t = -7.25;
    let mut input = zeroed(2, &[t]);
    input.local.push(place(7.0, 3, rat(-10), rat(2)));
    let r = deg_lambda(&input).unwrap();
    // (5 + 27 + 8)·log 7 − 72·log 2π + 32·log T, over 100
    let expected = (40.0 * 7f64.ln() - 72.0 * (2.0 * PI).ln() + 32.0 * t) / 100.0;
    assert!((r.deg_lambda - expected).abs() < 1e-14);
    assert_eq!(local_coefficient(2, &input.local[0]), rat(40));
    assert!((r.combination - 100.0 * expected).abs() < 1e-12);
}

#[test]
fn zero_ledger_constant_at_genus_two() {
    let r = deg_lambda(&zeroed(2, &[0.5])).unwrap();
    assert!((r.deg_lambda - (-72.0 * (2.0 * PI).ln() + 32.0 * 0.5) / 100.0).abs() < 1e-14);
}

#[test]
fn ledger_validation() {
    let mut bad = zeroed(2, &[0.0]);
    bad.nt_heights.pop();
    assert!(deg_lambda(&bad).is_err());
    let mut bad = zeroed(2, &[0.0]);
    bad.degree_k = 2;
    assert!(deg_lambda(&bad).is_err());
    let mut bad = zeroed(2, &[0.0]);
    bad.nt_heights[0] = -1.0;
    assert!(deg_lambda(&bad).is_err());
    let mut bad = zeroed(2, &[0.0]);
    bad.local.push(place(5.0, 1, rat(1), rat(0)));
    assert!(deg_lambda(&bad).is_err());
    assert!(deg_lambda(&GlobalHeightInput {
        g: 1,
        degree_k: 1,
        nt_heights: vec![],
        local: vec![],
        arch: arch(&[0.0])
    })
    .is_err());
}

#[test]
fn slope_constants() {
    assert_eq!(slope_constant(2).unwrap(), rat_frac(100, 9));
    assert_eq!(slope_constant(3).unwrap(), rat_frac(56, 5));
    assert!(slope_constant(1).is_err());
    let mut last = rat(0);
    for g in 2..=100 {
        let s = slope_constant(g).unwrap();
        assert!(s > rat(11) && s < rat(12), "g = {g}");
        assert!(s > last);
        last = s;
    }
}

#[test]
fn genus_one_bound_and_bost() {
    let b = faltings_lower_bound(1, 1, &[0.0]).unwrap();
    // 4·1·1·2 = 8 and (3−1)(8+4) = 24
    assert!((b - (-8.0 * (2.0 * PI).ln() / 24.0)).abs() < 1e-15);
    let (v, e) = bost_bound(1, 1, &[(0.0, 0.0)]).unwrap();
    assert_eq!((v, e), (-(2.0 * PI).ln(), 0.0));
    let (v, e) = bost_bound(2, 2, &[(0.1, 0.03), (-0.2, 0.04)]).unwrap();
    assert!((v - (-2.0 * (2.0 * PI).ln() + 0.1)).abs() < 1e-15);
    assert!((e - 0.05).abs() < 1e-15);
    assert!(bost_bound(2, 2, &[(0.0, 0.0)]).is_err());
}

fn ledger() -> impl Strategy<Value = GlobalHeightInput> {
    (2usize..5, 1usize..4).prop_flat_map(|(g, d)| {
        let heights = prop::collection::vec(0.0f64..5.0, g * g * g - g);
        let local = prop::collection::vec(
            (
                prop::sample::select(vec![2.0f64, 3.0, 5.0, 7.0, 11.0]),
                0i64..6,
                0i64..20,
                0i64..6,
                1i64..4,
            ),
            0..4,
        );
        let logs = prop::collection::vec(-10.0f64..2.0, d);
        (Just(g), Just(d), heights, local, logs).prop_map(|(g, d, h, local, logs)| {
            GlobalHeightInput {
                g,
                degree_k: d,
                nt_heights: h,
                local: local
                    .into_iter()
                    .map(|(q, od, phi, eo, den)| {
                        place(q, od, rat_frac(-phi, den), rat_frac(eo, den))
                    })
                    .collect(),
                arch: arch(&logs),
            }
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn equality_case(g in 2usize..8, logs in prop::collection::vec(-10.0f64..3.0, 1..5)) {
        let input = zeroed(g, &logs);
        let r = deg_lambda(&input).unwrap();
        let bound = faltings_lower_bound(g, logs.len(), &logs).unwrap();
        prop_assert!((r.faltings_height - bound).abs() <= 8.0 * f64::EPSILON * bound.abs().max(1.0));
        prop_assert_eq!(r.lower_bound, bound);
    }

    #[test]
    fn nonnegative_ledgers_respect_the_bound(input in ledger()) {
        let r = deg_lambda(&input).unwrap();
        prop_assert!(r.faltings_height >= r.lower_bound - r.rounding_error);
    }

    #[test]
    fn monotone_in_local_inputs(input in ledger(), which in 0usize..5, idx in any::<prop::sample::Index>(), bump in 0.01f64..3.0) {
        let base = deg_lambda(&input).unwrap();
        let mut up = input.clone();
        match which {
            0 => {
                let i = idx.index(up.nt_heights.len());
                up.nt_heights[i] += bump;
            }
            _ if up.local.is_empty() => return Ok(()),
            1 => {
                let i = idx.index(up.local.len());
                up.local[i].ord_delta += 1;
            }
            2 => {
                let i = idx.index(up.local.len());
                up.local[i].sum_phi_sq -= rat(1);
            }
            3 => {
                let i = idx.index(up.local.len());
                up.local[i].e_omega_degree += rat_frac(1, 2);
            }
            _ => {
                let i = idx.index(up.local.len());
                up.local[i].log_residue_size += bump;
            }
        }
        let r = deg_lambda(&up).unwrap();
        prop_assert_eq!(r.arch_term, base.arch_term);
        let tol = r.rounding_error + base.rounding_error;
        prop_assert!(r.deg_lambda >= base.deg_lambda - tol);
        prop_assert!(r.heights_term + r.local_term >= base.heights_term + base.local_term - 1e-12);
    }

    #[test]
    fn bound_is_affine_in_constant_log_t(g in 1usize..6, d in 1usize..4, c1 in -5.0f64..5.0, c2 in -5.0f64..5.0) {
        prop_assume!((c1 - c2).abs() > 1e-3);
        let b1 = faltings_lower_bound(g, d, &vec![c1; d]).unwrap();
        let b2 = faltings_lower_bound(g, d, &vec![c2; d]).unwrap();
        let gf = g as f64;
        let slope = 8.0 * gf * gf / ((3.0 * gf - 1.0) * (8.0 * gf + 4.0));
        prop_assert!(((b1 - b2) / (c1 - c2) - slope).abs() < 1e-9);
    }
}
