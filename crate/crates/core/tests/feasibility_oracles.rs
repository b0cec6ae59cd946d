//! Independent scans that the feasibility test must agree with.

use chaindesign::feasibility::ft1_step;
use chaindesign::{check_ft, family_params, search_k, ChainSpec};
use rayon::prelude::*;

/// Two-level criterion from the classical construction: blocks meet `k / l`
/// of the `e_2` top classes in `l` points each, with
/// `l = 1 + (k - 1)(e_1 - 1)/(v - 1)` an integer, `l | k`, `1 < l < k`, and
/// the block shape must fit, `l <= e_1` and `k / l <= e_2`.
fn two_level_oracle(e1: u64, e2: u64) -> Vec<u64> {
    let v = e1 * e2;
    (2..v)
        .filter(|&k| {
            let num = (k - 1) * (e1 - 1);
            if !num.is_multiple_of(v - 1) {
                return false;
            }
            let l = 1 + num / (v - 1);
            1 < l && l < k && k % l == 0 && l <= e1 && k / l <= e2
        })
        .collect()
}

#[test]
fn two_level_feasibility_matches_classical_criterion() {
    for e1 in 2..=20 {
        for e2 in 2..=20 {
            let chain = ChainSpec::new(vec![e1, e2]).unwrap();
            let ks: Vec<u64> = search_k(&chain).iter().map(|r| r.k).collect();
            assert_eq!(ks, two_level_oracle(e1, e2), "e=({e1},{e2})");
        }
    }
}

fn chains_up_to(v_max: u64) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    for e1 in 2..=v_max / 2 {
        for e2 in 2..=v_max / e1 {
            out.push(vec![e1, e2]);
            for e3 in 2..=v_max / (e1 * e2) {
                out.push(vec![e1, e2, e3]);
            }
        }
    }
    out
}

#[test]
fn restricted_k_scan_equals_full_scan() {
    chains_up_to(2000).par_iter().for_each(|e| {
        let chain = ChainSpec::new(e.clone()).unwrap();
        let full: Vec<u64> = (2..chain.v())
            .filter(|&k| check_ft(&chain, k).unwrap().feasible())
            .collect();
        let fast: Vec<u64> = search_k(&chain).iter().map(|r| r.k).collect();
        assert_eq!(fast, full, "e={e:?}");
        for &k in &full {
            assert_eq!((k - 1) % ft1_step(&chain), 0);
        }
    });
}

#[test]
fn feasible_reports_satisfy_strict_ratio_bounds() {
    chains_up_to(600).par_iter().for_each(|e| {
        let chain = ChainSpec::new(e.clone()).unwrap();
        for report in search_k(&chain) {
            assert!(report.strict_ratio_bounds, "e={e:?} k={}", report.k);
            chaindesign::arithmetic_facts(&report).unwrap();
        }
    });
}

#[test]
fn family_members_are_feasible() {
    for s in 2..=4 {
        for d in 2..=6 {
            let (chain, k) = family_params(s, d).unwrap();
            let report = check_ft(&chain, k).unwrap();
            assert!(report.feasible(), "s={s} d={d}");
            let y = report.y.unwrap();
            for i in 1..s {
                assert_eq!(y.get(i), (chain.e_at(i + 1) - 1) / d, "s={s} d={d} i={i}");
            }
            assert_eq!(chain.gcd_d(), d);
        }
    }
}
