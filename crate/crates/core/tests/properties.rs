//! Cross-module properties of the public API.

use std::collections::BTreeMap;

use hdt_core::cascade::{restricted_coefficients, PairStructure};
use hdt_core::criterion::{hc_condition, hc_condition_original, threshold, HighestWeightInput};
use hdt_core::exact::{format_rational, int, parse_decimal, rat, Rational};
use hdt_core::hermitian::catalog;
use hdt_core::matrix_model::{
    cocycle_residual, hc_factorize, random_domain_point, random_su, verify_kernel_transformation,
    verify_q_transformation,
};
use hdt_core::weights::{all_multiplicities, lambda0_from_compact, weight_system, WeightVector};
use num::{Signed, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SMALL_PAIRS: [&str; 10] = ["su11", "su12", "su22", "su23", "sp2", "sp3", "so2_5", "so2_6", "sostar8", "e3iii"];

/// Compact positive roots restrict to `(gamma_j - gamma_k)/2` (multiplicity
/// `a` each), `gamma_j/2` (multiplicity `b` each) or zero.
#[test]
fn compact_roots_restrict_as_described() {
    for p in catalog() {
        let s = PairStructure::analyze(&p).unwrap();
        let rd = s.restricted();
        let mut diff: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut half: BTreeMap<usize, usize> = BTreeMap::new();
        let mut zero = 0;
        for a in &s.space().partition().compact_pos {
            let co = restricted_coefficients(s.root_system(), s.cascade(), a);
            let nz: Vec<(usize, &Rational)> = co.iter().enumerate().filter(|(_, c)| !c.is_zero()).collect();
            match nz.as_slice() {
                [] => zero += 1,
                [(j, c)] => {
                    assert_eq!(c.abs(), rat(1, 2), "{p} {a}");
                    *half.entry(*j).or_default() += 1;
                }
                [(j, x), (k, y)] => {
                    assert_eq!(x.abs(), rat(1, 2), "{p} {a}");
                    assert_eq!(*x + *y, int(0), "{p} {a}");
                    *diff.entry((*j, *k)).or_default() += 1;
                }
                _ => panic!("{p}: {a} restricts to more than two cascade coordinates"),
            }
        }
        assert_eq!(zero, rd.zero_restricted, "{p}");
        assert!(half.values().all(|&n| n == rd.b), "{p}: {half:?}");
        assert_eq!(half.len(), if rd.b == 0 { 0 } else { rd.r }, "{p}");
        if rd.r > 1 {
            assert_eq!(diff.len(), rd.r * (rd.r - 1) / 2, "{p}");
            assert!(diff.values().all(|&n| n == rd.a), "{p}: {diff:?}");
        }
    }
}

/// Every `h_j` has the same length.
#[test]
fn cascade_roots_share_one_length() {
    for p in catalog() {
        let s = PairStructure::analyze(&p).unwrap();
        let rs = s.root_system();
        let l0 = rs.length_sq(s.cascade().top());
        for g in &s.cascade().gammas {
            assert_eq!(rs.length_sq(g), l0, "{p}");
        }
    }
}

#[test]
fn weight_systems_are_compact_weyl_invariant() {
    for label in SMALL_PAIRS {
        let s = PairStructure::from_label(label).unwrap();
        let nodes = s.space().compact_nodes();
        let coords: Vec<i64> = (0..nodes.len()).map(|i| i64::from(i < 2)).collect();
        let l0 = lambda0_from_compact(&s, &coords).unwrap();
        let ws = weight_system(&s, &l0).unwrap();
        let mult = all_multiplicities(&s, &ws).unwrap();
        for mu in &ws.weights {
            for &i in &nodes {
                let nu = mu.reflect_simple(s.root_system(), i);
                assert!(ws.contains(&nu), "{label}: {mu} -> {nu}");
                assert_eq!(mult[mu], mult[&nu], "{label}: {mu} vs {nu}");
            }
        }
    }
}

fn pair_strategy() -> impl Strategy<Value = &'static str> {
    prop::sample::select(SMALL_PAIRS.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn decimal_literals_parse_exactly(n in -10_000_000i64..10_000_000, k in 0u32..6) {
        let den = 10i64.pow(k);
        let q = rat(n, den);
        let whole = n.abs() / den;
        let frac = n.abs() % den;
        let sign = if n < 0 { "-" } else { "" };
        let text = if k == 0 {
            format!("{sign}{whole}")
        } else {
            format!("{sign}{whole}.{frac:0width$}", width = k as usize)
        };
        prop_assert_eq!(parse_decimal(&text).unwrap(), q);
    }

    #[test]
    fn criterion_forms_agree_and_are_monotone(
        label in pair_strategy(),
        c0 in 0i64..3,
        num in -40i64..40,
        den in 1i64..5,
    ) {
        let s = PairStructure::from_label(label).unwrap();
        let k = s.space().compact_nodes().len();
        let coords: Vec<i64> = (0..k).map(|i| if i == 0 { c0 } else { 0 }).collect();
        let l0 = lambda0_from_compact(&s, &coords).unwrap();
        let lambda = rat(num, den);
        let t = threshold(&s, &l0);
        let input = HighestWeightInput::new(&s, l0.clone(), lambda.clone()).unwrap();
        let v = hc_condition(&input).unwrap();
        prop_assert_eq!(v.exists, lambda < t);
        prop_assert_eq!(hc_condition_original(&input).holds, v.exists);
        if v.exists {
            let lower = HighestWeightInput::new(&s, l0, &lambda - int(1)).unwrap();
            prop_assert!(hc_condition(&lower).unwrap().exists);
        }
        prop_assert_eq!(v.threshold, format_rational(&t));
    }

    #[test]
    fn threshold_shifts_by_coroot_value(label in pair_strategy(), c0 in 0i64..4) {
        let s = PairStructure::from_label(label).unwrap();
        let k = s.space().compact_nodes().len();
        prop_assume!(k > 0);
        let mut coords = vec![0; k];
        coords[0] = c0;
        let l0 = lambda0_from_compact(&s, &coords).unwrap();
        let zero = WeightVector::zero(s.root_system().rank());
        let shift = l0.pairing(s.root_system(), s.cascade().top());
        prop_assert_eq!(threshold(&s, &zero) - threshold(&s, &l0), shift);
        prop_assert_eq!(threshold(&s, &zero), int(1) - int(s.genus() as i64));
    }

    #[test]
    fn matrix_model_laws_hold_for_random_elements(seed in any::<u64>(), sig in 0usize..4) {
        let (p, q) = [(1, 1), (1, 2), (2, 2), (2, 3)][sig];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_su(p, q, 1.5, &mut rng);
        let g1 = random_su(p, q, 1.5, &mut rng);
        let z = random_domain_point(p, q, 0.9, &mut rng);
        let w = random_domain_point(p, q, 0.9, &mut rng);
        prop_assert!(cocycle_residual(&g, &g1, &z).unwrap() < 1e-10);
        prop_assert!(hc_factorize(&g, &z).unwrap().residual < 1e-12);
        prop_assert!(verify_kernel_transformation(&g, &z, &w, 3).unwrap() < 1e-10);
        prop_assert!(verify_q_transformation(&g, &z, -((p + q) as i32)).unwrap() < 1e-10);
    }
}
