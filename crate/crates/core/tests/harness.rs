use parrep_core::harness::*;
use parrep_core::protocols::{catalog, optimal_success, repeat};
use parrep_core::rng::StreamRng;
use proptest::prelude::*;

fn bits(x: &[usize]) -> usize {
    x.iter().fold(0, |acc, &b| acc << 1 | b)
}

#[test]
fn raz_full_space_is_free() {
    let c = raz_check(&vec![vec![0.3, 0.7]; 3], &|_| true).unwrap();
    assert!(c.lhs.abs() < 1e-12);
    assert_eq!(c.bound, 0.0);
    assert!(c.pass);
}

#[test]
fn raz_zero_event_is_an_error() {
    assert!(raz_check(&vec![vec![0.5, 0.5]; 2], &|_| false).is_err());
}

#[test]
fn raz_every_event_on_three_fair_bits() {
    let fair = vec![vec![0.5, 0.5]; 3];
    for mask in 1u32..256 {
        let c = raz_check(&fair, &|x| mask >> bits(x) & 1 == 1).unwrap();
        assert!(c.pass, "event {mask:#b}: {c:?}");
    }
}

#[test]
fn raz_conditioning_on_one_coordinate() {
    // W = {X_1 = 1} on k fair bits: lhs = 1/(2k), Pr[W] = 1/2
    for k in 1..6 {
        let c = raz_check(&vec![vec![0.5, 0.5]; k], &|x| x[0] == 1).unwrap();
        assert!((c.lhs - 0.5 / k as f64).abs() < 1e-12);
        assert!((c.bound - (1.0 / k as f64).sqrt()).abs() < 1e-12);
    }
}

#[test]
fn flooding_constant_memory_is_free() {
    let c = flooding_check(2, 5, &[0.2, 0.8], &|_| 3).unwrap();
    assert!(c.lhs.abs() < 1e-12);
}

#[test]
fn flooding_bound_value() {
    let c = flooding_check(1, 8, &[0.5, 0.5], &|y| y[3]).unwrap();
    assert!((c.bound - 0.25).abs() < 1e-15);
    // remembering one fixed draw costs 1/2 in one round out of 8
    assert!((c.lhs - 0.5 / 8.0).abs() < 1e-12);
}

#[test]
fn flooding_every_map_up_to_four_rounds() {
    for t in 1..=4usize {
        for table in 0u64..1 << (1 << t) {
            let c = flooding_check(1, t, &[0.5, 0.5], &|y| (table >> bits(y) & 1) as usize).unwrap();
            assert!(c.pass, "t {t} map {table:#x}: {c:?}");
        }
    }
}

#[test]
fn flooding_rejects_wide_memory() {
    assert!(flooding_check(1, 2, &[0.5, 0.5], &|_| 2).is_err());
}

#[test]
fn hppw_all_ones() {
    for k in 1..=5 {
        let mut law = vec![0.0; 1 << k];
        law[(1 << k) - 1] = 1.0;
        for t in 0..=k {
            let c = hppw_check(&law, 1.0, t).unwrap();
            assert_eq!(c.lhs, 0.0);
            assert!(c.pass);
        }
    }
}

#[test]
fn hppw_bad_correlations_and_exact_value() {
    let law = bad_correlations_law(4, 0.7).unwrap();
    let c = hppw_check(&law, 1.0, 4).unwrap();
    assert!(c.pass);
    // W weights: all ones 1, each miss-one 1/2
    let full = 0.7f64.powi(4);
    let miss = (1.0 - full) / 4.0;
    let lhs = (4.0 * miss * 0.5) / (full + 4.0 * miss * 0.5) / 4.0;
    assert!((c.lhs - lhs).abs() < 1e-12);
    let rhs = 0.0 + (2.0 - full.log2()) / 4.0 + 4.0 / 16.0;
    assert!((c.bound - rhs).abs() < 1e-12);
}

#[test]
fn hppw_zero_mass_threshold_is_an_error() {
    let mut law = vec![0.0; 8];
    law[0] = 1.0;
    assert!(hppw_check(&law, 1.0, 1).is_err());
}

#[test]
fn bound_public_hand_values() {
    let b = bound_public(0.5, 2, 100, 100).unwrap();
    assert!((b.raw - 24.0 * (-1.5625f64).exp()).abs() < 1e-9);
    assert!(b.vacuous && b.precondition);
    assert_eq!(b.clamped, 1.0);
    let edge = bound_public(0.5, 3, 10, 5).unwrap();
    assert!((edge.raw - 54.0).abs() < 1e-12);
    assert!(edge.vacuous && !edge.precondition);
}

#[test]
fn bound_three_hand_values() {
    let b = bound_three(0.5, 10_000, 10_000).unwrap();
    assert!(b.raw < 1.0 && !b.vacuous);
    // t/k - 2 log k / sqrt k at k = 16, t = 16 is 1 - 2
    assert!(!bound_three(0.1, 16, 16).unwrap().precondition);
    let k = 4096usize;
    let cut = 1.0 - 2.0 * 12.0 / 64.0;
    assert!(bound_three(cut - 1e-6, k, k).unwrap().precondition);
    assert!(!bound_three(cut, k, k).unwrap().precondition);
}

#[test]
fn bounds_decrease_in_k() {
    for ratio in [0.6, 0.8, 1.0] {
        let mut last_pub = f64::INFINITY;
        let mut last_three = f64::INFINITY;
        for k in (1000..20_000).step_by(1000) {
            let t = (ratio * k as f64) as usize;
            let p = bound_public(0.3, 2, k, t).unwrap().raw;
            let q = bound_three(0.0, k, t).unwrap().raw;
            assert!(p <= last_pub + 1e-15 && q <= last_three + 1e-15);
            last_pub = p;
            last_three = q;
        }
    }
}

#[test]
fn informal_bounds() {
    assert_eq!(bound_informal(1.0, 10, 2, 10, InformalVariant::Public).unwrap(), 1.0);
    assert!((bound_informal(0.0, 9, 3, 9, InformalVariant::Public).unwrap() - 0.5).abs() < 1e-15);
    assert_eq!(bound_informal(0.5, 10, 1, 5, InformalVariant::PublicThreshold).unwrap(), 1.0);
    assert_eq!(bound_informal(0.5, 10, 1, 5, InformalVariant::ThreeThreshold).unwrap(), 1.0);
    assert!((bound_informal(0.5, 4, 1, 4, InformalVariant::Three).unwrap() - 0.5).abs() < 1e-15);
    assert!("bogus".parse::<InformalVariant>().is_err());
}

#[test]
fn wilson_degenerate_and_shrinking() {
    let (lo, hi) = wilson_interval(50, 50).unwrap();
    assert_eq!(hi, 1.0);
    assert!(lo > 0.9);
    assert_eq!(wilson_interval(0, 10).unwrap().0, 0.0);
    assert!(wilson_interval(3, 2).is_err());
}

#[test]
fn estimate_always_accept() {
    let p = catalog::always();
    let rep = repeat(p.clone(), 3, 3).unwrap();
    let prover = catalog::prover("optimal()", &p, 3).unwrap();
    let e = estimate_success(&prover, &rep, 200, 1).unwrap();
    assert_eq!(e.point, 1.0);
    assert_eq!(e.high, 1.0);
}

#[test]
fn estimate_subset_optimal() {
    let p = catalog::subset(8, 2).unwrap();
    let rep = repeat(p.clone(), 1, 1).unwrap();
    let prover = catalog::prover("optimal()", &p, 1).unwrap();
    let e = estimate_success(&prover, &rep, 10_000, 2).unwrap();
    assert!(e.contains(optimal_success(&rep).unwrap()), "{e:?}");
}

#[test]
fn estimate_product_law() {
    let p = catalog::subset(2, 2).unwrap();
    let single = catalog::prover("rotation(p=0.7:0.7)", &p, 1).unwrap();
    let double = catalog::prover("rotation(p=0.7:0.7)", &p, 2).unwrap();
    let one = estimate_success(&single, &repeat(p.clone(), 1, 1).unwrap(), 4000, 3).unwrap();
    let two = estimate_success(&double, &repeat(p.clone(), 2, 2).unwrap(), 4000, 4).unwrap();
    // squared single-fold estimate against the two-fold one, 3 sigma on both
    let p = one.point;
    let sd = ((2.0 * p).powi(2) * p * (1.0 - p) / 4000.0 + two.point * (1.0 - two.point) / 4000.0).sqrt();
    assert!((two.point - p * p).abs() <= 3.0 * sd, "{one:?} {two:?}");
}

#[test]
fn random_joint_laws_satisfy_hppw() {
    let mut rng = StreamRng::new(17, 0);
    for _ in 0..500 {
        let k = 1 + rng.below(6);
        let mut law: Vec<f64> = (0..1 << k).map(|_| rng.uniform().powi(3)).collect();
        let s: f64 = law.iter().sum();
        law.iter_mut().for_each(|x| *x /= s);
        let t = rng.below(k + 1);
        let nu = [0.5, 1.0, 2.0][rng.below(3)];
        assert!(hppw_check(&law, nu, t).unwrap().pass);
    }
}

proptest! {
    #[test]
    fn wilson_contains_point_and_narrows(s in 0u64..500, extra in 0u64..500) {
        let n = s + extra + 1;
        let e = Estimate::from_counts(s, n).unwrap();
        prop_assert!(e.low <= e.point && e.point <= e.high);
        let d = Estimate::from_counts(2 * s, 2 * n).unwrap();
        prop_assert!(d.high - d.low <= e.high - e.low + 1e-12);
    }

    #[test]
    fn raz_random_biased_products(seed in 0u64..1000, k in 1usize..4, mask in 1u64..u64::MAX) {
        let mut rng = StreamRng::new(seed, 0);
        let marginals: Vec<Vec<f64>> = (0..k).map(|_| { let p = 0.05 + 0.9 * rng.uniform(); vec![p, 1.0 - p] }).collect();
        let c = raz_check(&marginals, &|x| mask >> bits(x) & 1 == 1);
        if let Ok(c) = c {
            prop_assert!(c.pass);
        }
    }
}

#[test]
fn reduction_floors() {
    // xi = 3/4 with m = 1: log2(1/4) = -2
    let f = reduction_floor_public(0.75, 1, 8, 8).unwrap();
    assert!((f - (1.0 - 2.0 * 0.5)).abs() < 1e-12);
    let g = reduction_floor_three(1.0, 16, 16).unwrap();
    assert!((g - (1.0 - 2.0 * 4.0 / 4.0)).abs() < 1e-12);
}
