use std::sync::Arc;

use parrep_core::hilbert::{LocalUnitary, Projector, Pvm, QuantumState, RegisterLayout, Unitary};
use parrep_core::linalg::{self, c, from_real_diagonal, random_unit_interval_operator, random_vector, Matrix, Vector};
use parrep_core::measure::{repair, GameSpec, ValueFamily};
use parrep_core::rng::StreamRng;
use proptest::prelude::*;

fn within_sigmas(hits: usize, n: usize, p: f64, sigmas: f64) -> bool {
    let sd = (p * (1.0 - p) / n as f64).sqrt();
    (hits as f64 / n as f64 - p).abs() <= sigmas * sd + 1e-12
}

fn diag_family(values: &[f64]) -> ValueFamily {
    let n = values.len().trailing_zeros() as usize;
    let names: Vec<String> = (0..n).map(|i| format!("q{i}")).collect();
    let layout = RegisterLayout::new(names.iter().map(|s| (s.clone(), 2usize))).unwrap();
    ValueFamily::from_operator(layout, from_real_diagonal(values)).unwrap()
}

fn random_family(qubits: usize, rng: &mut StreamRng) -> ValueFamily {
    let names: Vec<String> = (0..qubits).map(|i| format!("q{i}")).collect();
    let layout = RegisterLayout::new(names.iter().map(|s| (s.clone(), 2usize))).unwrap();
    let d = layout.dim();
    ValueFamily::from_operator(layout, random_unit_interval_operator(d, rng)).unwrap()
}

#[test]
fn success_operator_examples() {
    let z = RegisterLayout::single("z", 2);
    let always = GameSpec::new(z.clone(), 4, vec!["z".into()], Arc::new(|_| Vec::new()), Arc::new(|_, _| true)).unwrap();
    assert!(linalg::max_abs(&(always.success_operator().unwrap() - linalg::identity(2))) < 1e-12);

    // the prover flips z to r and the verifier accepts z == r: wins from |0>
    let x = Unitary::new(z.clone(), Matrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)])).unwrap();
    let copy = GameSpec::new(
        z.clone(),
        2,
        vec!["z".into()],
        Arc::new(move |r| if r == 1 { vec![LocalUnitary::new(x.clone(), ["z"])] } else { Vec::new() }),
        Arc::new(|r, z| r == z),
    )
    .unwrap();
    let zero = QuantumState::basis(z.clone(), 0).unwrap();
    assert!((copy.success_probability(&zero).unwrap() - 1.0).abs() < 1e-12);

    let subset = GameSpec::new(z.clone(), 8, vec!["z".into()], Arc::new(|_| Vec::new()), Arc::new(|r, _| r < 2)).unwrap();
    let mut rng = StreamRng::new(31, 0);
    let s = QuantumState::pure(z, random_vector(2, &mut rng)).unwrap();
    assert!((subset.success_probability(&s).unwrap() - 0.25).abs() < 1e-12);
    let n = 100_000;
    let wins = (0..n).filter(|_| subset.play(&s, &mut rng).unwrap().2).count();
    assert!(within_sigmas(wins, n, 0.25, 3.0));
}

#[test]
fn valest_examples() {
    let mut rng = StreamRng::new(32, 0);
    let layout = RegisterLayout::single("a", 2);
    let s = QuantumState::pure(layout.clone(), random_vector(2, &mut rng)).unwrap();
    for b in [false, true] {
        let fam = ValueFamily::from_game(&GameSpec::deterministic(layout.clone(), b)).unwrap();
        let m = fam.measurement(0.1, 0.1).unwrap();
        let out = m.measure(&s, &mut rng);
        assert_eq!(out.value, if b { 1.0 } else { 0.0 });
        assert_eq!(out.state, s);
    }

    let fam = diag_family(&[0.0, 1.0]);
    let m = fam.measurement(0.1, 0.1).unwrap();
    let top = QuantumState::basis(fam.layout().clone(), 1).unwrap();
    for _ in 0..50 {
        assert_eq!(m.measure(&top, &mut rng).cell, m.grid().len() - 1);
    }

    let theta = 0.3f64.sqrt().asin();
    let s = QuantumState::pure(fam.layout().clone(), Vector::from_vec(vec![c(theta.cos()), c(theta.sin())])).unwrap();
    let n = 10_000;
    let tops = (0..n).filter(|_| m.measure(&s, &mut rng).value == 1.0).count();
    assert!(within_sigmas(tops, n, 0.3, 3.0));
}

#[test]
fn exact_value_examples() {
    let values = [0.1, 0.35, 0.6, 0.9];
    let fam = diag_family(&values);
    let m = fam.measurement(0.01, 0.01).unwrap();
    for (i, v) in values.iter().enumerate() {
        let e = QuantumState::basis(fam.layout().clone(), i).unwrap();
        assert!((m.prebinned_mean(&e) - v).abs() < 1e-12);
    }
    let mixed = QuantumState::maximally_mixed(fam.layout().clone());
    assert!((m.prebinned_mean(&mixed) - 0.4875).abs() < 1e-12);

    let mut rng = StreamRng::new(33, 0);
    let fam = random_family(2, &mut rng);
    let m = fam.measurement(0.01, 0.01).unwrap();
    let s = QuantumState::pure(fam.layout().clone(), random_vector(4, &mut rng)).unwrap();
    let exact = m.prebinned_mean(&s);
    let n = 10_000;
    let draws: Vec<f64> = (0..n).map(|_| m.measure(&s, &mut rng).value).collect();
    let mean = draws.iter().sum::<f64>() / n as f64;
    let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    assert!((mean - exact).abs() <= 3.0 * (var / n as f64).sqrt() + m.grid().spacing() / 2.0);
}

#[test]
fn repair_examples() {
    let mut rng = StreamRng::new(34, 0);
    let fam = diag_family(&[0.2, 0.2, 0.7, 0.9]);
    let m = fam.measurement(0.05, 0.01).unwrap();
    let pi = Pvm::binary(Projector::from_indices(fam.layout().clone(), &[0, 2])).unwrap();
    for _ in 0..50 {
        let s = QuantumState::pure(fam.layout().clone(), random_vector(4, &mut rng)).unwrap();
        let star = m.measure(&s, &mut rng);
        let (y, sigma) = pi.measure(&star.state, &mut rng);
        let out = repair(&m, &pi, y, sigma, star.value, 0.1, &mut rng);
        assert_eq!(out.value, star.value);
        assert_eq!(out.alternations, 0);
        assert!(!out.exhausted);
    }

    let layout = RegisterLayout::single("a", 2);
    let fam = ValueFamily::from_game(&GameSpec::deterministic(layout.clone(), true)).unwrap();
    let m = fam.measurement(0.1, 0.1).unwrap();
    let s = QuantumState::pure(layout.clone(), random_vector(2, &mut rng)).unwrap();
    let pi = Pvm::computational(&layout, "a").unwrap();
    let out = repair(&m, &pi, 0, s.clone(), 1.0, 0.5, &mut rng);
    assert_eq!(out.state, s);
    assert_eq!(out.alternations, 0);
}

#[test]
fn rejects_bad_inputs() {
    let layout = RegisterLayout::single("a", 2);
    assert!(ValueFamily::from_operator(layout.clone(), from_real_diagonal(&[0.0, 1.5])).is_err());
    let fam = diag_family(&[0.0, 1.0]);
    assert!(fam.measurement(0.0, 0.1).is_err());
    assert!(fam.measurement(1.5, 0.1).is_err());
    assert!(GameSpec::new(layout, 0, vec![], Arc::new(|_| Vec::new()), Arc::new(|_, _| true)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn valest_is_projective(seed in any::<u64>(), qubits in 1usize..4, eps in 0.02f64..0.5) {
        let mut rng = StreamRng::new(seed, 0);
        let fam = random_family(qubits, &mut rng);
        let m = fam.measurement(eps, 0.01).unwrap();
        let s = QuantumState::pure(fam.layout().clone(), random_vector(fam.layout().dim(), &mut rng)).unwrap();
        let first = m.measure(&s, &mut rng);
        for _ in 0..5 {
            prop_assert_eq!(m.measure(&first.state, &mut rng).cell, first.cell);
        }
    }

    #[test]
    fn outcome_distribution_is_normalised_and_centred(seed in any::<u64>(), qubits in 1usize..4, eps in 0.02f64..0.5) {
        let mut rng = StreamRng::new(seed, 0);
        let fam = random_family(qubits, &mut rng);
        let m = fam.measurement(eps, 0.01).unwrap();
        let d = fam.layout().dim();
        let s = QuantumState::mixed(fam.layout().clone(), linalg::random_density(d, &mut rng)).unwrap();
        let dist = m.outcome_distribution(&s);
        prop_assert!((dist.iter().map(|(_, p)| p).sum::<f64>() - 1.0).abs() <= 1e-9);
        let rounded: f64 = dist.iter().map(|(v, p)| v * p).sum();
        let exact = (fam.operator() * s.density()).trace().re;
        prop_assert!((m.prebinned_mean(&s) - exact).abs() <= 1e-9);
        prop_assert!((rounded - exact).abs() <= m.grid().spacing() / 2.0 + 1e-9);
    }

    #[test]
    fn almost_projective_across_grids(seed in any::<u64>(), e1 in 0.02f64..0.4, e2 in 0.02f64..0.4) {
        let mut rng = StreamRng::new(seed, 0);
        let fam = random_family(2, &mut rng);
        let (m1, m2) = (fam.measurement(e1, 0.01).unwrap(), fam.measurement(e2, 0.01).unwrap());
        let same = fam.measurement(e1, 0.2).unwrap();
        let s = QuantumState::pure(fam.layout().clone(), random_vector(4, &mut rng)).unwrap();
        let coarse = m1.grid().spacing().max(m2.grid().spacing());
        for (v, p) in m1.projectors() {
            let Some(post) = s.project(&p) else { continue };
            for (w, q) in m2.outcome_distribution(&post) {
                if q > 1e-12 {
                    prop_assert!((v - w).abs() <= coarse + 1e-9);
                }
            }
            for (w, q) in same.outcome_distribution(&post) {
                if q > 1e-12 {
                    prop_assert_eq!(v, w);
                }
            }
        }
    }

    #[test]
    fn repair_restores_commuting_values(seed in any::<u64>()) {
        let mut rng = StreamRng::new(seed, 0);
        let values: Vec<f64> = (0..4).map(|_| rng.uniform()).collect();
        let fam = diag_family(&values);
        let m = fam.measurement(0.05, 0.01).unwrap();
        let keep: Vec<usize> = (0..4).filter(|_| rng.bernoulli(0.5)).collect();
        let pi = Pvm::binary(Projector::from_indices(fam.layout().clone(), &keep)).unwrap();
        let s = QuantumState::pure(fam.layout().clone(), random_vector(4, &mut rng)).unwrap();
        let star = m.measure(&s, &mut rng);
        let (y, sigma) = pi.measure(&star.state, &mut rng);
        let out = repair(&m, &pi, y, sigma, star.value, 0.2, &mut rng);
        prop_assert_eq!(out.value, star.value);
        prop_assert_eq!(out.alternations, 0);
    }
}
