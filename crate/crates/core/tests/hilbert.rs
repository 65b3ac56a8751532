use parrep_core::hilbert::{
    cq_trace_distance, total_variation, trace_distance, CqState, Projector, Pvm, QuantumState, RegisterLayout, Unitary,
};
use parrep_core::linalg::{self, c, eigvalsh, random_density, random_projector, random_unitary, random_vector, Matrix, Vector};
use parrep_core::rng::StreamRng;
use proptest::prelude::*;

const R: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn qubits(n: usize) -> RegisterLayout {
    let names: Vec<String> = (0..n).map(|i| format!("q{i}")).collect();
    RegisterLayout::new(names.iter().map(|s| (s.clone(), 2usize))).unwrap()
}

fn plus(name: &str) -> QuantumState {
    QuantumState::pure(RegisterLayout::single(name, 2), Vector::from_vec(vec![c(R), c(R)])).unwrap()
}

fn close(a: &Matrix, b: &Matrix, tol: f64) -> bool {
    linalg::max_abs(&(a - b)) <= tol
}

fn pauli_x() -> Unitary {
    Unitary::new(RegisterLayout::single("a", 2), Matrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)])).unwrap()
}

fn hadamard() -> Unitary {
    Unitary::new(RegisterLayout::single("a", 2), Matrix::from_row_slice(2, 2, &[c(R), c(R), c(R), c(-R)])).unwrap()
}

#[test]
fn tensor_examples() {
    let zero = QuantumState::basis(RegisterLayout::single("a", 2), 0).unwrap();
    let one = QuantumState::basis(RegisterLayout::single("b", 2), 1).unwrap();
    let s = zero.tensor(&one).unwrap();
    assert!(s.is_pure_repr());
    assert_eq!(s.dim(), 4);
    assert!((s.density()[(1, 1)].re - 1.0).abs() < 1e-12);

    let mut rng = StreamRng::new(1, 0);
    let rho = QuantumState::mixed(RegisterLayout::single("a", 2), random_density(2, &mut rng)).unwrap();
    let e = rho.tensor(&QuantumState::basis(RegisterLayout::single("b", 2), 0).unwrap()).unwrap().density();
    for i in 0..2 {
        for j in 0..2 {
            assert!(linalg::cabs(e[(2 * i, 2 * j)] - rho.density()[(i, j)]) < 1e-12);
            assert!(linalg::cabs(e[(2 * i + 1, 2 * j + 1)]) < 1e-12);
        }
    }

    let pp = plus("a").tensor(&plus("b")).unwrap();
    let StateDataPure(v) = pure_vec(&pp);
    assert!(v.iter().all(|a| (a.re - 0.5).abs() < 1e-12 && a.im.abs() < 1e-12));

    assert!(plus("a").tensor(&plus("a")).is_err());
}

struct StateDataPure(Vec<linalg::C64>);

fn pure_vec(s: &QuantumState) -> StateDataPure {
    match s.data() {
        parrep_core::hilbert::StateData::Pure(v) => StateDataPure(v.iter().copied().collect()),
        parrep_core::hilbert::StateData::Mixed(_) => panic!("expected a pure state"),
    }
}

#[test]
fn unitary_examples() {
    let zero = QuantumState::basis(RegisterLayout::single("a", 2), 0).unwrap();
    let flipped = zero.apply(&pauli_x(), &["a"]).unwrap();
    assert!((flipped.density()[(1, 1)].re - 1.0).abs() < 1e-12);

    let StateDataPure(h) = pure_vec(&zero.apply(&hadamard(), &["a"]).unwrap());
    assert!((h[0].re - R).abs() < 1e-12 && (h[1].re - R).abs() < 1e-12);

    let mut rng = StreamRng::new(2, 0);
    let layout = qubits(2);
    let rho = QuantumState::mixed(layout.clone(), random_density(4, &mut rng)).unwrap();
    let u = Unitary::new(layout.clone(), random_unitary(4, &mut rng)).unwrap();
    let back = rho.apply(&u, &["q0", "q1"]).unwrap().apply(&u.adjoint(), &["q0", "q1"]).unwrap();
    assert!(close(&back.density(), &rho.density(), 1e-9));

    let wide = Unitary::new(qubits(2), random_unitary(4, &mut rng)).unwrap();
    assert!(zero.apply(&wide, &["a"]).is_err());
    assert!(Unitary::new(RegisterLayout::single("a", 2), Matrix::from_row_slice(2, 2, &[c(1.0), c(1.0), c(0.0), c(1.0)])).is_err());
}

#[test]
fn measurement_examples() {
    let l = RegisterLayout::single("a", 2);
    let z = Pvm::computational(&l, "a").unwrap();
    let mut rng = StreamRng::new(3, 0);
    let zero = QuantumState::basis(l.clone(), 0).unwrap();
    for _ in 0..20 {
        let (y, post) = z.measure(&zero, &mut rng);
        assert_eq!(y, 0);
        assert!(trace_distance(&post, &zero).unwrap() < 1e-12);
    }

    let n = 10_000;
    let zeros = (0..n).filter(|_| z.measure(&plus("a"), &mut rng).0 == 0).count();
    let sigma = (0.25 / n as f64).sqrt();
    assert!((zeros as f64 / n as f64 - 0.5).abs() <= 3.0 * sigma);

    let p = Projector::new(l.clone(), plus("a").density()).unwrap();
    let pvm = Pvm::binary(p).unwrap();
    let (y, post) = pvm.measure(&plus("a"), &mut rng);
    assert_eq!(y, 0);
    assert!(trace_distance(&post, &plus("a")).unwrap() < 1e-12);

    // an incomplete set is rejected
    assert!(Pvm::new(l.clone(), vec![Projector::from_indices(l.clone(), &[0])]).is_err());
}

#[test]
fn partial_trace_examples() {
    let l = qubits(2);
    let s = QuantumState::basis(l.clone(), 0).unwrap().partial_trace(&["q0"]).unwrap();
    assert!((s.density()[(0, 0)].re - 1.0).abs() < 1e-12);

    let bell = QuantumState::pure(l.clone(), Vector::from_vec(vec![c(R), c(0.0), c(0.0), c(R)])).unwrap();
    let half = bell.partial_trace(&["q1"]).unwrap();
    let ev = eigvalsh(&half.density());
    assert!(ev.iter().all(|e| (e - 0.5).abs() < 1e-12));

    let all = bell.partial_trace(&["q0", "q1"]).unwrap();
    assert!(close(&all.density(), &bell.density(), 1e-12));
    assert!(bell.partial_trace(&["q7"]).is_err());
}

#[test]
fn trace_distance_examples() {
    let l = RegisterLayout::single("a", 2);
    let zero = QuantumState::basis(l.clone(), 0).unwrap();
    let one = QuantumState::basis(l.clone(), 1).unwrap();
    assert!(trace_distance(&zero, &zero).unwrap().abs() < 1e-12);
    assert!((trace_distance(&zero, &one).unwrap() - 1.0).abs() < 1e-12);
    // closed form sqrt(1 - |<0|+>|^2), and the same through the mixed path
    let expected = 0.5f64.sqrt();
    assert!((trace_distance(&zero, &plus("a")).unwrap() - expected).abs() < 1e-12);
    let mixed = QuantumState::mixed(l.clone(), plus("a").density()).unwrap();
    assert!((trace_distance(&zero, &mixed).unwrap() - expected).abs() < 1e-12);
    assert!(trace_distance(&zero, &QuantumState::basis(qubits(2), 0).unwrap()).is_err());
}

#[test]
fn ensemble_examples() {
    let l = RegisterLayout::single("a", 2);
    let rho = QuantumState::maximally_mixed(l.clone());
    let a = CqState::from_entries([(0u8, 1.0, rho.clone())]).unwrap();
    assert!(cq_trace_distance(&a, &a).unwrap().abs() < 1e-12);

    let b = CqState::from_entries([(1u8, 1.0, rho.clone())]).unwrap();
    assert!((cq_trace_distance(&a, &b).unwrap() - 1.0).abs() < 1e-12);

    let (p, q) = ([0.7, 0.2, 0.1], [0.4, 0.4, 0.2]);
    let mk = |w: &[f64]| CqState::from_entries(w.iter().enumerate().map(|(k, &x)| (k, x, rho.clone()))).unwrap();
    let v = total_variation(&p, &q);
    assert!((cq_trace_distance(&mk(&p), &mk(&q)).unwrap() - v).abs() < 1e-12);
    assert!((v - 0.3).abs() < 1e-12);
}

fn random_state(layout: &RegisterLayout, mixed: bool, rng: &mut StreamRng) -> QuantumState {
    if mixed {
        QuantumState::mixed(layout.clone(), random_density(layout.dim(), rng)).unwrap()
    } else {
        QuantumState::pure(layout.clone(), random_vector(layout.dim(), rng)).unwrap()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pvm_probabilities_sum_to_one(seed in any::<u64>(), n in 1usize..4, mixed in any::<bool>()) {
        let mut rng = StreamRng::new(seed, 0);
        let l = qubits(n);
        let d = l.dim();
        let rank = 1 + rng.below(d);
        let p = Projector::new(l.clone(), random_projector(d, rank, &mut rng)).unwrap();
        let s = random_state(&l, mixed, &mut rng);
        let total: f64 = Pvm::binary(p).unwrap().probabilities(&s).iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-9);
        let total: f64 = Pvm::computational(&l, "q0").unwrap().probabilities(&s).iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn trace_distance_is_a_metric(seed in any::<u64>(), n in 1usize..4) {
        let mut rng = StreamRng::new(seed, 0);
        let l = qubits(n);
        let [a, b, e] = [0, 1, 2].map(|i| random_state(&l, i != 1, &mut rng));
        let ab = trace_distance(&a, &b).unwrap();
        prop_assert!((ab - trace_distance(&b, &a).unwrap()).abs() <= 1e-9);
        prop_assert!(ab <= trace_distance(&a, &e).unwrap() + trace_distance(&e, &b).unwrap() + 1e-9);
        prop_assert!((0.0..=1.0 + 1e-9).contains(&ab));
    }

    #[test]
    fn diagonal_distance_is_total_variation(p in prop::collection::vec(0.01f64..1.0, 4), q in prop::collection::vec(0.01f64..1.0, 4)) {
        let norm = |v: &[f64]| { let s: f64 = v.iter().sum(); v.iter().map(|x| x / s).collect::<Vec<_>>() };
        let (p, q) = (norm(&p), norm(&q));
        let l = qubits(2);
        let a = QuantumState::classical(l.clone(), &p).unwrap();
        let b = QuantumState::classical(l, &q).unwrap();
        prop_assert!((trace_distance(&a, &b).unwrap() - total_variation(&p, &q)).abs() <= 1e-9);
    }

    #[test]
    fn unitaries_preserve_trace_and_spectrum(seed in any::<u64>(), n in 1usize..4) {
        let mut rng = StreamRng::new(seed, 0);
        let l = qubits(n);
        let rho = random_state(&l, true, &mut rng);
        let target = format!("q{}", rng.below(n));
        let u = Unitary::new(RegisterLayout::single(&target, 2), random_unitary(2, &mut rng)).unwrap();
        let out = rho.apply(&u, &[target.as_str()]).unwrap();
        prop_assert!((out.density().trace().re - 1.0).abs() <= 1e-8);
        let (before, after) = (eigvalsh(&rho.density()), eigvalsh(&out.density()));
        for (x, y) in before.iter().zip(&after) {
            prop_assert!((x - y).abs() <= 1e-8);
        }
    }

    #[test]
    fn partial_trace_commutes_with_kept_unitaries(seed in any::<u64>(), mixed in any::<bool>()) {
        let mut rng = StreamRng::new(seed, 0);
        let l = qubits(3);
        let s = random_state(&l, mixed, &mut rng);
        let kept = RegisterLayout::new([("q0", 2), ("q2", 2)]).unwrap();
        let u = Unitary::new(kept, random_unitary(4, &mut rng)).unwrap();
        let lhs = s.apply(&u, &["q0", "q2"]).unwrap().partial_trace(&["q0", "q2"]).unwrap();
        let rhs = s.partial_trace(&["q0", "q2"]).unwrap().apply(&u, &["q0", "q2"]).unwrap();
        prop_assert!(close(&lhs.density(), &rhs.density(), 1e-8));
    }
}
