use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, SQRT_2};

use proptest::prelude::*;

use super::*;
use crate::circuit::{Circuit, Gate};
use crate::dense::{simulate_dense, DenseState};

fn c(re: f64, im: f64) -> Amplitude {
    Amplitude::new(re, im)
}

fn close(a: Amplitude, b: Amplitude, tol: f64) -> bool {
    (a - b).norm() <= tol
}

fn one() -> VecEdge {
    VecEdge::terminal(c(1.0, 0.0))
}

fn run_gates(pkg: &mut Package, gates: &[Gate]) -> VecEdge {
    let mut s = pkg.zero_state();
    for g in gates {
        let op = pkg.gate_dd(g).unwrap();
        s = pkg.apply(op, s);
    }
    s
}

fn ghz_gates(n: usize) -> Vec<Gate> {
    let mut g = vec![Gate::h(0)];
    g.extend((0..n - 1).map(|q| Gate::cx(q, q + 1)));
    g
}

#[test]
fn plus_state_node() {
    let mut p = Package::new(1);
    let e = p.make_vector_node(0, one(), one()).unwrap();
    assert!(close(e.weight, c(SQRT_2, 0.0), 1e-15));
    let [s0, s1] = p.vector_successors(e.node).unwrap();
    assert!(close(s0.weight, c(FRAC_1_SQRT_2, 0.0), 1e-15));
    assert!(close(s1.weight, c(FRAC_1_SQRT_2, 0.0), 1e-15));
    assert!(close(p.amplitude(e, "0").unwrap(), c(1.0, 0.0), 1e-15));
    assert!(close(p.amplitude(e, "1").unwrap(), c(1.0, 0.0), 1e-15));
}

#[test]
fn zero_children_collapse() {
    let mut p = Package::new(1);
    let z = p.make_vector_node(0, VecEdge::zero(), VecEdge::zero()).unwrap();
    assert_eq!(z, VecEdge::zero());
    let zm = p.make_matrix_node(0, [MatEdge::zero(); 4]).unwrap();
    assert_eq!(zm, MatEdge::zero());
}

#[test]
fn interning_returns_same_node() {
    let mut p = Package::new(1);
    let a = p.make_vector_node(0, one(), VecEdge::terminal(c(0.0, 1.0))).unwrap();
    let b = p.make_vector_node(0, one(), VecEdge::terminal(c(0.0, 1.0))).unwrap();
    assert_eq!(a.node, b.node);
    // Scaled children normalize onto the same node.
    let d = p
        .make_vector_node(0, VecEdge::terminal(c(3.0, 0.0)), VecEdge::terminal(c(0.0, 3.0)))
        .unwrap();
    assert_eq!(a.node, d.node);
    // EPS-level noise does not create a new node.
    let noisy = p
        .make_vector_node(0, one(), VecEdge::terminal(c(1e-14, 1.0 + 1e-14)))
        .unwrap();
    assert_eq!(a.node, noisy.node);
}

#[test]
fn level_errors() {
    let mut p = Package::new(2);
    assert_eq!(
        p.make_vector_node(2, one(), one()),
        Err(DdError::LevelOutOfRange { level: 2, num_qubits: 2 })
    );
    // Level 0 of a 2-qubit package cannot point straight at the terminal.
    assert!(matches!(p.make_vector_node(0, one(), one()), Err(DdError::SuccessorLevel { .. })));
}

#[test]
fn hadamard_matrix_node() {
    let mut p = Package::new(1);
    let t = |w: f64| MatEdge::terminal(c(w, 0.0));
    let raw = p.make_matrix_node(0, [t(1.0), t(1.0), t(1.0), t(-1.0)]).unwrap();
    let h = MatEdge::new(raw.weight * FRAC_1_SQRT_2, raw.node);
    let zero = p.basis_state("0").unwrap();
    let plus = p.apply(h, zero);
    assert!(close(p.amplitude(plus, "0").unwrap(), c(FRAC_1_SQRT_2, 0.0), 1e-15));
    assert!(close(p.amplitude(plus, "1").unwrap(), c(FRAC_1_SQRT_2, 0.0), 1e-15));
    // Built by hand or from the gate list, H is the same node.
    let hg = p.gate_dd(&Gate::h(0)).unwrap();
    assert_eq!(hg.node, h.node);
    assert!(close(hg.weight, h.weight, 1e-15));
}

#[test]
fn identity_leaves_state_unchanged() {
    let mut p = Package::new(1);
    let t = |w: f64| MatEdge::terminal(c(w, 0.0));
    let id = p.make_matrix_node(0, [t(1.0), t(0.0), t(0.0), t(1.0)]).unwrap();
    let psi = p.make_vector_node(0, VecEdge::terminal(c(0.6, 0.0)), VecEdge::terminal(c(0.0, 0.8))).unwrap();
    let out = p.apply(id, psi);
    assert!(out.approx_eq(&psi));

    let mut p = Package::new(5);
    let psi = run_gates(&mut p, &ghz_gates(5));
    let id = p.identity();
    assert!(p.apply(id, psi).approx_eq(&psi));
}

#[test]
fn basis_states() {
    let mut p = Package::new(3);
    let s = p.basis_state("000").unwrap();
    assert_eq!(p.amplitude(s, "000").unwrap(), c(1.0, 0.0));
    assert_eq!(p.amplitude(s, "001").unwrap(), c(0.0, 0.0));

    let mut p = Package::new(1);
    let s = p.basis_state("1").unwrap();
    assert_eq!(p.amplitude(s, "1").unwrap(), c(1.0, 0.0));

    let mut p = Package::new(10);
    let s = p.basis_state("0101010101").unwrap();
    assert_eq!(p.count_nodes(s), 10);
    assert_eq!(p.basis_state("01"), Err(DdError::BitstringLength { expected: 10, found: 2 }));
    assert_eq!(p.basis_state("010101010x"), Err(DdError::InvalidBit('x')));

    let mut p = Package::new(4);
    let s = p.basis_state("1010").unwrap();
    assert_eq!(p.amplitude(s, "1010").unwrap(), c(1.0, 0.0));
}

#[test]
fn gate_dd_examples() {
    let mut p = Package::new(2);
    let x1 = p.gate_dd(&Gate::x(1)).unwrap();
    let s00 = p.basis_state("00").unwrap();
    let s = p.apply(x1, s00);
    assert!(close(p.amplitude(s, "01").unwrap(), c(1.0, 0.0), 1e-15));

    // Expected values from the 4x4 matrix diag(1, 1, 1, i).
    let cp = p.gate_dd(&Gate::cp(FRAC_PI_2, 0, 1)).unwrap();
    let s11 = p.basis_state("11").unwrap();
    let s10 = p.basis_state("10").unwrap();
    let r = p.apply(cp, s11);
    assert!(close(p.amplitude(r, "11").unwrap(), c(0.0, 1.0), 1e-15));
    let r = p.apply(cp, s10);
    assert!(close(p.amplitude(r, "10").unwrap(), c(1.0, 0.0), 1e-15));

    let err = p.gate_dd(&Gate::cx(1, 1)).unwrap_err();
    assert!(matches!(err, DdError::InvalidGate(_)));
    assert!(matches!(p.gate_dd(&Gate::h(2)), Err(DdError::InvalidGate(_))));
}

#[test]
fn ghz_via_apply() {
    let mut p = Package::new(2);
    let s = run_gates(&mut p, &ghz_gates(2));
    let oracle = simulate_dense(&Circuit::with_gates(2, ghz_gates(2))).unwrap();
    for (i, want) in oracle.amplitudes.iter().enumerate() {
        assert!(close(p.amplitude_at(s, i), *want, 1e-12));
    }
    assert!(close(p.amplitude(s, "00").unwrap(), c(FRAC_1_SQRT_2, 0.0), 1e-12));
    assert!(close(p.amplitude(s, "01").unwrap(), c(0.0, 0.0), 1e-12));

    let mut p = Package::new(3);
    let s = run_gates(&mut p, &ghz_gates(3));
    assert!(close(p.amplitude(s, "000").unwrap(), c(FRAC_1_SQRT_2, 0.0), 1e-12));
    assert_eq!(p.amplitude(s, "010").unwrap(), c(0.0, 0.0));
    assert!(p.amplitude(s, "01").is_err());
}

#[test]
fn ghz_node_count() {
    // One root plus an all-zeros and an all-ones chain below it.
    for n in 1..=12 {
        let mut p = Package::new(n);
        let s = run_gates(&mut p, &ghz_gates(n));
        assert_eq!(p.count_nodes(s), 2 * n - 1, "n = {n}");
    }
    assert_eq!(Package::new(3).count_nodes(VecEdge::zero()), 0);
}

#[test]
fn add_examples() {
    let mut p = Package::new(1);
    let zero = p.basis_state("0").unwrap();
    let onek = p.basis_state("1").unwrap();
    assert!(p.add(zero, VecEdge::zero()).approx_eq(&zero));
    let sum = p.add(zero, onek);
    assert!(close(p.amplitude(sum, "0").unwrap(), c(1.0, 0.0), 1e-15));
    assert!(close(p.amplitude(sum, "1").unwrap(), c(1.0, 0.0), 1e-15));
    let diff = p.add(zero, VecEdge::new(c(-1.0, 0.0), zero.node));
    assert_eq!(diff, VecEdge::zero());
}

#[test]
fn matrix_add_builds_operators() {
    // X + Z over one qubit, checked against the dense sum.
    let mut p = Package::new(1);
    let x = p.gate_dd(&Gate::x(0)).unwrap();
    let z = p.gate_dd(&Gate::z(0)).unwrap();
    let sum = p.add_matrices(x, z);
    for (bits, want) in [("0", c(1.0, 0.0)), ("1", c(1.0, 0.0))] {
        let s = p.basis_state("0").unwrap();
        let out = p.apply(sum, s);
        assert!(close(p.amplitude(out, bits).unwrap(), want, 1e-15), "{bits}");
    }
}

#[test]
fn gc_all_rooted_reclaims_nothing() {
    let mut p = Package::new(4);
    let states: Vec<VecEdge> = ["0000", "0110", "1111"].iter().map(|b| p.basis_state(b).unwrap()).collect();
    let plus = p
        .from_vector(&[c(0.25, 0.0); 16])
        .unwrap();
    let op = p.gate_dd(&Gate::cx(0, 3)).unwrap();
    let roots: Vec<VecEdge> = states.iter().copied().chain([plus]).collect();
    assert_eq!(p.collect_garbage(&roots, &[op]), 0);
    assert_eq!(p.collect_garbage(&roots, &[op]), 0);
}

#[test]
fn gc_reclaims_dropped_state() {
    let mut p = Package::new(3);
    let keep = p.basis_state("000").unwrap();
    p.collect_garbage(&[keep], &[]);
    let before = p.stats().live_vector_nodes;
    let dropped = p.basis_state("111").unwrap();
    let dropped_nodes = p.count_nodes(dropped);
    assert_eq!(p.stats().live_vector_nodes, before + dropped_nodes);
    let reclaimed = p.collect_garbage(&[keep], &[]);
    assert_eq!(reclaimed, dropped_nodes);
    assert_eq!(p.stats().live_vector_nodes, before);
}

#[test]
fn gc_preserves_rooted_amplitudes() {
    let n = 6;
    let gates: Vec<Gate> = ghz_gates(n).into_iter().chain((0..n).map(Gate::h)).chain([Gate::t(2), Gate::cp(0.3, 1, 4)]).collect();
    let mut p = Package::new(n);
    let s = run_gates(&mut p, &gates);
    let before = p.to_vector(s);
    let reclaimed = p.collect_garbage(&[s], &[]);
    assert!(reclaimed > 0);
    assert_eq!(p.to_vector(s), before);
    // The package keeps working after a collection.
    let op = p.gate_dd(&Gate::h(0)).unwrap();
    let s2 = p.apply(op, s);
    let oracle = simulate_dense(&Circuit::with_gates(n, [gates, vec![Gate::h(0)]].concat())).unwrap();
    assert!(crate::dense::max_abs_diff_dd(&oracle, &p, s2).unwrap() < 1e-10);
}

#[test]
fn maybe_collect_respects_high_water() {
    let config = PackageConfig { compute_capacity: 1 << 10, gc_high_water: 4 };
    let mut p = Package::with_config(6, config);
    let s = run_gates(&mut p, &[Gate::h(0), Gate::h(3), Gate::cx(0, 5)]);
    assert!(p.stats().live_vector_nodes > 4);
    assert!(p.maybe_collect(&[s], &[]).is_some());
    assert_eq!(p.stats().gc_runs, 1);
    let fresh = Package::new(2);
    let mut fresh = fresh;
    let z = fresh.zero_state();
    assert!(fresh.maybe_collect(&[z], &[]).is_none());
}

#[test]
fn from_vector_round_trips() {
    let amps: Vec<Amplitude> = (0..8).map(|i| c(i as f64 * 0.1, -(i as f64) * 0.05)).collect();
    let mut p = Package::new(3);
    let e = p.from_vector(&amps).unwrap();
    for (got, want) in p.to_vector(e).iter().zip(&amps) {
        assert!(close(*got, *want, 1e-14));
    }
    assert!(matches!(p.from_vector(&amps[..4]), Err(DdError::VectorLength { .. })));
}

#[test]
fn marginal_probabilities() {
    let mut p = Package::new(3);
    let s = run_gates(&mut p, &ghz_gates(3));
    assert!((p.probability(s, &[Some(true), None, None]).unwrap() - 0.5).abs() < 1e-12);
    assert!(p.probability(s, &[Some(true), Some(false), None]).unwrap() < 1e-12);
    assert!((p.probability(s, &[None, None, None]).unwrap() - 1.0).abs() < 1e-12);
    let v = p.from_vector(&[c(0.1, 0.0), c(0.2, 0.3), c(0.0, 0.0), c(0.4, 0.0), c(0.0, 0.5), c(0.1, 0.1), c(0.2, 0.0), c(0.6, 0.0)]).unwrap();
    let dense = p.to_vector(v);
    let want: f64 = [1usize, 5].iter().map(|&i| dense[i].norm_sqr()).sum();
    assert!((p.probability(v, &[None, Some(false), Some(true)]).unwrap() - want).abs() < 1e-12);
    assert!(p.probability(v, &[None]).is_err());
}

fn gate_strategy(n: usize) -> impl Strategy<Value = Gate> {
    let q = 0..n;
    let pair = (0..n, 0..n).prop_filter("distinct", |(a, b)| a != b);
    let angle = -6.3f64..6.3;
    prop_oneof![
        q.clone().prop_map(Gate::h),
        q.clone().prop_map(Gate::x),
        q.clone().prop_map(Gate::y),
        q.clone().prop_map(Gate::s),
        q.clone().prop_map(Gate::tdg),
        (angle.clone(), q.clone()).prop_map(|(a, q)| Gate::p(a, q)),
        (angle.clone(), q).prop_map(|(a, q)| Gate::rz(a, q)),
        pair.clone().prop_map(|(a, b)| Gate::cx(a, b)),
        (angle, pair.clone()).prop_map(|(t, (a, b))| Gate::cp(t, a, b)),
        pair.prop_map(|(a, b)| Gate::swap(a, b)),
    ]
}

fn circuit_strategy() -> impl Strategy<Value = (usize, Vec<Gate>)> {
    (2usize..=6).prop_flat_map(|n| (Just(n), prop::collection::vec(gate_strategy(n), 0..30)))
}

fn circuit_and_gate() -> impl Strategy<Value = (usize, Vec<Gate>, Gate)> {
    (2usize..=6).prop_flat_map(|n| (Just(n), prop::collection::vec(gate_strategy(n), 0..30), gate_strategy(n)))
}

fn random_vector(n: usize) -> impl Strategy<Value = Vec<Amplitude>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| c(a, b)), 1 << n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matches_dense_oracle((n, gates) in circuit_strategy()) {
        let mut p = Package::new(n);
        let s = run_gates(&mut p, &gates);
        let oracle = simulate_dense(&Circuit::with_gates(n, gates)).unwrap();
        let dd = DenseState::from_dd(&p, s);
        prop_assert!(crate::dense::max_abs_diff(&oracle, &dd).unwrap() <= 1e-9);
        prop_assert!((dd.norm_sqr() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn gate_then_inverse_is_identity((n, gates, g) in circuit_and_gate(), invert in any::<bool>()) {
        let mut p = Package::new(n);
        let psi = run_gates(&mut p, &gates);
        let g = if invert { g.inverse() } else { g };
        let fwd = p.gate_dd(&g).unwrap();
        let back = p.gate_dd(&g.inverse()).unwrap();
        let tmp = p.apply(back, psi);
        let out = p.apply(fwd, tmp);
        let a = p.to_vector(psi);
        let b = p.to_vector(out);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).norm() <= 1e-9);
        }
    }

    #[test]
    fn canonical_under_rebuild(v in random_vector(3), scale in 0.1f64..3.0) {
        let mut p = Package::new(3);
        let a = p.from_vector(&v).unwrap();
        let scaled: Vec<Amplitude> = v.iter().map(|x| x * scale).collect();
        let b = p.from_vector(&scaled).unwrap();
        prop_assert_eq!(a.node, b.node);
        let again = p.from_vector(&v).unwrap();
        prop_assert!(again.approx_eq(&a));
    }

    #[test]
    fn add_matches_dense(a in random_vector(3), b in random_vector(3)) {
        let mut p = Package::new(3);
        let ea = p.from_vector(&a).unwrap();
        let eb = p.from_vector(&b).unwrap();
        let sum = p.add(ea, eb);
        for (i, got) in p.to_vector(sum).iter().enumerate() {
            prop_assert!((got - (a[i] + b[i])).norm() <= 1e-9);
        }
    }

    #[test]
    fn add_commutes_and_associates(a in random_vector(3), b in random_vector(3), d in random_vector(3)) {
        let mut p = Package::new(3);
        let (ea, eb, ed) = (p.from_vector(&a).unwrap(), p.from_vector(&b).unwrap(), p.from_vector(&d).unwrap());
        let ab = p.add(ea, eb);
        let ba = p.add(eb, ea);
        let ab_d = p.add(ab, ed);
        let bd = p.add(eb, ed);
        let a_bd = p.add(ea, bd);
        let (vab, vba) = (p.to_vector(ab), p.to_vector(ba));
        let (l, r) = (p.to_vector(ab_d), p.to_vector(a_bd));
        for i in 0..8 {
            prop_assert!((vab[i] - vba[i]).norm() <= 1e-9);
            prop_assert!((l[i] - r[i]).norm() <= 1e-9);
        }
    }
}
