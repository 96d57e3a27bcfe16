mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qmdd::dense::{max_abs_diff, simulate_dense, simulate_dense_from};
use qmdd::generators::{entangled_qft, inverse_qft, qft};
use qmdd::reorder::ReorderMode;
use qmdd::sim::run;

#[test]
fn qft_then_inverse_is_identity_on_basis_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in 1..=8 {
        let mut c = qft(n, true).unwrap();
        c.extend(inverse_qft(n).unwrap().gates);
        for _ in 0..4 {
            let index = rng.gen_range(0..1usize << n);
            let out = simulate_dense_from(&c, index).unwrap();
            for (i, a) in out.amplitudes.iter().enumerate() {
                let want = if i == index { 1.0 } else { 0.0 };
                assert!((a.re - want).abs() < 1e-9 && a.im.abs() < 1e-9, "n={n} index={index}");
            }
        }
    }
}

#[test]
fn every_grid_point_matches_oracle() {
    for (name, c) in common::family_grid(10) {
        let oracle = simulate_dense(&c).unwrap();
        let none = run(&c, ReorderMode::None).unwrap();
        assert!(max_abs_diff(&oracle, &none.to_dense()).unwrap() <= 1e-9, "{name}");
        for mode in [ReorderMode::Trailing, ReorderMode::All] {
            let r = run(&c, mode).unwrap();
            assert!(max_abs_diff(&oracle, &r.to_dense()).unwrap() <= 1e-9, "{name}/{mode}");
        }
    }
}

#[test]
fn trailing_never_raises_peak_on_entangled_qft() {
    for n in 1..=12 {
        let c = entangled_qft(n).unwrap();
        let none = run(&c, ReorderMode::None).unwrap().stats;
        let trailing = run(&c, ReorderMode::Trailing).unwrap().stats;
        assert!(trailing.peak_nodes <= none.peak_nodes, "n={n}");
        assert_eq!(trailing.swaps_removed, n / 2);
    }
}
