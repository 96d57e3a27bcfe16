#![allow(dead_code)]

use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qmdd::circuit::{Circuit, Gate};
use qmdd::generators::{entangled_qft, ghz, inverse_qft, qft, qpe, QpeSpec};

/// Random circuit on `n` qubits with `depth` gates, at least a fifth of
/// which are SWAPs.
pub fn random_circuit(rng: &mut ChaCha8Rng, n: usize, depth: usize) -> Circuit {
    let min_swaps = if n >= 2 { depth.div_ceil(5) } else { 0 };
    let mut gates = Vec::with_capacity(depth);
    for i in 0..depth {
        let force_swap = i < min_swaps;
        gates.push(random_gate(rng, n, force_swap));
    }
    gates.shuffle(rng);
    Circuit::with_gates(n, gates)
}

fn distinct(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<usize> {
    let mut wires: Vec<usize> = (0..n).collect();
    wires.shuffle(rng);
    wires.truncate(k);
    wires
}

fn random_gate(rng: &mut ChaCha8Rng, n: usize, swap: bool) -> Gate {
    if swap {
        let w = distinct(rng, n, 2);
        return Gate::swap(w[0], w[1]);
    }
    let angle = rng.gen_range(-PI..PI);
    let choice = if n == 1 { rng.gen_range(0..10) } else { rng.gen_range(0..14) };
    let q = rng.gen_range(0..n);
    match choice {
        0 => Gate::h(q),
        1 => Gate::x(q),
        2 => Gate::y(q),
        3 => Gate::z(q),
        4 => Gate::s(q),
        5 => Gate::sdg(q),
        6 => Gate::t(q),
        7 => Gate::tdg(q),
        8 => Gate::p(angle, q),
        9 => Gate::rz(angle, q),
        10 => {
            let w = distinct(rng, n, 2);
            Gate::cx(w[0], w[1])
        }
        11 => {
            let w = distinct(rng, n, 2);
            Gate::cp(angle, w[0], w[1])
        }
        12 => {
            let w = distinct(rng, n, 2);
            Gate::swap(w[0], w[1])
        }
        _ => {
            let k = rng.gen_range(2..=n.min(4));
            let w = distinct(rng, n, k);
            Gate::mcp(angle, w[..k - 1].to_vec(), w[k - 1])
        }
    }
}

/// The 200 seeded random circuits (n ≤ 8, depth ≤ 40).
pub fn random_suite(count: usize, seed: u64) -> Vec<Circuit> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(2..=8);
            let depth = rng.gen_range(5..=40);
            random_circuit(&mut rng, n, depth)
        })
        .collect()
}

/// Named circuits from every family, each on at most `max_n` qubits.
pub fn family_grid(max_n: usize) -> Vec<(String, Circuit)> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        out.push((format!("ghz({n})"), ghz(n).unwrap()));
        out.push((format!("qft({n},swaps)"), qft(n, true).unwrap()));
        out.push((format!("qft({n},no swaps)"), qft(n, false).unwrap()));
        out.push((format!("entangled_qft({n})"), entangled_qft(n).unwrap()));

        // Basis-state preparation, then qft followed by its inverse.
        let mut c = Circuit::new(n);
        c.extend((0..n).filter(|q| q % 3 != 1).map(Gate::x));
        c.extend(qft(n, true).unwrap().gates);
        c.extend(inverse_qft(n).unwrap().gates);
        out.push((format!("qft;inverse_qft({n})"), c));

        // Inverse QFT on the Fourier state of a basis vector.
        let mut c = Circuit::new(n);
        c.extend((0..n).filter(|q| q % 2 == 0).map(Gate::x));
        c.extend(qft(n, true).unwrap().gates);
        c.extend(inverse_qft(n).unwrap().gates);
        c.extend(inverse_qft(n).unwrap().gates);
        out.push((format!("qft;inverse_qft;inverse_qft({n})"), c));

        if n >= 2 {
            let m = n - 1;
            let mut ks = vec![0u64, 1, 5, (1u64 << m) - 1];
            ks.retain(|&k| k < 1u64 << m);
            ks.dedup();
            for k in ks {
                out.push((format!("qpe(m={m},k={k})"), qpe(QpeSpec::new(m, k).unwrap()).unwrap()));
            }
        }
    }
    out
}
