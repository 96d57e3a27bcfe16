use num_complex::Complex64;
use rustc_hash::FxHashMap;

use super::{DdError, Edge, MatEdge, Package, Raw};
use crate::circuit::{gate_unitary, Circuit, DenseMatrix, Gate};

struct Layout {
    /// For each level, the bit position of that wire inside the gate's
    /// unitary index, if the gate touches it.
    bit_of: Vec<Option<usize>>,
    deepest: usize,
    diagonal: bool,
    unitary: DenseMatrix,
}

/// Matrix diagram of `gate` embedded into the package's `n` qubits.
pub fn gate_dd(pkg: &mut Package, gate: &Gate) -> Result<MatEdge, DdError> {
    let n = pkg.num_qubits();
    let probe = Circuit::with_gates(n, vec![gate.clone()]);
    probe.validate().map_err(DdError::InvalidGate)?;
    let unitary = gate_unitary(gate)?;

    let k = gate.arity();
    let mut bit_of = vec![None; n];
    for (pos, w) in gate.wires().enumerate() {
        bit_of[w] = Some(k - 1 - pos);
    }
    let layout = Layout {
        bit_of,
        deepest: gate.wires().max().expect("gates touch at least one wire"),
        diagonal: gate.is_diagonal(),
        unitary,
    };
    let mut memo = FxHashMap::default();
    let r = build(pkg, &layout, 0, 0, 0, &mut memo);
    let w = pkg.canon_raw(r.w);
    Ok(if w == Complex64::new(0.0, 0.0) { MatEdge::zero() } else { Edge::new(w, super::NodeId(r.n)) })
}

impl Package {
    pub fn gate_dd(&mut self, gate: &Gate) -> Result<MatEdge, DdError> {
        gate_dd(self, gate)
    }
}

/// `row`/`col` accumulate the unitary index bits of the wires above `level`.
fn build(
    pkg: &mut Package,
    layout: &Layout,
    level: usize,
    row: usize,
    col: usize,
    memo: &mut FxHashMap<(usize, usize, usize), Raw>,
) -> Raw {
    if level > layout.deepest {
        let entry = layout.unitary.get(row, col);
        return pkg.identity_below(level).scaled(entry);
    }
    if let Some(&r) = memo.get(&(level, row, col)) {
        return r;
    }
    let succ = match layout.bit_of[level] {
        None => {
            let below = build(pkg, layout, level + 1, row, col, memo);
            [below, Raw::ZERO, Raw::ZERO, below]
        }
        Some(bit) => {
            let mut succ = [Raw::ZERO; 4];
            for rb in 0..2 {
                for cb in 0..2 {
                    if layout.diagonal && rb != cb {
                        continue;
                    }
                    succ[2 * rb + cb] = build(pkg, layout, level + 1, row | (rb << bit), col | (cb << bit), memo);
                }
            }
            succ
        }
    };
    let r = pkg.mnode_raw(level, succ);
    memo.insert((level, row, col), r);
    r
}
