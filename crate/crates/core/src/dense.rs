//! Brute-force state-vector simulator used as the correctness oracle.
//!
//! Deliberately naive: every gate is applied by gathering the `2^k`
//! amplitudes it touches, multiplying by the dense gate unitary and
//! scattering them back.

use num_complex::Complex64;
use thiserror::Error;

use crate::circuit::{gate_unitary, Circuit, GateError, Violation};
use crate::dd::{Package, VecEdge};
use crate::reorder::permute_index;

/// Largest circuit the oracle agrees to simulate.
pub const MAX_ORACLE_QUBITS: usize = 14;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("oracle refuses {0} qubits (cap is {MAX_ORACLE_QUBITS})")]
    TooManyQubits(usize),
    #[error("invalid circuit: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error(transparent)]
    Gate(#[from] GateError),
    #[error("states have {0} and {1} qubits")]
    SizeMismatch(usize, usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    pub num_qubits: usize,
    /// Index bit for qubit `q` is `1 << (n - 1 - q)`.
    pub amplitudes: Vec<Complex64>,
}

impl DenseState {
    pub fn basis(num_qubits: usize, index: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        DenseState { num_qubits, amplitudes }
    }

    /// Reads the state of a DD out into a dense vector.
    pub fn from_dd(pkg: &Package, state: VecEdge) -> Self {
        DenseState { num_qubits: pkg.num_qubits(), amplitudes: pkg.to_vector(state) }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn amplitude(&self, bits: &str) -> Option<Complex64> {
        if bits.len() != self.num_qubits {
            return None;
        }
        let index = usize::from_str_radix(bits, 2).ok()?;
        Some(self.amplitudes[index])
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<(), OracleError> {
        circuit.validate().map_err(OracleError::Invalid)?;
        if circuit.num_qubits != self.num_qubits {
            return Err(OracleError::SizeMismatch(self.num_qubits, circuit.num_qubits));
        }
        let n = self.num_qubits;
        for gate in &circuit.gates {
            let u = gate_unitary(gate)?;
            let masks: Vec<usize> = gate.wires().map(|w| 1usize << (n - 1 - w)).collect();
            let k = masks.len();
            let touched: usize = masks.iter().sum();
            let dim = 1usize << k;
            let offsets: Vec<usize> = (0..dim)
                .map(|local| {
                    (0..k).filter(|&p| local >> (k - 1 - p) & 1 == 1).map(|p| masks[p]).sum()
                })
                .collect();
            let mut buf = vec![Complex64::new(0.0, 0.0); dim];
            for base in 0..self.amplitudes.len() {
                if base & touched != 0 {
                    continue;
                }
                for (slot, &off) in buf.iter_mut().zip(&offsets) {
                    *slot = self.amplitudes[base + off];
                }
                for (row, &off) in offsets.iter().enumerate() {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (col, &x) in buf.iter().enumerate() {
                        acc += u.get(row, col) * x;
                    }
                    self.amplitudes[base + off] = acc;
                }
            }
        }
        Ok(())
    }
}

/// Runs `circuit` from `|0…0⟩`.
pub fn simulate_dense(circuit: &Circuit) -> Result<DenseState, OracleError> {
    simulate_dense_from(circuit, 0)
}

/// Runs `circuit` from the basis state with the given index.
pub fn simulate_dense_from(circuit: &Circuit, index: usize) -> Result<DenseState, OracleError> {
    if circuit.num_qubits > MAX_ORACLE_QUBITS {
        return Err(OracleError::TooManyQubits(circuit.num_qubits));
    }
    let mut s = DenseState::basis(circuit.num_qubits, index);
    s.apply_circuit(circuit)?;
    Ok(s)
}

/// Runs `circuit` from `|0…0⟩` and relabels the result through the
/// circuit's output permutation, so index bits follow logical labels.
pub fn simulate_dense_logical(circuit: &Circuit) -> Result<DenseState, OracleError> {
    let physical = simulate_dense(circuit)?;
    let perm = &circuit.output_permutation;
    let amplitudes = (0..physical.amplitudes.len()).map(|i| physical.amplitudes[permute_index(perm, i)]).collect();
    Ok(DenseState { num_qubits: physical.num_qubits, amplitudes })
}

/// `max_i |a_i - b_i|`.
pub fn max_abs_diff(a: &DenseState, b: &DenseState) -> Result<f64, OracleError> {
    if a.num_qubits != b.num_qubits {
        return Err(OracleError::SizeMismatch(a.num_qubits, b.num_qubits));
    }
    Ok(a.amplitudes.iter().zip(&b.amplitudes).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max))
}

/// Same as [`max_abs_diff`] but sweeps a DD state amplitude by amplitude.
pub fn max_abs_diff_dd(a: &DenseState, pkg: &Package, state: VecEdge) -> Result<f64, OracleError> {
    if a.num_qubits != pkg.num_qubits() {
        return Err(OracleError::SizeMismatch(a.num_qubits, pkg.num_qubits()));
    }
    Ok(a.amplitudes
        .iter()
        .enumerate()
        .map(|(i, x)| (x - pkg.amplitude_at(state, i)).norm())
        .fold(0.0, f64::max))
}
