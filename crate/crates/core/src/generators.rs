//! Circuit families: GHZ preparation, the QFT with its trailing swap block,
//! entangled QFT, the inverse QFT, and exact-phase QPE.

use std::f64::consts::PI;

use thiserror::Error;

use crate::circuit::{Circuit, Gate};

#[derive(Debug, Error, PartialEq)]
pub enum GeneratorError {
    #[error("circuit families need at least one qubit")]
    NoQubits,
    #[error("phase numerator {k} does not fit in {m} counting bits")]
    PhaseOutOfRange { m: usize, k: u64 },
    #[error("at most 63 counting qubits are supported, got {0}")]
    TooManyCountingQubits(usize),
}

fn require_qubits(n: usize) -> Result<(), GeneratorError> {
    if n == 0 {
        Err(GeneratorError::NoQubits)
    } else {
        Ok(())
    }
}

/// H on qubit 0 followed by a CX ladder down the register.
pub fn ghz(n: usize) -> Result<Circuit, GeneratorError> {
    require_qubits(n)?;
    let mut c = Circuit::new(n);
    c.push(Gate::h(0));
    c.extend((0..n - 1).map(|q| Gate::cx(q, q + 1)));
    Ok(c)
}

/// Textbook QFT with qubit 0 as the most significant input bit. Without the
/// final swaps the output register comes out bit-reversed.
pub fn qft(n: usize, with_final_swaps: bool) -> Result<Circuit, GeneratorError> {
    require_qubits(n)?;
    let mut c = Circuit::new(n);
    for q in 0..n {
        c.push(Gate::h(q));
        for t in q + 1..n {
            c.push(Gate::cp(PI / (1u64 << (t - q)) as f64, t, q));
        }
    }
    if with_final_swaps {
        c.extend((0..n / 2).map(|q| Gate::swap(q, n - 1 - q)));
    }
    Ok(c)
}

/// GHZ preparation followed by the full QFT (with trailing swaps).
pub fn entangled_qft(n: usize) -> Result<Circuit, GeneratorError> {
    let mut c = ghz(n)?;
    c.extend(qft(n, true)?.gates);
    Ok(c)
}

/// Exact adjoint of `qft(n, true)`: the swap block comes first.
pub fn inverse_qft(n: usize) -> Result<Circuit, GeneratorError> {
    let fwd = qft(n, true)?;
    Ok(Circuit::with_gates(n, fwd.gates.iter().rev().map(Gate::inverse).collect()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QpeSpec {
    pub counting_qubits: usize,
    /// Encodes the phase `θ = 2πk / 2^m`.
    pub phase_numerator: u64,
}

impl QpeSpec {
    pub fn new(counting_qubits: usize, phase_numerator: u64) -> Result<Self, GeneratorError> {
        if counting_qubits == 0 {
            return Err(GeneratorError::NoQubits);
        }
        if counting_qubits > 63 {
            return Err(GeneratorError::TooManyCountingQubits(counting_qubits));
        }
        if phase_numerator >> counting_qubits != 0 {
            return Err(GeneratorError::PhaseOutOfRange { m: counting_qubits, k: phase_numerator });
        }
        Ok(QpeSpec { counting_qubits, phase_numerator })
    }

    pub fn phase(&self) -> f64 {
        2.0 * PI * self.phase_numerator as f64 / (1u128 << self.counting_qubits) as f64
    }

    /// The deterministic readout of the counting register, qubit 0 first.
    pub fn expected_readout(&self) -> String {
        format!("{:0width$b}", self.phase_numerator, width = self.counting_qubits)
    }
}

/// Phase estimation of `U = P(θ)` on its eigenvector `|1⟩`.
///
/// Counting qubits are `0..m`, the eigenstate qubit is `m`. Counting qubit
/// `j` controls `U^(2^(m-1-j))`, so after the inverse QFT the register reads
/// `k` in binary with qubit 0 as the most significant bit. The full output
/// basis state is `binary(k)` followed by `1`.
pub fn qpe(spec: QpeSpec) -> Result<Circuit, GeneratorError> {
    let spec = QpeSpec::new(spec.counting_qubits, spec.phase_numerator)?;
    let m = spec.counting_qubits;
    let mut c = Circuit::new(m + 1);
    c.push(Gate::x(m));
    c.extend((0..m).map(Gate::h));
    let modulus = 1u128 << m;
    for j in 0..m {
        // 2^(m-1-j) * θ reduced mod 2π, computed on the integer numerator.
        let numer = ((spec.phase_numerator as u128) << (m - 1 - j)) % modulus;
        let angle = 2.0 * PI * numer as f64 / modulus as f64;
        c.push(Gate::cp(angle, j, m));
    }
    c.extend(inverse_qft(m)?.gates);
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::GateKind;

    #[test]
    fn ghz_shapes() {
        assert_eq!(ghz(1).unwrap().gates, vec![Gate::h(0)]);
        assert_eq!(ghz(3).unwrap().gates.len(), 3);
        assert_eq!(ghz(0), Err(GeneratorError::NoQubits));
    }

    #[test]
    fn qft3_ends_with_single_swap() {
        let c = qft(3, true).unwrap();
        assert_eq!(c.gates.last(), Some(&Gate::swap(0, 2)));
        assert_eq!(c.swap_count(), 1);
        assert_eq!(qft(1, true).unwrap().gates, vec![Gate::h(0)]);
    }

    #[test]
    fn qft_without_swaps() {
        assert_eq!(qft(4, false).unwrap().swap_count(), 0);
        assert_eq!(qft(4, true).unwrap().swap_count(), 2);
    }

    #[test]
    fn entangled_qft_structure() {
        let c = entangled_qft(3).unwrap();
        assert_eq!(c.gates.last(), Some(&Gate::swap(0, 2)));
        assert_eq!(entangled_qft(1).unwrap().gates, vec![Gate::h(0), Gate::h(0)]);
    }

    #[test]
    fn inverse_qft_negates_angles() {
        let inv = inverse_qft(3).unwrap();
        assert_eq!(inv.gates[0], Gate::swap(0, 2));
        let fwd: Vec<f64> = qft(3, true).unwrap().gates.iter().filter_map(|g| g.angle).collect();
        let mut back: Vec<f64> = inv.gates.iter().filter_map(|g| g.angle).collect();
        back.reverse();
        assert_eq!(fwd.len(), back.len());
        for (a, b) in fwd.iter().zip(&back) {
            assert_eq!(*a, -*b);
        }
    }

    #[test]
    fn qpe_layout() {
        let c = qpe(QpeSpec::new(3, 1).unwrap()).unwrap();
        assert_eq!(c.num_qubits, 4);
        assert_eq!(c.gates[0], Gate::x(3));
        assert_eq!(c.swap_count(), 1);
        let first_swap = c.gates.iter().position(|g| g.kind == GateKind::Swap).unwrap();
        assert!(first_swap < c.gates.len() - 1, "swap sits mid-circuit");
    }

    #[test]
    fn qpe_spec_range() {
        assert_eq!(QpeSpec::new(3, 8), Err(GeneratorError::PhaseOutOfRange { m: 3, k: 8 }));
        assert!(QpeSpec::new(3, 7).is_ok());
        assert_eq!(QpeSpec::new(3, 5).unwrap().expected_readout(), "101");
    }
}
