//! Circuit simulation on the decision-diagram package.

use std::time::Duration;

use serde::Serialize;
use thiserror::Error;

use crate::circuit::{Circuit, QubitPermutation, Violation};
use crate::clock::Stopwatch;
use crate::dd::{Amplitude, DdError, Package, PackageConfig, VecEdge};
use crate::dense::DenseState;
use crate::reorder::{permute_bits, permute_index, reorder, PermuteError, ReorderMode};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid circuit: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error(transparent)]
    Dd(#[from] DdError),
    #[error(transparent)]
    Permute(#[from] PermuteError),
    #[error("timed out after {gates_applied} gates ({elapsed:?})")]
    Timeout { gates_applied: usize, elapsed: Duration },
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub timeout: Option<Duration>,
    pub package: PackageConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunStats {
    /// Seconds from package construction through the last gate.
    pub wall_time: f64,
    pub gates_applied: usize,
    pub swaps_removed: usize,
    pub peak_nodes: usize,
    pub final_nodes: usize,
    pub mode: ReorderMode,
}

/// Final state of a run together with the package that owns it.
///
/// Queries take basis strings in the labels of the circuit handed to
/// [`run`]; the output permutation is applied internally.
pub struct RunResult {
    pub package: Package,
    pub final_state: VecEdge,
    pub output_permutation: QubitPermutation,
    pub stats: RunStats,
}

impl RunResult {
    pub fn num_qubits(&self) -> usize {
        self.package.num_qubits()
    }

    pub fn amplitude(&self, bits: &str) -> Result<Amplitude, SimError> {
        let physical = permute_bits(&self.output_permutation, bits)?;
        Ok(self.package.amplitude(self.final_state, &physical)?)
    }

    /// Amplitude of logical basis index `index`.
    pub fn amplitude_at(&self, index: usize) -> Amplitude {
        self.package.amplitude_at(self.final_state, permute_index(&self.output_permutation, index))
    }

    /// Probability of a partial assignment in logical labels. `pattern` holds
    /// `0`, `1` or `x` (free) per qubit and may be shorter than the register;
    /// missing trailing qubits are free.
    pub fn probability(&self, pattern: &str) -> Result<f64, SimError> {
        let n = self.num_qubits();
        let chars: Vec<char> = pattern.chars().collect();
        if chars.len() > n {
            return Err(PermuteError::Length { expected: n, found: chars.len() }.into());
        }
        let mut physical = vec![None; n];
        for (q, &c) in chars.iter().enumerate() {
            physical[self.output_permutation.get(q)] = match c {
                '0' => Some(false),
                '1' => Some(true),
                'x' | 'X' => None,
                other => return Err(PermuteError::InvalidBit(other).into()),
            };
        }
        Ok(self.package.probability(self.final_state, &physical)?)
    }

    /// Dense vector in logical labels. Exponential; for verification only.
    pub fn to_dense(&self) -> DenseState {
        let physical = self.package.to_vector(self.final_state);
        let amplitudes = (0..physical.len())
            .map(|i| physical[permute_index(&self.output_permutation, i)])
            .collect();
        DenseState { num_qubits: self.num_qubits(), amplitudes }
    }
}

pub fn run(circuit: &Circuit, mode: ReorderMode) -> Result<RunResult, SimError> {
    run_with(circuit, mode, &RunOptions::default())
}

/// Rewrites the circuit under `mode`, then applies every gate to `|0…0⟩`.
pub fn run_with(circuit: &Circuit, mode: ReorderMode, opts: &RunOptions) -> Result<RunResult, SimError> {
    circuit.validate().map_err(SimError::Invalid)?;
    let (rewritten, report) = reorder(circuit, mode);

    let start = Stopwatch::start();
    let mut pkg = Package::with_config(rewritten.num_qubits, opts.package);
    let mut state = pkg.zero_state();
    let mut peak = pkg.count_nodes(state);
    for (i, gate) in rewritten.gates.iter().enumerate() {
        if let Some(limit) = opts.timeout {
            let elapsed = start.elapsed();
            if elapsed > limit {
                return Err(SimError::Timeout { gates_applied: i, elapsed });
            }
        }
        let op = pkg.gate_dd(gate)?;
        state = pkg.apply(op, state);
        peak = peak.max(pkg.count_nodes(state));
        pkg.maybe_collect(&[state], &[]);
    }
    let wall_time = start.elapsed().as_secs_f64();
    if let Some(limit) = opts.timeout {
        if start.elapsed() > limit {
            return Err(SimError::Timeout { gates_applied: rewritten.gates.len(), elapsed: start.elapsed() });
        }
    }

    let final_nodes = pkg.count_nodes(state);
    let stats = RunStats {
        wall_time,
        gates_applied: rewritten.gates.len(),
        swaps_removed: report.swaps_removed,
        peak_nodes: peak,
        final_nodes,
        mode,
    };
    Ok(RunResult {
        package: pkg,
        final_state: state,
        output_permutation: rewritten.output_permutation,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_1_SQRT_2;

    use super::*;
    use crate::generators::{entangled_qft, ghz, qft, qpe, QpeSpec};

    #[test]
    fn ghz3_amplitude() {
        let r = run(&ghz(3).unwrap(), ReorderMode::None).unwrap();
        assert!((r.amplitude("000").unwrap() - Amplitude::new(FRAC_1_SQRT_2, 0.0)).norm() < 1e-12);
        assert!(r.amplitude("010").unwrap().norm() < 1e-12);
    }

    #[test]
    fn trailing_matches_none_on_qft3() {
        // Start from a non-trivial state so the reversal is visible.
        let mut c = Circuit::with_gates(3, vec![crate::circuit::Gate::x(0), crate::circuit::Gate::h(2)]);
        c.extend(qft(3, true).unwrap().gates);
        let a = run(&c, ReorderMode::None).unwrap();
        let b = run(&c, ReorderMode::Trailing).unwrap();
        assert_eq!(b.stats.swaps_removed, 1);
        for i in 0..8 {
            let bits = format!("{i:03b}");
            assert!((a.amplitude(&bits).unwrap() - b.amplitude(&bits).unwrap()).norm() <= 1e-9, "{bits}");
        }
    }

    #[test]
    fn empty_circuit() {
        let r = run(&Circuit::new(2), ReorderMode::All).unwrap();
        assert!((r.amplitude("00").unwrap() - Amplitude::new(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(r.stats.gates_applied, 0);
        assert_eq!(r.stats.peak_nodes, 2);
    }

    #[test]
    fn stats_invariants() {
        let src = entangled_qft(6).unwrap();
        for mode in ReorderMode::ALL_MODES {
            let r = run(&src, mode).unwrap();
            assert!(r.stats.peak_nodes >= r.stats.final_nodes);
            assert_eq!(r.stats.gates_applied, src.gates.len() - r.stats.swaps_removed);
        }
    }

    #[test]
    fn counting_register_marginal() {
        let spec = QpeSpec::new(3, 3).unwrap();
        for mode in ReorderMode::ALL_MODES {
            let r = run(&qpe(spec).unwrap(), mode).unwrap();
            assert!((r.probability("011").unwrap() - 1.0).abs() < 1e-9);
            assert!(r.probability("010").unwrap() < 1e-9);
            assert!((r.probability("x11x").unwrap() - 1.0).abs() < 1e-9);
            assert!(r.probability("01101").is_err());
            assert!(r.probability("0a").is_err());
        }
    }

    #[test]
    fn timeout_is_reported() {
        let opts = RunOptions { timeout: Some(Duration::ZERO), ..RunOptions::default() };
        assert!(matches!(run_with(&ghz(4).unwrap(), ReorderMode::None, &opts), Err(SimError::Timeout { .. })));
    }

    #[test]
    fn invalid_circuit_rejected() {
        let bad = Circuit::with_gates(2, vec![crate::circuit::Gate::cx(0, 0)]);
        assert!(matches!(run(&bad, ReorderMode::None), Err(SimError::Invalid(_))));
    }
}
