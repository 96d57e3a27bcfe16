//! SWAP elimination by qubit relabeling.
//!
//! A SWAP only exchanges which wire carries which qubit, so it can be
//! dropped as long as every later gate is redirected to the wire that now
//! holds its operand. The pass tracks that redirection as a
//! [`QubitPermutation`] `σ`, where `σ[w]` is the physical wire of the
//! rewritten circuit holding what the source circuit has on wire `w`.
//! Dropping `SWAP(a, b)` exchanges the entries `σ[a]` and `σ[b]`; a kept gate
//! on wire `w` is emitted on `σ[w]`.
//!
//! The final `σ` is composed onto the circuit's output permutation, so a
//! query for logical basis string `b` translates to `permute_bits(σ, b)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, QubitPermutation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ReorderMode {
    #[default]
    None,
    /// Drop only the maximal SWAP-only suffix.
    Trailing,
    /// Drop every SWAP, relabeling the gates after it.
    All,
}

impl ReorderMode {
    pub const ALL_MODES: [ReorderMode; 3] = [ReorderMode::None, ReorderMode::Trailing, ReorderMode::All];

    pub fn as_str(self) -> &'static str {
        match self {
            ReorderMode::None => "none",
            ReorderMode::Trailing => "trailing",
            ReorderMode::All => "all",
        }
    }
}

impl fmt::Display for ReorderMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, PartialEq)]
#[error("unknown reorder mode {0:?} (expected none, trailing or all)")]
pub struct ParseModeError(String);

impl FromStr for ReorderMode {
    type Err = ParseModeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(ReorderMode::None),
            "trailing" => Ok(ReorderMode::Trailing),
            "all" => Ok(ReorderMode::All),
            other => Err(ParseModeError(other.to_string())),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReorderReport {
    pub swaps_removed: usize,
    /// Relabeling introduced by this pass alone.
    pub output_permutation: QubitPermutation,
    pub mode: ReorderMode,
}

/// Rewrites `circuit` under `mode`. The returned circuit's
/// `output_permutation` is the input's permutation followed by the one the
/// pass introduced.
pub fn reorder(circuit: &Circuit, mode: ReorderMode) -> (Circuit, ReorderReport) {
    let n = circuit.num_qubits;
    let mut sigma = QubitPermutation::identity(n);
    let mut swaps_removed = 0;
    let gates = match mode {
        ReorderMode::None => circuit.gates.clone(),
        ReorderMode::Trailing => {
            let keep = circuit.gates.iter().rposition(|g| !g.is_swap()).map_or(0, |i| i + 1);
            for g in &circuit.gates[keep..] {
                sigma.swap_entries(g.targets[0], g.targets[1]);
                swaps_removed += 1;
            }
            circuit.gates[..keep].to_vec()
        }
        ReorderMode::All => {
            let mut out = Vec::with_capacity(circuit.gates.len());
            for g in &circuit.gates {
                if g.is_swap() {
                    sigma.swap_entries(g.targets[0], g.targets[1]);
                    swaps_removed += 1;
                } else {
                    out.push(g.relabel(&sigma));
                }
            }
            out
        }
    };
    let rewritten = Circuit {
        num_qubits: n,
        gates,
        output_permutation: circuit.output_permutation.then(&sigma),
    };
    let report = ReorderReport { swaps_removed, output_permutation: sigma, mode };
    (rewritten, report)
}

#[derive(Debug, Error, PartialEq)]
pub enum PermuteError {
    #[error("bitstring has length {found}, permutation covers {expected} qubits")]
    Length { expected: usize, found: usize },
    #[error("invalid character {0:?} in bitstring")]
    InvalidBit(char),
}

/// Translates a logical basis string into the string to query on the
/// rewritten circuit: bit `q` of the input lands at position `perm[q]`.
pub fn permute_bits(perm: &QubitPermutation, bits: &str) -> Result<String, PermuteError> {
    let chars: Vec<char> = bits.chars().collect();
    if chars.len() != perm.len() {
        return Err(PermuteError::Length { expected: perm.len(), found: chars.len() });
    }
    if let Some(&c) = chars.iter().find(|c| **c != '0' && **c != '1') {
        return Err(PermuteError::InvalidBit(c));
    }
    let mut out = vec!['0'; chars.len()];
    for (q, &c) in chars.iter().enumerate() {
        out[perm.get(q)] = c;
    }
    Ok(out.into_iter().collect())
}

/// Index form of [`permute_bits`] (qubit 0 is the most significant bit).
pub fn permute_index(perm: &QubitPermutation, index: usize) -> usize {
    let n = perm.len();
    (0..n).filter(|&q| index >> (n - 1 - q) & 1 == 1).map(|q| 1usize << (n - 1 - perm.get(q))).sum()
}
