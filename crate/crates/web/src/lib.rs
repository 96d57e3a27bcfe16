//! WebAssembly front end for the `qmdd` simulator.
//!
//! Every export takes and returns plain strings (QASM in, JSON out) so the
//! page needs no generated bindings beyond the functions themselves. The
//! logic lives in ordinary Rust functions that the unit tests call directly.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;
use wasm_bindgen::prelude::*;

use qmdd::circuit::Circuit;
use qmdd::dd::{Amplitude, Package, VecEdge};
use qmdd::generators::{entangled_qft, ghz, inverse_qft, qft, qpe, QpeSpec};
use qmdd::qasm::{emit, parse};
use qmdd::reorder::{reorder, ReorderMode};
use qmdd::sim::run;

/// Largest register the page accepts; the diagrams of dense families grow as
/// `2^n` and the browser tab has limited memory.
pub const MAX_QUBITS: usize = 22;

fn parse_mode(mode: &str) -> Result<ReorderMode, String> {
    mode.parse::<ReorderMode>().map_err(|e| e.to_string())
}

fn load(qasm: &str) -> Result<Circuit, String> {
    let circuit = parse(qasm).map_err(|e| e.to_string())?.circuit;
    if circuit.num_qubits > MAX_QUBITS {
        return Err(format!("{} qubits is above the demo limit of {MAX_QUBITS}", circuit.num_qubits));
    }
    Ok(circuit)
}

/// QASM text for one of the built-in families. `qubits` counts every wire,
/// so `qpe` uses `qubits - 1` counting qubits; `phase_k` is only read by `qpe`.
pub fn generate_qasm(family: &str, qubits: usize, phase_k: u64) -> Result<String, String> {
    let err = |e: qmdd::generators::GeneratorError| e.to_string();
    let c = match family {
        "ghz" => ghz(qubits).map_err(err)?,
        "qft" => qft(qubits, true).map_err(err)?,
        "entangled_qft" => entangled_qft(qubits).map_err(err)?,
        "inverse_qft" => inverse_qft(qubits).map_err(err)?,
        "qpe" => {
            let m = qubits.checked_sub(1).filter(|&m| m > 0).ok_or("qpe needs at least 2 qubits")?;
            qpe(QpeSpec::new(m, phase_k).map_err(err)?).map_err(err)?
        }
        other => return Err(format!("unknown family {other:?}")),
    };
    Ok(emit(&c))
}

/// The circuit after the reorder pass, as QASM.
pub fn rewrite_qasm(qasm: &str, mode: &str) -> Result<String, String> {
    let (c, _) = reorder(&load(qasm)?, parse_mode(mode)?);
    Ok(emit(&c))
}

#[derive(Serialize, Debug)]
pub struct AmplitudeEntry {
    pub bits: String,
    pub re: f64,
    pub im: f64,
    pub probability: f64,
}

#[derive(Serialize, Debug)]
pub struct SimulateOutput {
    pub num_qubits: usize,
    pub mode: ReorderMode,
    pub gates_applied: usize,
    pub swaps_removed: usize,
    pub peak_nodes: usize,
    pub final_nodes: usize,
    pub output_permutation: Vec<usize>,
    /// Largest-magnitude amplitudes first, in the input file's qubit labels.
    pub amplitudes: Vec<AmplitudeEntry>,
}

/// Runs the circuit and returns statistics plus the `limit` largest
/// amplitudes.
pub fn simulate_json(qasm: &str, mode: &str, limit: usize) -> Result<String, String> {
    let circuit = load(qasm)?;
    let mode = parse_mode(mode)?;
    let r = run(&circuit, mode).map_err(|e| e.to_string())?;
    let n = r.num_qubits();
    let perm = r.output_permutation.clone();
    let amplitudes = largest_amplitudes(&r.package, r.final_state, limit)
        .into_iter()
        .map(|(physical, a)| {
            let bits: String = (0..n).map(|q| if physical >> (n - 1 - perm.get(q)) & 1 == 1 { '1' } else { '0' }).collect();
            AmplitudeEntry { bits, re: a.re, im: a.im, probability: a.norm_sqr() }
        })
        .collect();
    let out = SimulateOutput {
        num_qubits: n,
        mode,
        gates_applied: r.stats.gates_applied,
        swaps_removed: r.stats.swaps_removed,
        peak_nodes: r.stats.peak_nodes,
        final_nodes: r.stats.final_nodes,
        output_permutation: perm.as_slice().to_vec(),
        amplitudes,
    };
    Ok(serde_json::to_string(&out).expect("serializable"))
}

struct Frontier {
    bound: f64,
    level: usize,
    index: usize,
    edge: VecEdge,
}

impl PartialEq for Frontier {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Frontier {}
impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        // Ties favour the lower basis index so the listing is stable.
        self.bound.total_cmp(&other.bound).then_with(|| other.index.cmp(&self.index))
    }
}

/// Best-first walk over the diagram. Every vector node is a unit vector, so
/// the magnitude of the accumulated weight bounds every amplitude below it
/// and leaves come off the heap in descending order of magnitude.
fn largest_amplitudes(pkg: &Package, state: VecEdge, limit: usize) -> Vec<(usize, Amplitude)> {
    let n = pkg.num_qubits();
    let mut out = Vec::new();
    let mut heap = BinaryHeap::new();
    if !state.is_zero() {
        heap.push(Frontier { bound: state.weight.norm(), level: 0, index: 0, edge: state });
    }
    while let Some(f) = heap.pop() {
        if out.len() >= limit {
            break;
        }
        let Some(succ) = pkg.vector_successors(f.edge.node) else {
            out.push((f.index, f.edge.weight));
            continue;
        };
        for (b, e) in succ.into_iter().enumerate() {
            if e.is_zero() {
                continue;
            }
            let w = f.edge.weight * e.weight;
            let index = f.index | (b << (n - 1 - f.level));
            heap.push(Frontier { bound: w.norm(), level: f.level + 1, index, edge: VecEdge::new(w, e.node) });
        }
    }
    out
}

#[derive(Serialize, Debug)]
pub struct ModeProfile {
    pub mode: ReorderMode,
    pub swaps_removed: usize,
    /// Node count of the state after each applied gate; entry 0 is `|0…0⟩`.
    pub nodes: Vec<usize>,
    /// Mnemonic of each applied gate, aligned with `nodes[1..]`.
    pub gates: Vec<&'static str>,
    pub wall_ms: f64,
}

/// Node count after every gate for each requested mode. `now` returns
/// milliseconds and is only used for the per-mode timing.
pub fn profile_json(qasm: &str, modes: &str, now: &dyn Fn() -> f64) -> Result<String, String> {
    let circuit = load(qasm)?;
    let modes = modes
        .split(',')
        .map(str::trim)
        .filter(|m| !m.is_empty())
        .map(parse_mode)
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = Vec::new();
    for mode in modes {
        let (rewritten, report) = reorder(&circuit, mode);
        let start = now();
        let mut pkg = Package::new(rewritten.num_qubits);
        let mut state = pkg.zero_state();
        let mut nodes = vec![pkg.count_nodes(state)];
        let mut gates = Vec::with_capacity(rewritten.gates.len());
        for g in &rewritten.gates {
            let op = pkg.gate_dd(g).map_err(|e| e.to_string())?;
            state = pkg.apply(op, state);
            nodes.push(pkg.count_nodes(state));
            gates.push(g.kind.mnemonic());
            pkg.maybe_collect(&[state], &[]);
        }
        out.push(ModeProfile { mode, swaps_removed: report.swaps_removed, nodes, gates, wall_ms: now() - start });
    }
    Ok(serde_json::to_string(&out).expect("serializable"))
}

#[cfg(target_arch = "wasm32")]
fn now_ms() -> f64 {
    js_sys::Date::now()
}

#[cfg(not(target_arch = "wasm32"))]
fn now_ms() -> f64 {
    0.0
}

#[wasm_bindgen]
pub fn generate(family: &str, qubits: usize, phase_k: u64) -> Result<String, JsError> {
    generate_qasm(family, qubits, phase_k).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn simulate(qasm: &str, mode: &str, limit: usize) -> Result<String, JsError> {
    simulate_json(qasm, mode, limit).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn profile(qasm: &str, modes: &str) -> Result<String, JsError> {
    profile_json(qasm, modes, &now_ms).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn rewrite(qasm: &str, mode: &str) -> Result<String, JsError> {
    rewrite_qasm(qasm, mode).map_err(|e| JsError::new(&e))
}
