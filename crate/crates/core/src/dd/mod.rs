//! Quasi-reduced edge-weighted decision diagrams for state vectors and
//! operator matrices.
//!
//! Vector nodes have two successors (`|0⟩`, `|1⟩` branch of their qubit) and
//! matrix nodes four, in row-major order `e00, e01, e10, e11`. Qubit 0 is
//! the top level. Levels are never skipped: every nonzero successor of a node
//! at level `q` points to a node at level `q + 1`, or to the terminal when
//! `q` is the last qubit. A zero edge is always `(0, terminal)`.
//!
//! Vector nodes are normalized to unit L2 norm with the phase of the first
//! nonzero successor pulled out, so every vector node denotes a unit vector
//! and weights stay O(1) however deep the diagram is. Matrix nodes divide
//! by their first nonzero successor weight, which becomes exactly 1; gate
//! diagrams then carry identity blocks with unit weights. Successor weights
//! are snapped through a real number table with absolute tolerance [`EPS`]
//! per component before they enter a node key.

mod gate;
mod table;

use std::fmt;
use std::marker::PhantomData;

use num_complex::Complex64;
use rustc_hash::{FxHashMap, FxHashSet};
use thiserror::Error;

use crate::circuit::{GateError, Violation};
use table::{ComputeTable, RealTable};

pub use gate::gate_dd;

/// Absolute per-component tolerance for weight equality.
pub const EPS: f64 = 1e-12;

/// Complex edge weight / probability amplitude.
pub type Amplitude = Complex64;

/// Tolerance-aware equality used throughout the package.
pub fn approx_eq(a: Amplitude, b: Amplitude) -> bool {
    (a.re - b.re).abs() < EPS && (a.im - b.im).abs() < EPS
}

const ZERO_W: Complex64 = Complex64::new(0.0, 0.0);
const ONE_W: Complex64 = Complex64::new(1.0, 0.0);
const FREE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(u32);

impl NodeId {
    pub const TERMINAL: NodeId = NodeId(0);

    pub fn is_terminal(self) -> bool {
        self.0 == 0
    }

    pub fn index(self) -> u32 {
        self.0
    }
}

/// Marker for vector (state) diagrams.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Vector {}
/// Marker for matrix (operator) diagrams.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Matrix {}

/// Weighted edge into a node of package-wide identity `node`. The marker
/// keeps vector and matrix diagrams apart at compile time:
///
/// ```compile_fail
/// use qmdd::dd::Package;
/// let mut p = Package::new(1);
/// let psi = p.basis_state("0").unwrap();
/// p.apply(psi, psi);
/// ```
pub struct Edge<K> {
    pub weight: Amplitude,
    pub node: NodeId,
    _kind: PhantomData<K>,
}

pub type VecEdge = Edge<Vector>;
pub type MatEdge = Edge<Matrix>;

impl<K> Clone for Edge<K> {
    fn clone(&self) -> Self {
        *self
    }
}
impl<K> Copy for Edge<K> {}

impl<K> PartialEq for Edge<K> {
    fn eq(&self, other: &Self) -> bool {
        self.weight == other.weight && self.node == other.node
    }
}

impl<K> fmt::Debug for Edge<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Edge({}, n{})", self.weight, self.node.0)
    }
}

impl<K> Edge<K> {
    pub fn new(weight: Amplitude, node: NodeId) -> Self {
        Edge { weight, node, _kind: PhantomData }
    }

    pub fn zero() -> Self {
        Edge::new(ZERO_W, NodeId::TERMINAL)
    }

    pub fn terminal(weight: Amplitude) -> Self {
        Edge::new(weight, NodeId::TERMINAL)
    }

    pub fn is_zero(&self) -> bool {
        self.weight == ZERO_W
    }

    /// Same node, weights equal within [`EPS`].
    pub fn approx_eq(&self, other: &Self) -> bool {
        self.node == other.node && approx_eq(self.weight, other.weight)
    }

    fn raw(self) -> Raw {
        Raw { w: self.weight, n: self.node.0 }
    }

    fn from_raw(r: Raw) -> Self {
        Edge::new(r.w, NodeId(r.n))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Raw {
    w: Complex64,
    n: u32,
}

impl Raw {
    const ZERO: Raw = Raw { w: ZERO_W, n: 0 };

    fn is_zero(self) -> bool {
        self.w == ZERO_W
    }

    fn scaled(self, f: Complex64) -> Raw {
        if self.is_zero() {
            self
        } else {
            Raw { w: self.w * f, n: self.n }
        }
    }

    fn key(self) -> (u64, u64, u32) {
        (self.w.re.to_bits(), self.w.im.to_bits(), self.n)
    }
}

#[derive(Clone, Copy, Debug)]
struct Slot<const K: usize> {
    level: u32,
    succ: [Raw; K],
    /// Matrix nodes only: the node is the identity on all levels below it.
    ident: bool,
}

type Key<const K: usize> = (u32, [(u64, u64, u32); K]);

/// Node arena plus its unique table.
#[derive(Debug)]
struct Store<const K: usize> {
    slots: Vec<Slot<K>>,
    unique: FxHashMap<Key<K>, u32>,
    free: Vec<u32>,
}

impl<const K: usize> Store<K> {
    fn new() -> Self {
        // Slot 0 is the terminal.
        let terminal = Slot { level: FREE - 1, succ: [Raw::ZERO; K], ident: true };
        Store { slots: vec![terminal], unique: FxHashMap::default(), free: Vec::new() }
    }

    fn key(level: u32, succ: &[Raw; K]) -> Key<K> {
        (level, succ.map(Raw::key))
    }

    fn intern(&mut self, level: u32, succ: [Raw; K], ident: bool) -> u32 {
        let key = Self::key(level, &succ);
        if let Some(&id) = self.unique.get(&key) {
            return id;
        }
        let slot = Slot { level, succ, ident };
        let id = match self.free.pop() {
            Some(id) => {
                self.slots[id as usize] = slot;
                id
            }
            None => {
                self.slots.push(slot);
                (self.slots.len() - 1) as u32
            }
        };
        self.unique.insert(key, id);
        id
    }

    fn live(&self) -> usize {
        self.unique.len()
    }

    fn get(&self, id: u32) -> &Slot<K> {
        &self.slots[id as usize]
    }

    fn mark(&self, roots: impl IntoIterator<Item = u32>, marks: &mut [bool]) {
        let mut stack: Vec<u32> = roots.into_iter().collect();
        while let Some(id) = stack.pop() {
            if id == 0 || marks[id as usize] {
                continue;
            }
            marks[id as usize] = true;
            for s in &self.slots[id as usize].succ {
                if s.n != 0 && !marks[s.n as usize] {
                    stack.push(s.n);
                }
            }
        }
    }

    fn sweep(&mut self, marks: &[bool]) -> usize {
        let mut reclaimed = 0;
        for (id, slot) in self.slots.iter_mut().enumerate().skip(1) {
            if slot.level == FREE || marks[id] {
                continue;
            }
            self.unique.remove(&Self::key(slot.level, &slot.succ));
            slot.level = FREE;
            self.free.push(id as u32);
            reclaimed += 1;
        }
        reclaimed
    }

    fn weights(&self) -> impl Iterator<Item = f64> + '_ {
        self.slots
            .iter()
            .skip(1)
            .filter(|s| s.level != FREE)
            .flat_map(|s| s.succ.iter().flat_map(|e| [e.w.re, e.w.im]))
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum DdError {
    #[error("level {level} out of range for {num_qubits} qubits")]
    LevelOutOfRange { level: usize, num_qubits: usize },
    #[error("successor {index} of a level-{level} node must target level {expected}")]
    SuccessorLevel { level: usize, index: usize, expected: usize },
    #[error("bitstring has length {found}, expected {expected}")]
    BitstringLength { expected: usize, found: usize },
    #[error("invalid character {0:?} in bitstring")]
    InvalidBit(char),
    #[error("invalid gate: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidGate(Vec<Violation>),
    #[error(transparent)]
    Gate(#[from] GateError),
    #[error("vector has length {found}, expected {expected}")]
    VectorLength { expected: usize, found: usize },
}

#[derive(Clone, Copy, Debug)]
pub struct PackageConfig {
    /// Slots per compute table (power of two).
    pub compute_capacity: usize,
    /// Live vector-node count above which [`Package::maybe_collect`] runs gc.
    pub gc_high_water: usize,
}

impl Default for PackageConfig {
    fn default() -> Self {
        PackageConfig { compute_capacity: 1 << 20, gc_high_water: 1 << 22 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PackageStats {
    pub live_vector_nodes: usize,
    pub live_matrix_nodes: usize,
    pub real_table_entries: usize,
    pub gc_runs: usize,
    pub mul_hits: u64,
    pub mul_misses: u64,
    pub add_hits: u64,
    pub add_misses: u64,
}

type MulKey = (u32, u32);
type AddKey = (u32, u32, u64, u64);

/// A single-threaded decision-diagram package over a fixed number of qubits.
pub struct Package {
    num_qubits: usize,
    config: PackageConfig,
    reals: RealTable,
    vectors: Store<2>,
    matrices: Store<4>,
    mul_cache: ComputeTable<MulKey, Raw>,
    vadd_cache: ComputeTable<AddKey, Raw>,
    madd_cache: ComputeTable<AddKey, Raw>,
    /// `identities[q]` is the identity on levels `q..n`; the last entry is
    /// the terminal.
    identities: Vec<Raw>,
    gc_runs: usize,
    gc_high_water: usize,
}

impl fmt::Debug for Package {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Package")
            .field("num_qubits", &self.num_qubits)
            .field("stats", &self.stats())
            .finish()
    }
}

impl Package {
    pub fn new(num_qubits: usize) -> Self {
        Self::with_config(num_qubits, PackageConfig::default())
    }

    pub fn with_config(num_qubits: usize, config: PackageConfig) -> Self {
        let mut p = Package {
            num_qubits,
            config,
            reals: RealTable::new(),
            vectors: Store::new(),
            matrices: Store::new(),
            mul_cache: ComputeTable::new(config.compute_capacity),
            vadd_cache: ComputeTable::new(config.compute_capacity),
            madd_cache: ComputeTable::new(config.compute_capacity),
            identities: Vec::new(),
            gc_runs: 0,
            gc_high_water: config.gc_high_water,
        };
        p.build_identities();
        p
    }

    fn build_identities(&mut self) {
        let n = self.num_qubits;
        let mut ids = vec![Raw::ZERO; n + 1];
        ids[n] = Raw { w: ONE_W, n: 0 };
        for q in (0..n).rev() {
            let below = ids[q + 1];
            ids[q] = self.mnode(q as u32, [below, Raw::ZERO, Raw::ZERO, below]);
        }
        self.identities = ids;
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn config(&self) -> PackageConfig {
        self.config
    }

    pub fn stats(&self) -> PackageStats {
        PackageStats {
            live_vector_nodes: self.vectors.live(),
            live_matrix_nodes: self.matrices.live(),
            real_table_entries: self.reals.len(),
            gc_runs: self.gc_runs,
            mul_hits: self.mul_cache.hits,
            mul_misses: self.mul_cache.misses,
            add_hits: self.vadd_cache.hits + self.madd_cache.hits,
            add_misses: self.vadd_cache.misses + self.madd_cache.misses,
        }
    }

    /// Level of the node an edge points to; the terminal sits at `num_qubits`.
    pub fn vector_level(&self, e: VecEdge) -> usize {
        self.level_of(self.vectors.get(e.node.0).level, e.node)
    }

    pub fn matrix_level(&self, e: MatEdge) -> usize {
        self.level_of(self.matrices.get(e.node.0).level, e.node)
    }

    fn level_of(&self, stored: u32, node: NodeId) -> usize {
        if node.is_terminal() {
            self.num_qubits
        } else {
            stored as usize
        }
    }

    pub fn vector_successors(&self, node: NodeId) -> Option<[VecEdge; 2]> {
        if node.is_terminal() {
            return None;
        }
        Some(self.vectors.get(node.0).succ.map(Edge::from_raw))
    }

    pub fn matrix_successors(&self, node: NodeId) -> Option<[MatEdge; 4]> {
        if node.is_terminal() {
            return None;
        }
        Some(self.matrices.get(node.0).succ.map(Edge::from_raw))
    }

    fn canon(&mut self, z: Complex64) -> Complex64 {
        self.reals.lookup_complex(z)
    }

    /// Vector rule: the successor weights are divided by their L2 norm times
    /// the phase of the first nonzero successor, so every vector node
    /// denotes a unit vector and its first nonzero successor weight is real
    /// and positive. Returns the factor moved onto the incoming edge, or
    /// `None` when the node would be zero.
    fn normalize_vector(&mut self, succ: &mut [Raw; 2]) -> Option<Complex64> {
        let norm = succ.iter().map(|e| e.w.norm_sqr()).sum::<f64>().sqrt();
        if norm < EPS {
            return None;
        }
        let mut top = None;
        for e in succ.iter_mut() {
            if e.is_zero() || e.w.norm() / norm < EPS {
                *e = Raw::ZERO;
                continue;
            }
            let t = *top.get_or_insert_with(|| e.w / e.w.norm() * norm);
            e.w = self.canon(e.w / t);
            if e.w == ZERO_W {
                *e = Raw::ZERO;
            }
        }
        top
    }

    /// Matrix rule: divide by the first nonzero successor weight, which
    /// becomes exactly 1.
    fn normalize_matrix(&mut self, succ: &mut [Raw; 4]) -> Option<Complex64> {
        let mut top = None;
        for e in succ.iter_mut() {
            e.w = self.canon(e.w);
            if e.w == ZERO_W {
                *e = Raw::ZERO;
                continue;
            }
            match top {
                None => {
                    top = Some(e.w);
                    e.w = ONE_W;
                }
                Some(t) => {
                    e.w = self.canon(e.w / t);
                    if e.w == ZERO_W {
                        *e = Raw::ZERO;
                    }
                }
            }
        }
        top
    }

    fn vnode(&mut self, level: u32, mut succ: [Raw; 2]) -> Raw {
        match self.normalize_vector(&mut succ) {
            None => Raw::ZERO,
            Some(top) => Raw { w: top, n: self.vectors.intern(level, succ, false) },
        }
    }

    fn mnode(&mut self, level: u32, mut succ: [Raw; 4]) -> Raw {
        match self.normalize_matrix(&mut succ) {
            None => Raw::ZERO,
            Some(top) => {
                let ident = succ[1].is_zero()
                    && succ[2].is_zero()
                    && succ[0] == succ[3]
                    && succ[0].w == ONE_W
                    && self.matrices.get(succ[0].n).ident;
                Raw { w: top, n: self.matrices.intern(level, succ, ident) }
            }
        }
    }

    fn check_successors<K>(&self, level: usize, succ: &[Edge<K>], levels: impl Fn(&Self, Edge<K>) -> usize) -> Result<(), DdError> {
        if level >= self.num_qubits {
            return Err(DdError::LevelOutOfRange { level, num_qubits: self.num_qubits });
        }
        for (index, &e) in succ.iter().enumerate() {
            if !e.is_zero() && levels(self, e) != level + 1 {
                return Err(DdError::SuccessorLevel { level, index, expected: level + 1 });
            }
        }
        Ok(())
    }

    /// Builds (or finds) the normalized vector node with the given branches.
    pub fn make_vector_node(&mut self, level: usize, e0: VecEdge, e1: VecEdge) -> Result<VecEdge, DdError> {
        self.check_successors(level, &[e0, e1], |p, e| p.vector_level(e))?;
        Ok(Edge::from_raw(self.vnode(level as u32, [e0.raw(), e1.raw()])))
    }

    /// Builds (or finds) the normalized matrix node with successors in
    /// row-major order.
    pub fn make_matrix_node(&mut self, level: usize, succ: [MatEdge; 4]) -> Result<MatEdge, DdError> {
        self.check_successors(level, &succ, |p, e| p.matrix_level(e))?;
        Ok(Edge::from_raw(self.mnode(level as u32, succ.map(Edge::raw))))
    }

    fn parse_bits(&self, bits: &str) -> Result<Vec<bool>, DdError> {
        let out = bits
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(DdError::InvalidBit(other)),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if out.len() != self.num_qubits {
            return Err(DdError::BitstringLength { expected: self.num_qubits, found: out.len() });
        }
        Ok(out)
    }

    /// Product state `|bits⟩`, with `bits[0]` the value of qubit 0.
    pub fn basis_state(&mut self, bits: &str) -> Result<VecEdge, DdError> {
        let bits = self.parse_bits(bits)?;
        let mut e = Raw { w: ONE_W, n: 0 };
        for (q, &b) in bits.iter().enumerate().rev() {
            let succ = if b { [Raw::ZERO, e] } else { [e, Raw::ZERO] };
            e = self.vnode(q as u32, succ);
        }
        Ok(Edge::from_raw(e))
    }

    /// Builds the diagram of a dense vector of length `2^n`.
    pub fn from_vector(&mut self, amplitudes: &[Amplitude]) -> Result<VecEdge, DdError> {
        if amplitudes.len() != 1usize << self.num_qubits {
            return Err(DdError::VectorLength { expected: 1usize << self.num_qubits, found: amplitudes.len() });
        }
        let r = self.build_vector(0, amplitudes);
        Ok(Edge::from_raw(r))
    }

    fn build_vector(&mut self, level: usize, amps: &[Amplitude]) -> Raw {
        if level == self.num_qubits {
            return if amps[0] == ZERO_W { Raw::ZERO } else { Raw { w: amps[0], n: 0 } };
        }
        let (lo, hi) = amps.split_at(amps.len() / 2);
        let e0 = self.build_vector(level + 1, lo);
        let e1 = self.build_vector(level + 1, hi);
        self.vnode(level as u32, [e0, e1])
    }

    /// `|0…0⟩`.
    pub fn zero_state(&mut self) -> VecEdge {
        let bits = "0".repeat(self.num_qubits);
        self.basis_state(&bits).expect("length matches")
    }

    pub fn identity(&self) -> MatEdge {
        Edge::from_raw(self.identities[0])
    }

    /// Product of edge weights along the path selected by `bits`.
    pub fn amplitude(&self, state: VecEdge, bits: &str) -> Result<Amplitude, DdError> {
        let bits = self.parse_bits(bits)?;
        let mut w = state.weight;
        let mut node = state.node.0;
        for b in bits {
            if w == ZERO_W || node == 0 {
                break;
            }
            let e = self.vectors.get(node).succ[b as usize];
            w *= e.w;
            node = e.n;
        }
        Ok(w)
    }

    /// Amplitude of basis index `index` (qubit 0 is the most significant bit).
    pub fn amplitude_at(&self, state: VecEdge, index: usize) -> Amplitude {
        let n = self.num_qubits;
        let mut w = state.weight;
        let mut node = state.node.0;
        for q in 0..n {
            if w == ZERO_W || node == 0 {
                break;
            }
            let b = (index >> (n - 1 - q)) & 1;
            let e = self.vectors.get(node).succ[b];
            w *= e.w;
            node = e.n;
        }
        w
    }

    /// Expands the whole state into a dense vector of length `2^n`.
    pub fn to_vector(&self, state: VecEdge) -> Vec<Amplitude> {
        let n = self.num_qubits;
        let mut out = vec![ZERO_W; 1usize << n];
        self.expand(state.raw(), 0, 0, &mut out);
        out
    }

    fn expand(&self, e: Raw, level: usize, offset: usize, out: &mut [Amplitude]) {
        if e.is_zero() {
            return;
        }
        if level == self.num_qubits {
            out[offset] = e.w;
            return;
        }
        let half = 1usize << (self.num_qubits - 1 - level);
        let [e0, e1] = self.vectors.get(e.n).succ;
        self.expand(e0.scaled(e.w), level + 1, offset, out);
        self.expand(e1.scaled(e.w), level + 1, offset + half, out);
    }

    /// Number of distinct nonterminal nodes reachable from `e`.
    pub fn count_nodes(&self, e: VecEdge) -> usize {
        count_reachable(&self.vectors, e.node.0)
    }

    pub fn count_matrix_nodes(&self, e: MatEdge) -> usize {
        count_reachable(&self.matrices, e.node.0)
    }

    /// Probability that the qubits fixed in `pattern` (indexed by level) take
    /// the given values; `None` entries are summed over.
    pub fn probability(&self, state: VecEdge, pattern: &[Option<bool>]) -> Result<f64, DdError> {
        if pattern.len() != self.num_qubits {
            return Err(DdError::BitstringLength { expected: self.num_qubits, found: pattern.len() });
        }
        let mut memo = FxHashMap::default();
        Ok(state.weight.norm_sqr() * self.restricted_norm_sqr(state.node.0, pattern, &mut memo))
    }

    fn restricted_norm_sqr(&self, node: u32, pattern: &[Option<bool>], memo: &mut FxHashMap<u32, f64>) -> f64 {
        if node == 0 {
            return 1.0;
        }
        if let Some(&v) = memo.get(&node) {
            return v;
        }
        let slot = self.vectors.get(node);
        let mut total = 0.0;
        for (b, e) in slot.succ.iter().enumerate() {
            if e.is_zero() || pattern[slot.level as usize].is_some_and(|want| want != (b == 1)) {
                continue;
            }
            total += e.w.norm_sqr() * self.restricted_norm_sqr(e.n, pattern, memo);
        }
        memo.insert(node, total);
        total
    }

    /// Matrix-vector product `op · state`.
    pub fn apply(&mut self, op: MatEdge, state: VecEdge) -> VecEdge {
        let r = self.mul(op.raw(), state.raw());
        let w = self.canon(r.w);
        if w == ZERO_W {
            VecEdge::zero()
        } else {
            Edge::new(w, NodeId(r.n))
        }
    }

    fn mul(&mut self, m: Raw, v: Raw) -> Raw {
        if m.is_zero() || v.is_zero() {
            return Raw::ZERO;
        }
        let w = m.w * v.w;
        let slot = *self.matrices.get(m.n);
        if slot.ident {
            return Raw { w, n: v.n };
        }
        let r = match self.mul_cache.get(&(m.n, v.n)) {
            Some(r) => r,
            None => {
                let [v0, v1] = self.vectors.get(v.n).succ;
                let [m00, m01, m10, m11] = slot.succ;
                let a = self.mul(m00, v0);
                let b = self.mul(m01, v1);
                let r0 = self.vadd(a, b);
                let a = self.mul(m10, v0);
                let b = self.mul(m11, v1);
                let r1 = self.vadd(a, b);
                let r = self.vnode(slot.level, [r0, r1]);
                self.mul_cache.insert((m.n, v.n), r);
                r
            }
        };
        r.scaled(w)
    }

    /// Elementwise sum of two vector diagrams. The result is not renormalized
    /// to unit norm.
    pub fn add(&mut self, a: VecEdge, b: VecEdge) -> VecEdge {
        let r = self.vadd(a.raw(), b.raw());
        let w = self.canon(r.w);
        if w == ZERO_W {
            VecEdge::zero()
        } else {
            Edge::new(w, NodeId(r.n))
        }
    }

    /// Elementwise sum of two matrix diagrams.
    pub fn add_matrices(&mut self, a: MatEdge, b: MatEdge) -> MatEdge {
        let r = self.madd(a.raw(), b.raw());
        let w = self.canon(r.w);
        if w == ZERO_W {
            MatEdge::zero()
        } else {
            Edge::new(w, NodeId(r.n))
        }
    }

    /// Shared front half of vector and matrix addition. Returns either the
    /// finished sum or the ordered operands and their weight ratio.
    fn add_prelude(&mut self, a: Raw, b: Raw) -> Result<Raw, (Raw, Raw, Complex64)> {
        if a.is_zero() {
            return Ok(b);
        }
        if b.is_zero() {
            return Ok(a);
        }
        if a.n == b.n {
            let w = self.canon(a.w + b.w);
            return Ok(if w == ZERO_W { Raw::ZERO } else { Raw { w, n: a.n } });
        }
        let (a, b) = if a.n < b.n { (a, b) } else { (b, a) };
        let ratio = self.canon(b.w / a.w);
        if ratio == ZERO_W {
            return Ok(a);
        }
        Err((a, b, ratio))
    }

    fn vadd(&mut self, a: Raw, b: Raw) -> Raw {
        let (a, b, ratio) = match self.add_prelude(a, b) {
            Ok(r) => return r,
            Err(parts) => parts,
        };
        let key = (a.n, b.n, ratio.re.to_bits(), ratio.im.to_bits());
        let r = match self.vadd_cache.get(&key) {
            Some(r) => r,
            None => {
                let sa = *self.vectors.get(a.n);
                let sb = self.vectors.get(b.n).succ;
                let r0 = self.vadd(sa.succ[0], sb[0].scaled(ratio));
                let r1 = self.vadd(sa.succ[1], sb[1].scaled(ratio));
                let r = self.vnode(sa.level, [r0, r1]);
                self.vadd_cache.insert(key, r);
                r
            }
        };
        r.scaled(a.w)
    }

    fn madd(&mut self, a: Raw, b: Raw) -> Raw {
        let (a, b, ratio) = match self.add_prelude(a, b) {
            Ok(r) => return r,
            Err(parts) => parts,
        };
        let key = (a.n, b.n, ratio.re.to_bits(), ratio.im.to_bits());
        let r = match self.madd_cache.get(&key) {
            Some(r) => r,
            None => {
                let sa = *self.matrices.get(a.n);
                let sb = self.matrices.get(b.n).succ;
                let mut out = [Raw::ZERO; 4];
                for i in 0..4 {
                    out[i] = self.madd(sa.succ[i], sb[i].scaled(ratio));
                }
                let r = self.mnode(sa.level, out);
                self.madd_cache.insert(key, r);
                r
            }
        };
        r.scaled(a.w)
    }

    /// Mark-and-sweep from `vector_roots` and `matrix_roots`; identity
    /// diagrams always survive. Returns the number of reclaimed nodes.
    /// Compute tables are flushed because their keys name node slots.
    pub fn collect_garbage(&mut self, vector_roots: &[VecEdge], matrix_roots: &[MatEdge]) -> usize {
        let mut vmarks = vec![false; self.vectors.slots.len()];
        self.vectors.mark(vector_roots.iter().map(|e| e.node.0), &mut vmarks);
        let mut mmarks = vec![false; self.matrices.slots.len()];
        let mroots = matrix_roots.iter().map(|e| e.node.0).chain(self.identities.iter().map(|r| r.n));
        self.matrices.mark(mroots, &mut mmarks);

        let reclaimed = self.vectors.sweep(&vmarks) + self.matrices.sweep(&mmarks);
        self.mul_cache.clear();
        self.vadd_cache.clear();
        self.madd_cache.clear();
        let keep: Vec<f64> = self
            .vectors
            .weights()
            .chain(self.matrices.weights())
            .chain(vector_roots.iter().flat_map(|e| [e.weight.re, e.weight.im]))
            .chain(matrix_roots.iter().flat_map(|e| [e.weight.re, e.weight.im]))
            .collect();
        self.reals.rebuild(keep);
        self.gc_runs += 1;
        reclaimed
    }

    /// Runs gc when live vector nodes exceed the high-water mark. The mark
    /// doubles if a collection frees less than a tenth of it.
    pub fn maybe_collect(&mut self, vector_roots: &[VecEdge], matrix_roots: &[MatEdge]) -> Option<usize> {
        if self.vectors.live() <= self.gc_high_water {
            return None;
        }
        let reclaimed = self.collect_garbage(vector_roots, matrix_roots);
        if self.vectors.live() * 10 > self.gc_high_water * 9 {
            self.gc_high_water *= 2;
        }
        Some(reclaimed)
    }

    pub(super) fn identity_below(&self, level: usize) -> Raw {
        self.identities[level]
    }

    pub(super) fn mnode_raw(&mut self, level: usize, succ: [Raw; 4]) -> Raw {
        self.mnode(level as u32, succ)
    }

    pub(super) fn canon_raw(&mut self, z: Complex64) -> Complex64 {
        self.canon(z)
    }
}

fn count_reachable<const K: usize>(store: &Store<K>, root: u32) -> usize {
    let mut seen = FxHashSet::default();
    let mut stack = vec![root];
    while let Some(id) = stack.pop() {
        if id == 0 || !seen.insert(id) {
            continue;
        }
        for s in &store.get(id).succ {
            if s.n != 0 {
                stack.push(s.n);
            }
        }
    }
    seen.len()
}

#[cfg(test)]
mod tests;
