//! Gate and circuit data model.
//!
//! Wire convention shared by every module: qubit 0 is the most significant
//! bit of a basis index and the top level of a decision diagram. A basis
//! string is written `q0 q1 ... q(n-1)` from left to right.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    S,
    Sdg,
    T,
    Tdg,
    P,
    Rz,
    Cx,
    Cp,
    Mcp,
    Swap,
}

impl GateKind {
    pub fn is_parameterized(self) -> bool {
        matches!(self, GateKind::P | GateKind::Rz | GateKind::Cp | GateKind::Mcp)
    }

    /// Lower-case mnemonic used by the QASM subset.
    pub fn mnemonic(self) -> &'static str {
        match self {
            GateKind::H => "h",
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::S => "s",
            GateKind::Sdg => "sdg",
            GateKind::T => "t",
            GateKind::Tdg => "tdg",
            GateKind::P => "p",
            GateKind::Rz => "rz",
            GateKind::Cx => "cx",
            GateKind::Cp => "cp",
            GateKind::Mcp => "mcp",
            GateKind::Swap => "swap",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    /// Rotation angle in radians, present exactly for parameterized kinds.
    pub angle: Option<f64>,
    pub controls: Vec<usize>,
    pub targets: Vec<usize>,
}

impl Gate {
    fn single(kind: GateKind, q: usize) -> Self {
        Gate { kind, angle: None, controls: vec![], targets: vec![q] }
    }

    pub fn h(q: usize) -> Self {
        Self::single(GateKind::H, q)
    }
    pub fn x(q: usize) -> Self {
        Self::single(GateKind::X, q)
    }
    pub fn y(q: usize) -> Self {
        Self::single(GateKind::Y, q)
    }
    pub fn z(q: usize) -> Self {
        Self::single(GateKind::Z, q)
    }
    pub fn s(q: usize) -> Self {
        Self::single(GateKind::S, q)
    }
    pub fn sdg(q: usize) -> Self {
        Self::single(GateKind::Sdg, q)
    }
    pub fn t(q: usize) -> Self {
        Self::single(GateKind::T, q)
    }
    pub fn tdg(q: usize) -> Self {
        Self::single(GateKind::Tdg, q)
    }
    pub fn p(angle: f64, q: usize) -> Self {
        Gate { kind: GateKind::P, angle: Some(angle), controls: vec![], targets: vec![q] }
    }
    pub fn rz(angle: f64, q: usize) -> Self {
        Gate { kind: GateKind::Rz, angle: Some(angle), controls: vec![], targets: vec![q] }
    }
    pub fn cx(control: usize, target: usize) -> Self {
        Gate { kind: GateKind::Cx, angle: None, controls: vec![control], targets: vec![target] }
    }
    pub fn cp(angle: f64, control: usize, target: usize) -> Self {
        Gate { kind: GateKind::Cp, angle: Some(angle), controls: vec![control], targets: vec![target] }
    }
    pub fn mcp(angle: f64, controls: Vec<usize>, target: usize) -> Self {
        Gate { kind: GateKind::Mcp, angle: Some(angle), controls, targets: vec![target] }
    }
    pub fn swap(a: usize, b: usize) -> Self {
        Gate { kind: GateKind::Swap, angle: None, controls: vec![], targets: vec![a, b] }
    }

    pub fn is_swap(&self) -> bool {
        self.kind == GateKind::Swap
    }

    /// All wires in unitary order: controls first, then targets.
    pub fn wires(&self) -> impl Iterator<Item = usize> + '_ {
        self.controls.iter().chain(self.targets.iter()).copied()
    }

    pub fn arity(&self) -> usize {
        self.controls.len() + self.targets.len()
    }

    /// The gate implementing the inverse operator.
    pub fn inverse(&self) -> Gate {
        let mut g = self.clone();
        g.kind = match self.kind {
            GateKind::S => GateKind::Sdg,
            GateKind::Sdg => GateKind::S,
            GateKind::T => GateKind::Tdg,
            GateKind::Tdg => GateKind::T,
            k => k,
        };
        g.angle = self.angle.map(|a| -a);
        g
    }

    /// Replaces every wire `w` by `perm.map[w]`.
    pub fn relabel(&self, perm: &QubitPermutation) -> Gate {
        Gate {
            kind: self.kind,
            angle: self.angle,
            controls: self.controls.iter().map(|&w| perm.map[w]).collect(),
            targets: self.targets.iter().map(|&w| perm.map[w]).collect(),
        }
    }

    /// Whether the gate's unitary is diagonal in the computational basis.
    pub fn is_diagonal(&self) -> bool {
        matches!(
            self.kind,
            GateKind::Z
                | GateKind::S
                | GateKind::Sdg
                | GateKind::T
                | GateKind::Tdg
                | GateKind::P
                | GateKind::Rz
                | GateKind::Cp
                | GateKind::Mcp
        )
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind.mnemonic())?;
        if let Some(a) = self.angle {
            write!(f, "({a})")?;
        }
        let wires: Vec<String> = self.wires().map(|w| w.to_string()).collect();
        write!(f, " {}", wires.join(","))
    }
}

/// Relabels one gate under `perm`. Free-function form of [`Gate::relabel`].
pub fn relabel_gate(gate: &Gate, perm: &QubitPermutation) -> Gate {
    gate.relabel(perm)
}

#[derive(Debug, Error, PartialEq)]
pub enum PermutationError {
    #[error("permutation entry {value} at position {position} is out of range for {len} qubits")]
    OutOfRange { position: usize, value: usize, len: usize },
    #[error("permutation maps two qubits onto wire {0}")]
    Duplicate(usize),
}

/// Bijection from original qubit labels to the wires currently holding them:
/// `map[q]` is the wire carrying original qubit `q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QubitPermutation {
    map: Vec<usize>,
}

impl QubitPermutation {
    pub fn identity(n: usize) -> Self {
        QubitPermutation { map: (0..n).collect() }
    }

    pub fn from_vec(map: Vec<usize>) -> Result<Self, PermutationError> {
        let n = map.len();
        let mut seen = vec![false; n];
        for (position, &value) in map.iter().enumerate() {
            if value >= n {
                return Err(PermutationError::OutOfRange { position, value, len: n });
            }
            if seen[value] {
                return Err(PermutationError::Duplicate(value));
            }
            seen[value] = true;
        }
        Ok(QubitPermutation { map })
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    pub fn get(&self, q: usize) -> usize {
        self.map[q]
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &w)| i == w)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.map.len()];
        for (q, &w) in self.map.iter().enumerate() {
            inv[w] = q;
        }
        QubitPermutation { map: inv }
    }

    /// Records a removed SWAP(a, b): whatever the source circuit holds on
    /// wire `a` now lives where `b`'s content lived, and vice versa.
    pub fn swap_entries(&mut self, a: usize, b: usize) {
        self.map.swap(a, b);
    }

    /// `self` followed by `then`: original `q` ends on `then[self[q]]`.
    pub fn then(&self, then: &QubitPermutation) -> Self {
        QubitPermutation { map: self.map.iter().map(|&w| then.map[w]).collect() }
    }
}

impl fmt::Display for QubitPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.map.iter().map(|w| w.to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    pub num_qubits: usize,
    pub gates: Vec<Gate>,
    pub output_permutation: QubitPermutation,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Circuit {
            num_qubits,
            gates: Vec::new(),
            output_permutation: QubitPermutation::identity(num_qubits),
        }
    }

    pub fn with_gates(num_qubits: usize, gates: Vec<Gate>) -> Self {
        Circuit { gates, ..Circuit::new(num_qubits) }
    }

    pub fn push(&mut self, gate: Gate) -> &mut Self {
        self.gates.push(gate);
        self
    }

    pub fn extend<I: IntoIterator<Item = Gate>>(&mut self, gates: I) -> &mut Self {
        self.gates.extend(gates);
        self
    }

    pub fn swap_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_swap()).count()
    }

    pub fn validate(&self) -> Result<(), Vec<Violation>> {
        validate(self)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ViolationKind {
    NoQubits,
    WireOutOfRange { wire: usize },
    DuplicateWire { wire: usize },
    WrongArity { controls: usize, targets: usize },
    MissingAngle,
    UnexpectedAngle,
    PermutationSize { len: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    /// Offending gate, or `None` for circuit-level problems.
    pub gate_index: Option<usize>,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let at = match self.gate_index {
            Some(k) => format!(" at gate {k}"),
            None => String::new(),
        };
        match &self.kind {
            ViolationKind::NoQubits => write!(f, "circuit has no qubits"),
            ViolationKind::WireOutOfRange { wire } => write!(f, "wire out of range{at}: {wire}"),
            ViolationKind::DuplicateWire { wire } => write!(f, "duplicate wire{at}: {wire}"),
            ViolationKind::WrongArity { controls, targets } => {
                write!(f, "wrong arity{at}: {controls} controls, {targets} targets")
            }
            ViolationKind::MissingAngle => write!(f, "missing angle{at}"),
            ViolationKind::UnexpectedAngle => write!(f, "unexpected angle{at}"),
            ViolationKind::PermutationSize { len } => {
                write!(f, "output permutation has {len} entries")
            }
        }
    }
}

/// Collects every invariant violation in `circuit`.
pub fn validate(circuit: &Circuit) -> Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    let n = circuit.num_qubits;
    if n == 0 {
        out.push(Violation { gate_index: None, kind: ViolationKind::NoQubits });
    }
    if circuit.output_permutation.len() != n {
        out.push(Violation {
            gate_index: None,
            kind: ViolationKind::PermutationSize { len: circuit.output_permutation.len() },
        });
    }
    for (k, g) in circuit.gates.iter().enumerate() {
        let at = Some(k);
        let (nc, nt) = (g.controls.len(), g.targets.len());
        let arity_ok = match g.kind {
            GateKind::Cx | GateKind::Cp => nc == 1 && nt == 1,
            GateKind::Mcp => nc >= 1 && nt == 1,
            GateKind::Swap => nc == 0 && nt == 2,
            _ => nc == 0 && nt == 1,
        };
        if !arity_ok {
            out.push(Violation { gate_index: at, kind: ViolationKind::WrongArity { controls: nc, targets: nt } });
        }
        match (g.kind.is_parameterized(), g.angle) {
            (true, None) => out.push(Violation { gate_index: at, kind: ViolationKind::MissingAngle }),
            (false, Some(_)) => out.push(Violation { gate_index: at, kind: ViolationKind::UnexpectedAngle }),
            _ => {}
        }
        let mut seen = Vec::with_capacity(g.arity());
        for w in g.wires() {
            if w >= n {
                out.push(Violation { gate_index: at, kind: ViolationKind::WireOutOfRange { wire: w } });
            } else if seen.contains(&w) {
                out.push(Violation { gate_index: at, kind: ViolationKind::DuplicateWire { wire: w } });
            }
            seen.push(w);
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GateError {
    #[error("{0:?} gate requires an angle")]
    MissingAngle(GateKind),
    #[error("{kind:?} gate has {controls} controls and {targets} targets")]
    Arity { kind: GateKind, controls: usize, targets: usize },
}

/// Row-major square complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    pub dim: usize,
    pub data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn identity(dim: usize) -> Self {
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        DenseMatrix { dim, data }
    }

    pub fn diagonal(diag: &[Complex64]) -> Self {
        let mut m = DenseMatrix::identity(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * m.dim + i] = d;
        }
        m
    }

    fn from_rows(rows: &[[Complex64; 2]; 2]) -> Self {
        DenseMatrix { dim: 2, data: rows.iter().flatten().copied().collect() }
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    pub fn mul(&self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.dim, rhs.dim);
        let d = self.dim;
        let mut data = vec![Complex64::new(0.0, 0.0); d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..d {
                    data[i * d + j] += a * rhs.data[k * d + j];
                }
            }
        }
        DenseMatrix { dim: d, data }
    }

    pub fn adjoint(&self) -> DenseMatrix {
        let d = self.dim;
        let mut data = vec![Complex64::new(0.0, 0.0); d * d];
        for i in 0..d {
            for j in 0..d {
                data[j * d + i] = self.data[i * d + j].conj();
            }
        }
        DenseMatrix { dim: d, data }
    }

    pub fn max_abs_diff(&self, rhs: &DenseMatrix) -> f64 {
        self.data.iter().zip(&rhs.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// The dense unitary of `gate` over its wires in [`Gate::wires`] order,
/// first wire as the most significant index bit.
pub fn gate_unitary(gate: &Gate) -> Result<DenseMatrix, GateError> {
    let angle = || gate.angle.ok_or(GateError::MissingAngle(gate.kind));
    let arity_err = || GateError::Arity {
        kind: gate.kind,
        controls: gate.controls.len(),
        targets: gate.targets.len(),
    };
    let (nc, nt) = (gate.controls.len(), gate.targets.len());
    let single = nc == 0 && nt == 1;
    let zero = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let m = match gate.kind {
        GateKind::H if single => {
            let h = c(FRAC_1_SQRT_2, 0.0);
            DenseMatrix::from_rows(&[[h, h], [h, -h]])
        }
        GateKind::X if single => DenseMatrix::from_rows(&[[zero, one], [one, zero]]),
        GateKind::Y if single => DenseMatrix::from_rows(&[[zero, c(0.0, -1.0)], [c(0.0, 1.0), zero]]),
        GateKind::Z if single => DenseMatrix::diagonal(&[one, -one]),
        GateKind::S if single => DenseMatrix::diagonal(&[one, c(0.0, 1.0)]),
        GateKind::Sdg if single => DenseMatrix::diagonal(&[one, c(0.0, -1.0)]),
        GateKind::T if single => DenseMatrix::diagonal(&[one, Complex64::from_polar(1.0, FRAC_PI_4)]),
        GateKind::Tdg if single => DenseMatrix::diagonal(&[one, Complex64::from_polar(1.0, -FRAC_PI_4)]),
        GateKind::P if single => DenseMatrix::diagonal(&[one, Complex64::from_polar(1.0, angle()?)]),
        GateKind::Rz if single => {
            let a = angle()?;
            DenseMatrix::diagonal(&[Complex64::from_polar(1.0, -a / 2.0), Complex64::from_polar(1.0, a / 2.0)])
        }
        GateKind::Cx if nc == 1 && nt == 1 => {
            let mut m = DenseMatrix::identity(4);
            m.data[2 * 4 + 2] = zero;
            m.data[3 * 4 + 3] = zero;
            m.data[2 * 4 + 3] = one;
            m.data[3 * 4 + 2] = one;
            m
        }
        GateKind::Cp | GateKind::Mcp if nt == 1 && nc >= 1 && (gate.kind == GateKind::Mcp || nc == 1) => {
            let dim = 1 << (nc + 1);
            let mut m = DenseMatrix::identity(dim);
            m.data[dim * dim - 1] = Complex64::from_polar(1.0, angle()?);
            m
        }
        GateKind::Swap if nc == 0 && nt == 2 => {
            let mut m = DenseMatrix::identity(4);
            m.data[4 + 1] = zero;
            m.data[2 * 4 + 2] = zero;
            m.data[4 + 2] = one;
            m.data[2 * 4 + 1] = one;
            m
        }
        _ => return Err(arity_err()),
    };
    Ok(m)
}
