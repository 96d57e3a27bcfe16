//! A small OpenQASM 2.0 subset.
//!
//! Accepted statements:
//!
//! * `OPENQASM 2.0;` (optional, first statement), `include "...";` (skipped)
//! * exactly one `qreg name[N];`, any number of `creg name[N];`
//! * gates `h x y z s sdg t tdg`, one-angle gates `p u1 rz`, two-qubit
//!   `cx CX cp cu1 swap`, and `mcp(θ) c0,c1,...,t;` (alias `mcphase`) where
//!   the last argument is the target
//! * `barrier` and `measure` (skipped, reason recorded)
//!
//! Angle expressions combine integers, decimals, `pi`, `+ - * /`, unary
//! minus and parentheses. A comment of the form
//! `// output_permutation: p0 p1 ...` sets the circuit's output permutation.

use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::circuit::{Circuit, Gate, GateKind, QubitPermutation};

const PERMUTATION_TAG: &str = "output_permutation:";

#[derive(Clone, Debug, PartialEq)]
pub struct ParsedProgram {
    pub circuit: Circuit,
    /// `(line, reason)` for every statement that was skipped.
    pub ignored_statements: Vec<(usize, String)>,
    pub source_name: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    UnknownGate(String),
    Unsupported(String),
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (l, c) = (self.line, self.column);
        match &self.kind {
            ParseErrorKind::Syntax(m) => write!(f, "syntax error at line {l}, column {c}: {m}"),
            ParseErrorKind::UnknownGate(g) => write!(f, "unknown gate '{g}' at line {l}, column {c}"),
            ParseErrorKind::Unsupported(m) => write!(f, "unsupported feature at line {l}, column {c}: {m}"),
            ParseErrorKind::Invalid(m) => write!(f, "invalid statement at line {l}, column {c}: {m}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(f64),
    Str(String),
    Sym(char),
    Arrow,
    /// Body of an `output_permutation` comment.
    Permutation(String),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, column, m: &str| ParseError { line, column, kind: ParseErrorKind::Syntax(m.to_string()) };
    while i < chars.len() {
        let ch = chars[i];
        let (tl, tc) = (line, col);
        if ch == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if ch.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if ch == '/' && chars.get(i + 1) == Some(&'/') {
            let start = i + 2;
            let mut end = start;
            while end < chars.len() && chars[end] != '\n' {
                end += 1;
            }
            let body: String = chars[start..end].iter().collect();
            if let Some(rest) = body.trim_start().strip_prefix(PERMUTATION_TAG) {
                out.push(Token { tok: Tok::Permutation(rest.trim().to_string()), line: tl, column: tc });
            }
            col += end - i;
            i = end;
            continue;
        }
        if ch.is_ascii_alphabetic() || ch == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - start;
            out.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), line: tl, column: tc });
            continue;
        }
        if ch.is_ascii_digit() || (ch == '.' && chars.get(i + 1).is_some_and(|c| c.is_ascii_digit())) {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text: String = chars[start..i].iter().collect();
            let value = text.parse::<f64>().map_err(|_| err(tl, tc, &format!("malformed number '{text}'")))?;
            col += i - start;
            out.push(Token { tok: Tok::Number(value), line: tl, column: tc });
            continue;
        }
        if ch == '"' {
            let start = i + 1;
            let mut end = start;
            while end < chars.len() && chars[end] != '"' && chars[end] != '\n' {
                end += 1;
            }
            if chars.get(end) != Some(&'"') {
                return Err(err(tl, tc, "unterminated string"));
            }
            out.push(Token { tok: Tok::Str(chars[start..end].iter().collect()), line: tl, column: tc });
            col += end + 1 - i;
            i = end + 1;
            continue;
        }
        if ch == '-' && chars.get(i + 1) == Some(&'>') {
            out.push(Token { tok: Tok::Arrow, line: tl, column: tc });
            i += 2;
            col += 2;
            continue;
        }
        if "[](){},;+-*/".contains(ch) {
            out.push(Token { tok: Tok::Sym(ch), line: tl, column: tc });
            i += 1;
            col += 1;
            continue;
        }
        return Err(err(tl, tc, &format!("unexpected character '{ch}'")));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    eof_line: usize,
}

struct Register {
    name: String,
    size: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn here(&self) -> (usize, usize) {
        match self.peek() {
            Some(t) => (t.line, t.column),
            None => (self.eof_line, 1),
        }
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        let (line, column) = self.here();
        ParseError { line, column, kind }
    }

    fn syntax(&self, msg: impl Into<String>) -> ParseError {
        self.error(ParseErrorKind::Syntax(msg.into()))
    }

    fn describe(&self) -> String {
        match self.peek().map(|t| &t.tok) {
            None => "end of input".into(),
            Some(Tok::Ident(s)) => format!("'{s}'"),
            Some(Tok::Number(v)) => format!("number {v}"),
            Some(Tok::Str(s)) => format!("string \"{s}\""),
            Some(Tok::Sym(c)) => format!("'{c}'"),
            Some(Tok::Arrow) => "'->'".into(),
            Some(Tok::Permutation(_)) => "permutation comment".into(),
        }
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if matches!(self.peek(), Some(Token { tok: Tok::Sym(s), .. }) if *s == c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat_sym(c) {
            Ok(())
        } else {
            Err(self.syntax(format!("expected '{c}', found {}", self.describe())))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(Token { tok: Tok::Ident(s), .. }) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.syntax(format!("expected identifier, found {}", self.describe()))),
        }
    }

    fn integer(&mut self) -> Result<usize, ParseError> {
        match self.peek() {
            Some(Token { tok: Tok::Number(v), .. }) if v.fract() == 0.0 && *v >= 0.0 => {
                let v = *v as usize;
                self.pos += 1;
                Ok(v)
            }
            _ => Err(self.syntax(format!("expected non-negative integer, found {}", self.describe()))),
        }
    }

    /// Skips to just past the next `;`.
    fn skip_statement(&mut self) -> Result<(), ParseError> {
        while let Some(t) = self.peek() {
            let done = matches!(t.tok, Tok::Sym(';'));
            self.pos += 1;
            if done {
                return Ok(());
            }
        }
        Err(self.syntax("expected ';', found end of input"))
    }

    fn expr(&mut self) -> Result<f64, ParseError> {
        let mut v = self.term()?;
        loop {
            if self.eat_sym('+') {
                v += self.term()?;
            } else if self.eat_sym('-') {
                v -= self.term()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn term(&mut self) -> Result<f64, ParseError> {
        let mut v = self.unary()?;
        loop {
            if self.eat_sym('*') {
                v *= self.unary()?;
            } else if self.eat_sym('/') {
                let d = self.unary()?;
                if d == 0.0 {
                    return Err(self.syntax("division by zero in angle expression"));
                }
                v /= d;
            } else {
                return Ok(v);
            }
        }
    }

    fn unary(&mut self) -> Result<f64, ParseError> {
        if self.eat_sym('-') {
            return Ok(-self.unary()?);
        }
        if self.eat_sym('+') {
            return self.unary();
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<f64, ParseError> {
        match self.peek().map(|t| t.tok.clone()) {
            Some(Tok::Number(v)) => {
                self.pos += 1;
                Ok(v)
            }
            Some(Tok::Ident(s)) if s == "pi" => {
                self.pos += 1;
                Ok(std::f64::consts::PI)
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let v = self.expr()?;
                self.expect_sym(')')?;
                Ok(v)
            }
            _ => Err(self.syntax(format!("expected angle expression, found {}", self.describe()))),
        }
    }

    fn qubit_arg(&mut self, reg: &Register) -> Result<usize, ParseError> {
        let (line, column) = self.here();
        let name = self.ident()?;
        if name != reg.name {
            return Err(ParseError { line, column, kind: ParseErrorKind::Invalid(format!("unknown register '{name}'")) });
        }
        if !self.eat_sym('[') {
            return Err(self.error(ParseErrorKind::Unsupported("whole-register gate arguments".into())));
        }
        let (il, ic) = self.here();
        let idx = self.integer()?;
        self.expect_sym(']')?;
        if idx >= reg.size {
            return Err(ParseError {
                line: il,
                column: ic,
                kind: ParseErrorKind::Invalid(format!("qubit index {idx} out of range for {}[{}]", reg.name, reg.size)),
            });
        }
        Ok(idx)
    }
}

fn gate_kind(name: &str) -> Option<(GateKind, usize)> {
    // (kind, number of angle parameters)
    Some(match name {
        "h" => (GateKind::H, 0),
        "x" => (GateKind::X, 0),
        "y" => (GateKind::Y, 0),
        "z" => (GateKind::Z, 0),
        "s" => (GateKind::S, 0),
        "sdg" => (GateKind::Sdg, 0),
        "t" => (GateKind::T, 0),
        "tdg" => (GateKind::Tdg, 0),
        "p" | "u1" => (GateKind::P, 1),
        "rz" => (GateKind::Rz, 1),
        "cx" | "CX" => (GateKind::Cx, 0),
        "cp" | "cu1" => (GateKind::Cp, 1),
        "swap" => (GateKind::Swap, 0),
        "mcp" | "mcphase" => (GateKind::Mcp, 1),
        _ => return None,
    })
}

const UNSUPPORTED_KEYWORDS: &[&str] = &["gate", "opaque", "if", "reset"];

/// Parses `text`; `source_name` is only recorded.
pub fn parse_named(text: &str, source_name: &str) -> Result<ParsedProgram, ParseError> {
    let toks = lex(text)?;
    let eof_line = text.lines().count().max(1);
    let mut p = Parser { toks, pos: 0, eof_line };
    let mut reg: Option<Register> = None;
    let mut gates = Vec::new();
    let mut ignored = Vec::new();
    let mut permutation: Option<(usize, usize, String)> = None;
    let mut first = true;

    while let Some(tok) = p.peek().cloned() {
        let (line, column) = (tok.line, tok.column);
        let is_first = std::mem::replace(&mut first, false);
        let word = match tok.tok {
            Tok::Permutation(body) => {
                p.pos += 1;
                permutation = Some((line, column, body));
                first = is_first;
                continue;
            }
            Tok::Ident(w) => w,
            _ => return Err(p.syntax(format!("expected statement, found {}", p.describe()))),
        };
        p.pos += 1;
        match word.as_str() {
            "OPENQASM" => {
                if !is_first {
                    return Err(ParseError { line, column, kind: ParseErrorKind::Syntax("OPENQASM header must come first".into()) });
                }
                let (vl, vc) = p.here();
                match p.peek().map(|t| t.tok.clone()) {
                    Some(Tok::Number(2.0)) => p.pos += 1,
                    _ => {
                        return Err(ParseError {
                            line: vl,
                            column: vc,
                            kind: ParseErrorKind::Unsupported("only OPENQASM 2.0 is supported".into()),
                        })
                    }
                }
                p.expect_sym(';')?;
            }
            "include" => {
                match p.peek().map(|t| t.tok.clone()) {
                    Some(Tok::Str(_)) => p.pos += 1,
                    _ => return Err(p.syntax(format!("expected file name, found {}", p.describe()))),
                }
                p.expect_sym(';')?;
                ignored.push((line, "include".to_string()));
            }
            "qreg" | "creg" => {
                let name = p.ident()?;
                p.expect_sym('[')?;
                let size = p.integer()?;
                p.expect_sym(']')?;
                p.expect_sym(';')?;
                if word == "creg" {
                    ignored.push((line, format!("classical register {name}")));
                } else if reg.is_some() {
                    return Err(ParseError { line, column, kind: ParseErrorKind::Unsupported("multiple quantum registers".into()) });
                } else if size == 0 {
                    return Err(ParseError { line, column, kind: ParseErrorKind::Invalid("empty quantum register".into()) });
                } else {
                    reg = Some(Register { name, size });
                }
            }
            "barrier" => {
                p.skip_statement()?;
                ignored.push((line, "barrier".to_string()));
            }
            "measure" => {
                p.skip_statement()?;
                ignored.push((line, "measure".to_string()));
            }
            w if UNSUPPORTED_KEYWORDS.contains(&w) => {
                return Err(ParseError { line, column, kind: ParseErrorKind::Unsupported(format!("'{w}' statements")) });
            }
            name => {
                let Some((kind, nparams)) = gate_kind(name) else {
                    return Err(ParseError { line, column, kind: ParseErrorKind::UnknownGate(name.to_string()) });
                };
                let Some(r) = reg.as_ref() else {
                    return Err(ParseError { line, column, kind: ParseErrorKind::Invalid("gate before qreg declaration".into()) });
                };
                let mut params = Vec::new();
                if p.eat_sym('(') && !p.eat_sym(')') {
                    params.push(p.expr()?);
                    while p.eat_sym(',') {
                        params.push(p.expr()?);
                    }
                    p.expect_sym(')')?;
                }
                if params.len() != nparams {
                    return Err(ParseError {
                        line,
                        column,
                        kind: ParseErrorKind::Invalid(format!("'{name}' takes {nparams} parameters, got {}", params.len())),
                    });
                }
                let mut args = vec![p.qubit_arg(r)?];
                while p.eat_sym(',') {
                    args.push(p.qubit_arg(r)?);
                }
                p.expect_sym(';')?;
                let gate = make_gate(kind, params.first().copied(), &args).ok_or_else(|| ParseError {
                    line,
                    column,
                    kind: ParseErrorKind::Invalid(format!("'{name}' cannot take {} qubit arguments", args.len())),
                })?;
                let mut dup = args.clone();
                dup.sort_unstable();
                dup.dedup();
                if dup.len() != args.len() {
                    return Err(ParseError { line, column, kind: ParseErrorKind::Invalid("repeated qubit argument".into()) });
                }
                gates.push(gate);
            }
        }
    }

    let Some(reg) = reg else {
        return Err(ParseError { line: eof_line, column: 1, kind: ParseErrorKind::Invalid("no qreg declaration".into()) });
    };
    let mut circuit = Circuit::with_gates(reg.size, gates);
    if let Some((line, column, body)) = permutation {
        let bad = |m: String| ParseError { line, column, kind: ParseErrorKind::Invalid(m) };
        let entries = body
            .split_whitespace()
            .map(|s| s.parse::<usize>().map_err(|_| bad(format!("bad permutation entry '{s}'"))))
            .collect::<Result<Vec<_>, _>>()?;
        if entries.len() != reg.size {
            return Err(bad(format!("permutation has {} entries for {} qubits", entries.len(), reg.size)));
        }
        circuit.output_permutation = QubitPermutation::from_vec(entries).map_err(|e| bad(e.to_string()))?;
    }
    if let Err(v) = circuit.validate() {
        let msg = v.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ");
        return Err(ParseError { line: eof_line, column: 1, kind: ParseErrorKind::Invalid(msg) });
    }
    Ok(ParsedProgram { circuit, ignored_statements: ignored, source_name: source_name.to_string() })
}

pub fn parse(text: &str) -> Result<ParsedProgram, ParseError> {
    parse_named(text, "<input>")
}

fn make_gate(kind: GateKind, angle: Option<f64>, args: &[usize]) -> Option<Gate> {
    let g = match (kind, args) {
        (GateKind::Cx, &[c, t]) => Gate::cx(c, t),
        (GateKind::Cp, &[c, t]) => Gate::cp(angle?, c, t),
        (GateKind::Swap, &[a, b]) => Gate::swap(a, b),
        (GateKind::Mcp, [controls @ .., t]) if !controls.is_empty() => Gate::mcp(angle?, controls.to_vec(), *t),
        (GateKind::Cx | GateKind::Cp | GateKind::Swap | GateKind::Mcp, _) => return None,
        (k, &[q]) => Gate { kind: k, angle, controls: vec![], targets: vec![q] },
        _ => return None,
    };
    Some(g)
}

/// Deterministic text form of `circuit`. Angles carry 17 significant digits.
pub fn emit(circuit: &Circuit) -> String {
    let mut out = String::new();
    out.push_str("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    let _ = writeln!(out, "qreg q[{}];", circuit.num_qubits);
    for g in &circuit.gates {
        out.push_str(g.kind.mnemonic());
        if let Some(a) = g.angle {
            let _ = write!(out, "({a:.16e})");
        }
        let args: Vec<String> = g.wires().map(|w| format!("q[{w}]")).collect();
        let _ = writeln!(out, " {};", args.join(","));
    }
    if !circuit.output_permutation.is_identity() {
        let _ = writeln!(out, "// {PERMUTATION_TAG} {}", circuit.output_permutation);
    }
    out
}
