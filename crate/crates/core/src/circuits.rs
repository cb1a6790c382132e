//! Gate-list circuits over the Toffoli+Hadamard family and their compilation
//! to generator-level diagrams and to pure path-sums.
//!
//! Text format: a `qubits N` header, then one gate per line as a lowercase
//! mnemonic followed by qubit indices. `rz p/q k` applies `diag(1, e^{2πi·p/q})`.
//! `#` starts a comment.

use std::fmt;

use crate::diagram::{Generator, HLabel, RawDiagram};
use crate::error::{ParseError, Result};
use crate::numeric::Phase;
use crate::pathsum::{compose_pathsums, PurePathSum};
use crate::poly::{Monomial, PhasePoly, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GateKind {
    H,
    X,
    Z,
    S,
    Sdg,
    T,
    Tdg,
    /// `diag(1, e^{2πiα})` for the phase `α`.
    RZ(Phase),
    CZ,
    CNOT,
    CCZ,
    TOF,
    SWAP,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::CZ | GateKind::CNOT | GateKind::SWAP => 2,
            GateKind::CCZ | GateKind::TOF => 3,
            _ => 1,
        }
    }

    pub fn mnemonic(self) -> &'static str {
        match self {
            GateKind::H => "h",
            GateKind::X => "x",
            GateKind::Z => "z",
            GateKind::S => "s",
            GateKind::Sdg => "sdg",
            GateKind::T => "t",
            GateKind::Tdg => "tdg",
            GateKind::RZ(_) => "rz",
            GateKind::CZ => "cz",
            GateKind::CNOT => "cnot",
            GateKind::CCZ => "ccz",
            GateKind::TOF => "tof",
            GateKind::SWAP => "swap",
        }
    }

    fn from_mnemonic(s: &str) -> Option<GateKind> {
        Some(match s {
            "h" => GateKind::H,
            "x" | "not" => GateKind::X,
            "z" => GateKind::Z,
            "s" => GateKind::S,
            "sdg" => GateKind::Sdg,
            "t" => GateKind::T,
            "tdg" => GateKind::Tdg,
            "cz" => GateKind::CZ,
            "cnot" | "cx" => GateKind::CNOT,
            "ccz" => GateKind::CCZ,
            "tof" | "ccx" | "toffoli" => GateKind::TOF,
            "swap" => GateKind::SWAP,
            _ => return None,
        })
    }

    /// Phase applied on `|1⟩` by the single-qubit diagonal gates.
    fn diagonal_phase(self) -> Option<Phase> {
        Some(match self {
            GateKind::Z => Phase::half(),
            GateKind::S => Phase::quarter(),
            GateKind::Sdg => Phase::new(3, 4),
            GateKind::T => Phase::new(1, 8),
            GateKind::Tdg => Phase::new(7, 8),
            GateKind::RZ(a) => a,
            _ => return None,
        })
    }

    pub fn inverse(self) -> GateKind {
        match self {
            GateKind::S => GateKind::Sdg,
            GateKind::Sdg => GateKind::S,
            GateKind::T => GateKind::Tdg,
            GateKind::Tdg => GateKind::T,
            GateKind::RZ(a) => GateKind::RZ(-a),
            k => k,
        }
    }
}

/// A gate on specific qubits. For CNOT and TOF the last qubit is the target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gate {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
}

impl Gate {
    pub fn new(kind: GateKind, qubits: &[usize]) -> Self {
        Gate {
            kind,
            qubits: qubits.to_vec(),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind.mnemonic())?;
        if let GateKind::RZ(a) = self.kind {
            write!(f, " {a}")?;
        }
        for q in &self.qubits {
            write!(f, " {q}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    pub width: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(width: usize) -> Self {
        Circuit {
            width,
            gates: Vec::new(),
        }
    }

    /// Appends a gate, checking arity and indices.
    pub fn push(&mut self, kind: GateKind, qubits: &[usize]) -> std::result::Result<(), String> {
        if qubits.len() != kind.arity() {
            return Err(format!(
                "{} takes {} qubit(s), got {}",
                kind.mnemonic(),
                kind.arity(),
                qubits.len()
            ));
        }
        if let Some(q) = qubits.iter().find(|&&q| q >= self.width) {
            return Err(format!("qubit {q} out of range for width {}", self.width));
        }
        for (i, q) in qubits.iter().enumerate() {
            if qubits[..i].contains(q) {
                return Err(format!("qubit {q} repeated"));
            }
        }
        self.gates.push(Gate::new(kind, qubits));
        Ok(())
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Circuit) -> Circuit {
        assert_eq!(self.width, other.width, "circuit widths differ");
        let mut c = self.clone();
        c.gates.extend(other.gates.iter().cloned());
        c
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "qubits {}", self.width)?;
        for g in &self.gates {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}

pub fn parse_circuit(text: &str) -> std::result::Result<Circuit, ParseError> {
    let err = |line: usize, msg: String| ParseError::Circuit { line, msg };
    let mut circuit: Option<Circuit> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut words = body.split_whitespace();
        let head = words.next().unwrap().to_ascii_lowercase();
        let Some(c) = circuit.as_mut() else {
            if head != "qubits" {
                return Err(err(line, "expected header 'qubits N'".into()));
            }
            let n = words
                .next()
                .and_then(|w| w.parse::<usize>().ok())
                .ok_or_else(|| err(line, "header needs a qubit count".into()))?;
            if words.next().is_some() {
                return Err(err(line, "trailing tokens after header".into()));
            }
            circuit = Some(Circuit::new(n));
            continue;
        };
        let kind = if head == "rz" {
            let p = words.next().ok_or_else(|| err(line, "rz needs a phase p/q".into()))?;
            GateKind::RZ(p.parse::<Phase>().map_err(|e| err(line, e.to_string()))?)
        } else {
            GateKind::from_mnemonic(&head).ok_or_else(|| err(line, format!("unknown gate '{head}'")))?
        };
        let qubits = words
            .map(|w| {
                w.parse::<usize>()
                    .map_err(|_| err(line, format!("bad qubit index '{w}'")))
            })
            .collect::<std::result::Result<Vec<usize>, ParseError>>()?;
        c.push(kind, &qubits).map_err(|m| err(line, m))?;
    }
    circuit.ok_or_else(|| err(0, "missing header 'qubits N'".into()))
}

/// Reversed gate list with each gate inverted.
pub fn adjoint(c: &Circuit) -> Circuit {
    Circuit {
        width: c.width,
        gates: c
            .gates
            .iter()
            .rev()
            .map(|g| Gate::new(g.kind.inverse(), &g.qubits))
            .collect(),
    }
}

/// Wires `0..k` with one Z-spider each, boundary on both sides.
fn spider_wires(k: usize) -> (RawDiagram, Vec<usize>) {
    let mut d = RawDiagram::new();
    let zs: Vec<usize> = (0..k).map(|_| d.add_node(Generator::Z)).collect();
    for &z in &zs {
        let b = d.add_input();
        d.add_edge(b, z);
    }
    for &z in &zs {
        let b = d.add_output();
        d.add_edge(z, b);
    }
    (d, zs)
}

/// Controls as plain spiders, the target as `H₂ – t – H₂`, and an
/// unlabelled H-box on all of them. Each `H₂` is `√2` times a Hadamard.
fn controlled_not(controls: usize) -> RawDiagram {
    let mut d = RawDiagram::new();
    let cs: Vec<usize> = (0..controls).map(|_| d.add_node(Generator::Z)).collect();
    let h_in = d.add_node(Generator::H(HLabel::minus_one()));
    let t = d.add_node(Generator::Z);
    let h_out = d.add_node(Generator::H(HLabel::minus_one()));
    let hb = d.add_node(Generator::H(HLabel::minus_one()));
    d.add_edge(h_in, t);
    d.add_edge(t, h_out);
    d.add_edge(hb, t);
    for &c in &cs {
        d.add_edge(hb, c);
    }
    for &c in &cs {
        let b = d.add_input();
        d.add_edge(b, c);
    }
    let b = d.add_input();
    d.add_edge(b, h_in);
    for &c in &cs {
        let b = d.add_output();
        d.add_edge(c, b);
    }
    let b = d.add_output();
    d.add_edge(h_out, b);
    d.scalar.pow2 -= 2;
    d
}

/// The gate as a gadget on its own `arity` wires, exactly unitary.
pub fn gate_to_diagram(g: &Gate) -> RawDiagram {
    if let Some(alpha) = g.kind.diagonal_phase() {
        let (mut d, zs) = spider_wires(1);
        let h = d.add_node(Generator::H(HLabel::Phase(alpha)));
        d.add_edge(zs[0], h);
        return d;
    }
    match g.kind {
        GateKind::H => RawDiagram::hadamard(),
        GateKind::X => RawDiagram::not(),
        GateKind::SWAP => RawDiagram::swap(),
        GateKind::CZ | GateKind::CCZ => {
            let (mut d, zs) = spider_wires(g.kind.arity());
            let h = d.add_node(Generator::H(HLabel::minus_one()));
            for z in zs {
                d.add_edge(h, z);
            }
            d
        }
        GateKind::CNOT => controlled_not(1),
        GateKind::TOF => controlled_not(2),
        _ => unreachable!("diagonal gates handled above"),
    }
}

pub fn circuit_to_diagram(c: &Circuit) -> RawDiagram {
    let mut d = RawDiagram::identity(c.width);
    for g in &c.gates {
        d = d
            .compose_seq(&gate_to_diagram(g).embed(&g.qubits, c.width))
            .expect("embedded gadgets match the circuit width");
    }
    d
}

/// The gate as a pure path-sum on all `width` wires: input `k` is variable `k`.
pub fn gate_to_pathsum(g: &Gate, width: usize) -> PurePathSum {
    let mut e = PurePathSum::identity(width);
    let x = |q: usize| q as Var;
    let hadamard = |e: &mut PurePathSum, q: usize| {
        let y = e.fresh_var();
        e.vars.insert(y);
        let from = e.output_sig[q];
        e.phi.add_term(Monomial::from_vars([from, y]), Phase::half());
        e.output_sig[q] = y;
        e.scalar.pow2 -= 1;
    };
    let cz_on = |e: &mut PurePathSum, qs: &[usize]| {
        let m = Monomial::from_vars(qs.iter().map(|&q| e.output_sig[q]));
        e.phi.add_term(m, Phase::half());
    };
    if let Some(alpha) = g.kind.diagonal_phase() {
        e.phi = PhasePoly::from_terms([(Monomial::var(x(g.qubits[0])), alpha)]);
        return e;
    }
    let qs = &g.qubits;
    match g.kind {
        GateKind::H => hadamard(&mut e, qs[0]),
        GateKind::X => {
            hadamard(&mut e, qs[0]);
            let m = Monomial::var(e.output_sig[qs[0]]);
            e.phi.add_term(m, Phase::half());
            hadamard(&mut e, qs[0]);
        }
        GateKind::CZ | GateKind::CCZ => cz_on(&mut e, qs),
        GateKind::CNOT | GateKind::TOF => {
            let t = *qs.last().unwrap();
            hadamard(&mut e, t);
            cz_on(&mut e, qs);
            hadamard(&mut e, t);
        }
        GateKind::SWAP => e.output_sig.swap(qs[0], qs[1]),
        _ => unreachable!("diagonal gates handled above"),
    }
    e
}

pub fn circuit_to_pathsum(c: &Circuit) -> PurePathSum {
    let mut e = PurePathSum::identity(c.width);
    for g in &c.gates {
        e = compose_pathsums(&e, &gate_to_pathsum(g, c.width)).expect("gate path-sums match the circuit width");
    }
    e
}

/// `c` followed by the adjoint of `d`, as a path-sum: the identity (up to
/// scalar) exactly when the two circuits agree.
pub fn miter(c: &PurePathSum, d: &PurePathSum) -> Result<PurePathSum> {
    compose_pathsums(c, &d.adjoint())
}
