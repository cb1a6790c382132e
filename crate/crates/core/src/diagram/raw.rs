use std::collections::BTreeMap;

use crate::numeric::ScalarFactor;

use super::HLabel;

/// A ZH generator. Z and X spiders are phase-free; `H` carries its label.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Generator {
    Boundary,
    Z,
    X,
    H(HLabel),
    Not,
}

/// A ZH-diagram over the full generator set, as an undirected multigraph.
///
/// Every boundary node has exactly one wire. Node and edge ids are stable
/// under removal.
#[derive(Clone, Debug, Default)]
pub struct RawDiagram {
    nodes: Vec<Option<Generator>>,
    edges: Vec<Option<(usize, usize)>>,
    pub inputs: Vec<usize>,
    pub outputs: Vec<usize>,
    pub scalar: ScalarFactor,
}

impl RawDiagram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, g: Generator) -> usize {
        self.nodes.push(Some(g));
        self.nodes.len() - 1
    }

    pub fn add_input(&mut self) -> usize {
        let b = self.add_node(Generator::Boundary);
        self.inputs.push(b);
        b
    }

    pub fn add_output(&mut self) -> usize {
        let b = self.add_node(Generator::Boundary);
        self.outputs.push(b);
        b
    }

    pub fn add_edge(&mut self, a: usize, b: usize) -> usize {
        self.edges.push(Some((a, b)));
        self.edges.len() - 1
    }

    pub fn remove_edge(&mut self, e: usize) {
        self.edges[e] = None;
    }

    /// Removes a node and every wire touching it.
    pub fn remove_node(&mut self, n: usize) {
        for e in self.incident(n) {
            self.edges[e] = None;
        }
        self.nodes[n] = None;
    }

    pub fn node(&self, n: usize) -> Option<Generator> {
        self.nodes.get(n).copied().flatten()
    }

    pub fn set_node(&mut self, n: usize, g: Generator) {
        self.nodes[n] = Some(g);
    }

    pub fn nodes(&self) -> impl Iterator<Item = (usize, Generator)> + '_ {
        self.nodes.iter().enumerate().filter_map(|(i, g)| g.map(|g| (i, g)))
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter_map(|(i, e)| e.map(|(a, b)| (i, a, b)))
    }

    pub fn edge(&self, e: usize) -> Option<(usize, usize)> {
        self.edges.get(e).copied().flatten()
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes().count()
    }

    pub fn num_edges(&self) -> usize {
        self.edges().count()
    }

    /// Edges incident to `n`; a self-loop is listed once.
    pub fn incident(&self, n: usize) -> Vec<usize> {
        self.edges()
            .filter(|&(_, a, b)| a == n || b == n)
            .map(|(e, _, _)| e)
            .collect()
    }

    /// Neighbours with multiplicity; a self-loop contributes `n` twice.
    pub fn neighbors(&self, n: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for (_, a, b) in self.edges() {
            if a == n {
                out.push(b);
            }
            if b == n {
                out.push(a);
            }
        }
        out
    }

    pub fn degree(&self, n: usize) -> usize {
        self.neighbors(n).len()
    }

    pub fn num_inputs(&self) -> usize {
        self.inputs.len()
    }

    pub fn num_outputs(&self) -> usize {
        self.outputs.len()
    }

    /// `n` wires straight through.
    pub fn identity(n: usize) -> Self {
        let mut d = Self::new();
        let ins: Vec<usize> = (0..n).map(|_| d.add_input()).collect();
        for i in ins {
            let o = d.add_output();
            d.add_edge(i, o);
        }
        d
    }

    fn single(g: Generator, m: usize, n: usize) -> Self {
        let mut d = Self::new();
        let c = d.add_node(g);
        for _ in 0..m {
            let b = d.add_input();
            d.add_edge(b, c);
        }
        for _ in 0..n {
            let b = d.add_output();
            d.add_edge(c, b);
        }
        d
    }

    pub fn z_spider(m: usize, n: usize) -> Self {
        Self::single(Generator::Z, m, n)
    }

    pub fn x_spider(m: usize, n: usize) -> Self {
        Self::single(Generator::X, m, n)
    }

    pub fn h_box(m: usize, n: usize, label: HLabel) -> Self {
        Self::single(Generator::H(label), m, n)
    }

    pub fn not() -> Self {
        Self::single(Generator::Not, 1, 1)
    }

    /// The normalized Hadamard gate: an unlabelled arity-2 H-box times 1/√2.
    pub fn hadamard() -> Self {
        let mut d = Self::h_box(1, 1, HLabel::minus_one());
        d.scalar.pow2 -= 1;
        d
    }

    pub fn swap() -> Self {
        let mut d = Self::new();
        let i0 = d.add_input();
        let i1 = d.add_input();
        let o0 = d.add_output();
        let o1 = d.add_output();
        d.add_edge(i0, o1);
        d.add_edge(i1, o0);
        d
    }

    /// Copies `other` into `self`, returning the node id map.
    fn absorb(&mut self, other: &RawDiagram) -> BTreeMap<usize, usize> {
        let mut map = BTreeMap::new();
        for (i, g) in other.nodes() {
            map.insert(i, self.add_node(g));
        }
        for (_, a, b) in other.edges() {
            self.add_edge(map[&a], map[&b]);
        }
        self.scalar *= other.scalar.clone();
        map
    }

    /// Joins the wires of boundary nodes `a` and `b` and deletes both.
    /// Joining two ends of the same wire yields a closed loop, which is the
    /// scalar 2.
    fn splice(&mut self, a: usize, b: usize) {
        let ea = self.incident(a)[0];
        let eb = self.incident(b)[0];
        if ea == eb {
            self.remove_node(a);
            self.remove_node(b);
            self.scalar.pow2 += 2;
            return;
        }
        let (x, y) = self.edge(ea).unwrap();
        let pa = if x == a { y } else { x };
        let (x, y) = self.edge(eb).unwrap();
        let pb = if x == b { y } else { x };
        self.remove_node(a);
        self.remove_node(b);
        self.add_edge(pa, pb);
    }

    /// Sequential composition: `self` first, then `next`.
    pub fn compose_seq(&self, next: &RawDiagram) -> crate::error::Result<RawDiagram> {
        if self.num_outputs() != next.num_inputs() {
            return Err(crate::error::Error::ArityMismatch {
                left: self.num_outputs(),
                right: next.num_inputs(),
            });
        }
        let mut d = self.clone();
        let map = d.absorb(next);
        let outs = std::mem::take(&mut d.outputs);
        for (o, i) in outs.iter().zip(&next.inputs) {
            d.splice(*o, map[i]);
        }
        d.outputs = next.outputs.iter().map(|o| map[o]).collect();
        Ok(d)
    }

    /// Places a square gadget on the given wires of a `width`-wire identity.
    /// Gadget input/output `k` lands on wire `qubits[k]`.
    pub fn embed(&self, qubits: &[usize], width: usize) -> RawDiagram {
        assert_eq!(self.num_inputs(), qubits.len(), "gadget inputs must match its wires");
        assert_eq!(self.num_outputs(), qubits.len(), "gadget outputs must match its wires");
        let mut d = RawDiagram::new();
        let map = d.absorb(self);
        let mut ins = vec![usize::MAX; width];
        let mut outs = vec![usize::MAX; width];
        for (k, &q) in qubits.iter().enumerate() {
            ins[q] = map[&self.inputs[k]];
            outs[q] = map[&self.outputs[k]];
        }
        for q in 0..width {
            if ins[q] == usize::MAX {
                ins[q] = d.add_node(Generator::Boundary);
                outs[q] = d.add_node(Generator::Boundary);
                d.add_edge(ins[q], outs[q]);
            }
        }
        d.inputs = ins;
        d.outputs = outs;
        d
    }

    /// Parallel composition: `self` on the upper wires, `other` below.
    pub fn compose_par(&self, other: &RawDiagram) -> RawDiagram {
        let mut d = self.clone();
        let map = d.absorb(other);
        d.inputs.extend(other.inputs.iter().map(|i| map[i]));
        d.outputs.extend(other.outputs.iter().map(|o| map[o]));
        d
    }

    /// Violations of the hypergraph-like conditions, one message each.
    pub fn hypergraph_like_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let boundary: Vec<usize> = self.inputs.iter().chain(&self.outputs).copied().collect();
        for (n, g) in self.nodes() {
            match g {
                Generator::Z | Generator::H(_) => {}
                Generator::Boundary if boundary.contains(&n) => {}
                other => out.push(format!("node {n} is a {other:?}")),
            }
        }
        for &b in &boundary {
            for p in self.neighbors(b) {
                if self.node(p) != Some(Generator::Z) {
                    out.push(format!("boundary {b} attaches to non-spider {p}"));
                }
            }
        }
        let mut hz: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (e, a, b) in self.edges() {
            let kinds = (self.node(a), self.node(b));
            match kinds {
                (Some(Generator::H(_)), Some(Generator::Z)) => *hz.entry((a, b)).or_default() += 1,
                (Some(Generator::Z), Some(Generator::H(_))) => *hz.entry((b, a)).or_default() += 1,
                (Some(Generator::Boundary), _) | (_, Some(Generator::Boundary)) => {}
                _ => out.push(format!("wire {e} joins {a} and {b}")),
            }
        }
        for ((h, s), k) in &hz {
            if *k > 1 {
                out.push(format!("{k} parallel wires between H-box {h} and spider {s}"));
            }
        }
        let mut seen: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        for (n, g) in self.nodes() {
            if let Generator::H(_) = g {
                let mut ns = self.neighbors(n);
                ns.sort_unstable();
                ns.dedup();
                if let Some(prev) = seen.insert(ns, n) {
                    out.push(format!("H-boxes {prev} and {n} share their neighbourhood"));
                }
            }
        }
        out
    }
}
