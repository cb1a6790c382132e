//! ZH-diagrams.
//!
//! [`RawDiagram`] is a general generator-level term. [`Diagram`] is the
//! hypergraph-like normal form: Z-spiders as vertices, H-boxes as hyperedges,
//! boundary maps into the spiders, plus a tracked scalar.

mod iso;
mod normalize;
mod raw;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ParseError, Result};
use crate::numeric::{Phase, ScalarFactor};

pub use iso::iso_equal;
pub use normalize::{normalize, reduce_parallel};
pub use raw::{Generator, RawDiagram};

pub type SpiderId = usize;
pub type HBoxId = usize;

/// H-box label: either `e^{2πiα}` or an arbitrary complex number.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum HLabel {
    Phase(Phase),
    General(Complex64),
}

impl HLabel {
    /// The unlabelled H-box (label −1).
    pub fn minus_one() -> Self {
        HLabel::Phase(Phase::half())
    }

    pub fn phase(num: i64, den: i64) -> Self {
        HLabel::Phase(Phase::new(num, den))
    }

    pub fn value(&self) -> Complex64 {
        match self {
            HLabel::Phase(p) => p.to_complex(),
            HLabel::General(z) => *z,
        }
    }

    pub fn as_phase(&self) -> Option<Phase> {
        match self {
            HLabel::Phase(p) => Some(*p),
            HLabel::General(_) => None,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            HLabel::Phase(p) => p.is_zero(),
            HLabel::General(z) => *z == Complex64::new(1.0, 0.0),
        }
    }

    pub fn is_minus_one(&self) -> bool {
        *self == HLabel::minus_one()
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, HLabel::General(z) if *z == Complex64::new(0.0, 0.0))
    }

    /// Label product, as produced by fusing boxes on the same spiders.
    pub fn mul(&self, other: &HLabel) -> HLabel {
        match (self, other) {
            (HLabel::Phase(a), HLabel::Phase(b)) => HLabel::Phase(*a + *b),
            (a, b) => HLabel::General(a.value() * b.value()),
        }
    }

    /// `self^{(−2)^e}`.
    pub fn pow_neg2(&self, e: u32) -> HLabel {
        match self {
            HLabel::Phase(p) => HLabel::Phase(p.mul_neg2_pow(e)),
            HLabel::General(z) => HLabel::General(z.powi((-2i32).pow(e))),
        }
    }

    /// This label as a scalar factor (an arity-0 H-box).
    pub fn as_scalar(&self) -> ScalarFactor {
        match self {
            HLabel::Phase(p) => ScalarFactor::from_phase(*p),
            HLabel::General(z) => ScalarFactor {
                extras: vec![*z],
                ..ScalarFactor::one()
            },
        }
    }

    pub(crate) fn key(&self) -> (u8, u64, u64) {
        match self {
            HLabel::Phase(Phase::Exact(r)) => (0, *r.numer() as u64, *r.denom() as u64),
            HLabel::Phase(Phase::Approx(x)) => (1, x.to_bits(), 0),
            HLabel::General(z) => (2, z.re.to_bits(), z.im.to_bits()),
        }
    }
}

impl std::fmt::Display for HLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            HLabel::Phase(p) => write!(f, "e^(2πi·{p})"),
            HLabel::General(z) => write!(f, "{}{:+}i", z.re, z.im),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HBox {
    pub label: HLabel,
    pub neighbors: BTreeSet<SpiderId>,
}

/// A hypergraph-like ZH-diagram.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Diagram {
    pub spiders: BTreeSet<SpiderId>,
    pub hboxes: BTreeMap<HBoxId, HBox>,
    pub inputs: Vec<SpiderId>,
    pub outputs: Vec<SpiderId>,
    pub scalar: ScalarFactor,
}

impl Diagram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_spider(&mut self) -> SpiderId {
        let id = self.spiders.iter().next_back().map_or(0, |s| s + 1);
        self.spiders.insert(id);
        id
    }

    pub fn add_hbox<I: IntoIterator<Item = SpiderId>>(&mut self, label: HLabel, neighbors: I) -> HBoxId {
        let id = self.hboxes.keys().next_back().map_or(0, |h| h + 1);
        self.hboxes.insert(
            id,
            HBox {
                label,
                neighbors: neighbors.into_iter().collect(),
            },
        );
        id
    }

    pub fn num_spiders(&self) -> usize {
        self.spiders.len()
    }

    pub fn num_hboxes(&self) -> usize {
        self.hboxes.len()
    }

    pub fn is_boundary(&self, s: SpiderId) -> bool {
        self.inputs.contains(&s) || self.outputs.contains(&s)
    }

    pub fn is_interior(&self, s: SpiderId) -> bool {
        self.spiders.contains(&s) && !self.is_boundary(s)
    }

    pub fn num_interior(&self) -> usize {
        self.spiders.iter().filter(|&&s| !self.is_boundary(s)).count()
    }

    /// Ids of the H-boxes touching spider `s`, ascending.
    pub fn boxes_on(&self, s: SpiderId) -> Vec<HBoxId> {
        self.hboxes
            .iter()
            .filter(|(_, b)| b.neighbors.contains(&s))
            .map(|(&h, _)| h)
            .collect()
    }

    /// Removes a spider together with every H-box touching it.
    pub fn remove_spider_and_boxes(&mut self, s: SpiderId) {
        self.hboxes.retain(|_, b| !b.neighbors.contains(&s));
        self.spiders.remove(&s);
    }

    /// Identifies spider `from` with `into`. Boxes touching both collapse their
    /// parallel wires to one, which preserves semantics.
    pub fn merge_spiders(&mut self, from: SpiderId, into: SpiderId) {
        if from == into {
            return;
        }
        for b in self.hboxes.values_mut() {
            if b.neighbors.remove(&from) {
                b.neighbors.insert(into);
            }
        }
        for s in self.inputs.iter_mut().chain(self.outputs.iter_mut()) {
            if *s == from {
                *s = into;
            }
        }
        self.spiders.remove(&from);
    }

    /// Restores the hypergraph-like invariants after a rewrite: arity-0 boxes
    /// become scalars, boxes on identical spider sets fuse by multiplying
    /// labels, and label-1 boxes are deleted.
    pub fn cleanup(&mut self) {
        let empty: Vec<HBoxId> = self
            .hboxes
            .iter()
            .filter(|(_, b)| b.neighbors.is_empty())
            .map(|(&h, _)| h)
            .collect();
        for h in empty {
            let b = self.hboxes.remove(&h).unwrap();
            self.scalar *= b.label.as_scalar();
        }
        let mut by_set: BTreeMap<BTreeSet<SpiderId>, HBoxId> = BTreeMap::new();
        let ids: Vec<HBoxId> = self.hboxes.keys().copied().collect();
        for h in ids {
            let set = self.hboxes[&h].neighbors.clone();
            match by_set.get(&set) {
                Some(&keep) => {
                    let b = self.hboxes.remove(&h).unwrap();
                    let k = self.hboxes.get_mut(&keep).unwrap();
                    k.label = k.label.mul(&b.label);
                }
                None => {
                    by_set.insert(set, h);
                }
            }
        }
        self.hboxes.retain(|_, b| !b.label.is_one());
    }

    /// Folds spiders with no H-boxes and no boundary wires into the scalar
    /// (each is an arity-0 spider, i.e. the scalar 2).
    pub fn fold_isolated_spiders(&mut self) -> Vec<SpiderId> {
        let used: BTreeSet<SpiderId> = self
            .hboxes
            .values()
            .flat_map(|b| b.neighbors.iter().copied())
            .chain(self.inputs.iter().copied())
            .chain(self.outputs.iter().copied())
            .collect();
        let isolated: Vec<SpiderId> = self.spiders.difference(&used).copied().collect();
        for s in &isolated {
            self.spiders.remove(s);
            self.scalar.pow2 += 2;
        }
        isolated
    }

    /// True when only plain wires remain: no H-boxes, each spider is one
    /// input and the same-position output. The scalar is not checked.
    pub fn is_identity_form(&self) -> bool {
        let distinct: BTreeSet<SpiderId> = self.inputs.iter().copied().collect();
        self.hboxes.is_empty()
            && self.inputs == self.outputs
            && distinct.len() == self.inputs.len()
            && distinct == self.spiders
    }

    /// Structural sanity: every referenced spider exists.
    pub fn validate(&self) -> Result<()> {
        for (h, b) in &self.hboxes {
            if let Some(s) = b.neighbors.iter().find(|s| !self.spiders.contains(s)) {
                return Err(ParseError::Structure(format!("hbox {h} references unknown spider {s}")).into());
            }
        }
        for s in self.inputs.iter().chain(self.outputs.iter()) {
            if !self.spiders.contains(s) {
                return Err(ParseError::Structure(format!("boundary references unknown spider {s}")).into());
            }
        }
        Ok(())
    }

    /// The same diagram as a generator-level term.
    pub fn to_raw(&self) -> RawDiagram {
        let mut raw = RawDiagram::new();
        let mut node_of: BTreeMap<SpiderId, usize> = BTreeMap::new();
        for &s in &self.spiders {
            node_of.insert(s, raw.add_node(Generator::Z));
        }
        for b in self.hboxes.values() {
            let h = raw.add_node(Generator::H(b.label));
            for s in &b.neighbors {
                raw.add_edge(h, node_of[s]);
            }
        }
        for s in &self.inputs {
            let b = raw.add_input();
            raw.add_edge(b, node_of[s]);
        }
        for s in &self.outputs {
            let b = raw.add_output();
            raw.add_edge(b, node_of[s]);
        }
        raw.scalar = self.scalar.clone();
        raw
    }

    /// Graphviz rendering for inspection.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph zh {\n  node [fontname=\"monospace\"];\n");
        for s in &self.spiders {
            let _ = writeln!(out, "  s{s} [shape=circle,label=\"{s}\"];");
        }
        for (h, b) in &self.hboxes {
            let label = match b.label {
                l if l.is_minus_one() => String::new(),
                HLabel::Phase(p) => p.to_string(),
                HLabel::General(z) => format!("{:.3}{:+.3}i", z.re, z.im),
            };
            let _ = writeln!(
                out,
                "  h{h} [shape=box,style=filled,fillcolor=yellow,label=\"{label}\"];"
            );
            for s in &b.neighbors {
                let _ = writeln!(out, "  h{h} -- s{s};");
            }
        }
        for (i, s) in self.inputs.iter().enumerate() {
            let _ = writeln!(out, "  in{i} [shape=plaintext,label=\"in {i}\"];\n  in{i} -- s{s};");
        }
        for (i, s) in self.outputs.iter().enumerate() {
            let _ = writeln!(out, "  out{i} [shape=plaintext,label=\"out {i}\"];\n  out{i} -- s{s};");
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("diagram serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| ParseError::Json(e.to_string()).into())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum LabelRepr {
    Phase { phase: Phase },
    General { re: f64, im: f64 },
}

#[derive(Serialize, Deserialize)]
struct HBoxRepr {
    id: HBoxId,
    label: LabelRepr,
    neighbors: Vec<SpiderId>,
}

#[derive(Serialize, Deserialize)]
struct DiagramRepr {
    spiders: Vec<SpiderId>,
    hboxes: Vec<HBoxRepr>,
    inputs: Vec<SpiderId>,
    outputs: Vec<SpiderId>,
    #[serde(default)]
    scalar: ScalarFactor,
}

impl Serialize for Diagram {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        DiagramRepr {
            spiders: self.spiders.iter().copied().collect(),
            hboxes: self
                .hboxes
                .iter()
                .map(|(&id, b)| HBoxRepr {
                    id,
                    label: match b.label {
                        HLabel::Phase(phase) => LabelRepr::Phase { phase },
                        HLabel::General(z) => LabelRepr::General { re: z.re, im: z.im },
                    },
                    neighbors: b.neighbors.iter().copied().collect(),
                })
                .collect(),
            inputs: self.inputs.clone(),
            outputs: self.outputs.clone(),
            scalar: self.scalar.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Diagram {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = DiagramRepr::deserialize(d)?;
        let mut hboxes = BTreeMap::new();
        for h in r.hboxes {
            let label = match h.label {
                LabelRepr::Phase { phase } => HLabel::Phase(phase),
                LabelRepr::General { re, im } => HLabel::General(Complex64::new(re, im)),
            };
            let neighbors: BTreeSet<SpiderId> = h.neighbors.iter().copied().collect();
            if hboxes.insert(h.id, HBox { label, neighbors }).is_some() {
                return Err(serde::de::Error::custom(format!("duplicate hbox id {}", h.id)));
            }
        }
        let dg = Diagram {
            spiders: r.spiders.into_iter().collect(),
            hboxes,
            inputs: r.inputs,
            outputs: r.outputs,
            scalar: r.scalar,
        };
        dg.validate().map_err(serde::de::Error::custom)?;
        Ok(dg)
    }
}
