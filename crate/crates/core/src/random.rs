//! Seeded random instances for property tests, the selfcheck suite and
//! benchmarks. Every generator keeps sizes small enough for the oracle.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::circuits::{Circuit, GateKind};
use crate::diagram::{Diagram, Generator, HLabel, RawDiagram};
use crate::numeric::{Phase, ScalarFactor};
use crate::pathsum::PurePathSum;
use crate::poly::{BoolPoly, Monomial, PhasePoly, Var};

pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

/// A nonzero phase: usually a multiple of 1/16, sometimes of 1/3.
pub fn phase(r: &mut Rng64) -> Phase {
    if r.gen_bool(0.1) {
        Phase::new(r.gen_range(1..3), 3)
    } else {
        Phase::new(r.gen_range(1..16), 16)
    }
}

pub fn scalar(r: &mut Rng64) -> ScalarFactor {
    ScalarFactor::new(r.gen_range(-3..=3), Phase::new(r.gen_range(0..8), 8))
}

/// A nonconstant monomial over `vars` with at most `max_deg` variables.
pub fn monomial(r: &mut Rng64, vars: &[Var], max_deg: usize) -> Monomial {
    let k = r.gen_range(1..=max_deg.min(vars.len()).max(1));
    Monomial::from_vars(vars.choose_multiple(r, k).copied())
}

/// Boolean polynomial over variables `0..n_vars`; may contain the constant 1.
pub fn bool_poly(r: &mut Rng64, n_vars: usize, max_terms: usize) -> BoolPoly {
    let vars: Vec<Var> = (0..n_vars as Var).collect();
    let mut q = BoolPoly::zero();
    for _ in 0..r.gen_range(0..=max_terms) {
        if vars.is_empty() || r.gen_bool(0.1) {
            q.xor_monomial(Monomial::one());
        } else {
            q.xor_monomial(monomial(r, &vars, 3));
        }
    }
    q
}

fn signature(r: &mut Rng64, vars: &[Var], max_len: usize) -> Vec<Var> {
    let len = r.gen_range(0..=max_len);
    (0..len).map(|_| *vars.choose(r).unwrap()).collect()
}

/// Pure path-sum with `1..=max_vars` variables and up to `max_terms` terms.
/// Signatures may repeat variables; `phi` has no constant term.
pub fn pathsum(r: &mut Rng64, max_vars: usize, max_terms: usize) -> PurePathSum {
    let n = r.gen_range(1..=max_vars);
    let vars: Vec<Var> = (0..n as Var).collect();
    let mut phi = PhasePoly::zero();
    for _ in 0..r.gen_range(0..=max_terms) {
        phi.add_term(monomial(r, &vars, 3), phase(r));
    }
    PurePathSum {
        vars: vars.iter().copied().collect(),
        input_sig: signature(r, &vars, 3),
        output_sig: signature(r, &vars, 3),
        phi,
        scalar: scalar(r),
    }
}

/// Hypergraph-like diagram with up to `max_spiders` spiders and `max_boxes`
/// phase-labelled H-boxes.
pub fn diagram(r: &mut Rng64, max_spiders: usize, max_boxes: usize) -> Diagram {
    let mut d = Diagram::new();
    for _ in 0..r.gen_range(1..=max_spiders) {
        d.add_spider();
    }
    let ids: Vec<usize> = d.spiders.iter().copied().collect();
    for _ in 0..r.gen_range(0..=max_boxes) {
        let k = r.gen_range(1..=3.min(ids.len()));
        let set: Vec<usize> = ids.choose_multiple(r, k).copied().collect();
        d.add_hbox(HLabel::Phase(phase(r)), set);
    }
    let sig = |r: &mut Rng64| -> Vec<usize> { (0..r.gen_range(0..=3)).map(|_| *ids.choose(r).unwrap()).collect() };
    d.inputs = sig(r);
    d.outputs = sig(r);
    d.scalar = scalar(r);
    d.cleanup();
    d
}

/// An H-box label: mostly phases, sometimes an arbitrary complex number.
pub fn hlabel(r: &mut Rng64) -> HLabel {
    match r.gen_range(0..6) {
        0 => HLabel::General(Complex64::new(r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0))),
        1 => HLabel::minus_one(),
        _ => HLabel::Phase(phase(r)),
    }
}

/// Generator-level diagram over Z, X, H and NOT nodes with self-loops and
/// parallel wires allowed. Sizes stay within the default oracle cap.
pub fn raw_diagram(r: &mut Rng64, max_nodes: usize, max_wires: usize) -> RawDiagram {
    let mut d = RawDiagram::new();
    let n = r.gen_range(1..=max_nodes);
    let nodes: Vec<usize> = (0..n)
        .map(|_| {
            let g = match r.gen_range(0..3) {
                0 => Generator::Z,
                1 => Generator::X,
                _ => Generator::H(hlabel(r)),
            };
            d.add_node(g)
        })
        .collect();
    for _ in 0..r.gen_range(0..=max_wires) {
        let a = *nodes.choose(r).unwrap();
        let b = *nodes.choose(r).unwrap();
        if r.gen_bool(0.2) {
            let not = d.add_node(Generator::Not);
            d.add_edge(a, not);
            d.add_edge(not, b);
        } else {
            d.add_edge(a, b);
        }
    }
    for _ in 0..r.gen_range(0..=2) {
        let b = d.add_input();
        d.add_edge(b, *nodes.choose(r).unwrap());
    }
    for _ in 0..r.gen_range(0..=2) {
        let b = d.add_output();
        d.add_edge(*nodes.choose(r).unwrap(), b);
    }
    d.scalar = scalar(r);
    d
}

/// Gates used for random Toffoli+Hadamard-family circuits.
pub const CIRCUIT_GATES: [GateKind; 5] = [GateKind::TOF, GateKind::H, GateKind::CNOT, GateKind::T, GateKind::Tdg];

/// Random circuit on `width` qubits from `kinds`; gates too wide for the
/// circuit are skipped when drawn.
pub fn circuit(r: &mut Rng64, width: usize, gates: usize, kinds: &[GateKind]) -> Circuit {
    let mut c = Circuit::new(width);
    let usable: Vec<GateKind> = kinds.iter().copied().filter(|k| k.arity() <= width).collect();
    let all: Vec<usize> = (0..width).collect();
    for _ in 0..gates {
        let k = *usable.choose(r).expect("some gate fits the width");
        let qs: Vec<usize> = all.choose_multiple(r, k.arity()).copied().collect();
        c.push(k, &qs).expect("distinct in-range qubits");
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_generators_are_deterministic() {
        let a = pathsum(&mut rng(7), 6, 8);
        let b = pathsum(&mut rng(7), 6, 8);
        assert_eq!(a, b);
        assert!(a.validate().is_ok());
        let d = diagram(&mut rng(3), 6, 8);
        assert!(d.validate().is_ok());
        assert_eq!(
            circuit(&mut rng(1), 3, 10, &CIRCUIT_GATES),
            circuit(&mut rng(1), 3, 10, &CIRCUIT_GATES)
        );
    }
}
