use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

use super::{Diagram, Generator, HBox, HLabel, RawDiagram};

/// Brings an arbitrary ZH-diagram into hypergraph-like form with an
/// equal-valued tracked scalar.
///
/// X-spiders and NOTs are expanded into Z-spiders and H-boxes, adjacent
/// Z-spiders fused, identity spiders inserted where H-boxes would touch
/// boundaries or each other, parallel wires removed and duplicate boxes fused.
pub fn normalize(raw: &RawDiagram) -> Diagram {
    let mut d = raw.clone();
    expand_derived(&mut d);
    cancel_hadamard_pairs(&mut d);
    fuse_z(&mut d);
    subdivide(&mut d);
    let pairs: BTreeSet<(usize, usize)> = d
        .edges()
        .filter_map(|(_, a, b)| match (d.node(a), d.node(b)) {
            (Some(Generator::H(_)), Some(Generator::Z)) => Some((a, b)),
            (Some(Generator::Z), Some(Generator::H(_))) => Some((b, a)),
            _ => None,
        })
        .collect();
    for (h, s) in pairs {
        reduce_parallel(&mut d, h, s).expect("H-box to spider pair");
    }
    to_hypergraph(&d)
}

/// Collapses the parallel wires between H-box `hbox` and Z-spider `spider`
/// into one. Both endpoints copy their value onto every such wire, so the
/// diagram's value is unchanged.
pub fn reduce_parallel(d: &mut RawDiagram, hbox: usize, spider: usize) -> Result<()> {
    if !matches!(d.node(hbox), Some(Generator::H(_))) {
        return Err(Error::precondition(
            "reduce_parallel",
            format!("node {hbox} is not an H-box"),
        ));
    }
    if d.node(spider) != Some(Generator::Z) {
        return Err(Error::precondition(
            "reduce_parallel",
            format!("node {spider} is not a Z-spider"),
        ));
    }
    let wires: Vec<usize> = d
        .edges()
        .filter(|&(_, a, b)| (a, b) == (hbox, spider) || (a, b) == (spider, hbox))
        .map(|(e, _, _)| e)
        .collect();
    for &e in wires.iter().skip(1) {
        d.remove_edge(e);
    }
    Ok(())
}

/// Replaces X-spiders and NOTs by Z-spiders and unlabelled H-boxes.
fn expand_derived(d: &mut RawDiagram) {
    let derived: Vec<(usize, Generator)> = d
        .nodes()
        .filter(|(_, g)| matches!(g, Generator::X | Generator::Not))
        .collect();
    for (n, g) in derived {
        let centre = d.add_node(Generator::Z);
        if g == Generator::Not {
            let pi = d.add_node(Generator::H(HLabel::minus_one()));
            d.add_edge(centre, pi);
        }
        let mut legs = 0;
        for e in d.incident(n) {
            let (a, b) = d.edge(e).unwrap();
            d.remove_edge(e);
            if a == n && b == n {
                let h1 = d.add_node(Generator::H(HLabel::minus_one()));
                let h2 = d.add_node(Generator::H(HLabel::minus_one()));
                d.add_edge(centre, h1);
                d.add_edge(h1, h2);
                d.add_edge(h2, centre);
                legs += 2;
            } else {
                let other = if a == n { b } else { a };
                let h = d.add_node(Generator::H(HLabel::minus_one()));
                d.add_edge(centre, h);
                d.add_edge(h, other);
                legs += 1;
            }
        }
        d.remove_node(n);
        // Each leg carries a normalized Hadamard.
        d.scalar.pow2 -= legs;
    }
}

/// Two wired-together unlabelled arity-2 H-boxes equal twice a plain wire.
fn cancel_hadamard_pairs(d: &mut RawDiagram) {
    loop {
        let is_h2 = |d: &RawDiagram, n: usize| {
            matches!(d.node(n), Some(Generator::H(l)) if l.is_minus_one()) && d.incident(n).len() == 2 && {
                let ns = d.neighbors(n);
                ns[0] != n && ns[1] != n
            }
        };
        let found = d.edges().find_map(|(_, a, b)| {
            if a == b || !is_h2(d, a) || !is_h2(d, b) {
                return None;
            }
            let na = d.neighbors(a);
            let nb = d.neighbors(b);
            // A pair joined by two wires forms a closed loop; leave it.
            if na.iter().filter(|&&x| x == b).count() != 1 {
                return None;
            }
            let pa = *na.iter().find(|&&x| x != b).unwrap();
            let pb = *nb.iter().find(|&&x| x != a).unwrap();
            Some((a, b, pa, pb))
        });
        let Some((a, b, pa, pb)) = found else { break };
        d.remove_node(a);
        d.remove_node(b);
        d.add_edge(pa, pb);
        d.scalar.pow2 += 2;
    }
}

/// Fuses every connected cluster of Z-spiders; wires inside a cluster vanish.
fn fuse_z(d: &mut RawDiagram) {
    let z: Vec<usize> = d.nodes().filter(|(_, g)| *g == Generator::Z).map(|(n, _)| n).collect();
    let mut parent: BTreeMap<usize, usize> = z.iter().map(|&n| (n, n)).collect();
    fn find(p: &mut BTreeMap<usize, usize>, x: usize) -> usize {
        let mut r = x;
        while p[&r] != r {
            r = p[&r];
        }
        let mut c = x;
        while p[&c] != r {
            let next = p[&c];
            p.insert(c, r);
            c = next;
        }
        r
    }
    let zz: Vec<(usize, usize, usize)> = d
        .edges()
        .filter(|&(_, a, b)| d.node(a) == Some(Generator::Z) && d.node(b) == Some(Generator::Z))
        .collect();
    for &(e, a, b) in &zz {
        d.remove_edge(e);
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            parent.insert(hi, lo);
        }
    }
    for &n in &z {
        let r = find(&mut parent, n);
        if r == n {
            continue;
        }
        for e in d.incident(n) {
            let (a, b) = d.edge(e).unwrap();
            d.remove_edge(e);
            let a = if a == n { r } else { a };
            let b = if b == n { r } else { b };
            d.add_edge(a, b);
        }
        d.remove_node(n);
    }
}

/// Inserts an arity-2 Z-spider on every wire that does not join an H-box to
/// a Z-spider or a boundary to a Z-spider.
fn subdivide(d: &mut RawDiagram) {
    let bad: Vec<(usize, usize, usize)> = d
        .edges()
        .filter(|&(_, a, b)| {
            let ga = d.node(a).unwrap();
            let gb = d.node(b).unwrap();
            !(ga == Generator::Z || gb == Generator::Z) || a == b
        })
        .collect();
    for (e, a, b) in bad {
        d.remove_edge(e);
        let s = d.add_node(Generator::Z);
        d.add_edge(a, s);
        d.add_edge(s, b);
    }
}

fn to_hypergraph(d: &RawDiagram) -> Diagram {
    let mut out = Diagram::new();
    out.scalar = d.scalar.clone();
    for (n, g) in d.nodes() {
        if g == Generator::Z {
            out.spiders.insert(n);
        }
    }
    for (n, g) in d.nodes() {
        if let Generator::H(label) = g {
            let neighbors: BTreeSet<usize> = d.neighbors(n).into_iter().collect();
            out.hboxes.insert(n, HBox { label, neighbors });
        }
    }
    let attach = |b: usize| d.neighbors(b)[0];
    out.inputs = d.inputs.iter().map(|&b| attach(b)).collect();
    out.outputs = d.outputs.iter().map(|&b| attach(b)).collect();
    loop {
        let before = (out.num_hboxes(), out.num_spiders());
        out.cleanup();
        out.fold_isolated_spiders();
        if before == (out.num_hboxes(), out.num_spiders()) {
            break;
        }
    }
    out
}
