//! The basic ZH rules on generator-level diagrams, applied left to right.
//!
//! Generators are unnormalised (a Z-spider is the all-equal delta, an H-box
//! labelled `a` has entry `a^{x1⋯xn}`), so each rule carries the power of
//! `√2` that keeps the tracked scalar exact.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::diagram::{Generator, HLabel, RawDiagram};
use crate::error::{Error, ParseError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasicRule {
    /// Two Z-spiders joined by wires fuse. Location `[z1, z2]`.
    ZS1,
    /// An arity-2 Z-spider is a wire. Location `[z]`.
    ZS2,
    /// `H(a)` and an unlabelled H-box joined through an arity-2 unlabelled
    /// box fuse into `H(a)`. Location `[middle box]`.
    HS1,
    /// Two unlabelled arity-2 boxes in series are twice a wire. Location `[h1, h2]`.
    HS2,
    /// Z/X bialgebra. Location `[z, x]`.
    BA1,
    /// A Z-spider feeding an unlabelled H-box through an arity-2 box:
    /// copy the AND of the H-box's other legs. Location `[middle box]`.
    BA2,
    /// H-boxes on the same Z-spiders multiply. Location `[h1, h2]`.
    M,
    /// An H-box labelled 1 disconnects. Location `[h]`.
    U,
    /// An H-box gains a leg fixed to `|1⟩`. Location `[h]`.
    I,
    /// Average: `a` on `t` and `b` on `¬t` sum to a box `(a+b)/2`. Location `[t]`.
    A,
    /// Ortho: equal boxes on `s` and `¬s` drop the `s` leg. Location `[ha, hb]`.
    O,
}

impl BasicRule {
    pub const ALL: [BasicRule; 11] = [
        BasicRule::ZS1,
        BasicRule::ZS2,
        BasicRule::HS1,
        BasicRule::HS2,
        BasicRule::BA1,
        BasicRule::BA2,
        BasicRule::M,
        BasicRule::U,
        BasicRule::I,
        BasicRule::A,
        BasicRule::O,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BasicRule::ZS1 => "ZS1",
            BasicRule::ZS2 => "ZS2",
            BasicRule::HS1 => "HS1",
            BasicRule::HS2 => "HS2",
            BasicRule::BA1 => "BA1",
            BasicRule::BA2 => "BA2",
            BasicRule::M => "M",
            BasicRule::U => "U",
            BasicRule::I => "I",
            BasicRule::A => "A",
            BasicRule::O => "O",
        }
    }

    fn arity(self) -> usize {
        match self {
            BasicRule::ZS1 | BasicRule::HS2 | BasicRule::BA1 | BasicRule::M | BasicRule::O => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for BasicRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BasicRule {
    type Err = ParseError;

    fn from_str(s: &str) -> std::result::Result<Self, ParseError> {
        BasicRule::ALL
            .into_iter()
            .find(|r| r.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| ParseError::Structure(format!("unknown basic rule '{s}'")))
    }
}

fn fail<T>(rule: BasicRule, reason: impl Into<String>) -> Result<T> {
    Err(Error::precondition(rule.name(), reason))
}

fn is_z(d: &RawDiagram, n: usize) -> bool {
    d.node(n) == Some(Generator::Z)
}

fn h_label(d: &RawDiagram, n: usize) -> Option<HLabel> {
    match d.node(n) {
        Some(Generator::H(l)) => Some(l),
        _ => None,
    }
}

fn has_loop(d: &RawDiagram, n: usize) -> bool {
    d.neighbors(n).contains(&n)
}

fn wires_between(d: &RawDiagram, a: usize, b: usize) -> Vec<usize> {
    d.edges()
        .filter(|&(_, x, y)| (x, y) == (a, b) || (x, y) == (b, a))
        .map(|(e, _, _)| e)
        .collect()
}

/// Far ends of the wires at `n`, skipping the wires to `skip`.
fn others(d: &RawDiagram, n: usize, skip: &[usize]) -> Vec<usize> {
    let mut v: Vec<usize> = d.neighbors(n).into_iter().filter(|x| !skip.contains(x)).collect();
    v.sort_unstable();
    v
}

fn is_plain_h2(d: &RawDiagram, n: usize) -> bool {
    h_label(d, n).is_some_and(|l| l.is_minus_one()) && d.degree(n) == 2 && !has_loop(d, n)
}

/// Applies `rule` at `loc`, returning the rewritten diagram.
pub fn apply_basic(d: &RawDiagram, rule: BasicRule, loc: &[usize]) -> Result<RawDiagram> {
    if loc.len() != rule.arity() {
        return fail(
            rule,
            format!("expects {} location nodes, got {}", rule.arity(), loc.len()),
        );
    }
    let mut out = d.clone();
    match rule {
        BasicRule::ZS1 => zs1(&mut out, loc[0], loc[1])?,
        BasicRule::ZS2 => zs2(&mut out, loc[0])?,
        BasicRule::HS1 => hs1(&mut out, loc[0])?,
        BasicRule::HS2 => hs2(&mut out, loc[0], loc[1])?,
        BasicRule::BA1 => ba1(&mut out, loc[0], loc[1])?,
        BasicRule::BA2 => ba2(&mut out, loc[0])?,
        BasicRule::M => multiply(&mut out, loc[0], loc[1])?,
        BasicRule::U => unit(&mut out, loc[0])?,
        BasicRule::I => intro(&mut out, loc[0])?,
        BasicRule::A => average(&mut out, loc[0])?,
        BasicRule::O => ortho(&mut out, loc[0], loc[1])?,
    }
    Ok(out)
}

/// Every location where `rule` applies. Pairs are tried exhaustively, so this
/// is meant for small diagrams.
pub fn find_basic(d: &RawDiagram, rule: BasicRule) -> Vec<Vec<usize>> {
    let ids: Vec<usize> = d.nodes().map(|(n, _)| n).collect();
    let locs: Vec<Vec<usize>> = if rule.arity() == 1 {
        ids.iter().map(|&n| vec![n]).collect()
    } else {
        let symmetric = matches!(rule, BasicRule::ZS1 | BasicRule::HS2 | BasicRule::M);
        let mut v = Vec::new();
        for &a in &ids {
            for &b in &ids {
                if a != b && (!symmetric || a < b) {
                    v.push(vec![a, b]);
                }
            }
        }
        v
    };
    locs.into_iter().filter(|l| apply_basic(d, rule, l).is_ok()).collect()
}

fn zs1(d: &mut RawDiagram, a: usize, b: usize) -> Result<()> {
    let rule = BasicRule::ZS1;
    if a == b || !is_z(d, a) || !is_z(d, b) {
        return fail(rule, "needs two distinct Z-spiders");
    }
    let between = wires_between(d, a, b);
    if between.is_empty() {
        return fail(rule, "spiders are not connected");
    }
    for e in between {
        d.remove_edge(e);
    }
    for e in d.incident(b) {
        let (x, y) = d.edge(e).unwrap();
        d.remove_edge(e);
        d.add_edge(if x == b { a } else { x }, if y == b { a } else { y });
    }
    d.remove_node(b);
    Ok(())
}

fn zs2(d: &mut RawDiagram, z: usize) -> Result<()> {
    if !is_z(d, z) || d.degree(z) != 2 || has_loop(d, z) {
        return fail(BasicRule::ZS2, "needs an arity-2 Z-spider without self-loop");
    }
    let ns = d.neighbors(z);
    d.remove_node(z);
    d.add_edge(ns[0], ns[1]);
    Ok(())
}

fn hs1(d: &mut RawDiagram, mid: usize) -> Result<()> {
    let rule = BasicRule::HS1;
    if !is_plain_h2(d, mid) {
        return fail(rule, "middle node is not an unlabelled arity-2 H-box");
    }
    let ns = d.neighbors(mid);
    let (p, q) = (ns[0].min(ns[1]), ns[0].max(ns[1]));
    let (Some(lp), Some(lq)) = (h_label(d, p), h_label(d, q)) else {
        return fail(rule, "both ends must be H-boxes");
    };
    if p == q || wires_between(d, p, q).len() + wires_between(d, mid, p).len() + wires_between(d, mid, q).len() != 2 {
        return fail(rule, "ends must be distinct and joined only through the middle box");
    }
    // Keep the labelled box; absorb an unlabelled one.
    let (keep, gone) = if lq.is_minus_one() {
        (p, q)
    } else if lp.is_minus_one() {
        (q, p)
    } else {
        return fail(rule, "one end must be unlabelled");
    };
    if has_loop(d, gone) {
        return fail(rule, "absorbed box has a self-loop");
    }
    for x in others(d, gone, &[mid]) {
        d.add_edge(keep, x);
    }
    d.remove_node(gone);
    d.remove_node(mid);
    d.scalar.pow2 += 2;
    Ok(())
}

fn hs2(d: &mut RawDiagram, a: usize, b: usize) -> Result<()> {
    let rule = BasicRule::HS2;
    if a == b || !is_plain_h2(d, a) || !is_plain_h2(d, b) || wires_between(d, a, b).len() != 1 {
        return fail(rule, "needs two unlabelled arity-2 H-boxes joined by one wire");
    }
    let pa = others(d, a, &[b])[0];
    let pb = others(d, b, &[a])[0];
    d.remove_node(a);
    d.remove_node(b);
    d.add_edge(pa, pb);
    d.scalar.pow2 += 2;
    Ok(())
}

fn ba1(d: &mut RawDiagram, z: usize, x: usize) -> Result<()> {
    let rule = BasicRule::BA1;
    if !is_z(d, z) || d.node(x) != Some(Generator::X) {
        return fail(rule, "needs a Z-spider and an X-spider");
    }
    if wires_between(d, z, x).len() != 1 || has_loop(d, z) || has_loop(d, x) {
        return fail(rule, "spiders must share exactly one wire and have no self-loops");
    }
    let a = others(d, z, &[x]);
    let b = others(d, x, &[z]);
    d.remove_node(z);
    d.remove_node(x);
    let xs: Vec<usize> = a
        .iter()
        .map(|&p| {
            let n = d.add_node(Generator::X);
            d.add_edge(n, p);
            n
        })
        .collect();
    let zs: Vec<usize> = b
        .iter()
        .map(|&q| {
            let n = d.add_node(Generator::Z);
            d.add_edge(n, q);
            n
        })
        .collect();
    for &i in &xs {
        for &j in &zs {
            d.add_edge(i, j);
        }
    }
    let (m, n) = (a.len() as i32, b.len() as i32);
    d.scalar.pow2 += (1 - n) * (1 - m);
    Ok(())
}

fn ba2(d: &mut RawDiagram, t: usize) -> Result<()> {
    let rule = BasicRule::BA2;
    if !is_plain_h2(d, t) {
        return fail(rule, "middle node is not an unlabelled arity-2 H-box");
    }
    let ns = d.neighbors(t);
    let (z, h) = match (is_z(d, ns[0]), is_z(d, ns[1])) {
        (true, false) => (ns[0], ns[1]),
        (false, true) => (ns[1], ns[0]),
        _ => return fail(rule, "needs exactly one Z-spider end"),
    };
    if !h_label(d, h).is_some_and(|l| l.is_minus_one()) || has_loop(d, z) || has_loop(d, h) {
        return fail(rule, "other end must be an unlabelled H-box; no self-loops");
    }
    if !wires_between(d, z, h).is_empty() {
        return fail(rule, "spider and H-box are also directly connected");
    }
    let a = others(d, z, &[t]);
    let b = others(d, h, &[t]);
    d.remove_node(z);
    d.remove_node(h);
    d.remove_node(t);
    let copies: Vec<usize> = b
        .iter()
        .map(|&q| {
            let s = d.add_node(Generator::Z);
            d.add_edge(s, q);
            s
        })
        .collect();
    for &p in &a {
        let k = d.add_node(Generator::H(HLabel::minus_one()));
        let mid = d.add_node(Generator::H(HLabel::minus_one()));
        d.add_edge(k, mid);
        d.add_edge(mid, p);
        for &s in &copies {
            d.add_edge(k, s);
        }
    }
    d.scalar.pow2 += 2 * (1 - a.len() as i32);
    Ok(())
}

/// Neighbour multiset of an H-box, which must consist of Z-spiders.
fn z_legs(d: &RawDiagram, h: usize, skip: &[usize]) -> Option<Vec<usize>> {
    let v = others(d, h, skip);
    v.iter().all(|&n| is_z(d, n)).then_some(v)
}

fn multiply(d: &mut RawDiagram, a: usize, b: usize) -> Result<()> {
    let rule = BasicRule::M;
    let (Some(la), Some(lb)) = (h_label(d, a), h_label(d, b)) else {
        return fail(rule, "needs two H-boxes");
    };
    match (z_legs(d, a, &[]), z_legs(d, b, &[])) {
        (Some(x), Some(y)) if a != b && x == y => {}
        _ => return fail(rule, "H-boxes must touch the same Z-spiders"),
    }
    d.set_node(a, Generator::H(la.mul(&lb)));
    d.remove_node(b);
    Ok(())
}

fn unit(d: &mut RawDiagram, h: usize) -> Result<()> {
    let rule = BasicRule::U;
    if !h_label(d, h).is_some_and(|l| l.is_one()) || has_loop(d, h) {
        return fail(rule, "needs an H-box labelled 1 without self-loop");
    }
    let ns = d.neighbors(h);
    d.remove_node(h);
    for p in ns {
        let z = d.add_node(Generator::Z);
        d.add_edge(z, p);
    }
    Ok(())
}

fn intro(d: &mut RawDiagram, h: usize) -> Result<()> {
    if h_label(d, h).is_none() {
        return fail(BasicRule::I, "needs an H-box");
    }
    let not = d.add_node(Generator::Not);
    let zero = d.add_node(Generator::H(HLabel::General(Complex64::new(0.0, 0.0))));
    d.add_edge(h, not);
    d.add_edge(not, zero);
    Ok(())
}

/// The node behind a NOT hanging off `s`, with the NOT itself.
fn through_not(d: &RawDiagram, s: usize) -> Vec<(usize, usize)> {
    d.neighbors(s)
        .into_iter()
        .filter(|&n| d.node(n) == Some(Generator::Not) && d.degree(n) == 2 && !has_loop(d, n))
        .map(|n| (n, others(d, n, &[s])[0]))
        .collect()
}

fn average(d: &mut RawDiagram, t: usize) -> Result<()> {
    let rule = BasicRule::A;
    if !is_z(d, t) || d.degree(t) != 2 || has_loop(d, t) {
        return fail(rule, "needs an arity-2 Z-spider");
    }
    let ns = d.neighbors(t);
    let (ha, not) = match (h_label(d, ns[0]).is_some(), h_label(d, ns[1]).is_some()) {
        (true, false) => (ns[0], ns[1]),
        (false, true) => (ns[1], ns[0]),
        _ => return fail(rule, "needs one H-box and one NOT next to the spider"),
    };
    let Some(&(_, hb)) = through_not(d, t).iter().find(|(n, _)| *n == not) else {
        return fail(rule, "second neighbour is not a NOT");
    };
    let (Some(la), Some(lb)) = (h_label(d, ha), h_label(d, hb)) else {
        return fail(rule, "NOT must lead to an H-box");
    };
    match (z_legs(d, ha, &[t]), z_legs(d, hb, &[not])) {
        (Some(x), Some(y)) if ha != hb && x == y && !x.contains(&t) => {}
        _ => return fail(rule, "H-boxes must share their other Z-spiders"),
    }
    d.remove_node(t);
    d.remove_node(not);
    d.remove_node(hb);
    d.set_node(ha, Generator::H(HLabel::General((la.value() + lb.value()) / 2.0)));
    d.scalar.pow2 += 2;
    Ok(())
}

fn ortho(d: &mut RawDiagram, ha: usize, hb: usize) -> Result<()> {
    let rule = BasicRule::O;
    let (Some(la), Some(lb)) = (h_label(d, ha), h_label(d, hb)) else {
        return fail(rule, "needs two H-boxes");
    };
    if ha == hb || la != lb {
        return fail(rule, "H-boxes must be distinct with equal labels");
    }
    for s in others(d, ha, &[]) {
        if !is_z(d, s) || wires_between(d, s, ha).len() != 1 {
            continue;
        }
        for (not, end) in through_not(d, s) {
            if end != hb || wires_between(d, not, hb).len() != 1 {
                continue;
            }
            match (z_legs(d, ha, &[s]), z_legs(d, hb, &[not])) {
                (Some(x), Some(y)) if x == y => {}
                _ => continue,
            }
            d.remove_edge(wires_between(d, s, ha)[0]);
            d.remove_node(not);
            d.remove_node(hb);
            return Ok(());
        }
    }
    fail(rule, "no spider joins the boxes directly and through a NOT")
}
