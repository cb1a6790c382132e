//! Rewrite rules acting directly on hypergraph-like diagrams.
//!
//! Every rule is computed as a [`Plan`]: spiders and boxes to drop, boxes to
//! add, an optional spider merge and a scalar. Executing a plan finishes with
//! [`Diagram::cleanup`] only, so each rule matches its path-sum counterpart
//! under translation step for step.

use std::collections::BTreeSet;

use crate::diagram::{Diagram, HBoxId, HLabel, SpiderId};
use crate::error::{Error, Result};
use crate::numeric::{Phase, ScalarFactor};

use super::case::{detect_case, CaseShape};
use super::combinatorics::case_exponent;
use super::RuleId;

/// Subset expansions larger than `2^MAX_GROUPS` boxes are refused.
pub const MAX_GROUPS: usize = 16;

type Set = BTreeSet<SpiderId>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphicalMatch {
    pub rule: RuleId,
    /// A spider id for the spider-located rules, an H-box id otherwise.
    pub at: usize,
}

impl GraphicalMatch {
    pub fn location(&self) -> Vec<usize> {
        vec![self.at]
    }
}

#[derive(Debug, Default)]
struct Plan {
    drop_spiders: Vec<SpiderId>,
    add: Vec<(HLabel, Set)>,
    merge: Option<(SpiderId, SpiderId)>,
    scalar: ScalarFactor,
}

fn execute(d: &Diagram, plan: Plan) -> Diagram {
    let mut out = d.clone();
    for &s in &plan.drop_spiders {
        out.remove_spider_and_boxes(s);
    }
    for (label, set) in plan.add {
        out.add_hbox(label, set);
    }
    if let Some((from, into)) = plan.merge {
        out.merge_spiders(from, into);
    }
    out.scalar *= plan.scalar;
    out.cleanup();
    out
}

fn fail<T>(rule: RuleId, reason: impl Into<String>) -> Result<T> {
    Err(Error::precondition(rule.name(), reason))
}

/// Boxes on `s` other than `skip`, as (id, neighbours without `s`, label).
fn around(d: &Diagram, s: SpiderId, skip: Option<HBoxId>) -> Vec<(HBoxId, Set, HLabel)> {
    d.hboxes
        .iter()
        .filter(|(h, b)| Some(**h) != skip && b.neighbors.contains(&s))
        .map(|(&h, b)| {
            let mut rest = b.neighbors.clone();
            rest.remove(&s);
            (h, rest, b.label)
        })
        .collect()
}

fn interior(d: &Diagram, rule: RuleId, s: SpiderId) -> Result<()> {
    if !d.spiders.contains(&s) {
        return fail(rule, format!("no spider {s}"));
    }
    if d.is_boundary(s) {
        return fail(rule, format!("spider {s} is on the boundary"));
    }
    Ok(())
}

/// The two interior endpoints of an unlabelled arity-2 box.
fn pivot_edge(d: &Diagram, rule: RuleId, h: HBoxId) -> Result<(SpiderId, SpiderId)> {
    let Some(b) = d.hboxes.get(&h) else {
        return fail(rule, format!("no H-box {h}"));
    };
    if !b.label.is_minus_one() || b.neighbors.len() != 2 {
        return fail(rule, format!("H-box {h} is not an unlabelled arity-2 box"));
    }
    let mut it = b.neighbors.iter().copied();
    let (u, v) = (it.next().unwrap(), it.next().unwrap());
    interior(d, rule, u)?;
    interior(d, rule, v)?;
    Ok((u, v))
}

/// Boxes on `s` besides `h`; none may also touch `other`.
fn side(d: &Diagram, rule: RuleId, s: SpiderId, other: SpiderId, h: HBoxId) -> Result<Vec<(Set, HLabel)>> {
    let mut out = Vec::new();
    for (id, rest, label) in around(d, s, Some(h)) {
        if rest.contains(&other) {
            return fail(rule, format!("H-box {id} touches both pivot spiders"));
        }
        out.push((rest, label));
    }
    Ok(out)
}

fn all_half(side: &[(Set, HLabel)]) -> Option<Vec<Set>> {
    side.iter().map(|(s, l)| l.is_minus_one().then(|| s.clone())).collect()
}

/// Calls `f(union, size)` for every nonempty subset of `groups` with at most
/// `max` members.
fn for_subsets(groups: &[Set], max: usize, f: &mut dyn FnMut(&Set, u32)) {
    fn rec(groups: &[Set], start: usize, size: usize, max: usize, acc: &Set, f: &mut dyn FnMut(&Set, u32)) {
        for i in start..groups.len() {
            let u: Set = acc.union(&groups[i]).copied().collect();
            f(&u, (size + 1) as u32);
            if size + 1 < max {
                rec(groups, i + 1, size + 1, max, &u, f);
            }
        }
    }
    rec(groups, 0, 0, max, &Set::new(), f);
}

/// Largest subset size whose `(−2)^{|b|−1}` power of `label` can differ from 1.
fn subset_bound(rule: RuleId, label: &HLabel, n: usize) -> Result<usize> {
    match label.as_phase().and_then(|p| p.dyadic_support()) {
        Some(k) => Ok((k as usize).min(n)),
        None if n <= MAX_GROUPS => Ok(n),
        None => fail(rule, format!("expansion over {n} groups exceeds 2^{MAX_GROUPS} boxes")),
    }
}

fn plan_isolated(d: &Diagram, s: SpiderId) -> Result<Plan> {
    let rule = RuleId::IsolatedSpider;
    interior(d, rule, s)?;
    if !d.boxes_on(s).is_empty() {
        return fail(rule, format!("spider {s} has H-boxes"));
    }
    Ok(Plan {
        drop_spiders: vec![s],
        scalar: ScalarFactor::sqrt2_pow(2),
        ..Plan::default()
    })
}

fn plan_hs2(d: &Diagram, s: SpiderId) -> Result<Plan> {
    let rule = RuleId::Hs2Merge;
    interior(d, rule, s)?;
    let boxes = around(d, s, None);
    let ends: Option<Vec<SpiderId>> = boxes
        .iter()
        .map(|(_, rest, l)| (l.is_minus_one() && rest.len() == 1).then(|| *rest.iter().next().unwrap()))
        .collect();
    match ends.as_deref() {
        Some(&[a, b]) if a != b => Ok(Plan {
            drop_spiders: vec![s],
            merge: Some((a.max(b), a.min(b))),
            scalar: ScalarFactor::sqrt2_pow(2),
            ..Plan::default()
        }),
        _ => fail(
            rule,
            format!("spider {s} is not between exactly two unlabelled arity-2 boxes"),
        ),
    }
}

fn plan_hyper_pivot(d: &Diagram, h: HBoxId) -> Result<Plan> {
    let rule = RuleId::HyperPivot;
    let (u, v) = pivot_edge(d, rule, h)?;
    let (Some(ns), Some(ms)) = (all_half(&side(d, rule, u, v, h)?), all_half(&side(d, rule, v, u, h)?)) else {
        return fail(rule, "a box on a pivot spider is labelled");
    };
    let mut add = Vec::new();
    for n in &ns {
        for m in &ms {
            add.push((HLabel::minus_one(), n.union(m).copied().collect()));
        }
    }
    Ok(Plan {
        drop_spiders: vec![u, v],
        add,
        scalar: ScalarFactor::sqrt2_pow(2),
        ..Plan::default()
    })
}

/// For an unlabelled arity-2 box `h`, the endpoint whose other boxes are all
/// unlabelled (lowest id first) and the opposite endpoint.
pub fn pivot_sides(d: &Diagram, h: HBoxId) -> Option<(SpiderId, SpiderId)> {
    let rule = RuleId::FourierHyperPivot;
    let (a, b) = pivot_edge(d, rule, h).ok()?;
    [(a, b), (b, a)].into_iter().find(|&(u, v)| {
        side(d, rule, u, v, h).ok().and_then(|s| all_half(&s)).is_some() && side(d, rule, v, u, h).is_ok()
    })
}

fn plan_fourier_hyper_pivot(d: &Diagram, h: HBoxId) -> Result<Plan> {
    let rule = RuleId::FourierHyperPivot;
    pivot_edge(d, rule, h)?;
    let Some((u, v)) = pivot_sides(d, h) else {
        return fail(rule, "neither pivot spider has only unlabelled boxes");
    };
    let ns = all_half(&side(d, rule, u, v, h)?).unwrap();
    let ms = side(d, rule, v, u, h)?;
    let mut add = Vec::new();
    for (m, label) in &ms {
        if label.is_zero() {
            return fail(rule, "a box on the labelled side has label 0");
        }
        let max = subset_bound(rule, label, ns.len())?;
        for_subsets(&ns, max, &mut |union, size| {
            add.push((label.pow_neg2(size - 1), m.union(union).copied().collect()));
        });
    }
    Ok(Plan {
        drop_spiders: vec![u, v],
        add,
        scalar: ScalarFactor::sqrt2_pow(2),
        ..Plan::default()
    })
}

fn plan_hlc(d: &Diagram, u: SpiderId) -> Result<Plan> {
    let rule = RuleId::HyperLocalComplement;
    interior(d, rule, u)?;
    let mut conj = None;
    let mut ms = Vec::new();
    for (id, rest, label) in around(d, u, None) {
        if rest.is_empty() {
            let c = match label.as_phase() {
                Some(p) if p == Phase::quarter() => false,
                Some(p) if p == Phase::new(3, 4) => true,
                _ => return fail(rule, format!("unary H-box {id} is not labelled i or −i")),
            };
            if conj.replace(c).is_some() {
                return fail(rule, "two unary H-boxes");
            }
        } else if label.is_minus_one() {
            ms.push(rest);
        } else {
            return fail(rule, format!("H-box {id} is labelled"));
        }
    }
    let Some(conj) = conj else {
        return fail(rule, format!("spider {u} has no unary i-box"));
    };
    let (single, phase) = if conj {
        (HLabel::phase(1, 4), Phase::new(7, 8))
    } else {
        (HLabel::phase(3, 4), Phase::new(1, 8))
    };
    let mut add: Vec<(HLabel, Set)> = ms.iter().map(|m| (single, m.clone())).collect();
    for (j, a) in ms.iter().enumerate() {
        for b in &ms[j + 1..] {
            add.push((HLabel::minus_one(), a.union(b).copied().collect()));
        }
    }
    Ok(Plan {
        drop_spiders: vec![u],
        add,
        scalar: ScalarFactor::new(1, phase),
        ..Plan::default()
    })
}

fn phase_terms(rule: RuleId, side: &[(Set, HLabel)]) -> Result<Vec<(Vec<SpiderId>, Phase)>> {
    side.iter()
        .map(|(s, l)| match l.as_phase() {
            Some(p) => Ok((s.iter().copied().collect(), p)),
            None => fail(rule, "a box on a pivot spider has a non-phase label"),
        })
        .collect()
}

fn plan_case(d: &Diagram, h: HBoxId) -> Result<Plan> {
    let rule = RuleId::CaseHyperPivot;
    let (a, b) = pivot_edge(d, rule, h)?;
    let mut found = None;
    for (u, v) in [(a, b), (b, a)] {
        let su = phase_terms(rule, &side(d, rule, u, v, h)?)?;
        let sv = phase_terms(rule, &side(d, rule, v, u, h)?)?;
        if let Some(shape) = detect_case(&su, &sv, u, v) {
            found = Some((u, v, shape));
            break;
        }
    }
    let Some((u, v, shape)) = found else {
        return fail(rule, "labels on the pivot spiders are not gated");
    };
    let CaseShape {
        g,
        q,
        q_prime,
        alpha_terms,
        beta_terms,
    } = shape;
    let to_sets = |ms: &[Vec<SpiderId>]| -> Vec<Set> { ms.iter().map(|m| m.iter().copied().collect()).collect() };
    let (ns, ms) = (to_sets(&q), to_sets(&q_prime));
    let g: Set = g.into_iter().collect();
    let mut add = Vec::new();
    for n in &ns {
        for m in &ms {
            add.push((HLabel::minus_one(), n.union(m).copied().collect()));
        }
    }
    for (ma, alpha) in &alpha_terms {
        let ma: Set = ma.iter().copied().collect();
        let max = subset_bound(rule, &HLabel::Phase(*alpha), ms.len())?;
        for_subsets(&ms, max, &mut |union, size| {
            add.push((
                HLabel::Phase(alpha.mul_neg2_pow(size - 1)),
                ma.union(union).copied().collect(),
            ));
        });
    }
    for (mb, beta) in &beta_terms {
        let mb: Set = mb.iter().copied().collect();
        let gated: Set = mb.union(&g).copied().collect();
        let max = subset_bound(rule, &HLabel::Phase(*beta), ns.len())?;
        for_subsets(&ns, max, &mut |union, size| {
            add.push((
                HLabel::Phase(beta.mul_neg2_pow(size - 1)),
                mb.union(union).copied().collect(),
            ));
            let k = case_exponent(size, size);
            add.push((
                HLabel::Phase(beta.mul_bigint(&k)),
                gated.union(union).copied().collect(),
            ));
        });
    }
    Ok(Plan {
        drop_spiders: vec![u, v],
        add,
        scalar: ScalarFactor::sqrt2_pow(2),
        ..Plan::default()
    })
}

fn plan_fourier_transform(d: &Diagram, h: HBoxId) -> Result<Plan> {
    let rule = RuleId::FourierTransform;
    let Some(b) = d.hboxes.get(&h) else {
        return fail(rule, format!("no H-box {h}"));
    };
    if b.neighbors.len() != 1 || b.label.is_zero() {
        return fail(rule, format!("H-box {h} is not a nonzero unary box"));
    }
    let p = *b.neighbors.iter().next().unwrap();
    let label = b.label;
    interior(d, rule, p)?;
    let on_p = around(d, p, Some(h));
    let c = match on_p.as_slice() {
        [(_, rest, l)] if l.is_minus_one() && rest.len() == 1 => *rest.iter().next().unwrap(),
        _ => return fail(rule, format!("spider {p} is not joined to a single parity spider")),
    };
    interior(d, rule, c)?;
    let mut outs = Vec::new();
    for (id, rest, l) in around(d, c, None) {
        if rest.contains(&p) {
            continue;
        }
        if !l.is_minus_one() || rest.len() != 1 {
            return fail(
                rule,
                format!("H-box {id} on the parity spider is not an unlabelled arity-2 box"),
            );
        }
        outs.push(rest);
    }
    if outs.is_empty() {
        return fail(rule, "the parity spider has no inputs");
    }
    let mut add = Vec::new();
    let max = subset_bound(rule, &label, outs.len())?;
    for_subsets(&outs, max, &mut |union, size| {
        add.push((label.pow_neg2(size - 1), union.clone()))
    });
    Ok(Plan {
        drop_spiders: vec![p, c],
        add,
        scalar: ScalarFactor::sqrt2_pow(2),
        ..Plan::default()
    })
}

fn plan(d: &Diagram, m: &GraphicalMatch) -> Result<Plan> {
    match m.rule {
        RuleId::IsolatedSpider => plan_isolated(d, m.at),
        RuleId::Hs2Merge => plan_hs2(d, m.at),
        RuleId::HyperPivot => plan_hyper_pivot(d, m.at),
        RuleId::FourierHyperPivot => plan_fourier_hyper_pivot(d, m.at),
        RuleId::HyperLocalComplement => plan_hlc(d, m.at),
        RuleId::CaseHyperPivot => plan_case(d, m.at),
        RuleId::FourierTransform => plan_fourier_transform(d, m.at),
        other => fail(other, "not a diagram rule"),
    }
}

fn spider_located(rule: RuleId) -> bool {
    matches!(
        rule,
        RuleId::IsolatedSpider | RuleId::Hs2Merge | RuleId::HyperLocalComplement
    )
}

/// Locations where `rule` applies, ascending.
pub fn find_graphical(d: &Diagram, rule: RuleId) -> Vec<GraphicalMatch> {
    let candidates: Vec<usize> = if spider_located(rule) {
        d.spiders.iter().copied().collect()
    } else {
        d.hboxes.keys().copied().collect()
    };
    candidates
        .into_iter()
        .map(|at| GraphicalMatch { rule, at })
        .filter(|m| plan(d, m).is_ok())
        .collect()
}

pub fn apply_graphical(d: &Diagram, m: &GraphicalMatch) -> Result<Diagram> {
    Ok(execute(d, plan(d, m)?))
}

/// Deletes an interior spider with no H-boxes (the scalar gains 2).
pub fn isolated_spider(d: &Diagram, s: SpiderId) -> Result<Diagram> {
    Ok(execute(d, plan_isolated(d, s)?))
}

/// An interior spider between two unlabelled arity-2 boxes: the two far
/// spiders are identified.
pub fn hs2_merge(d: &Diagram, s: SpiderId) -> Result<Diagram> {
    Ok(execute(d, plan_hs2(d, s)?))
}

/// Hyper-pivot on an unlabelled arity-2 box between interior spiders whose
/// other boxes are all unlabelled.
pub fn hyper_pivot(d: &Diagram, h: HBoxId) -> Result<Diagram> {
    Ok(execute(d, plan_hyper_pivot(d, h)?))
}

/// Hyper-pivot where one side carries arbitrary nonzero labels.
pub fn fourier_hyper_pivot(d: &Diagram, h: HBoxId) -> Result<Diagram> {
    Ok(execute(d, plan_fourier_hyper_pivot(d, h)?))
}

/// Removes an interior spider carrying one unary `±i` box and otherwise only
/// unlabelled boxes.
pub fn hyper_local_complement(d: &Diagram, u: SpiderId) -> Result<Diagram> {
    Ok(execute(d, plan_hlc(d, u)?))
}

/// Removes the pivot pair of a gated (Case) configuration.
pub fn case_hyper_pivot(d: &Diagram, h: HBoxId) -> Result<Diagram> {
    Ok(execute(d, plan_case(d, h)?))
}

/// Replaces a phase box on the parity of spiders `s_1..s_n` (the unary box
/// `h`, its spider and the parity spider) by `2^n − 1` boxes on the subsets.
pub fn fourier_transform(d: &Diagram, h: HBoxId) -> Result<Diagram> {
    Ok(execute(d, plan_fourier_transform(d, h)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{compare, eval_diagram, CompareMode, OracleOptions, Verdict, DEFAULT_TOL};

    fn same(a: &Diagram, b: &Diagram) {
        let x = eval_diagram(a, OracleOptions::default()).unwrap();
        let y = eval_diagram(b, OracleOptions::default()).unwrap();
        assert_eq!(compare(&x, &y, CompareMode::ExactScalar, DEFAULT_TOL), Verdict::Equal);
    }

    /// Spiders `0..n` with the first `k` as inputs and the rest of `outs` as outputs.
    fn base(n: usize, ins: &[usize], outs: &[usize]) -> Diagram {
        let mut d = Diagram::new();
        for _ in 0..n {
            d.add_spider();
        }
        d.inputs = ins.to_vec();
        d.outputs = outs.to_vec();
        d
    }

    #[test]
    fn pivot_on_two_sides() {
        let mut d = base(6, &[0, 1], &[2, 3]);
        let h = d.add_hbox(HLabel::minus_one(), [4, 5]);
        d.add_hbox(HLabel::minus_one(), [4, 0]);
        d.add_hbox(HLabel::minus_one(), [4, 1, 2]);
        d.add_hbox(HLabel::minus_one(), [5, 3]);
        d.add_hbox(HLabel::phase(1, 8), [0, 3]);
        let out = hyper_pivot(&d, h).unwrap();
        assert_eq!(out.num_spiders(), 4);
        same(&d, &out);
    }

    #[test]
    fn pivot_rejects_labels_and_boundary() {
        let mut d = base(3, &[0], &[0]);
        let h = d.add_hbox(HLabel::minus_one(), [0, 1]);
        assert!(hyper_pivot(&d, h).is_err());
        let h2 = d.add_hbox(HLabel::minus_one(), [1, 2]);
        d.add_hbox(HLabel::phase(1, 4), [2]);
        assert!(hyper_pivot(&d, h2).is_err());
        assert!(matches!(hyper_pivot(&d, 99), Err(Error::Precondition { .. })));
    }

    #[test]
    fn fourier_pivot_general_and_phase_labels() {
        let mut d = base(6, &[0, 1], &[2]);
        let h = d.add_hbox(HLabel::minus_one(), [3, 4]);
        d.add_hbox(HLabel::minus_one(), [3, 0]);
        d.add_hbox(HLabel::minus_one(), [3, 1]);
        d.add_hbox(HLabel::phase(1, 8), [4, 2]);
        d.add_hbox(HLabel::General(num_complex::Complex64::new(0.5, 0.25)), [4]);
        d.add_hbox(HLabel::minus_one(), [5, 2]);
        let out = fourier_hyper_pivot(&d, h).unwrap();
        assert_eq!(pivot_sides(&d, h), Some((3, 4)));
        same(&d, &out);
    }

    #[test]
    fn local_complement_both_signs() {
        for (lab, _) in [(HLabel::phase(1, 4), 0), (HLabel::phase(3, 4), 1)] {
            let mut d = base(4, &[0, 1], &[2]);
            d.add_hbox(lab, [3]);
            d.add_hbox(HLabel::minus_one(), [3, 0]);
            d.add_hbox(HLabel::minus_one(), [3, 1, 2]);
            d.add_hbox(HLabel::minus_one(), [3, 2]);
            let out = hyper_local_complement(&d, 3).unwrap();
            assert_eq!(out.num_spiders(), 3);
            same(&d, &out);
        }
    }

    #[test]
    fn hs2_merges_boundaries() {
        let mut d = base(3, &[0], &[2]);
        d.add_hbox(HLabel::minus_one(), [0, 1]);
        d.add_hbox(HLabel::minus_one(), [1, 2]);
        d.scalar = ScalarFactor::sqrt2_pow(-2);
        let out = hs2_merge(&d, 1).unwrap();
        assert_eq!(out.num_spiders(), 1);
        assert_eq!(out.inputs, out.outputs);
        assert!(out.scalar.is_one());
        same(&d, &out);
    }

    #[test]
    fn fourier_transform_of_parity() {
        for n in 1..=4usize {
            let mut d = base(n + 2, &(0..n).collect::<Vec<_>>(), &(0..n).collect::<Vec<_>>());
            let (p, c) = (n, n + 1);
            let h = d.add_hbox(HLabel::phase(1, 8), [p]);
            d.add_hbox(HLabel::minus_one(), [p, c]);
            for s in 0..n {
                d.add_hbox(HLabel::minus_one(), [c, s]);
            }
            let out = fourier_transform(&d, h).unwrap();
            // ⅛ vanishes after multiplying by (−2)^3, so subsets stop at size 3.
            let want: usize = (1..=n.min(3)).map(|k| num_integer::binomial(n, k)).sum();
            assert_eq!(out.num_hboxes(), want);
            same(&d, &out);
        }
    }

    #[test]
    fn case_on_gated_pair() {
        // u = 4 (α side), v = 5 (β side), gate g = spider 0.
        let mut d = base(6, &[0, 1, 2], &[0, 1, 2, 3]);
        let e = Phase::new(1, 8);
        let h = d.add_hbox(HLabel::minus_one(), [4, 5]);
        d.add_hbox(HLabel::minus_one(), [4, 1]);
        d.add_hbox(HLabel::minus_one(), [4, 3]);
        d.add_hbox(HLabel::Phase(e), [4, 0]);
        d.add_hbox(HLabel::minus_one(), [5, 2]);
        d.add_hbox(HLabel::Phase(Phase::new(3, 8)), [5, 2, 3]);
        d.add_hbox(HLabel::Phase(-Phase::new(3, 8)), [5, 0, 2, 3]);
        d.add_hbox(HLabel::Phase(e), [5]);
        d.add_hbox(HLabel::Phase(-e), [5, 0]);
        assert!(hyper_pivot(&d, h).is_err());
        assert!(fourier_hyper_pivot(&d, h).is_err());
        let out = case_hyper_pivot(&d, h).unwrap();
        assert_eq!(out.num_spiders(), 4);
        same(&d, &out);
    }

    #[test]
    fn finder_lists_ascending_locations() {
        let mut d = base(5, &[0], &[0]);
        d.add_hbox(HLabel::minus_one(), [0, 1]);
        d.add_hbox(HLabel::minus_one(), [1, 2]);
        let ms = find_graphical(&d, RuleId::IsolatedSpider);
        assert_eq!(ms.iter().map(|m| m.at).collect::<Vec<_>>(), vec![3, 4]);
        assert_eq!(find_graphical(&d, RuleId::Hs2Merge).len(), 1);
    }
}
