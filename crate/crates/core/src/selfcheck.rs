//! Randomized soundness suite: every rewrite rule on in-precondition
//! instances, judged by the dense oracle, plus the translation roundtrips and
//! the rule-by-rule bridge between diagrams and path-sums.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::diagram::{iso_equal, normalize, Diagram, Generator, HBoxId, HLabel, RawDiagram, SpiderId};
use crate::error::{Error, Result};
use crate::numeric::Phase;
use crate::oracle::{compare, eval_diagram, eval_pathsum, eval_raw, CompareMode, DenseMatrix, OracleOptions, Verdict};
use crate::pathsum::PurePathSum;
use crate::poly::{Monomial, Var};
use crate::random::{self, Rng64};
use crate::rules::basic::{apply_basic, BasicRule};
use crate::rules::{self, graphical, Match, RuleId};
use crate::translate::{pathsum_to_zh, zh_to_pathsum, TranslateOptions};

/// Entrywise tolerance for oracle comparisons.
pub const TOL: f64 = 1e-9;

/// Retries allowed when a random draw happens to miss a rule's pattern.
const MAX_DRAWS: usize = 50;

#[derive(Clone, Debug)]
pub enum Subject {
    PathSum(PurePathSum),
    Diagram(Diagram),
    Raw(RawDiagram),
}

impl Subject {
    pub fn eval(&self, opts: OracleOptions) -> Result<DenseMatrix> {
        match self {
            Subject::PathSum(e) => eval_pathsum(e, opts),
            Subject::Diagram(d) => eval_diagram(d, opts),
            Subject::Raw(d) => eval_raw(d, opts),
        }
    }
}

/// What one randomized case produced.
pub enum Outcome {
    /// Before and after a rewrite; must agree under the oracle.
    Rewrite(Box<Subject>, Box<Subject>),
    /// A structural property, with a description on failure.
    Holds(bool, String),
}

type Runner = Box<dyn Fn(&mut Rng64) -> Result<Outcome> + Send + Sync>;

pub struct SoundnessCheck {
    pub name: String,
    run: Runner,
}

impl SoundnessCheck {
    pub fn new(name: impl Into<String>, run: impl Fn(&mut Rng64) -> Result<Outcome> + Send + Sync + 'static) -> Self {
        SoundnessCheck {
            name: name.into(),
            run: Box::new(run),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRow {
    pub name: String,
    pub passed: usize,
    pub failed: usize,
    /// Cases whose random draw never hit the rule's pattern.
    pub skipped: usize,
    pub first_failure: Option<String>,
}

impl CheckRow {
    pub fn ok(&self) -> bool {
        self.failed == 0 && self.passed > 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelfcheckReport {
    pub seed: u64,
    pub cases: usize,
    pub rows: Vec<CheckRow>,
}

impl SelfcheckReport {
    pub fn all_passed(&self) -> bool {
        self.rows.iter().all(CheckRow::ok)
    }
}

impl fmt::Display for SelfcheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.rows {
            let tag = if row.ok() { "PASS" } else { "FAIL" };
            write!(f, "{tag} {:<28} {:>5} passed", row.name, row.passed)?;
            if row.failed > 0 {
                write!(f, ", {} failed", row.failed)?;
            }
            if row.skipped > 0 {
                write!(f, ", {} skipped", row.skipped)?;
            }
            if let Some(why) = &row.first_failure {
                write!(f, " ({why})")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Seed for case `i` of check `name`, so rows do not depend on each other.
fn case_seed(seed: u64, name: &str, i: usize) -> u64 {
    let mut h = seed ^ 0x9e37_79b9_7f4a_7c15;
    for b in name.bytes().chain(i.to_le_bytes()) {
        h = (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3);
    }
    h
}

fn run_case(check: &SoundnessCheck, seed: u64) -> std::result::Result<Option<()>, String> {
    let mut r = random::rng(seed);
    let outcome = (0..MAX_DRAWS).find_map(|_| match (check.run)(&mut r) {
        Err(Error::Precondition { .. }) | Err(Error::StaleMatch(_)) => None,
        other => Some(other),
    });
    match outcome {
        None => Ok(None),
        Some(Err(e)) => Err(e.to_string()),
        Some(Ok(Outcome::Holds(true, _))) => Ok(Some(())),
        Some(Ok(Outcome::Holds(false, why))) => Err(why),
        Some(Ok(Outcome::Rewrite(before, after))) => {
            let opts = OracleOptions::default();
            let a = before.eval(opts).map_err(|e| e.to_string())?;
            let b = after.eval(opts).map_err(|e| e.to_string())?;
            match compare(&a, &b, CompareMode::ExactScalar, TOL) {
                Verdict::Equal => Ok(Some(())),
                Verdict::Unequal { max_diff, row, col } => {
                    Err(format!("seed {seed}: entry ({row},{col}) differs by {max_diff:.3e}"))
                }
                Verdict::ShapeMismatch => Err(format!("seed {seed}: shape changed")),
            }
        }
    }
}

fn run_check(check: &SoundnessCheck, seed: u64, cases: usize) -> CheckRow {
    let mut row = CheckRow {
        name: check.name.clone(),
        passed: 0,
        failed: 0,
        skipped: 0,
        first_failure: None,
    };
    for i in 0..cases {
        match run_case(check, case_seed(seed, &check.name, i)) {
            Ok(Some(())) => row.passed += 1,
            Ok(None) => row.skipped += 1,
            Err(why) => {
                row.failed += 1;
                row.first_failure.get_or_insert(why);
            }
        }
    }
    row
}

/// Runs `cases` randomized cases of every check. Deterministic in `seed`.
pub fn run(checks: &[SoundnessCheck], seed: u64, cases: usize) -> SelfcheckReport {
    #[cfg(feature = "parallel")]
    let rows = {
        use rayon::prelude::*;
        checks.par_iter().map(|c| run_check(c, seed, cases)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows = checks.iter().map(|c| run_check(c, seed, cases)).collect();
    SelfcheckReport { seed, cases, rows }
}

/// Rules, roundtrips, normalization and bridge checks.
pub fn default_checks() -> Vec<SoundnessCheck> {
    let mut v = pathsum_checks();
    v.extend(graphical_checks());
    v.extend(basic_checks());
    v.extend(roundtrip_checks());
    v.extend(bridge_checks());
    v
}

// ---------------------------------------------------------------- path-sums

/// Boundary context: variables `0..n` with random terms among them.
fn context(r: &mut Rng64) -> PurePathSum {
    let mut e = random::pathsum(r, 4, 5);
    let vars: Vec<Var> = e.vars.iter().copied().collect();
    if e.input_sig.is_empty() && e.output_sig.is_empty() {
        e.input_sig.push(vars[0]);
        e.output_sig.push(*vars.last().unwrap());
    }
    e
}

fn add_var(e: &mut PurePathSum) -> Var {
    let y = e.fresh_var();
    e.vars.insert(y);
    y
}

/// A monomial over `pool` possibly empty, as a variable list.
fn maybe_monomial(r: &mut Rng64, pool: &[Var], allow_empty: bool) -> Monomial {
    if pool.is_empty() || (allow_empty && r.gen_bool(0.3)) {
        Monomial::one()
    } else {
        random::monomial(r, pool, 2)
    }
}

fn non_half(r: &mut Rng64) -> Phase {
    loop {
        let p = random::phase(r);
        if p != Phase::half() {
            return p;
        }
    }
}

fn term(e: &mut PurePathSum, vars: &[Var], m: &Monomial, c: Phase) {
    e.phi.add_term(m.mul(&Monomial::from_vars(vars.iter().copied())), c);
}

fn find(e: &PurePathSum, rule: RuleId, loc: &[u64]) -> Result<Match> {
    rules::find_matches(e, rule)?
        .into_iter()
        .find(|m| m.location() == loc)
        .ok_or_else(|| Error::precondition(rule.name(), "planted pattern was disturbed"))
}

pub fn instance_elim(r: &mut Rng64) -> Result<(PurePathSum, Match)> {
    let mut e = context(r);
    let y = add_var(&mut e);
    let m = find(&e, RuleId::Elim, &[u64::from(y)])?;
    Ok((e, m))
}

pub fn instance_omega(r: &mut Rng64) -> Result<(PurePathSum, Match)> {
    let mut e = context(r);
    let pool: Vec<Var> = e.vars.iter().copied().collect();
    let y = add_var(&mut e);
    let c = if r.gen_bool(0.5) {
        Phase::quarter()
    } else {
        Phase::new(3, 4)
    };
    e.phi.add_term(Monomial::var(y), c);
    for _ in 0..r.gen_range(0..=3) {
        let m = random::monomial(r, &pool, 2);
        term(&mut e, &[y], &m, Phase::half());
    }
    let m = find(&e, RuleId::Omega, &[u64::from(y)])?;
    Ok((e, m))
}

/// `½·y0·y1 + Σ ½·y0·n_i`, with `y1` either a fresh interior variable carrying
/// arbitrary terms or an existing variable.
pub fn instance_hh(r: &mut Rng64) -> Result<(PurePathSum, Match)> {
    let mut e = context(r);
    let pool: Vec<Var> = e.vars.iter().copied().collect();
    let y1 = if r.gen_bool(0.5) {
        let y1 = add_var(&mut e);
        for _ in 0..r.gen_range(0..=3) {
            let m = maybe_monomial(r, &pool, true);
            let c = random::phase(r);
            term(&mut e, &[y1], &m, c);
        }
        y1
    } else {
        *pool.choose(r).unwrap()
    };
    let y0 = add_var(&mut e);
    e.phi.add_term(Monomial::from_vars([y0, y1]), Phase::half());
    let others: Vec<Var> = pool.iter().copied().filter(|&v| v != y1).collect();
    let k = if e.in_signature(y1) { 1 } else { r.gen_range(0..=3) };
    for _ in 0..k {
        let m = maybe_monomial(r, &others, !e.in_signature(y1));
        term(&mut e, &[y0], &m, Phase::half());
    }
    let m = find(&e, RuleId::HH, &[u64::from(y0), u64::from(y1)])?;
    Ok((e, m))
}

/// A gated pair: `α` terms on `y0` carry the gate `g`, `β` terms on `y1`
/// carry `1 − g`.
pub fn instance_case(r: &mut Rng64) -> Result<(PurePathSum, Match)> {
    let mut e = context(r);
    let pool: Vec<Var> = e.vars.iter().copied().collect();
    let y0 = add_var(&mut e);
    let y1 = add_var(&mut e);
    let g = random::monomial(r, &pool, 2);
    let rest: Vec<Var> = pool.iter().copied().filter(|v| !g.contains(*v)).collect();
    e.phi.add_term(Monomial::from_vars([y0, y1]), Phase::half());
    for _ in 0..r.gen_range(0..=2) {
        let m = random::monomial(r, &pool, 2);
        term(&mut e, &[y0], &m, Phase::half());
    }
    for _ in 0..r.gen_range(0..=2) {
        let m = random::monomial(r, &pool, 2);
        term(&mut e, &[y1], &m, Phase::half());
    }
    for _ in 0..r.gen_range(0..=2) {
        let m = maybe_monomial(r, &pool, true).mul(&g);
        let c = non_half(r);
        term(&mut e, &[y0], &m, c);
    }
    for _ in 0..r.gen_range(1..=2) {
        let base = maybe_monomial(r, &rest, true);
        let b = non_half(r);
        term(&mut e, &[y1], &base, b);
        term(&mut e, &[y1], &base.mul(&g), -b);
    }
    let m = find(&e, RuleId::Case, &[u64::from(y0), u64::from(y1)])?;
    Ok((e, m))
}

fn pathsum_check(rule: RuleId, inst: fn(&mut Rng64) -> Result<(PurePathSum, Match)>) -> SoundnessCheck {
    SoundnessCheck::new(rule.name(), move |r| {
        let (e, m) = inst(r)?;
        let after = rules::apply(&e, &m)?;
        Ok(Outcome::Rewrite(
            Box::new(Subject::PathSum(e)),
            Box::new(Subject::PathSum(after)),
        ))
    })
}

pub fn pathsum_checks() -> Vec<SoundnessCheck> {
    vec![
        pathsum_check(RuleId::Elim, instance_elim),
        pathsum_check(RuleId::Omega, instance_omega),
        pathsum_check(RuleId::HH, instance_hh),
        pathsum_check(RuleId::Case, instance_case),
    ]
}

/// The ω rule with its `e^{iπ/4}` factor dropped: a negative control that
/// the suite must flag.
pub fn corrupted_omega() -> SoundnessCheck {
    SoundnessCheck::new("corrupted-omega", |r| {
        let (e, m) = instance_omega(r)?;
        let mut after = rules::apply(&e, &m)?;
        after.scalar.phase = after.scalar.phase - Phase::new(1, 8);
        Ok(Outcome::Rewrite(
            Box::new(Subject::PathSum(e)),
            Box::new(Subject::PathSum(after)),
        ))
    })
}

// ---------------------------------------------------------------- diagrams

fn box_on(d: &Diagram, a: SpiderId, b: SpiderId) -> Result<HBoxId> {
    d.hboxes
        .iter()
        .find(|(_, x)| x.neighbors.len() == 2 && x.neighbors.contains(&a) && x.neighbors.contains(&b))
        .map(|(&h, _)| h)
        .ok_or_else(|| Error::precondition("instance", "pivot box fused away"))
}

/// Two interior spiders joined by an unlabelled box. `u`'s other boxes are
/// unlabelled; `v`'s are unlabelled too unless `labelled`.
pub fn instance_pivot(r: &mut Rng64, labelled: bool) -> Result<(Diagram, HBoxId)> {
    let mut e = context(r);
    let pool: Vec<Var> = e.vars.iter().copied().collect();
    let u = add_var(&mut e);
    let v = add_var(&mut e);
    e.phi.add_term(Monomial::from_vars([u, v]), Phase::half());
    for _ in 0..r.gen_range(0..=3) {
        let m = maybe_monomial(r, &pool, true);
        term(&mut e, &[u], &m, Phase::half());
    }
    for _ in 0..r.gen_range(0..=3) {
        let m = maybe_monomial(r, &pool, true);
        let c = if labelled { random::phase(r) } else { Phase::half() };
        term(&mut e, &[v], &m, c);
    }
    let d = pathsum_to_zh(&e);
    let h = box_on(&d, u as SpiderId, v as SpiderId)?;
    Ok((d, h))
}

pub fn instance_hlc(r: &mut Rng64) -> Result<(Diagram, SpiderId)> {
    let (e, m) = instance_omega(r)?;
    Ok((pathsum_to_zh(&e), m.location()[0] as SpiderId))
}

pub fn instance_case_diagram(r: &mut Rng64) -> Result<(Diagram, HBoxId)> {
    let (e, m) = instance_case(r)?;
    let loc = m.location();
    let d = pathsum_to_zh(&e);
    let h = box_on(&d, loc[0] as SpiderId, loc[1] as SpiderId)?;
    Ok((d, h))
}

/// A phase box on the parity of `n ≤ 4` context spiders.
pub fn instance_fourier(r: &mut Rng64) -> Result<(Diagram, HBoxId)> {
    let mut d = pathsum_to_zh(&context(r));
    let pool: Vec<SpiderId> = d.spiders.iter().copied().collect();
    let n = r.gen_range(1..=4.min(pool.len()));
    let outs: Vec<SpiderId> = pool.choose_multiple(r, n).copied().collect();
    let p = d.add_spider();
    let c = d.add_spider();
    let h = d.add_hbox(HLabel::Phase(random::phase(r)), [p]);
    d.add_hbox(HLabel::minus_one(), [p, c]);
    for s in outs {
        d.add_hbox(HLabel::minus_one(), [c, s]);
    }
    Ok((d, h))
}

pub fn instance_hs2(r: &mut Rng64) -> Result<(Diagram, SpiderId)> {
    let mut d = pathsum_to_zh(&context(r));
    let pool: Vec<SpiderId> = d.spiders.iter().copied().collect();
    let ends: Vec<SpiderId> = pool.choose_multiple(r, 2).copied().collect();
    if ends.len() < 2 {
        return Err(Error::precondition("instance", "needs two spiders"));
    }
    let s = d.add_spider();
    d.add_hbox(HLabel::minus_one(), [s, ends[0]]);
    d.add_hbox(HLabel::minus_one(), [s, ends[1]]);
    Ok((d, s))
}

pub fn instance_isolated(r: &mut Rng64) -> Result<(Diagram, SpiderId)> {
    let mut d = pathsum_to_zh(&context(r));
    let s = d.add_spider();
    Ok((d, s))
}

fn graphical_check(
    rule: RuleId,
    inst: impl Fn(&mut Rng64) -> Result<(Diagram, usize)> + Send + Sync + 'static,
) -> SoundnessCheck {
    SoundnessCheck::new(rule.name(), move |r| {
        let (d, at) = inst(r)?;
        let after = graphical::apply_graphical(&d, &graphical::GraphicalMatch { rule, at })?;
        Ok(Outcome::Rewrite(
            Box::new(Subject::Diagram(d)),
            Box::new(Subject::Diagram(after)),
        ))
    })
}

pub fn graphical_checks() -> Vec<SoundnessCheck> {
    vec![
        graphical_check(RuleId::IsolatedSpider, instance_isolated),
        graphical_check(RuleId::Hs2Merge, instance_hs2),
        graphical_check(RuleId::HyperPivot, |r| instance_pivot(r, false)),
        graphical_check(RuleId::FourierHyperPivot, |r| instance_pivot(r, true)),
        graphical_check(RuleId::HyperLocalComplement, instance_hlc),
        graphical_check(RuleId::CaseHyperPivot, instance_case_diagram),
        graphical_check(RuleId::FourierTransform, instance_fourier),
    ]
}

// ---------------------------------------------------------------- basic rules

/// Builds raw instances: every free leg ends on a fresh boundary or on one of
/// a few context spiders, keeping the boundary small.
struct Builder<'a> {
    d: RawDiagram,
    ctx: Vec<usize>,
    r: &'a mut Rng64,
}

impl<'a> Builder<'a> {
    fn new(r: &'a mut Rng64) -> Self {
        let mut d = RawDiagram::new();
        let k = r.gen_range(0..=2);
        let ctx: Vec<usize> = (0..k).map(|_| d.add_node(Generator::Z)).collect();
        for &c in &ctx {
            if r.gen_bool(0.5) {
                let b = d.add_input();
                d.add_edge(b, c);
            } else {
                let b = d.add_output();
                d.add_edge(c, b);
            }
        }
        d.scalar = random::scalar(r);
        Builder { d, ctx, r }
    }

    fn node(&mut self, g: Generator) -> usize {
        self.d.add_node(g)
    }

    fn leg(&mut self, n: usize) {
        let boundary = self.d.num_inputs() + self.d.num_outputs();
        if !self.ctx.is_empty() && (boundary >= 5 || self.r.gen_bool(0.4)) {
            let c = *self.ctx.choose(self.r).unwrap();
            self.d.add_edge(n, c);
        } else if self.r.gen_bool(0.5) {
            let b = self.d.add_input();
            self.d.add_edge(b, n);
        } else {
            let b = self.d.add_output();
            self.d.add_edge(n, b);
        }
    }

    fn legs(&mut self, n: usize, lo: usize, hi: usize) -> usize {
        let k = self.r.gen_range(lo..=hi);
        for _ in 0..k {
            self.leg(n);
        }
        k
    }

    /// Wires both `a` and `b` to the same random context spiders.
    fn shared_z_legs(&mut self, a: usize, b: usize) {
        let k = self.r.gen_range(1..=2);
        for _ in 0..k {
            let z = self.node(Generator::Z);
            self.leg(z);
            self.d.add_edge(a, z);
            self.d.add_edge(b, z);
        }
    }
}

fn basic_instance(r: &mut Rng64, rule: BasicRule) -> (RawDiagram, Vec<usize>) {
    let mut b = Builder::new(r);
    let h = |b: &mut Builder| HLabel::Phase(random::phase(b.r));
    let loc = match rule {
        BasicRule::ZS1 => {
            let (x, y) = (b.node(Generator::Z), b.node(Generator::Z));
            for _ in 0..b.r.gen_range(1..=2) {
                b.d.add_edge(x, y);
            }
            b.legs(x, 0, 2);
            b.legs(y, 0, 2);
            vec![x, y]
        }
        BasicRule::ZS2 => {
            let z = b.node(Generator::Z);
            b.legs(z, 2, 2);
            vec![z]
        }
        BasicRule::HS1 => {
            let l = h(&mut b);
            let (a, mid, c) = (
                b.node(Generator::H(l)),
                b.node(Generator::H(HLabel::minus_one())),
                b.node(Generator::H(HLabel::minus_one())),
            );
            b.d.add_edge(a, mid);
            b.d.add_edge(mid, c);
            b.legs(a, 0, 2);
            b.legs(c, 0, 2);
            vec![mid]
        }
        BasicRule::HS2 => {
            let (x, y) = (
                b.node(Generator::H(HLabel::minus_one())),
                b.node(Generator::H(HLabel::minus_one())),
            );
            b.d.add_edge(x, y);
            b.leg(x);
            b.leg(y);
            vec![x, y]
        }
        BasicRule::BA1 => {
            let (z, x) = (b.node(Generator::Z), b.node(Generator::X));
            b.d.add_edge(z, x);
            b.legs(z, 0, 3);
            b.legs(x, 0, 3);
            vec![z, x]
        }
        BasicRule::BA2 => {
            let z = b.node(Generator::Z);
            let t = b.node(Generator::H(HLabel::minus_one()));
            let hb = b.node(Generator::H(HLabel::minus_one()));
            b.d.add_edge(z, t);
            b.d.add_edge(t, hb);
            b.legs(z, 0, 3);
            b.legs(hb, 0, 3);
            vec![t]
        }
        BasicRule::M => {
            let (la, lb) = (random::hlabel(b.r), random::hlabel(b.r));
            let (x, y) = (b.node(Generator::H(la)), b.node(Generator::H(lb)));
            b.shared_z_legs(x, y);
            vec![x, y]
        }
        BasicRule::U => {
            let one = if b.r.gen_bool(0.5) {
                HLabel::Phase(Phase::ZERO)
            } else {
                HLabel::General(num_complex::Complex64::new(1.0, 0.0))
            };
            let x = b.node(Generator::H(one));
            b.legs(x, 0, 3);
            vec![x]
        }
        BasicRule::I => {
            let l = random::hlabel(b.r);
            let x = b.node(Generator::H(l));
            b.legs(x, 0, 3);
            vec![x]
        }
        BasicRule::A => {
            let (la, lb) = (random::hlabel(b.r), random::hlabel(b.r));
            let t = b.node(Generator::Z);
            let not = b.node(Generator::Not);
            let (x, y) = (b.node(Generator::H(la)), b.node(Generator::H(lb)));
            b.d.add_edge(x, t);
            b.d.add_edge(t, not);
            b.d.add_edge(not, y);
            b.shared_z_legs(x, y);
            vec![t]
        }
        BasicRule::O => {
            let l = random::hlabel(b.r);
            let s = b.node(Generator::Z);
            b.legs(s, 0, 2);
            let not = b.node(Generator::Not);
            let (x, y) = (b.node(Generator::H(l)), b.node(Generator::H(l)));
            b.d.add_edge(s, x);
            b.d.add_edge(s, not);
            b.d.add_edge(not, y);
            b.shared_z_legs(x, y);
            vec![x, y]
        }
    };
    (b.d, loc)
}

pub fn basic_checks() -> Vec<SoundnessCheck> {
    BasicRule::ALL
        .into_iter()
        .map(|rule| {
            SoundnessCheck::new(format!("basic-{}", rule.name()), move |r| {
                let (d, loc) = basic_instance(r, rule);
                let after = apply_basic(&d, rule, &loc)?;
                Ok(Outcome::Rewrite(
                    Box::new(Subject::Raw(d)),
                    Box::new(Subject::Raw(after)),
                ))
            })
        })
        .collect()
}

// ---------------------------------------------------------------- roundtrips

pub fn roundtrip_checks() -> Vec<SoundnessCheck> {
    vec![
        SoundnessCheck::new("roundtrip-pathsum", |r| {
            let e = random::pathsum(r, 8, 10);
            let back = zh_to_pathsum(&pathsum_to_zh(&e), TranslateOptions::default())?;
            Ok(Outcome::Holds(back == e, format!("Z[P[e]] != e for {e}")))
        }),
        SoundnessCheck::new("roundtrip-diagram", |r| {
            let d = random::diagram(r, 8, 10);
            let back = pathsum_to_zh(&zh_to_pathsum(&d, TranslateOptions::default())?);
            Ok(Outcome::Holds(
                iso_equal(&back, &d),
                "P[Z[D]] not isomorphic to D".into(),
            ))
        }),
        SoundnessCheck::new("normalize", |r| {
            let raw = random::raw_diagram(r, 5, 7);
            let d = normalize(&raw);
            let bad = d.to_raw().hypergraph_like_violations();
            if !bad.is_empty() {
                return Ok(Outcome::Holds(false, bad.join("; ")));
            }
            Ok(Outcome::Rewrite(
                Box::new(Subject::Raw(raw)),
                Box::new(Subject::Diagram(d)),
            ))
        }),
    ]
}

// ---------------------------------------------------------------- bridge

/// `Z[rule_D(D)]` against `rule_P(Z[D])`: same variables, signatures, scalar
/// and canonical phase polynomial.
fn bridge(d: &Diagram, graphical: &graphical::GraphicalMatch, m: &Match) -> Result<Outcome> {
    let via_diagram = zh_to_pathsum(&graphical::apply_graphical(d, graphical)?, TranslateOptions::default())?;
    let via_pathsum = rules::apply(&zh_to_pathsum(d, TranslateOptions::default())?, m)?;
    let same = via_diagram == via_pathsum;
    Ok(Outcome::Holds(
        same,
        format!("{}: {via_diagram} vs {via_pathsum}", graphical.rule),
    ))
}

fn located(d: &Diagram, rule: RuleId, loc: &[u64]) -> Result<Match> {
    find(&zh_to_pathsum(d, TranslateOptions::default())?, rule, loc)
}

pub fn bridge_checks() -> Vec<SoundnessCheck> {
    let g = |rule, at| graphical::GraphicalMatch { rule, at };
    vec![
        SoundnessCheck::new("bridge-omega", move |r| {
            let (d, u) = instance_hlc(r)?;
            let m = located(&d, RuleId::Omega, &[u as u64])?;
            bridge(&d, &g(RuleId::HyperLocalComplement, u), &m)
        }),
        SoundnessCheck::new("bridge-HH-pivot", move |r| {
            let labelled = r.gen_bool(0.5);
            let (d, h) = instance_pivot(r, labelled)?;
            let (u, v) = graphical::pivot_sides(&d, h).ok_or_else(|| Error::precondition("bridge", "no side"))?;
            let m = located(&d, RuleId::HH, &[u as u64, v as u64])?;
            let rule = if labelled {
                RuleId::FourierHyperPivot
            } else {
                RuleId::HyperPivot
            };
            bridge(&d, &g(rule, h), &m)
        }),
        SoundnessCheck::new("bridge-Case", move |r| {
            let (d, h) = instance_case_diagram(r)?;
            let e = zh_to_pathsum(&d, TranslateOptions::default())?;
            let ends: Vec<u64> = d.hboxes[&h].neighbors.iter().map(|&s| s as u64).collect();
            let m = rules::find_matches(&e, RuleId::Case)?
                .into_iter()
                .find(|m| {
                    let mut l = m.location();
                    l.sort_unstable();
                    l == ends
                })
                .ok_or_else(|| Error::precondition("bridge", "no Case match"))?;
            bridge(&d, &g(RuleId::CaseHyperPivot, h), &m)
        }),
        SoundnessCheck::new("bridge-Elim", move |r| {
            let (d, s) = instance_isolated(r)?;
            let m = located(&d, RuleId::Elim, &[s as u64])?;
            bridge(&d, &g(RuleId::IsolatedSpider, s), &m)
        }),
        SoundnessCheck::new("bridge-HH-merge", move |r| {
            let (d, s) = instance_hs2(r)?;
            let far = d
                .hboxes
                .values()
                .filter(|b| b.neighbors.contains(&s))
                .flat_map(|b| b.neighbors.iter().copied())
                .filter(|&x| x != s)
                .max()
                .unwrap();
            let m = located(&d, RuleId::HH, &[s as u64, far as u64])?;
            bridge(&d, &g(RuleId::Hs2Merge, s), &m)
        }),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suite_passes_small() {
        let report = run(&default_checks(), 11, 15);
        assert!(report.all_passed(), "{report}");
    }

    #[test]
    fn negative_control_is_flagged() {
        let report = run(&[corrupted_omega()], 5, 10);
        assert!(!report.all_passed());
        assert_eq!(report.rows[0].failed, 10);
    }

    #[test]
    fn report_is_deterministic() {
        let a = run(&pathsum_checks(), 3, 5);
        let b = run(&pathsum_checks(), 3, 5);
        assert_eq!(a, b);
        assert_eq!(a.to_string(), b.to_string());
    }
}
