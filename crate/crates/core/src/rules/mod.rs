//! Rewrite rules on pure path-sums and on hypergraph-like diagrams, plus the
//! drivers that apply them to a fixpoint with a trace.

pub mod basic;
mod case;
pub mod combinatorics;
pub mod graphical;
pub mod pathsum_rules;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::diagram::Diagram;
use crate::error::{Error, ParseError, Result};
use crate::numeric::ScalarFactor;
use crate::pathsum::PurePathSum;
use crate::poly::{BoolPoly, Var};

pub use case::{detect_case, CaseShape};
pub use graphical::{
    case_hyper_pivot, find_graphical, fourier_hyper_pivot, fourier_transform, hs2_merge, hyper_local_complement,
    hyper_pivot, isolated_spider, pivot_sides, GraphicalMatch,
};
pub use pathsum_rules::{
    apply_case, apply_elim, apply_hh, apply_omega, match_case, match_elim, match_hh, match_omega, removed_vars,
};

/// Serializes as its [`RuleId::name`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleId {
    Elim,
    Omega,
    HH,
    Case,
    IsolatedSpider,
    Hs2Merge,
    HyperPivot,
    FourierHyperPivot,
    HyperLocalComplement,
    CaseHyperPivot,
    FourierTransform,
}

impl RuleId {
    pub const PATHSUM: [RuleId; 4] = [RuleId::Elim, RuleId::HH, RuleId::Omega, RuleId::Case];
    pub const GRAPHICAL: [RuleId; 7] = [
        RuleId::IsolatedSpider,
        RuleId::Hs2Merge,
        RuleId::HyperPivot,
        RuleId::FourierHyperPivot,
        RuleId::HyperLocalComplement,
        RuleId::CaseHyperPivot,
        RuleId::FourierTransform,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleId::Elim => "Elim",
            RuleId::Omega => "omega",
            RuleId::HH => "HH",
            RuleId::Case => "Case",
            RuleId::IsolatedSpider => "isolated-spider",
            RuleId::Hs2Merge => "hs2-merge",
            RuleId::HyperPivot => "hyper-pivot",
            RuleId::FourierHyperPivot => "fourier-hyper-pivot",
            RuleId::HyperLocalComplement => "hyper-local-complement",
            RuleId::CaseHyperPivot => "case-hyper-pivot",
            RuleId::FourierTransform => "fourier-transform",
        }
    }

    pub fn is_pathsum(self) -> bool {
        Self::PATHSUM.contains(&self)
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for RuleId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl FromStr for RuleId {
    type Err = ParseError;

    fn from_str(s: &str) -> std::result::Result<Self, ParseError> {
        let all = RuleId::PATHSUM.iter().chain(RuleId::GRAPHICAL.iter());
        all.copied()
            .find(|r| r.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| ParseError::Structure(format!("unknown rule '{s}'")))
    }
}

/// A located path-sum redex. Applying a match re-checks it against the
/// current expression and fails with [`Error::StaleMatch`] if it no longer holds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Match {
    Elim {
        y0: Var,
    },
    Omega {
        y0: Var,
        conjugate: bool,
        #[serde(skip)]
        q: BoolPoly,
    },
    HH {
        y0: Var,
        y1: Var,
        #[serde(skip)]
        q: BoolPoly,
        rename_to: Option<Var>,
    },
    Case {
        y0: Var,
        y1: Var,
        #[serde(skip)]
        shape: CaseShape,
    },
}

impl Match {
    pub fn rule(&self) -> RuleId {
        match self {
            Match::Elim { .. } => RuleId::Elim,
            Match::Omega { .. } => RuleId::Omega,
            Match::HH { .. } => RuleId::HH,
            Match::Case { .. } => RuleId::Case,
        }
    }

    pub fn location(&self) -> Vec<u64> {
        match self {
            Match::Elim { y0 } | Match::Omega { y0, .. } => vec![u64::from(*y0)],
            Match::HH { y0, y1, .. } | Match::Case { y0, y1, .. } => vec![u64::from(*y0), u64::from(*y1)],
        }
    }
}

/// Every current redex of a path-sum rule, ascending by location.
pub fn find_matches(e: &PurePathSum, rule: RuleId) -> Result<Vec<Match>> {
    Ok(match rule {
        RuleId::Elim => match_elim(e),
        RuleId::Omega => match_omega(e),
        RuleId::HH => match_hh(e),
        RuleId::Case => match_case(e),
        other => {
            return Err(Error::precondition(
                "find_matches",
                format!("{other} is a diagram rule, not a path-sum rule"),
            ))
        }
    })
}

pub fn apply(e: &PurePathSum, m: &Match) -> Result<PurePathSum> {
    match m {
        Match::Elim { .. } => apply_elim(e, m),
        Match::Omega { .. } => apply_omega(e, m),
        Match::HH { .. } => apply_hh(e, m),
        Match::Case { .. } => apply_case(e, m),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceEntry {
    pub rule: RuleId,
    /// Variables (path-sums) or H-box/spider ids (diagrams) the rule fired on.
    pub location: Vec<u64>,
    pub vars_removed: Vec<u64>,
    pub scalar_delta: ScalarFactor,
    /// Path variables, or spiders, left after the step.
    pub size_after: usize,
}

/// Serializes as a bare array of steps.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
#[serde(transparent)]
pub struct RewriteTrace {
    pub steps: Vec<TraceEntry>,
}

impl RewriteTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn count(&self, rule: RuleId) -> usize {
        self.steps.iter().filter(|s| s.rule == rule).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }
}

/// Which rules a driver may use, in priority order, and an optional step bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Policy {
    pub order: Vec<RuleId>,
    pub max_steps: Option<usize>,
}

impl Policy {
    pub fn pathsum() -> Self {
        Policy {
            order: RuleId::PATHSUM.to_vec(),
            max_steps: None,
        }
    }

    /// The graphical rules except the Fourier transform, which can grow the
    /// diagram and is only applied on request.
    pub fn diagram() -> Self {
        Policy {
            order: RuleId::GRAPHICAL[..6].to_vec(),
            max_steps: None,
        }
    }

    pub fn only(rules: &[RuleId]) -> Self {
        Policy {
            order: rules.to_vec(),
            max_steps: None,
        }
    }
}

impl Default for Policy {
    fn default() -> Self {
        Self::pathsum()
    }
}

/// Rewrites `e` until no rule in `policy` applies. At each step the first
/// rule in the order with a redex fires at its lowest location.
pub fn simplify(e: &PurePathSum, policy: &Policy) -> Result<(PurePathSum, RewriteTrace)> {
    let mut cur = e.clone();
    cur.migrate_constant();
    let mut trace = RewriteTrace::default();
    'outer: while policy.max_steps.is_none_or(|k| trace.len() < k) {
        for &rule in &policy.order {
            if let Some(m) = find_matches(&cur, rule)?.into_iter().next() {
                let next = apply(&cur, &m)?;
                trace.steps.push(TraceEntry {
                    rule,
                    location: m.location(),
                    vars_removed: removed_vars(&m).into_iter().map(u64::from).collect(),
                    scalar_delta: next.scalar.delta_from(&cur.scalar),
                    size_after: next.num_vars(),
                });
                cur = next;
                continue 'outer;
            }
        }
        break;
    }
    Ok((cur, trace))
}

/// The diagram counterpart of [`simplify`], using the graphical rules.
pub fn simplify_diagram(d: &Diagram, policy: &Policy) -> Result<(Diagram, RewriteTrace)> {
    let mut cur = d.clone();
    cur.cleanup();
    let mut trace = RewriteTrace::default();
    'outer: while policy.max_steps.is_none_or(|k| trace.len() < k) {
        for &rule in &policy.order {
            if rule.is_pathsum() {
                return Err(Error::precondition(
                    "simplify_diagram",
                    format!("{rule} is a path-sum rule, not a diagram rule"),
                ));
            }
            if let Some(m) = find_graphical(&cur, rule).into_iter().next() {
                let next = graphical::apply_graphical(&cur, &m)?;
                let removed: Vec<u64> = cur.spiders.difference(&next.spiders).map(|&s| s as u64).collect();
                trace.steps.push(TraceEntry {
                    rule,
                    location: m.location().iter().map(|&x| x as u64).collect(),
                    vars_removed: removed,
                    scalar_delta: next.scalar.delta_from(&cur.scalar),
                    size_after: next.num_spiders(),
                });
                cur = next;
                continue 'outer;
            }
        }
        break;
    }
    Ok((cur, trace))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_names_roundtrip() {
        for r in RuleId::PATHSUM.iter().chain(RuleId::GRAPHICAL.iter()) {
            assert_eq!(r.name().parse::<RuleId>().unwrap(), *r);
        }
        assert!("nope".parse::<RuleId>().is_err());
    }

    #[test]
    fn wrong_rule_family_is_an_error() {
        assert!(find_matches(&PurePathSum::identity(1), RuleId::HyperPivot).is_err());
        assert!(simplify_diagram(&Diagram::new(), &Policy::pathsum()).is_err());
    }

    #[test]
    fn step_bound_is_respected() {
        let mut e = PurePathSum::identity(0);
        e.vars = (0..5).collect();
        let (out, t) = simplify(
            &e,
            &Policy {
                max_steps: Some(2),
                ..Policy::pathsum()
            },
        )
        .unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(out.num_vars(), 3);
        assert_eq!(out.scalar.pow2, 4);
    }
}
