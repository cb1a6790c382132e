//! Shape recognition shared by the path-sum Case rule and its graphical
//! counterpart. Only the pattern is shared; each side builds its own result.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::numeric::Phase;

/// The pieces of a Case redex on variables `y0`, `y1` joined by `½·y0·y1`.
///
/// Monomials are listed without `y0`/`y1`. `g` is the gate monomial: every
/// `alpha_terms` monomial contains it, and the `y1` side carries
/// `β·(1 − g)·m` for each `(m, β)` in `beta_terms`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CaseShape<T = crate::poly::Var> {
    pub g: Vec<T>,
    pub q: Vec<Vec<T>>,
    pub q_prime: Vec<Vec<T>>,
    pub alpha_terms: Vec<(Vec<T>, Phase)>,
    pub beta_terms: Vec<(Vec<T>, Phase)>,
}

fn set<T: Ord + Copy>(m: &[T]) -> BTreeSet<T> {
    m.iter().copied().collect()
}

/// `u_terms` are the terms on `y0` other than `y1` itself, `v_terms` those on
/// `y1` other than `y0`.
pub fn detect_case<T: Ord + Copy>(
    u_terms: &[(Vec<T>, Phase)],
    v_terms: &[(Vec<T>, Phase)],
    y0: T,
    y1: T,
) -> Option<CaseShape<T>> {
    let half = Phase::half();
    let mut q = Vec::new();
    let mut alpha = Vec::new();
    for (m, c) in u_terms {
        if m.contains(&y1) {
            return None;
        }
        if *c == half {
            q.push(m.clone());
        } else {
            alpha.push((m.clone(), *c));
        }
    }
    let mut q_prime = Vec::new();
    let mut rest = Vec::new();
    for (m, c) in v_terms {
        if m.contains(&y0) {
            return None;
        }
        if *c == half {
            q_prime.push(m.clone());
        } else {
            rest.push((set(m), *c));
        }
    }
    let candidates: BTreeSet<Vec<T>> = if rest.is_empty() {
        std::iter::once(Vec::new()).collect()
    } else {
        let mut c = BTreeSet::new();
        for (mb, b) in &rest {
            for (mc, g) in &rest {
                if *g == -*b && mb.is_subset(mc) && mb != mc {
                    c.insert(mc.difference(mb).copied().collect());
                }
            }
        }
        c
    };
    'cand: for g in candidates {
        let gs = set(&g);
        if !alpha.iter().all(|(m, _)| gs.is_subset(&set(m))) {
            continue;
        }
        let (bases, gated): (Vec<_>, Vec<_>) = rest.iter().partition(|(m, _)| m.is_disjoint(&gs));
        if bases.len() != gated.len() {
            continue;
        }
        let mut beta = Vec::new();
        for (mb, b) in &bases {
            let want: BTreeSet<T> = mb.union(&gs).copied().collect();
            if !gated.iter().any(|(m, c)| *m == want && *c == -*b) {
                continue 'cand;
            }
            beta.push((mb.iter().copied().collect(), *b));
        }
        return Some(CaseShape {
            g,
            q,
            q_prime,
            alpha_terms: alpha,
            beta_terms: beta,
        });
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gate_is_recovered() {
        let e = Phase::new(1, 8);
        let u = vec![(vec![3], Phase::half()), (vec![2], e)];
        let v = vec![(vec![4], Phase::half()), (vec![], e), (vec![2], -e)];
        let s = detect_case(&u, &v, 0u32, 1).unwrap();
        assert_eq!(s.g, vec![2]);
        assert_eq!(s.q, vec![vec![3]]);
        assert_eq!(s.q_prime, vec![vec![4]]);
        assert_eq!(s.beta_terms, vec![(vec![], e)]);
    }

    #[test]
    fn ungated_alpha_is_rejected() {
        let e = Phase::new(1, 8);
        let u = vec![(vec![5], e)];
        let v = vec![(vec![], e), (vec![2], -e)];
        assert!(detect_case(&u, &v, 0u32, 1).is_none());
    }

    #[test]
    fn unpaired_beta_is_rejected() {
        let e = Phase::new(1, 8);
        let v = vec![(vec![], e), (vec![2], e)];
        assert!(detect_case(&[], &v, 0u32, 1).is_none());
    }
}
