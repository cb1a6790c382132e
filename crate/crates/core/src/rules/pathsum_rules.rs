use crate::error::{Error, Result};
use crate::numeric::Phase;
use crate::pathsum::PurePathSum;
use crate::poly::{canonicalize, lift, scale_lift, substitute, BoolPoly, IntPoly, Monomial, PhasePoly, Var};

use super::case::{detect_case, CaseShape};
use super::{Match, RuleId};

fn check_stale(rule: RuleId, found: Option<Match>, m: &Match) -> Result<Match> {
    match found {
        Some(f) if f == *m => Ok(f),
        _ => Err(Error::StaleMatch(rule.name())),
    }
}

fn elim_at(e: &PurePathSum, y0: Var) -> Option<Match> {
    (e.vars.contains(&y0) && !e.in_signature(y0) && !e.phi.mentions(y0)).then_some(Match::Elim { y0 })
}

/// Variables absent from `phi` and from both signatures.
pub fn match_elim(e: &PurePathSum) -> Vec<Match> {
    e.vars.iter().filter_map(|&y| elim_at(e, y)).collect()
}

pub fn apply_elim(e: &PurePathSum, m: &Match) -> Result<PurePathSum> {
    let Match::Elim { y0 } = *m else {
        return Err(Error::StaleMatch(RuleId::Elim.name()));
    };
    check_stale(RuleId::Elim, elim_at(e, y0), m)?;
    let mut out = e.clone();
    out.vars.remove(&y0);
    out.scalar.pow2 += 2;
    Ok(out)
}

fn omega_at(e: &PurePathSum, y0: Var) -> Option<Match> {
    if !e.vars.contains(&y0) || e.in_signature(y0) {
        return None;
    }
    let (s, _) = e.phi.split_on(y0);
    let conjugate = match s.coeff(&Monomial::one()) {
        c if c == Phase::quarter() => false,
        c if c == Phase::new(3, 4) => true,
        _ => return None,
    };
    let mut q = BoolPoly::zero();
    for (m, c) in s.terms() {
        if m.is_one() {
            continue;
        }
        if *c != Phase::half() {
            return None;
        }
        q.xor_monomial(m.clone());
    }
    Some(Match::Omega { y0, conjugate, q })
}

/// Variables whose only terms are `±¼·y0` and `½·y0·m` for monomials `m`.
pub fn match_omega(e: &PurePathSum) -> Vec<Match> {
    e.vars.iter().filter_map(|&y| omega_at(e, y)).collect()
}

pub fn apply_omega(e: &PurePathSum, m: &Match) -> Result<PurePathSum> {
    let Match::Omega { y0, .. } = *m else {
        return Err(Error::StaleMatch(RuleId::Omega.name()));
    };
    let Match::Omega { conjugate, q, .. } = check_stale(RuleId::Omega, omega_at(e, y0), m)? else {
        unreachable!()
    };
    let (_, r) = e.phi.split_on(y0);
    let mut out = e.clone();
    out.vars.remove(&y0);
    out.scalar.pow2 += 1;
    let (constant, alpha) = if conjugate {
        (Phase::new(7, 8), Phase::quarter())
    } else {
        (Phase::new(1, 8), -Phase::quarter())
    };
    out.scalar.phase += constant;
    out.phi = r.add(&scale_lift(alpha, &q));
    out.migrate_constant();
    Ok(out)
}

fn hh_at(e: &PurePathSum, y0: Var, y1: Var) -> Option<Match> {
    if y0 == y1 || !e.vars.contains(&y0) || !e.vars.contains(&y1) || e.in_signature(y0) {
        return None;
    }
    let (s, _) = e.phi.split_on(y0);
    if s.coeff(&Monomial::var(y1)) != Phase::half() {
        return None;
    }
    let mut q = BoolPoly::zero();
    for (m, c) in s.terms() {
        if *c != Phase::half() {
            return None;
        }
        if *m == Monomial::var(y1) {
            continue;
        }
        if m.contains(y1) {
            return None;
        }
        q.xor_monomial(m.clone());
    }
    let rename_to = if e.in_signature(y1) {
        let mut ms = q.monomials();
        match (ms.next(), ms.next()) {
            (Some(z), None) if z.degree() == 1 => Some(z.vars()[0]),
            _ => return None,
        }
    } else {
        None
    };
    Some(Match::HH { y0, y1, q, rename_to })
}

/// Pairs `(y0, y1)` with `½·y0·y1` where every term on `y0` has coefficient ½
/// and no other term on `y0` mentions `y1`.
pub fn match_hh(e: &PurePathSum) -> Vec<Match> {
    let mut out = Vec::new();
    for &y0 in &e.vars {
        if e.in_signature(y0) {
            continue;
        }
        let (s, _) = e.phi.split_on(y0);
        for (m, _) in s.terms() {
            if m.degree() == 1 {
                out.extend(hh_at(e, y0, m.vars()[0]));
            }
        }
    }
    out
}

pub fn apply_hh(e: &PurePathSum, m: &Match) -> Result<PurePathSum> {
    let Match::HH { y0, y1, .. } = *m else {
        return Err(Error::StaleMatch(RuleId::HH.name()));
    };
    let Match::HH { q, rename_to, .. } = check_stale(RuleId::HH, hh_at(e, y0, y1), m)? else {
        unreachable!()
    };
    let (_, r) = e.phi.split_on(y0);
    let mut out = e.clone();
    out.vars.remove(&y0);
    out.scalar.pow2 += 2;
    match rename_to {
        Some(z) => {
            out.phi = r;
            out.merge_var(y1, z);
        }
        None => {
            out.phi = substitute(&r, y1, &lift(&q));
            out.vars.remove(&y1);
        }
    }
    out.migrate_constant();
    Ok(out)
}

fn case_at(e: &PurePathSum, y0: Var, y1: Var) -> Option<Match> {
    if y0 == y1 || !e.vars.contains(&y0) || !e.vars.contains(&y1) || e.in_signature(y0) || e.in_signature(y1) {
        return None;
    }
    let (s0, _) = e.phi.split_on(y0);
    let (s1, _) = e.phi.split_on(y1);
    let side = |s: &PhasePoly, other: Var| -> Vec<(Vec<Var>, Phase)> {
        s.terms()
            .filter(|(m, _)| **m != Monomial::var(other))
            .map(|(m, c)| (m.vars().to_vec(), *c))
            .collect()
    };
    if s0.coeff(&Monomial::var(y1)) != Phase::half() {
        return None;
    }
    let shape = detect_case(&side(&s0, y1), &side(&s1, y0), y0, y1)?;
    Some(Match::Case { y0, y1, shape })
}

/// Pairs `(y0, y1)` joined by `½·y0·y1` whose other non-½ terms are gated by
/// a monomial `g` on the `y0` side and by `1 − g` on the `y1` side.
pub fn match_case(e: &PurePathSum) -> Vec<Match> {
    let mut out = Vec::new();
    for &y0 in &e.vars {
        if e.in_signature(y0) {
            continue;
        }
        let (s, _) = e.phi.split_on(y0);
        for (m, _) in s.terms() {
            if m.degree() == 1 {
                out.extend(case_at(e, y0, m.vars()[0]));
            }
        }
    }
    out
}

fn mono(vs: &[Var]) -> Monomial {
    Monomial::from_vars(vs.iter().copied())
}

fn bool_of(ms: &[Vec<Var>]) -> BoolPoly {
    BoolPoly::from_monomials(ms.iter().map(|m| mono(m)))
}

pub fn apply_case(e: &PurePathSum, m: &Match) -> Result<PurePathSum> {
    let Match::Case { y0, y1, .. } = *m else {
        return Err(Error::StaleMatch(RuleId::Case.name()));
    };
    let Match::Case { shape, .. } = check_stale(RuleId::Case, case_at(e, y0, y1), m)? else {
        unreachable!()
    };
    let CaseShape {
        g,
        q,
        q_prime,
        alpha_terms,
        beta_terms,
    } = shape;
    let (_, r) = e.phi.split_on(y0);
    let (_, r) = r.split_on(y1);
    let q = bool_of(&q);
    let qp = bool_of(&q_prime);
    let (lq, lqp) = (lift(&q), lift(&qp));
    let g = mono(&g);
    let mut phi = r.add(&canonicalize(Phase::half(), &q.mul(&qp)));
    for (ma, alpha) in &alpha_terms {
        phi.add_assign(&IntPoly::monomial(mono(ma)).mul(&lqp).scale_phase(*alpha));
    }
    for (mb, beta) in &beta_terms {
        let base = mono(mb);
        let gate = IntPoly::monomial(base.clone()).sub(&IntPoly::monomial(base.mul(&g)));
        phi.add_assign(&gate.mul(&lq).scale_phase(*beta));
    }
    let mut out = e.clone();
    out.vars.remove(&y0);
    out.vars.remove(&y1);
    out.phi = phi;
    out.scalar.pow2 += 2;
    out.migrate_constant();
    Ok(out)
}

/// Variables removed by applying `m`.
pub fn removed_vars(m: &Match) -> Vec<Var> {
    match m {
        Match::Elim { y0 } | Match::Omega { y0, .. } => vec![*y0],
        Match::HH { y0, y1, .. } | Match::Case { y0, y1, .. } => vec![*y0, *y1],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::ScalarFactor;
    use crate::oracle::{compare, eval_pathsum, CompareMode, OracleOptions, DEFAULT_TOL};

    fn ps(n_vars: Var, inputs: &[Var], outputs: &[Var], terms: &[(&[Var], Phase)]) -> PurePathSum {
        PurePathSum {
            vars: (0..n_vars).collect(),
            input_sig: inputs.to_vec(),
            output_sig: outputs.to_vec(),
            phi: PhasePoly::from_terms(terms.iter().map(|(m, c)| (mono(m), *c))),
            scalar: ScalarFactor::one(),
        }
    }

    fn same(a: &PurePathSum, b: &PurePathSum) {
        let x = eval_pathsum(a, OracleOptions::default()).unwrap();
        let y = eval_pathsum(b, OracleOptions::default()).unwrap();
        assert_eq!(
            compare(&x, &y, CompareMode::ExactScalar, DEFAULT_TOL),
            crate::oracle::Verdict::Equal
        );
    }

    const H: Phase = Phase::Exact(num_rational::Rational64::new_raw(1, 2));

    #[test]
    fn elim_counts_and_scalar() {
        let e = ps(4, &[0], &[0], &[(&[0, 1], H)]);
        let ms = match_elim(&e);
        assert_eq!(ms, vec![Match::Elim { y0: 2 }, Match::Elim { y0: 3 }]);
        let once = apply_elim(&e, &ms[0]).unwrap();
        let twice = apply_elim(&once, &match_elim(&once)[0]).unwrap();
        assert_eq!(twice.scalar.pow2, 4);
        same(&e, &twice);
        assert!(match_elim(&ps(2, &[], &[], &[(&[0, 1], H)])).is_empty());
        assert!(matches!(apply_elim(&twice, &ms[0]), Err(Error::StaleMatch(_))));
    }

    #[test]
    fn omega_without_coupling() {
        let e = ps(1, &[], &[], &[(&[0], Phase::quarter())]);
        let m = &match_omega(&e)[0];
        let out = apply_omega(&e, m).unwrap();
        assert_eq!(out.num_vars(), 0);
        assert_eq!(out.scalar, ScalarFactor::new(1, Phase::new(1, 8)));
        same(&e, &out);
    }

    #[test]
    fn omega_single_and_pair() {
        let e = ps(2, &[1], &[1], &[(&[0], Phase::quarter()), (&[0, 1], H)]);
        let out = apply_omega(&e, &match_omega(&e)[0]).unwrap();
        assert_eq!(out.phi.coeff(&mono(&[1])), Phase::new(3, 4));
        same(&e, &out);
        let e = ps(
            3,
            &[1, 2],
            &[1, 2],
            &[(&[0], Phase::quarter()), (&[0, 1], H), (&[0, 2], H)],
        );
        let out = apply_omega(&e, &match_omega(&e)[0]).unwrap();
        let want = PhasePoly::from_terms([
            (mono(&[1]), Phase::new(3, 4)),
            (mono(&[2]), Phase::new(3, 4)),
            (mono(&[1, 2]), H),
        ]);
        assert_eq!(out.phi, want);
        same(&e, &out);
        let e = ps(3, &[1, 2], &[1, 2], &[(&[0], Phase::new(3, 4)), (&[0, 1, 2], H)]);
        same(&e, &apply_omega(&e, &match_omega(&e)[0]).unwrap());
    }

    #[test]
    fn hh_substitutes_and_renames() {
        // ½y0y1 + ½y0x + ⅛y1 with y1 interior.
        let e = ps(3, &[2], &[2], &[(&[0, 1], H), (&[0, 2], H), (&[1], Phase::new(1, 8))]);
        let m = match_hh(&e);
        // (y0, y1) substitutes; (y0, x) renames x onto y1.
        assert_eq!(m.len(), 2);
        assert!(matches!(
            m[1],
            Match::HH {
                y1: 2,
                rename_to: Some(1),
                ..
            }
        ));
        let out = apply_hh(&e, &m[0]).unwrap();
        assert_eq!(out.num_vars(), 1);
        assert_eq!(out.phi.coeff(&mono(&[2])), Phase::new(1, 8));
        same(&e, &out);
        same(&e, &apply_hh(&e, &m[1]).unwrap());
        // Hadamard twice: the output variable is renamed onto the input.
        let e = ps(3, &[0], &[2], &[(&[0, 1], H), (&[1, 2], H)]);
        let e = PurePathSum {
            scalar: ScalarFactor::sqrt2_pow(-2),
            ..e
        };
        let out = apply_hh(&e, &match_hh(&e)[0]).unwrap();
        assert!(out.is_identity_form());
        assert!(out.scalar.is_one());
    }

    #[test]
    fn hh_with_inert_target() {
        let e = ps(
            4,
            &[2, 3],
            &[2, 3],
            &[(&[0, 1], H), (&[0, 2], H), (&[0, 3], H), (&[2, 3], Phase::new(1, 8))],
        );
        let out = apply_hh(&e, &match_hh(&e)[0]).unwrap();
        assert_eq!(out.phi, PhasePoly::from_terms([(mono(&[2, 3]), Phase::new(1, 8))]));
        assert_eq!(out.scalar.pow2, 2);
        same(&e, &out);
    }

    #[test]
    fn case_reduces_gated_terms() {
        // y0 = 0, y1 = 1, g = x2, Q = x3, Q' = x4.
        let e = ps(
            5,
            &[2, 3, 4],
            &[2, 3, 4],
            &[
                (&[0, 1], H),
                (&[0, 3], H),
                (&[1, 4], H),
                (&[0, 2], Phase::new(1, 8)),
                (&[1], Phase::new(1, 8)),
                (&[1, 2], Phase::new(7, 8)),
            ],
        );
        let ms = match_case(&e);
        assert!(!ms.is_empty());
        let out = apply_case(&e, &ms[0]).unwrap();
        assert_eq!(out.num_vars(), 3);
        same(&e, &out);
    }
}
