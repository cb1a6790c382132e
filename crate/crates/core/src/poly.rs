//! Multilinear polynomials over Boolean variables.
//!
//! * [`BoolPoly`]: XOR of monomials, valued in 𝔹.
//! * [`IntPoly`]: integer coefficients; the target of the lifting operator.
//! * [`PhasePoly`]: phase coefficients mod 1; the phase polynomial of a path-sum.
//!
//! All products re-expand with `x² = x`.

use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::numeric::Phase;

/// Variable index. Indices are stable; eliminated variables leave gaps.
pub type Var = u32;

/// Product of distinct Boolean variables. The empty monomial is the constant 1.
///
/// Ordered graded-lexicographically: by degree, then by variable list.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<Var>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Monomial(vec![v])
    }

    pub fn from_vars<I: IntoIterator<Item = Var>>(vars: I) -> Self {
        let mut v: Vec<Var> = vars.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Monomial(v)
    }

    pub fn vars(&self) -> &[Var] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: Var) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    /// True when every variable of `self` occurs in `other`.
    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().all(|v| other.contains(*v))
    }

    pub fn is_disjoint(&self, other: &Monomial) -> bool {
        self.0.iter().all(|v| !other.contains(*v))
    }

    /// Product (set union).
    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                Ordering::Less => {
                    out.push(self.0[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push(self.0[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    pub fn without(&self, v: Var) -> Monomial {
        Monomial(self.0.iter().copied().filter(|&x| x != v).collect())
    }

    /// Set difference `self \ other`.
    pub fn minus(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().copied().filter(|&x| !other.contains(x)).collect())
    }

    pub fn map_vars(&self, f: impl Fn(Var) -> Var) -> Monomial {
        Monomial::from_vars(self.0.iter().map(|&v| f(v)))
    }

    /// Value on an assignment indexed by variable.
    pub fn eval(&self, x: &[bool]) -> bool {
        self.0.iter().all(|&v| x[v as usize])
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "·")?;
            }
            write!(f, "x{v}")?;
        }
        Ok(())
    }
}

/// XOR of Boolean monomials.
#[derive(Clone, PartialEq, Eq, Default, Debug)]
pub struct BoolPoly(BTreeSet<Monomial>);

impl BoolPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_monomials<I: IntoIterator<Item = Monomial>>(ms: I) -> Self {
        let mut p = BoolPoly::zero();
        for m in ms {
            p.xor_monomial(m);
        }
        p
    }

    pub fn var(v: Var) -> Self {
        Self::from_monomials([Monomial::var(v)])
    }

    pub fn monomials(&self) -> impl Iterator<Item = &Monomial> + '_ {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn xor_monomial(&mut self, m: Monomial) {
        if !self.0.remove(&m) {
            self.0.insert(m);
        }
    }

    pub fn xor(&self, other: &BoolPoly) -> BoolPoly {
        let mut out = self.clone();
        for m in &other.0 {
            out.xor_monomial(m.clone());
        }
        out
    }

    /// Boolean product (AND), distributed over XOR.
    pub fn mul(&self, other: &BoolPoly) -> BoolPoly {
        let mut out = BoolPoly::zero();
        for a in &self.0 {
            for b in &other.0 {
                out.xor_monomial(a.mul(b));
            }
        }
        out
    }

    pub fn eval(&self, x: &[bool]) -> bool {
        self.0.iter().filter(|m| m.eval(x)).count() % 2 == 1
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.0.iter().flat_map(|m| m.vars().iter().copied()).collect()
    }
}

/// Multilinear polynomial with integer coefficients.
#[derive(Clone, PartialEq, Eq, Default, Debug)]
pub struct IntPoly(BTreeMap<Monomial, BigInt>);

impl IntPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(m: Monomial) -> Self {
        let mut p = Self::zero();
        p.add_term(m, BigInt::one());
        p
    }

    pub fn constant(c: i64) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::one(), BigInt::from(c));
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.0.entry(m) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> + '_ {
        self.0.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> BigInt {
        self.0.get(m).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, other: &IntPoly) -> IntPoly {
        let mut out = self.clone();
        for (m, c) in &other.0 {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, k: &BigInt) -> IntPoly {
        let mut out = IntPoly::zero();
        for (m, c) in &self.0 {
            out.add_term(m.clone(), c * k);
        }
        out
    }

    pub fn sub(&self, other: &IntPoly) -> IntPoly {
        self.add(&other.scale(&BigInt::from(-1)))
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        let mut out = IntPoly::zero();
        for (a, ca) in &self.0 {
            for (b, cb) in &other.0 {
                out.add_term(a.mul(b), ca * cb);
            }
        }
        out
    }

    pub fn mul_monomial(&self, m: &Monomial) -> IntPoly {
        let mut out = IntPoly::zero();
        for (a, c) in &self.0 {
            out.add_term(a.mul(m), c.clone());
        }
        out
    }

    /// `α · self` with coefficients reduced mod 1.
    pub fn scale_phase(&self, alpha: Phase) -> PhasePoly {
        let mut out = PhasePoly::zero();
        for (m, c) in &self.0 {
            out.add_term(m.clone(), alpha.mul_bigint(c));
        }
        out
    }

    pub fn eval(&self, x: &[bool]) -> BigInt {
        self.0.iter().filter(|(m, _)| m.eval(x)).map(|(_, c)| c.clone()).sum()
    }

    pub fn max_abs_coeff(&self) -> BigInt {
        self.0.values().map(|c| c.abs()).max().unwrap_or_default()
    }
}

/// Multilinear polynomial with phase coefficients (mod 1). Zero terms are never stored.
#[derive(Clone, PartialEq, Eq, Default, Debug)]
pub struct PhasePoly(BTreeMap<Monomial, Phase>);

impl PhasePoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Phase)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: Phase) {
        if c.is_zero() {
            return;
        }
        match self.0.entry(m) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Phase)> + '_ {
        self.0.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Monomial, Phase)> {
        self.0.into_iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Phase {
        self.0.get(m).copied().unwrap_or(Phase::ZERO)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, other: &PhasePoly) -> PhasePoly {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn add_assign(&mut self, other: &PhasePoly) {
        for (m, c) in &other.0 {
            self.add_term(m.clone(), *c);
        }
    }

    pub fn neg(&self) -> PhasePoly {
        PhasePoly(self.0.iter().map(|(m, c)| (m.clone(), -*c)).collect())
    }

    /// Product with an integer polynomial, coefficients reduced mod 1.
    pub fn mul_int(&self, p: &IntPoly) -> PhasePoly {
        let mut out = PhasePoly::zero();
        for (a, ca) in &self.0 {
            for (b, cb) in p.terms() {
                out.add_term(a.mul(b), ca.mul_bigint(cb));
            }
        }
        out
    }

    pub fn mentions(&self, v: Var) -> bool {
        self.0.keys().any(|m| m.contains(v))
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.0.keys().flat_map(|m| m.vars().iter().copied()).collect()
    }

    /// Splits `self = y·S + T`, returning `(S, T)`.
    pub fn split_on(&self, y: Var) -> (PhasePoly, PhasePoly) {
        let mut s = PhasePoly::zero();
        let mut t = PhasePoly::zero();
        for (m, c) in &self.0 {
            if m.contains(y) {
                s.add_term(m.without(y), *c);
            } else {
                t.add_term(m.clone(), *c);
            }
        }
        (s, t)
    }

    /// Removes and returns the constant term.
    pub fn take_constant(&mut self) -> Phase {
        self.0.remove(&Monomial::one()).unwrap_or(Phase::ZERO)
    }

    pub fn map_vars(&self, f: impl Fn(Var) -> Var) -> PhasePoly {
        let mut out = PhasePoly::zero();
        for (m, c) in &self.0 {
            out.add_term(m.map_vars(&f), *c);
        }
        out
    }

    /// Phase `Σ coeff·∏ x_j` on an assignment indexed by variable.
    pub fn eval(&self, x: &[bool]) -> Phase {
        self.0
            .iter()
            .filter(|(m, _)| m.eval(x))
            .fold(Phase::ZERO, |acc, (_, c)| acc + *c)
    }

    pub fn is_exact(&self) -> bool {
        self.0.values().all(Phase::is_exact)
    }
}

impl fmt::Display for PhasePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}·{m}")?;
        }
        Ok(())
    }
}

/// Phase of `phi` at assignment `x`.
pub fn evaluate_assignment(phi: &PhasePoly, x: &[bool]) -> Phase {
    phi.eval(x)
}

/// The integer lifting `Q̄` of a Boolean polynomial, built inductively:
/// `lift(P ⊕ m) = lift(P) + m − 2·lift(P)·m`.
pub fn lift(q: &BoolPoly) -> IntPoly {
    let two = BigInt::from(-2);
    let mut acc = IntPoly::zero();
    for m in q.monomials() {
        let mono = IntPoly::monomial(m.clone());
        let cross = acc.mul_monomial(m).scale(&two);
        acc = acc.add(&mono).add(&cross);
    }
    acc
}

/// `α · lift(q)` mod 1 via the closed form
/// `Σ_{b ≠ 0} (−2)^{|b|−1} α ∏_{i ∈ b} m_i` over subsets of the monomials of `q`.
///
/// When `α` is dyadic (`p/2^k`) only subsets of size `≤ k` contribute, so the
/// enumeration is truncated there. Non-dyadic phases over many monomials fall
/// back to the inductive lift.
pub fn scale_lift(alpha: Phase, q: &BoolPoly) -> PhasePoly {
    let ms: Vec<&Monomial> = q.monomials().collect();
    let n = ms.len();
    let max_r = match alpha.dyadic_support() {
        Some(k) => (k as usize).min(n),
        None if n <= 20 => n,
        None => return lift(q).scale_phase(alpha),
    };
    let mut out = PhasePoly::zero();
    if alpha.is_zero() {
        return out;
    }
    // Depth-first enumeration of subsets of size 1..=max_r.
    fn rec(
        ms: &[&Monomial],
        start: usize,
        size: usize,
        max_r: usize,
        acc: &Monomial,
        alpha: Phase,
        out: &mut PhasePoly,
    ) {
        for i in start..ms.len() {
            let m = acc.mul(ms[i]);
            let s = size + 1;
            out.add_term(m.clone(), alpha.mul_neg2_pow((s - 1) as u32));
            if s < max_r {
                rec(ms, i + 1, s, max_r, &m, alpha, out);
            }
        }
    }
    if max_r > 0 {
        rec(&ms, 0, 0, max_r, &Monomial::one(), alpha, &mut out);
    }
    out
}

/// Rewrites `α·f` for a Boolean polynomial `f` as a sum of monomials with
/// phase coefficients, using `x ⊕ y = x + y − 2xy`.
pub fn canonicalize(alpha: Phase, f: &BoolPoly) -> PhasePoly {
    lift(f).scale_phase(alpha)
}

/// `r[y ← p]`: writes `r = y·S + T` and returns `p·S + T`.
pub fn substitute(r: &PhasePoly, y: Var, p: &IntPoly) -> PhasePoly {
    let (s, mut t) = r.split_on(y);
    t.add_assign(&s.mul_int(p));
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(vs: &[Var]) -> Monomial {
        Monomial::from_vars(vs.iter().copied())
    }

    fn ip(terms: &[(&[Var], i64)]) -> IntPoly {
        let mut p = IntPoly::zero();
        for (vs, c) in terms {
            p.add_term(m(vs), BigInt::from(*c));
        }
        p
    }

    fn pp(terms: &[(&[Var], (i64, i64))]) -> PhasePoly {
        PhasePoly::from_terms(terms.iter().map(|(vs, (n, d))| (m(vs), Phase::new(*n, *d))))
    }

    fn assignments(k: usize) -> impl Iterator<Item = Vec<bool>> {
        (0u32..(1 << k)).map(move |bits| (0..k).map(|i| bits >> i & 1 == 1).collect())
    }

    #[test]
    fn monomial_order_is_graded_lex() {
        let mut v = vec![m(&[0, 1]), m(&[2]), m(&[]), m(&[0, 2]), m(&[1])];
        v.sort();
        assert_eq!(v, vec![m(&[]), m(&[1]), m(&[2]), m(&[0, 1]), m(&[0, 2])]);
    }

    #[test]
    fn evaluate_examples() {
        let phi = pp(&[(&[1, 2], (1, 2))]);
        let x = [false, true, true];
        assert_eq!(evaluate_assignment(&phi, &x), Phase::half());
        assert_eq!(evaluate_assignment(&phi, &[false, true, false]), Phase::ZERO);
        // ½(x2x3 + x1x3 + x3x4) at all ones
        let cnot = pp(&[(&[2, 3], (1, 2)), (&[1, 3], (1, 2)), (&[3, 4], (1, 2))]);
        assert_eq!(cnot.eval(&[false, true, true, true, true]), Phase::half());
    }

    #[test]
    fn lift_examples() {
        assert_eq!(lift(&BoolPoly::var(0)), ip(&[(&[0], 1)]));
        let xy = BoolPoly::from_monomials([m(&[0]), m(&[1])]);
        assert_eq!(lift(&xy), ip(&[(&[0], 1), (&[1], 1), (&[0, 1], -2)]));
        let xyz = BoolPoly::from_monomials([m(&[0]), m(&[1]), m(&[2])]);
        let expect = ip(&[
            (&[0], 1),
            (&[1], 1),
            (&[2], 1),
            (&[0, 1], -2),
            (&[0, 2], -2),
            (&[1, 2], -2),
            (&[0, 1, 2], 4),
        ]);
        assert_eq!(lift(&xyz), expect);
        for x in assignments(3) {
            assert_eq!(expect.eval(&x), BigInt::from(xyz.eval(&x) as i64));
        }
    }

    #[test]
    fn scale_lift_examples() {
        let q = BoolPoly::from_monomials([m(&[0]), m(&[1])]);
        assert_eq!(
            scale_lift(Phase::quarter(), &q),
            pp(&[(&[0], (1, 4)), (&[1], (1, 4)), (&[0, 1], (1, 2))])
        );
        let single = BoolPoly::from_monomials([m(&[0, 3])]);
        assert_eq!(scale_lift(Phase::half(), &single), pp(&[(&[0, 3], (1, 2))]));
        assert_eq!(scale_lift(Phase::half(), &q), pp(&[(&[0], (1, 2)), (&[1], (1, 2))]));
        // −¼ lift of m₁ ⊕ m₂
        assert_eq!(
            scale_lift(Phase::new(-1, 4), &q),
            pp(&[(&[0], (3, 4)), (&[1], (3, 4)), (&[0, 1], (1, 2))])
        );
    }

    #[test]
    fn canonicalize_examples() {
        let f = BoolPoly::from_monomials([m(&[1]), m(&[2])]);
        assert_eq!(canonicalize(Phase::half(), &f), pp(&[(&[1], (1, 2)), (&[2], (1, 2))]));
        let g = BoolPoly::from_monomials([m(&[1, 4])]);
        assert_eq!(canonicalize(Phase::new(3, 7), &g), pp(&[(&[1, 4], (3, 7))]));
        let quarter = canonicalize(Phase::quarter(), &f);
        assert_eq!(quarter, pp(&[(&[1], (1, 4)), (&[2], (1, 4)), (&[1, 2], (1, 2))]));
        for x in assignments(3) {
            let direct = if f.eval(&x) { Phase::quarter() } else { Phase::ZERO };
            assert_eq!(quarter.eval(&x), direct);
        }
    }

    #[test]
    fn substitute_examples() {
        let r = pp(&[(&[9, 1], (1, 4))]);
        assert_eq!(substitute(&r, 9, &ip(&[(&[2], 1)])), pp(&[(&[1, 2], (1, 4))]));
        let r = pp(&[(&[9], (1, 4))]);
        let p = ip(&[(&[0], 1), (&[1], 1), (&[0, 1], -2)]);
        assert_eq!(
            substitute(&r, 9, &p),
            pp(&[(&[0], (1, 4)), (&[1], (1, 4)), (&[0, 1], (1, 2))])
        );
        let r = pp(&[(&[0, 1], (1, 8))]);
        assert_eq!(substitute(&r, 9, &p), r);
    }

    fn arb_boolpoly(k: u32, max_terms: usize) -> impl Strategy<Value = BoolPoly> {
        prop::collection::vec(prop::collection::vec(0..k, 0..=k as usize), 0..=max_terms)
            .prop_map(|ms| BoolPoly::from_monomials(ms.into_iter().map(Monomial::from_vars)))
    }

    fn arb_phase() -> impl Strategy<Value = Phase> {
        (0i64..64, prop::sample::select(vec![2i64, 4, 8, 16, 3, 6, 12, 5])).prop_map(|(n, d)| Phase::new(n, d))
    }

    proptest! {
        #[test]
        fn lift_agrees_on_booleans(q in arb_boolpoly(6, 8)) {
            let l = lift(&q);
            for x in assignments(6) {
                prop_assert_eq!(l.eval(&x), BigInt::from(q.eval(&x) as i64));
            }
        }

        #[test]
        fn closed_form_matches_inductive(q in arb_boolpoly(6, 5), a in arb_phase()) {
            prop_assert_eq!(scale_lift(a, &q), lift(&q).scale_phase(a));
        }

        #[test]
        fn canonicalize_pointwise(q in arb_boolpoly(6, 6), a in arb_phase()) {
            let c = canonicalize(a, &q);
            for x in assignments(6) {
                let direct = if q.eval(&x) { a } else { Phase::ZERO };
                prop_assert_eq!(c.eval(&x), direct);
            }
        }

        #[test]
        fn substitute_matches_pointwise(
            r in prop::collection::vec((prop::collection::vec(0u32..6, 0..4), arb_phase()), 0..6),
            q in arb_boolpoly(5, 4),
        ) {
            // variable 5 plays y; q lives on 0..5
            let r = PhasePoly::from_terms(r.into_iter().map(|(vs, c)| (Monomial::from_vars(vs), c)));
            let s = substitute(&r, 5, &lift(&q));
            for x in assignments(5) {
                let mut xy = x.clone();
                xy.push(q.eval(&x));
                prop_assert_eq!(s.eval(&xy), r.eval(&xy));
            }
        }
    }
}
