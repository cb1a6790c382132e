//! Pure path-sum expressions `λ Σ_x e^{2πiφ(x)} |x_o⟩⟨x_i|`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseError, Result};
use crate::numeric::{Phase, ScalarFactor};
use crate::poly::{canonicalize, BoolPoly, Monomial, PhasePoly, Var};

/// A pure path-sum: path variables, input/output signatures, a phase
/// polynomial and a global scalar.
///
/// Signatures may repeat variables. The constant term of `phi` is kept in
/// `scalar.phase` once [`PurePathSum::migrate_constant`] has run.
#[derive(Clone, Debug, PartialEq)]
pub struct PurePathSum {
    pub vars: BTreeSet<Var>,
    pub input_sig: Vec<Var>,
    pub output_sig: Vec<Var>,
    pub phi: PhasePoly,
    pub scalar: ScalarFactor,
}

impl PurePathSum {
    /// Variable-free path-sum with the given scalar.
    pub fn scalar_only(scalar: ScalarFactor) -> Self {
        PurePathSum {
            vars: BTreeSet::new(),
            input_sig: Vec::new(),
            output_sig: Vec::new(),
            phi: PhasePoly::zero(),
            scalar,
        }
    }

    /// `Σ_x |x⟩⟨x|` on `n` wires.
    pub fn identity(n: usize) -> Self {
        let vars: Vec<Var> = (0..n as Var).collect();
        PurePathSum {
            vars: vars.iter().copied().collect(),
            input_sig: vars.clone(),
            output_sig: vars,
            phi: PhasePoly::zero(),
            scalar: ScalarFactor::one(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_inputs(&self) -> usize {
        self.input_sig.len()
    }

    pub fn num_outputs(&self) -> usize {
        self.output_sig.len()
    }

    pub fn fresh_var(&self) -> Var {
        self.vars.iter().next_back().map_or(0, |v| v + 1)
    }

    pub fn in_signature(&self, v: Var) -> bool {
        self.input_sig.contains(&v) || self.output_sig.contains(&v)
    }

    /// Checks that signatures and `phi` reference live variables only.
    pub fn validate(&self) -> Result<()> {
        let bad =
            |what: &str, v: Var| Err(ParseError::Structure(format!("{what} references unknown variable {v}")).into());
        for &v in self.input_sig.iter() {
            if !self.vars.contains(&v) {
                return bad("input signature", v);
            }
        }
        for &v in self.output_sig.iter() {
            if !self.vars.contains(&v) {
                return bad("output signature", v);
            }
        }
        for v in self.phi.vars() {
            if !self.vars.contains(&v) {
                return bad("phase polynomial", v);
            }
        }
        Ok(())
    }

    /// Moves the constant monomial of `phi` into the scalar phase.
    pub fn migrate_constant(&mut self) {
        let c = self.phi.take_constant();
        self.scalar.phase += c;
    }

    /// Renames variables through `f`, which must be injective on `vars`.
    pub fn rename(&self, f: impl Fn(Var) -> Var) -> PurePathSum {
        PurePathSum {
            vars: self.vars.iter().map(|&v| f(v)).collect(),
            input_sig: self.input_sig.iter().map(|&v| f(v)).collect(),
            output_sig: self.output_sig.iter().map(|&v| f(v)).collect(),
            phi: self.phi.map_vars(&f),
            scalar: self.scalar.clone(),
        }
    }

    /// Renames variables to `0..k` in ascending order.
    pub fn compacted(&self) -> PurePathSum {
        let map: BTreeMap<Var, Var> = self.vars.iter().enumerate().map(|(i, &v)| (v, i as Var)).collect();
        self.rename(|v| map[&v])
    }

    /// The adjoint map: signatures swap, phases and scalar conjugate.
    pub fn adjoint(&self) -> PurePathSum {
        PurePathSum {
            vars: self.vars.clone(),
            input_sig: self.output_sig.clone(),
            output_sig: self.input_sig.clone(),
            phi: self.phi.neg(),
            scalar: self.scalar.conj(),
        }
    }

    /// Identifies variable `from` with `to` everywhere (`from` disappears).
    pub fn merge_var(&mut self, from: Var, to: Var) {
        if from == to {
            return;
        }
        let f = |v: Var| if v == from { to } else { v };
        self.phi = self.phi.map_vars(f);
        for v in self.input_sig.iter_mut().chain(self.output_sig.iter_mut()) {
            *v = f(*v);
        }
        self.vars.remove(&from);
    }

    /// True when the expression is literally `Σ_x |x⟩⟨x|` times `scalar`:
    /// equal signatures over distinct variables, no other variables, empty `phi`.
    pub fn is_identity_form(&self) -> bool {
        let distinct: BTreeSet<Var> = self.input_sig.iter().copied().collect();
        self.input_sig == self.output_sig
            && distinct.len() == self.input_sig.len()
            && distinct == self.vars
            && self.phi.is_empty()
    }
}

/// Sequential composition: `a` first, then `b` (the operator `b · a`).
///
/// Each joined wire pair `(o, i)` identifies `b`'s variable `i` with `a`'s
/// variable `o`. Repeated signature entries make the identification a union of
/// variable classes, so no delta terms are needed.
pub fn compose_pathsums(a: &PurePathSum, b: &PurePathSum) -> Result<PurePathSum> {
    if a.num_outputs() != b.num_inputs() {
        return Err(Error::ArityMismatch {
            left: a.num_outputs(),
            right: b.num_inputs(),
        });
    }
    let offset = a.fresh_var();
    let b = b.rename(|v| v + offset);

    // Union-find over the joined variable classes.
    let mut parent: BTreeMap<Var, Var> = BTreeMap::new();
    fn find(parent: &mut BTreeMap<Var, Var>, v: Var) -> Var {
        let p = *parent.get(&v).unwrap_or(&v);
        if p == v {
            return v;
        }
        let r = find(parent, p);
        parent.insert(v, r);
        r
    }
    for (&o, &i) in a.output_sig.iter().zip(b.input_sig.iter()) {
        let ro = find(&mut parent, o);
        let ri = find(&mut parent, i);
        if ro != ri {
            // keep the smaller representative, which is `a`'s side when present
            let (keep, drop) = if ro < ri { (ro, ri) } else { (ri, ro) };
            parent.insert(drop, keep);
        }
    }

    let mut phi = a.phi.clone();
    phi.add_assign(&b.phi);
    let mut out = PurePathSum {
        vars: a.vars.union(&b.vars).copied().collect(),
        input_sig: a.input_sig.clone(),
        output_sig: b.output_sig.clone(),
        phi,
        scalar: a.scalar.combine(&b.scalar),
    };
    let all: Vec<Var> = out.vars.iter().copied().collect();
    for v in all {
        let r = find(&mut parent, v);
        if r != v {
            out.merge_var(v, r);
        }
    }
    out.migrate_constant();
    Ok(out)
}

/// Turns a functional path-sum `λ Σ_{x,y} e^{2πiφ(x,y)} |f(x,y)⟩⟨x|` into a pure one.
///
/// Inputs are variables `0..n_inputs`, paths `n_inputs..n_inputs+n_paths`.
/// Each output `j` gets fresh `v_j, w_j` with terms `½ v_j w_j + ½ v_j·f_j`,
/// where `½·v_j·f_j` is expanded through the lifting of `f_j`. The scalar picks
/// up `2^{−m}` and terms whose coefficient vanishes mod 1 are dropped.
pub fn purify(f: &[BoolPoly], phi: &PhasePoly, lambda: &ScalarFactor, n_inputs: usize, n_paths: usize) -> PurePathSum {
    let m = f.len();
    let base = (n_inputs + n_paths) as Var;
    let v_of = |j: usize| base + j as Var;
    let w_of = |j: usize| base + (m + j) as Var;

    let mut out_phi = phi.clone();
    for (j, fj) in f.iter().enumerate() {
        let v = v_of(j);
        out_phi.add_term(Monomial::from_vars([v, w_of(j)]), Phase::half());
        let vf = fj.mul(&BoolPoly::var(v));
        out_phi.add_assign(&canonicalize(Phase::half(), &vf));
    }
    let mut scalar = lambda.clone();
    scalar.pow2 -= 2 * m as i32;
    let mut ps = PurePathSum {
        vars: (0..base + 2 * m as Var).collect(),
        input_sig: (0..n_inputs as Var).collect(),
        output_sig: (0..m).map(w_of).collect(),
        phi: out_phi,
        scalar,
    };
    ps.migrate_constant();
    ps
}

impl fmt::Display for PurePathSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sig = |s: &[Var]| s.iter().map(|v| format!("x{v}")).collect::<Vec<_>>().join(",");
        write!(
            f,
            "{} Σ[{} vars] e^(2πi·({})) |{}⟩⟨{}|",
            self.scalar,
            self.num_vars(),
            self.phi,
            sig(&self.output_sig),
            sig(&self.input_sig)
        )
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    coeff: Phase,
    monomial: Vec<Var>,
}

#[derive(Serialize, Deserialize)]
struct PathSumRepr {
    vars: usize,
    inputs: Vec<Var>,
    outputs: Vec<Var>,
    terms: Vec<TermRepr>,
    #[serde(default)]
    scalar: ScalarFactor,
}

impl Serialize for PurePathSum {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let c = self.compacted();
        PathSumRepr {
            vars: c.num_vars(),
            inputs: c.input_sig.clone(),
            outputs: c.output_sig.clone(),
            terms: c
                .phi
                .terms()
                .map(|(m, coeff)| TermRepr {
                    coeff: *coeff,
                    monomial: m.vars().to_vec(),
                })
                .collect(),
            scalar: c.scalar.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PurePathSum {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = PathSumRepr::deserialize(d)?;
        let ps = PurePathSum {
            vars: (0..r.vars as Var).collect(),
            input_sig: r.inputs,
            output_sig: r.outputs,
            phi: PhasePoly::from_terms(r.terms.into_iter().map(|t| (Monomial::from_vars(t.monomial), t.coeff))),
            scalar: r.scalar,
        };
        ps.validate().map_err(serde::de::Error::custom)?;
        let mut ps = ps;
        ps.migrate_constant();
        Ok(ps)
    }
}

impl PurePathSum {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("path-sum serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| ParseError::Json(e.to_string()).into())
    }
}
