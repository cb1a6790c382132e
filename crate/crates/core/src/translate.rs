//! The correspondence between hypergraph-like diagrams and pure path-sums:
//! spiders are path variables, H-boxes are phase-polynomial terms.

use num_complex::Complex64;
use num_rational::Rational64;

use crate::diagram::{Diagram, HLabel};
use crate::error::{Error, Result};
use crate::numeric::Phase;
use crate::pathsum::PurePathSum;
use crate::poly::{Monomial, PhasePoly, Var};

/// Largest denominator tried when recovering an exact phase from a float.
const MAX_RECOVERED_DENOMINATOR: i64 = 1024;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TranslateOptions {
    /// Accept unit-modulus labels whose argument is not a recognisable
    /// rational turn, as inexact phases.
    pub inexact: bool,
}

/// Reads a unit-modulus complex number as a phase. Arguments within 1e-12 of
/// a rational turn with small denominator come back exact.
pub fn phase_of_unit(z: Complex64, inexact: bool) -> Option<Phase> {
    if (z.norm() - 1.0).abs() > 1e-12 {
        return None;
    }
    let t = z.arg() / (2.0 * std::f64::consts::PI);
    let t = t - t.floor();
    for q in 1..=MAX_RECOVERED_DENOMINATOR {
        let p = (t * q as f64).round();
        if (t - p / q as f64).abs() < 1e-12 {
            return Some(Phase::from_ratio(Rational64::new(p as i64, q)));
        }
    }
    inexact.then(|| Phase::from_turns(t))
}

/// `Z[d]`: one variable per spider (same id), one term per H-box.
pub fn zh_to_pathsum(d: &Diagram, opts: TranslateOptions) -> Result<PurePathSum> {
    let mut phi = PhasePoly::zero();
    for (&h, b) in &d.hboxes {
        if b.neighbors.is_empty() {
            return Err(Error::precondition(
                "zh_to_pathsum",
                format!("H-box {h} has no neighbours"),
            ));
        }
        if b.label.is_one() {
            return Err(Error::precondition("zh_to_pathsum", format!("H-box {h} has label 1")));
        }
        let coeff = match b.label {
            HLabel::Phase(p) => p,
            HLabel::General(z) => {
                if (z.norm() - 1.0).abs() > 1e-12 {
                    return Err(Error::NonPhaseLabel {
                        hbox: h,
                        label: b.label.to_string(),
                    });
                }
                phase_of_unit(z, opts.inexact).ok_or(Error::InexactLabel { hbox: h })?
            }
        };
        phi.add_term(Monomial::from_vars(b.neighbors.iter().map(|&s| s as Var)), coeff);
    }
    let e = PurePathSum {
        vars: d.spiders.iter().map(|&s| s as Var).collect(),
        input_sig: d.inputs.iter().map(|&s| s as Var).collect(),
        output_sig: d.outputs.iter().map(|&s| s as Var).collect(),
        phi,
        scalar: d.scalar.clone(),
    };
    Ok(e)
}

/// `P[e]`: one spider per variable (same id), one H-box per term. A constant
/// term is folded into the scalar.
pub fn pathsum_to_zh(e: &PurePathSum) -> Diagram {
    let mut d = Diagram::new();
    d.spiders = e.vars.iter().map(|&v| v as usize).collect();
    d.scalar = e.scalar.clone();
    for (m, c) in e.phi.terms() {
        if m.is_one() {
            d.scalar.phase += *c;
            continue;
        }
        d.add_hbox(HLabel::Phase(*c), m.vars().iter().map(|&v| v as usize));
    }
    d.inputs = e.input_sig.iter().map(|&v| v as usize).collect();
    d.outputs = e.output_sig.iter().map(|&v| v as usize).collect();
    d
}
