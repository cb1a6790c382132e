//! Equivalence checking: rewrite `A · B†` towards the identity, and fall back
//! to the dense oracle for whatever residue is left.

use std::fmt;

use serde::Serialize;

use crate::circuits::{adjoint, circuit_to_diagram, Circuit};
use crate::diagram::{normalize, Diagram};
use crate::error::{Error, Result};
use crate::oracle::{compare, eval_pathsum, CompareMode, DenseMatrix, OracleOptions, Verdict, DEFAULT_TOL};
use crate::pathsum::{compose_pathsums, PurePathSum};
use crate::rules::{simplify, simplify_diagram, Policy, RewriteTrace};
use crate::translate::{pathsum_to_zh, zh_to_pathsum, TranslateOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    Equal,
    EqualUpToGlobalPhase,
    NotProven,
    Unequal,
}

impl Status {
    /// Process exit code: 0 for either kind of equality, 1 not proven, 2 unequal.
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Equal | Status::EqualUpToGlobalPhase => 0,
            Status::NotProven => 1,
            Status::Unequal => 2,
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Equal => "Equal",
            Status::EqualUpToGlobalPhase => "EqualUpToGlobalPhase",
            Status::NotProven => "NotProven",
            Status::Unequal => "Unequal",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Engine {
    PathSum,
    Diagram,
}

/// How a verdict was reached.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Proof {
    Rewriting,
    Oracle,
    None,
}

/// An entry of `A · B†` that differs from the identity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Evidence {
    pub row: usize,
    pub col: usize,
    pub max_diff: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub status: Status,
    pub proof: Proof,
    /// Path variables (or spiders) left after rewriting.
    pub residue_size: usize,
    pub trace: RewriteTrace,
    pub evidence: Option<Evidence>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyOptions {
    pub mode: CompareMode,
    pub engine: Engine,
    pub oracle: OracleOptions,
    /// Skip the oracle entirely; unproven identities stay `NotProven`.
    pub rewrite_only: bool,
    pub tol: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            mode: CompareMode::ExactScalar,
            engine: Engine::PathSum,
            oracle: OracleOptions::default(),
            rewrite_only: false,
            tol: DEFAULT_TOL,
        }
    }
}

fn check_arity(a: &PurePathSum, b: &PurePathSum) -> Result<()> {
    if a.num_inputs() != b.num_inputs() || a.num_outputs() != b.num_outputs() {
        return Err(Error::ArityMismatch {
            left: a.num_outputs(),
            right: b.num_outputs(),
        });
    }
    Ok(())
}

/// Status for a residue already in identity form with scalar `s`.
fn identity_status(scalar: &crate::numeric::ScalarFactor, mode: CompareMode) -> Option<Status> {
    if scalar.is_one() {
        Some(Status::Equal)
    } else if mode == CompareMode::UpToGlobalPhase && scalar.is_pure_phase() {
        Some(Status::EqualUpToGlobalPhase)
    } else {
        None
    }
}

/// Compares the residue of `A · B†` to the identity.
fn oracle_on_residue(residue: &PurePathSum, opts: &VerifyOptions) -> Result<Option<(Status, Option<Evidence>)>> {
    if opts.rewrite_only {
        return Ok(None);
    }
    let m = match eval_pathsum(residue, opts.oracle) {
        Ok(m) => m,
        Err(Error::CapExceeded { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let id = DenseMatrix::identity(residue.num_inputs());
    let exact = compare(&m, &id, CompareMode::ExactScalar, opts.tol);
    let verdict = match (exact, opts.mode) {
        (Verdict::Equal, _) => return Ok(Some((Status::Equal, None))),
        (v, CompareMode::ExactScalar) => v,
        (_, CompareMode::UpToGlobalPhase) => match compare(&m, &id, CompareMode::UpToGlobalPhase, opts.tol) {
            Verdict::Equal => return Ok(Some((Status::EqualUpToGlobalPhase, None))),
            v => v,
        },
    };
    let evidence = match verdict {
        Verdict::Unequal { max_diff, row, col } => Some(Evidence { row, col, max_diff }),
        _ => None,
    };
    Ok(Some((Status::Unequal, evidence)))
}

fn finish(
    residue: PurePathSum,
    trace: RewriteTrace,
    rewritten: Option<Status>,
    opts: &VerifyOptions,
) -> Result<Report> {
    let residue_size = residue.num_vars();
    if let Some(status) = rewritten {
        return Ok(Report {
            status,
            proof: Proof::Rewriting,
            residue_size,
            trace,
            evidence: None,
        });
    }
    Ok(match oracle_on_residue(&residue, opts)? {
        Some((status, evidence)) => Report {
            status,
            proof: Proof::Oracle,
            residue_size,
            trace,
            evidence,
        },
        None => Report {
            status: Status::NotProven,
            proof: Proof::None,
            residue_size,
            trace,
            evidence: None,
        },
    })
}

/// Simplifies a miter `A · B†` with the chosen engine and decides it.
pub fn verify_miter(miter: &PurePathSum, opts: &VerifyOptions) -> Result<Report> {
    match opts.engine {
        Engine::PathSum => {
            let (residue, trace) = simplify(miter, &Policy::pathsum())?;
            let rewritten = residue
                .is_identity_form()
                .then(|| identity_status(&residue.scalar, opts.mode))
                .flatten();
            finish(residue, trace, rewritten, opts)
        }
        Engine::Diagram => verify_diagram(&pathsum_to_zh(miter), opts),
    }
}

/// Decides a miter given as a normalized diagram, using the graphical rules.
pub fn verify_diagram(miter: &Diagram, opts: &VerifyOptions) -> Result<Report> {
    let (residue, trace) = simplify_diagram(miter, &Policy::diagram())?;
    let rewritten = residue
        .is_identity_form()
        .then(|| identity_status(&residue.scalar, opts.mode))
        .flatten();
    let e = zh_to_pathsum(&residue, TranslateOptions { inexact: true })?;
    let mut report = finish(e, trace, rewritten, opts)?;
    report.residue_size = residue.num_spiders();
    Ok(report)
}

pub fn verify_pathsums(a: &PurePathSum, b: &PurePathSum, opts: &VerifyOptions) -> Result<Report> {
    check_arity(a, b)?;
    verify_miter(&compose_pathsums(a, &b.adjoint())?, opts)
}

/// Circuits go through the gate-level diagram when the diagram engine is
/// selected, and through the per-gate path-sums otherwise.
pub fn verify_circuits(a: &Circuit, b: &Circuit, opts: &VerifyOptions) -> Result<Report> {
    if a.width != b.width {
        return Err(Error::ArityMismatch {
            left: a.width,
            right: b.width,
        });
    }
    match opts.engine {
        Engine::PathSum => verify_pathsums(
            &crate::circuits::circuit_to_pathsum(a),
            &crate::circuits::circuit_to_pathsum(b),
            opts,
        ),
        Engine::Diagram => verify_diagram(&normalize(&circuit_to_diagram(&a.then(&adjoint(b)))), opts),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::parse_circuit;

    fn c(t: &str) -> Circuit {
        parse_circuit(t).unwrap()
    }

    #[test]
    fn self_inverse_gates_by_rewriting() {
        for (text, w) in [("h 0\nh 0", 1), ("cnot 0 1\ncnot 0 1", 2), ("tof 0 1 2\ntof 0 1 2", 3)] {
            let lhs = c(&format!("qubits {w}\n{text}"));
            let rhs = Circuit::new(w);
            for engine in [Engine::PathSum, Engine::Diagram] {
                let opts = VerifyOptions {
                    engine,
                    rewrite_only: true,
                    ..VerifyOptions::default()
                };
                let r = verify_circuits(&lhs, &rhs, &opts).unwrap();
                assert_eq!(
                    (r.status, r.proof),
                    (Status::Equal, Proof::Rewriting),
                    "{text} {engine:?}"
                );
            }
        }
    }

    #[test]
    fn cnot_is_not_swap() {
        let r = verify_circuits(
            &c("qubits 2\ncnot 0 1"),
            &c("qubits 2\nswap 0 1"),
            &VerifyOptions::default(),
        )
        .unwrap();
        assert_eq!(r.status, Status::Unequal);
        assert!(r.evidence.is_some());
        assert_eq!(r.status.exit_code(), 2);
    }

    #[test]
    fn global_phase_mode() {
        // Z·X·Z·X = −I.
        let a = c("qubits 1\nz 0\nx 0\nz 0\nx 0");
        let b = Circuit::new(1);
        let exact = verify_circuits(&a, &b, &VerifyOptions::default()).unwrap();
        assert_eq!(exact.status, Status::Unequal);
        let loose = VerifyOptions {
            mode: CompareMode::UpToGlobalPhase,
            ..VerifyOptions::default()
        };
        assert_eq!(
            verify_circuits(&a, &b, &loose).unwrap().status,
            Status::EqualUpToGlobalPhase
        );
    }

    #[test]
    fn arity_mismatch() {
        assert!(matches!(
            verify_circuits(&Circuit::new(1), &Circuit::new(2), &VerifyOptions::default()),
            Err(Error::ArityMismatch { .. })
        ));
    }
}
