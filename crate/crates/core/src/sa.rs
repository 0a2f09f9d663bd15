//! Self-applicability verdicts.
//!
//! A formula is checked in four stages, each with the full proof budget:
//! the system's instances for it are refuted outright (`Inconsistent`),
//! its self-application is derived (`SAValid`), the negation is derived
//! (`NSAValidSet`, and the NSA rule then makes the class a set), or nothing
//! is found (`Unknown`).

use serde::{Deserialize, Serialize};

use crate::formula::{is_parameter_free, ko, lookup, Formula, Term, Var};
use crate::prover::{derive, ProofBudget, ProofResult, ProofStatus};
use crate::schema::{axioms_for, instantiate, self_application, SchemaError, SchemaId, SystemSpec};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SaError {
    #[error("{schema} rejects the formula: {reason}")]
    SideConditionViolated { schema: SchemaId, reason: String },
    #[error(transparent)]
    Schema(#[from] SchemaError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VerdictKind {
    Inconsistent,
    Unknown,
    SAValid,
    NSAValidSet,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    /// The instances derive falsum.
    Inconsistent {
        proof: ProofResult,
    },
    /// Every attempt ran out of budget, in pipeline order.
    Unknown {
        attempts: Vec<ProofResult>,
    },
    SAValid {
        proof: ProofResult,
    },
    NSAValidSet {
        proof: ProofResult,
    },
}

impl Verdict {
    pub fn kind(&self) -> VerdictKind {
        match self {
            Verdict::Inconsistent { .. } => VerdictKind::Inconsistent,
            Verdict::Unknown { .. } => VerdictKind::Unknown,
            Verdict::SAValid { .. } => VerdictKind::SAValid,
            Verdict::NSAValidSet { .. } => VerdictKind::NSAValidSet,
        }
    }

    /// Steps spent across all attempts.
    pub fn steps(&self) -> u64 {
        match self {
            Verdict::Unknown { attempts } => attempts.iter().map(|a| a.steps_used).sum(),
            Verdict::Inconsistent { proof } | Verdict::SAValid { proof } | Verdict::NSAValidSet { proof } => {
                proof.steps_used
            }
        }
    }
}

/// The self-application formula the system's NSA rule speaks about.
pub fn sa_formula(a: &Formula, system: &SystemSpec) -> Result<Formula, SchemaError> {
    let id = system.nsa_schema().unwrap_or(SchemaId::PriNSA);
    self_application(id, a, system.gsa_chain_bound)
}

/// The system's instances for `a`, failing if its NSA rule rejects `a`.
pub fn instance_axioms(a: &Formula, system: &SystemSpec) -> Result<Vec<Formula>, SaError> {
    let instances = instantiate(system, a)?;
    if let Some(bad) = instances.iter().find(|i| i.schema.is_nsa() && !i.side_condition_ok) {
        return Err(SaError::SideConditionViolated {
            schema: bad.schema,
            reason: bad.reason.clone().unwrap_or_default(),
        });
    }
    Ok(axioms_for(&instances))
}

pub fn classify_sa(a: &Formula, system: &SystemSpec, budget: &ProofBudget) -> Result<Verdict, SaError> {
    if !is_parameter_free(a) {
        return Err(SchemaError::NotParameterFree(a.to_string()).into());
    }
    let axioms = instance_axioms(a, system)?;
    let sa = sa_formula(a, system)?;
    let mut attempts = Vec::new();

    let proof = derive(&axioms, &Formula::Falsum, budget);
    if proof.is_proved() {
        return Ok(Verdict::Inconsistent { proof });
    }
    attempts.push(proof);

    let proof = derive(&axioms, &sa, budget);
    if proof.is_proved() {
        return Ok(Verdict::SAValid { proof });
    }
    attempts.push(proof);

    let proof = derive(&axioms, &Formula::not(sa), budget);
    if proof.is_proved() {
        return Ok(Verdict::NSAValidSet { proof });
    }
    attempts.push(proof);
    Ok(Verdict::Unknown { attempts })
}

/// Bodies of library classes, as formulas in `x`.
pub fn body_of(t: &Term) -> Option<Formula> {
    match t {
        Term::Abs { var, body, .. } => Some(crate::formula::substitute(body, *var, &Term::Var(Var::X))),
        Term::Var(_) => None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseGoal {
    /// `Ko(Ru) in Ko(Ru)`
    SelfMember,
    /// `not Ko(Ru) in Ko(Ru)`
    NotSelfMember,
    /// `set(Ko(Ru))`
    IsSet,
    /// `not set(Ko(Ru))`
    NotSet,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClaimStatus {
    Confirmed,
    Refuted,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseRow {
    pub system: String,
    pub results: Vec<(CaseGoal, ProofStatus)>,
    /// What the case claims about membership.
    pub membership_claim: String,
    pub membership: ClaimStatus,
    /// Every NSA system is claimed to make `Ko(Ru)` a set.
    pub sethood: ClaimStatus,
}

fn status_of(results: &[(CaseGoal, ProofStatus)], goal: CaseGoal) -> ProofStatus {
    results.iter().find(|(g, _)| *g == goal).map(|(_, s)| *s).unwrap_or(ProofStatus::OutOfBudget)
}

/// The membership and sethood of `Ko(Ru)` in the four basic NSA systems.
pub fn ko_ru_case_table(budget: &ProofBudget) -> Vec<CaseRow> {
    let ru = lookup("Ru").expect("library constant");
    let k = ko(&ru);
    let bodies = [body_of(&ru).expect("abstraction"), body_of(&k).expect("abstraction")];
    let goals = [
        (CaseGoal::SelfMember, Formula::Member(k.clone(), k.clone())),
        (CaseGoal::NotSelfMember, Formula::not(Formula::Member(k.clone(), k.clone()))),
        (CaseGoal::IsSet, Formula::Set(k.clone())),
        (CaseGoal::NotSet, Formula::not(Formula::Set(k.clone()))),
    ];
    let mut rows = Vec::new();
    for name in ["NACT-PriNSA", "NACT-SiNSA", "NACT-PriNSA2", "NACT-SiNSA2"] {
        let system = SystemSpec::preset(name).expect("preset");
        let mut axioms = Vec::new();
        for b in &bodies {
            axioms.extend(axioms_for(&instantiate(&system, b).expect("library bodies are parameter-free")));
        }
        let results: Vec<(CaseGoal, ProofStatus)> =
            goals.iter().map(|(g, f)| (*g, derive(&axioms, f, budget).status)).collect();
        let proved = |g| status_of(&results, g) == ProofStatus::Proved;
        let expect = |yes: CaseGoal, no: CaseGoal| {
            if proved(yes) {
                ClaimStatus::Confirmed
            } else if proved(no) {
                ClaimStatus::Refuted
            } else {
                ClaimStatus::Unknown
            }
        };
        let (claim, membership) = match name {
            "NACT-PriNSA" => (
                "neither direction is derivable",
                if proved(CaseGoal::SelfMember) || proved(CaseGoal::NotSelfMember) {
                    ClaimStatus::Refuted
                } else {
                    // nothing was derived, which is all a bounded search can show
                    ClaimStatus::Unknown
                },
            ),
            "NACT-SiNSA" => ("not Ko(Ru) in Ko(Ru)", expect(CaseGoal::NotSelfMember, CaseGoal::SelfMember)),
            _ => ("Ko(Ru) in Ko(Ru)", expect(CaseGoal::SelfMember, CaseGoal::NotSelfMember)),
        };
        let sethood = expect(CaseGoal::IsSet, CaseGoal::NotSet);
        rows.push(CaseRow {
            system: name.to_string(),
            results,
            membership_claim: claim.to_string(),
            membership,
            sethood,
        });
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    fn body(name: &str) -> Formula {
        body_of(&lookup(name).unwrap()).unwrap()
    }

    #[test]
    fn library_verdicts() {
        let sys = SystemSpec::preset("NACT-PriNSA").unwrap();
        let b = ProofBudget::default();
        assert_eq!(classify_sa(&body("0"), &sys, &b).unwrap().kind(), VerdictKind::NSAValidSet);
        assert_eq!(classify_sa(&body("V"), &sys, &b).unwrap().kind(), VerdictKind::SAValid);
        assert_eq!(classify_sa(&body("Ru"), &sys, &b).unwrap().kind(), VerdictKind::SAValid);
    }

    #[test]
    fn parameters_are_rejected() {
        let sys = SystemSpec::preset("NACT-PriNSA").unwrap();
        let a = crate::formula::parse_formula("x in x1").unwrap();
        assert!(matches!(classify_sa(&a, &sys, &ProofBudget::default()), Err(SaError::Schema(_))));
    }

    #[test]
    fn set_atoms_violate_the_strong_rule() {
        let sys = SystemSpec::preset("NACT-SiNSA").unwrap();
        let a = crate::formula::parse_formula("set(x)").unwrap();
        let err = classify_sa(&a, &sys, &ProofBudget::default()).unwrap_err();
        assert!(matches!(err, SaError::SideConditionViolated { schema: SchemaId::SiNSA, .. }));
    }
}
