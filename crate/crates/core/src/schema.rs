//! Axiom schemata and the named systems built from them.
//!
//! Throughout, `a` is a formula in the free variable `x`, `C = {x: a}` is the
//! class it comprehends, `N = {x: not a}` the class of its negation and
//! `SA(a) = a[x := {|x: set(x) and a|}]` its self-application.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::formula::{
    alpha_eq, alpha_key_term, contains_set_atom, fresh_var, function, image, ko, lookup, pair, power, substitute,
    union, Formula, Term, Var,
};
use crate::stratify::{stratify, Stratification};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SchemaId {
    Axiom5,
    Axiom6,
    Axiom5a,
    Axiom6c,
    Sharp1,
    Sharp2,
    Sharp3,
    Sharp4,
    StratCoS,
    PriNSA,
    SiNSA,
    PriNSA2,
    SiNSA2,
    PriNSA3,
    SiNSA3,
    PriNGSA,
    SiNGSA,
    PriNGSA2,
    SiNGSA2,
    PriNSA0,
    ZF1,
    ZF2,
    ZF3,
    ZF4,
    ZF5,
    ZF1R,
    ZF2R,
    ZF3R,
    ZF4R,
    StratAndNSA,
}

impl SchemaId {
    pub const ALL: [SchemaId; 30] = [
        SchemaId::Axiom5,
        SchemaId::Axiom6,
        SchemaId::Axiom5a,
        SchemaId::Axiom6c,
        SchemaId::Sharp1,
        SchemaId::Sharp2,
        SchemaId::Sharp3,
        SchemaId::Sharp4,
        SchemaId::StratCoS,
        SchemaId::PriNSA,
        SchemaId::SiNSA,
        SchemaId::PriNSA2,
        SchemaId::SiNSA2,
        SchemaId::PriNSA3,
        SchemaId::SiNSA3,
        SchemaId::PriNGSA,
        SchemaId::SiNGSA,
        SchemaId::PriNGSA2,
        SchemaId::SiNGSA2,
        SchemaId::PriNSA0,
        SchemaId::ZF1,
        SchemaId::ZF2,
        SchemaId::ZF3,
        SchemaId::ZF4,
        SchemaId::ZF5,
        SchemaId::ZF1R,
        SchemaId::ZF2R,
        SchemaId::ZF3R,
        SchemaId::ZF4R,
        SchemaId::StratAndNSA,
    ];

    /// Schemata whose antecedent is a (generalised) self-application test.
    pub fn is_nsa(self) -> bool {
        use SchemaId::*;
        matches!(
            self,
            PriNSA
                | SiNSA
                | PriNSA2
                | SiNSA2
                | PriNSA3
                | SiNSA3
                | PriNGSA
                | SiNGSA
                | PriNGSA2
                | SiNGSA2
                | PriNSA0
                | StratAndNSA
        )
    }

    pub fn uses_gsa(self) -> bool {
        matches!(self, SchemaId::PriNGSA | SchemaId::SiNGSA | SchemaId::PriNGSA2 | SchemaId::SiNGSA2)
    }

    /// The strong rules, which forbid `set(..)` in `a`.
    pub fn forbids_set_atoms(self) -> bool {
        matches!(self, SchemaId::SiNSA | SchemaId::SiNSA2 | SchemaId::SiNGSA | SchemaId::SiNGSA2)
    }

    /// Closed axioms that do not depend on `a`.
    pub fn is_constant(self) -> bool {
        use SchemaId::*;
        matches!(self, Sharp1 | ZF1 | ZF2 | ZF3 | ZF4 | ZF5 | ZF1R | ZF2R | ZF3R | ZF4R)
    }

    pub fn experimental(self) -> bool {
        self == SchemaId::PriNSA3
    }
}

impl fmt::Display for SchemaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for SchemaId {
    type Err = String;

    fn from_str(s: &str) -> Result<SchemaId, String> {
        SchemaId::ALL
            .into_iter()
            .find(|id| id.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown schema `{s}`"))
    }
}

/// Inert tag: recorded with the system, never used in inference.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChoiceAxiom {
    AC,
    DC,
    OrdUC,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemSpec {
    pub name: String,
    pub active: BTreeSet<SchemaId>,
    pub parameter_free_only: bool,
    pub gsa_chain_bound: u32,
    pub meta_singsa: bool,
    pub choice_axiom: Option<ChoiceAxiom>,
    /// Gate every classification on a bounded hereditary-non-patho check.
    #[serde(default)]
    pub hnp_gate: bool,
}

pub const DEFAULT_GSA_CHAIN_BOUND: u32 = 2;

impl SystemSpec {
    pub fn custom(name: &str, active: impl IntoIterator<Item = SchemaId>) -> SystemSpec {
        SystemSpec {
            name: name.to_string(),
            active: active.into_iter().collect(),
            parameter_free_only: false,
            gsa_chain_bound: DEFAULT_GSA_CHAIN_BOUND,
            meta_singsa: false,
            choice_axiom: None,
            hnp_gate: false,
        }
    }

    pub fn preset(name: &str) -> Option<SystemSpec> {
        use SchemaId::*;
        let sharp = [Sharp1, Sharp2, Sharp3, Sharp4];
        let (active, choice): (Vec<SchemaId>, ChoiceAxiom) = match name {
            "NACT#" => (vec![Axiom5, Axiom6], ChoiceAxiom::DC),
            "NACT#4" => ([Axiom5, Axiom6].into_iter().chain(sharp).collect(), ChoiceAxiom::DC),
            "NACT+" => (vec![Axiom5a, Axiom6c], ChoiceAxiom::DC),
            "NACT+4" => ([Axiom5a, Axiom6c].into_iter().chain(sharp).collect(), ChoiceAxiom::DC),
            "NACT+Strat" => (vec![Axiom5a, Axiom6c, StratCoS], ChoiceAxiom::DC),
            "NACT-PriNSA" => (vec![PriNSA], ChoiceAxiom::AC),
            "NACT-SiNSA" => (vec![SiNSA], ChoiceAxiom::AC),
            "NACT-PriNSA2" => (vec![PriNSA2], ChoiceAxiom::AC),
            "NACT-SiNSA2" => (vec![SiNSA2], ChoiceAxiom::AC),
            "NACT-PriNSA3" => (vec![PriNSA3], ChoiceAxiom::AC),
            "NACT-SiNSA3" => (vec![SiNSA3], ChoiceAxiom::AC),
            "NACT-PriNGSA" => (vec![PriNGSA], ChoiceAxiom::AC),
            "NACT-SiNGSA" => (vec![SiNGSA], ChoiceAxiom::AC),
            "NACT-PriNGSA2" => (vec![PriNGSA2], ChoiceAxiom::AC),
            "NACT-SiNGSA2" => (vec![SiNGSA2], ChoiceAxiom::AC),
            "NACT#PriNSA" => (vec![Axiom5, PriNSA0], ChoiceAxiom::DC),
            "NACT+PriNSA2" => (vec![Axiom5a, Axiom6c, PriNSA2], ChoiceAxiom::DC),
            "NACT+PriNSA3" => (vec![Axiom5a, Axiom6c, PriNSA3], ChoiceAxiom::DC),
            "NACT-StratNSA" => (vec![StratAndNSA], ChoiceAxiom::AC),
            "NACT**" => (vec![PriNSA], ChoiceAxiom::AC),
            _ => return None,
        };
        let mut spec = SystemSpec::custom(name, active);
        spec.choice_axiom = Some(choice);
        spec.parameter_free_only = matches!(name, "NACT#PriNSA" | "NACT+PriNSA2" | "NACT+PriNSA3" | "NACT**");
        spec.meta_singsa = matches!(name, "NACT-SiNGSA" | "NACT-SiNGSA2");
        spec.hnp_gate = name == "NACT**";
        Some(spec)
    }

    /// The NSA schema driving self-application verdicts, if any.
    pub fn nsa_schema(&self) -> Option<SchemaId> {
        self.active.iter().copied().find(|id| id.is_nsa())
    }
}

/// Presets required by the system catalogue, then the extras.
pub const PRESETS: &[&str] = &[
    "NACT#",
    "NACT#4",
    "NACT+",
    "NACT+4",
    "NACT+Strat",
    "NACT-PriNSA",
    "NACT-SiNSA",
    "NACT-PriNSA2",
    "NACT-SiNSA2",
    "NACT#PriNSA",
    "NACT+PriNSA2",
    "NACT-PriNSA3",
    "NACT-SiNSA3",
    "NACT-PriNGSA",
    "NACT-SiNGSA",
    "NACT-PriNGSA2",
    "NACT-SiNGSA2",
    "NACT+PriNSA3",
    "NACT-StratNSA",
    "NACT**",
];

pub fn presets() -> Vec<SystemSpec> {
    PRESETS.iter().map(|n| SystemSpec::preset(n).expect("listed preset")).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SchemaError {
    #[error("formula has free variables other than x: {0}")]
    NotParameterFree(String),
    #[error("the GSA chain bound must be at least 1")]
    ZeroChainBound,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemaInstance {
    pub schema: SchemaId,
    pub source: Formula,
    /// Empty when the side condition rejects `source`.
    pub result: Vec<Formula>,
    pub side_condition_ok: bool,
    pub reason: Option<String>,
}

impl SchemaInstance {
    fn ok(schema: SchemaId, source: &Formula, result: Vec<Formula>) -> SchemaInstance {
        SchemaInstance { schema, source: source.clone(), result, side_condition_ok: true, reason: None }
    }

    fn rejected(schema: SchemaId, source: &Formula, reason: impl Into<String>) -> SchemaInstance {
        SchemaInstance {
            schema,
            source: source.clone(),
            result: Vec::new(),
            side_condition_ok: false,
            reason: Some(reason.into()),
        }
    }
}

fn x() -> Term {
    Term::Var(Var::X)
}

/// `{x: a}`
pub fn comprehension(a: &Formula) -> Term {
    Term::abs(Var::X, a.clone())
}

/// `{|x: set(x) and a|}`, the class `SA` feeds back into `a`.
pub fn sa_term(a: &Formula) -> Term {
    Term::restricted(Var::X, Formula::and(Formula::Set(x()), a.clone()))
}

fn check_parameter_free(a: &Formula) -> Result<(), SchemaError> {
    if a.free_vars().iter().all(|v| *v == Var::X) {
        Ok(())
    } else {
        Err(SchemaError::NotParameterFree(a.to_string()))
    }
}

pub fn make_sa_formula(a: &Formula) -> Result<Formula, SchemaError> {
    check_parameter_free(a)?;
    Ok(sa_unchecked(a))
}

// parameters, if any, stay free and are closed over by the caller
fn sa_unchecked(a: &Formula) -> Formula {
    substitute(a, Var::X, &sa_term(a))
}

/// `SA(a) or` the chains `{x: a} in x1 and x1 in x2 ... and a(xn)` for
/// `n = 1..=n_bound`.
pub fn make_gsa_formula(a: &Formula, n_bound: u32) -> Result<Formula, SchemaError> {
    check_parameter_free(a)?;
    gsa_unchecked(a, n_bound)
}

fn gsa_unchecked(a: &Formula, n_bound: u32) -> Result<Formula, SchemaError> {
    if n_bound == 0 {
        return Err(SchemaError::ZeroChainBound);
    }
    let mut out = sa_unchecked(a);
    let c = comprehension(a);
    let first = fresh_var(&a.all_vars()).index();
    for n in 1..=n_bound {
        let vars: Vec<Var> = (0..n).map(|i| Var(first + i)).collect();
        let mut chain = Formula::Member(c.clone(), Term::Var(vars[0]));
        for w in vars.windows(2) {
            chain = Formula::and(chain, Formula::Member(Term::Var(w[0]), Term::Var(w[1])));
        }
        chain = Formula::and(chain, substitute(a, Var::X, &Term::Var(vars[n as usize - 1])));
        for v in vars.iter().rev() {
            chain = Formula::exists(*v, chain);
        }
        out = Formula::or(out, chain);
    }
    Ok(out)
}

/// The chosen `x`-test for self-application under a schema.
pub fn self_application(id: SchemaId, a: &Formula, n_bound: u32) -> Result<Formula, SchemaError> {
    check_parameter_free(a)?;
    self_application_unchecked(id, a, n_bound)
}

fn self_application_unchecked(id: SchemaId, a: &Formula, n_bound: u32) -> Result<Formula, SchemaError> {
    if id.uses_gsa() {
        gsa_unchecked(a, n_bound)
    } else {
        Ok(sa_unchecked(a))
    }
}

fn sets(ts: &[&Term]) -> Formula {
    ts.iter().map(|t| Formula::Set((*t).clone())).reduce(Formula::and).expect("at least one term")
}

fn close_over_parameters(f: Formula, a: &Formula) -> Formula {
    let params: Vec<Var> = a.free_vars().into_iter().filter(|v| *v != Var::X).collect();
    params.into_iter().rev().fold(f, |f, v| Formula::forall(v, f))
}

pub fn instantiate(system: &SystemSpec, a: &Formula) -> Result<Vec<SchemaInstance>, SchemaError> {
    instantiate_with(system, a, &[])
}

/// Like [`instantiate`], with classes already known to be proper: under
/// `meta_singsa` these cannot be substituted into the strong G-rules.
pub fn instantiate_with(
    system: &SystemSpec,
    a: &Formula,
    known_proper: &[Term],
) -> Result<Vec<SchemaInstance>, SchemaError> {
    if system.parameter_free_only {
        check_parameter_free(a)?;
    }
    if system.active.iter().any(|id| id.uses_gsa()) && system.gsa_chain_bound == 0 {
        return Err(SchemaError::ZeroChainBound);
    }
    let params_free = a.free_vars().iter().all(|v| *v == Var::X);
    let c = comprehension(a);
    let mut out = Vec::new();
    for &id in &system.active {
        use SchemaId::*;
        if id.is_constant() {
            let f = constant_axiom(id).expect("constant schema");
            out.push(SchemaInstance::ok(id, a, vec![f]));
            continue;
        }
        if id.forbids_set_atoms() && contains_set_atom(a) {
            out.push(SchemaInstance::rejected(id, a, "formula contains the set predicate"));
            continue;
        }
        if matches!(id, SiNGSA | SiNGSA2) && system.meta_singsa {
            let key = alpha_key_term(&c);
            if known_proper.iter().any(|p| alpha_key_term(p) == key) {
                out.push(SchemaInstance::rejected(id, a, "class is already known to be proper"));
                continue;
            }
        }
        if id == PriNSA0 && !params_free {
            out.push(SchemaInstance::rejected(id, a, "formula is not parameter-free"));
            continue;
        }
        let strat = matches!(id, StratCoS | StratAndNSA).then(|| stratify(a));
        if let Some(Stratification::Unstratifiable(_)) = strat {
            out.push(SchemaInstance::rejected(id, a, "formula is not stratified"));
            continue;
        }
        if id == StratAndNSA && contains_set_atom(a) {
            out.push(SchemaInstance::rejected(id, a, "formula contains the set predicate"));
            continue;
        }
        let result = schema_body(id, system, a)?;
        let result = result.into_iter().map(|f| close_over_parameters(f, a)).collect();
        out.push(SchemaInstance::ok(id, a, result));
    }
    Ok(out)
}

/// The instance formulas of a class schema for `a`, before side conditions
/// and before closing over parameters.
pub(crate) fn schema_body(id: SchemaId, system: &SystemSpec, a: &Formula) -> Result<Vec<Formula>, SchemaError> {
    use SchemaId::*;
    let c = comprehension(a);
    let k = ko(&c);
    let n = comprehension(&Formula::not(a.clone()));
    let set_c = Formula::Set(c.clone());
    let nsa = || -> Result<Formula, SchemaError> {
        Ok(Formula::not(self_application_unchecked(id, a, system.gsa_chain_bound)?))
    };
    Ok(match id {
        Axiom5 => vec![Formula::not(Formula::iff(set_c.clone(), Formula::Set(k.clone())))],
        Axiom6 => vec![Formula::implies(Formula::Slim(c.clone()), set_c.clone())],
        Axiom5a => vec![Formula::or(set_c.clone(), Formula::Set(k.clone()))],
        Axiom6c => vec![Formula::implies(Formula::Slim(c.clone()), sets(&[&c, &k]))],
        Sharp2 => vec![Formula::implies(Formula::Slim(c.clone()), Formula::Slim(power(&c)))],
        Sharp3 => {
            let y = Var(1);
            let members_slim = Formula::forall(
                y,
                Formula::implies(Formula::Member(Term::Var(y), c.clone()), Formula::Slim(Term::Var(y))),
            );
            vec![Formula::implies(Formula::and(Formula::Slim(c.clone()), members_slim), Formula::Slim(union(&c)))]
        }
        Sharp4 => {
            let f = Term::Var(Var(1));
            vec![Formula::forall(
                Var(1),
                Formula::implies(Formula::and(Formula::Slim(c.clone()), function(&f)), Formula::Slim(image(&f, &c))),
            )]
        }
        StratCoS => vec![Formula::Set(Term::restricted(Var::X, a.clone()))],
        PriNSA | PriNSA0 | PriNGSA | StratAndNSA => vec![Formula::implies(nsa()?, set_c.clone())],
        SiNSA | SiNGSA => vec![Formula::iff(nsa()?, set_c.clone())],
        PriNSA2 | PriNGSA2 => vec![Formula::implies(nsa()?, sets(&[&c, &n]))],
        SiNSA2 | SiNGSA2 => vec![Formula::iff(nsa()?, sets(&[&c, &n]))],
        PriNSA3 => {
            let neg = sa_unchecked(&Formula::not(a.clone()));
            vec![Formula::implies(Formula::or(nsa()?, Formula::not(neg)), set_c.clone())]
        }
        SiNSA3 => {
            let sa = self_application_unchecked(id, a, system.gsa_chain_bound)?;
            vec![
                Formula::implies(Formula::not(sa.clone()), sets(&[&c, &n])),
                Formula::implies(sa, Formula::or(Formula::not(set_c.clone()), Formula::mighty(c.clone()))),
            ]
        }
        _ => return Ok(vec![constant_axiom(id).expect("constant schema")]),
    })
}

/// The instance formulas whose side conditions hold, in schema order.
pub fn axioms_for(instances: &[SchemaInstance]) -> Vec<Formula> {
    instances.iter().filter(|i| i.side_condition_ok).flat_map(|i| i.result.iter().cloned()).collect()
}

fn v(i: u32) -> Term {
    Term::Var(Var(i))
}

/// The closed formula of an `a`-independent schema.
pub fn constant_axiom(id: SchemaId) -> Option<Formula> {
    use SchemaId::*;
    let omega = lookup("Omega").expect("library constant");
    let fund = |t: Term| Formula::Fund(t);
    Some(match id {
        Sharp1 => Formula::Slim(omega),
        ZF1 | ZF1R => Formula::Set(omega),
        ZF2 => Formula::forall(Var(1), Formula::Set(power(&v(1)))),
        ZF2R => Formula::forall(Var(1), Formula::implies(fund(v(1)), Formula::Set(power(&v(1))))),
        ZF3 | ZF3R => Formula::forall(Var(1), Formula::implies(fund(v(1)), Formula::Set(union(&v(1))))),
        ZF4 => Formula::forall(
            Var(1),
            Formula::forall(
                Var(2),
                Formula::implies(Formula::and(fund(v(2)), function(&v(1))), Formula::Set(image(&v(1), &v(2)))),
            ),
        ),
        ZF4R => Formula::forall(
            Var(1),
            Formula::forall(
                Var(2),
                Formula::implies(
                    Formula::and(fund(image(&v(1), &v(2))), function(&v(1))),
                    Formula::Set(image(&v(1), &v(2))),
                ),
            ),
        ),
        ZF5 => Formula::forall(
            Var(1),
            Formula::forall(Var(2), Formula::implies(sets(&[&v(1), &v(2)]), Formula::Set(pair(&v(1), &v(2))))),
        ),
        _ => return None,
    })
}

/// The ZF-like goals a system is expected to yield: the `Fund`-restricted
/// forms for the two-fold and three-fold rules, the plain ones otherwise.
pub fn zf_targets(system: &SystemSpec) -> Vec<(SchemaId, Formula)> {
    use SchemaId::*;
    let restricted =
        system.active.iter().any(|id| matches!(id, PriNSA2 | SiNSA2 | PriNGSA2 | SiNGSA2 | PriNSA3 | SiNSA3));
    let ids: &[SchemaId] = if restricted { &[ZF1R, ZF2R, ZF3R, ZF4R] } else { &[ZF1, ZF2, ZF3, ZF4, ZF5] };
    ids.iter().map(|&id| (id, constant_axiom(id).expect("ZF schema"))).collect()
}

/// True iff `f` is, up to renaming, the SA formula's first disjunct of `g`.
pub fn gsa_starts_with_sa(g: &Formula, sa: &Formula) -> bool {
    let mut cur = g;
    while let Formula::Or(l, _) = cur {
        cur = l;
    }
    alpha_eq(cur, sa)
}
