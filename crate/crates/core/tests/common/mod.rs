//! Independent oracles shared by the integration tests and the acceptance run.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use nact::enumerate::enumerate;
use nact::formula::{alpha_key, lookup, parse_formula, subformulas, substitute, Formula, Term, Var};
use nact::model::{all_models, eval, ClassKind, FiniteModel};
use nact::prover::{ProofResult, ProofStatus};
use nact::schema::{axioms_for, constant_axiom, instantiate, SchemaId, SystemSpec};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn p(s: &str) -> Formula {
    parse_formula(s).unwrap()
}

pub fn members(m: &FiniteModel, c: u32) -> Vec<usize> {
    (0..m.size()).filter(|&e| c & (1 << e) != 0).collect()
}

pub fn complement(m: &FiniteModel, c: u32) -> u32 {
    (0..m.size()).filter(|&e| c & (1 << e) == 0).fold(0, |k, e| k | 1 << e)
}

pub fn realized(m: &FiniteModel, c: u32) -> bool {
    (0..m.size()).any(|e| m.ext(e) == c)
}

// sizes compared by pairing off members against non-members
pub fn oracle_kind(m: &FiniteModel, c: u32) -> ClassKind {
    let mut inside = members(m, c).into_iter();
    let mut outside = members(m, complement(m, c)).into_iter();
    loop {
        match (inside.next(), outside.next()) {
            (None, None) => {
                return ClassKind::Medium { complemented: realized(m, c) && realized(m, complement(m, c)) };
            }
            (None, Some(_)) => return ClassKind::Slim,
            (Some(_), None) => return ClassKind::Mighty,
            _ => {}
        }
    }
}

pub fn slim(m: &FiniteModel, c: u32) -> bool {
    oracle_kind(m, c) == ClassKind::Slim
}

// hand-written readings of the size and sethood schemata
pub fn oracle_holds(m: &FiniteModel, id: SchemaId, c: u32) -> bool {
    let k = complement(m, c);
    match id {
        SchemaId::Axiom5 => realized(m, c) != realized(m, k),
        SchemaId::Axiom6 => !slim(m, c) || realized(m, c),
        SchemaId::Axiom5a => realized(m, c) || realized(m, k),
        SchemaId::Axiom6c => !slim(m, c) || (realized(m, c) && realized(m, k)),
        SchemaId::Sharp2 => {
            let power = (0..m.size()).filter(|&e| m.ext(e) & !c == 0).fold(0, |p, e| p | 1 << e);
            !slim(m, c) || slim(m, power)
        }
        _ => unreachable!(),
    }
}

// atoms as pairs of variable slots; slot 0 is the free x, slot k the k-th binder
pub fn atoms(f: &Formula, scope: &mut Vec<(Var, usize)>, slots: &mut usize, out: &mut Vec<(usize, usize)>) {
    let slot = |v: Var, scope: &Vec<(Var, usize)>| scope.iter().rev().find(|(w, _)| *w == v).map_or(0, |(_, s)| *s);
    match f {
        Formula::Verum | Formula::Falsum => {}
        Formula::Member(Term::Var(a), Term::Var(b)) => out.push((slot(*a, scope), slot(*b, scope))),
        Formula::Not(a) => atoms(a, scope, slots, out),
        Formula::And(a, b) => {
            atoms(a, scope, slots, out);
            atoms(b, scope, slots, out);
        }
        Formula::ForAll(v, a) => {
            *slots += 1;
            scope.push((*v, *slots));
            atoms(a, scope, slots, out);
            scope.pop();
        }
        other => panic!("not a stream formula: {other}"),
    }
}

// tries every typing with values below the slot count
pub fn brute_force(f: &Formula) -> bool {
    let (mut slots, mut out) = (0, Vec::new());
    atoms(f, &mut Vec::new(), &mut slots, &mut out);
    let n = slots + 1;
    let mut types = vec![0usize; n];
    loop {
        if out.iter().all(|&(a, b)| types[b] == types[a] + 1) {
            return true;
        }
        let mut i = 0;
        loop {
            if i == n {
                return false;
            }
            types[i] += 1;
            if types[i] < n {
                break;
            }
            types[i] = 0;
            i += 1;
        }
    }
}

// renames every free variable of s to x, one at a time, and compares keys
pub fn mentions(b: &Formula, a: &Formula) -> bool {
    let target = alpha_key(a);
    subformulas(b).into_iter().any(|s| {
        let free: Vec<Var> = s.free_vars().into_iter().collect();
        free.len() <= 1 && {
            let s = free.first().map_or(s.clone(), |v| substitute(&s, *v, &Term::Var(Var::X)));
            alpha_key(&s) == target
        }
    })
}

pub fn instance(id: SchemaId, a: &Formula) -> Vec<Formula> {
    axioms_for(&instantiate(&SystemSpec::custom("one", [id]), a).unwrap())
}

pub fn conjunction(fs: Vec<Formula>) -> Formula {
    fs.into_iter().reduce(Formula::and).unwrap_or(Formula::Verum)
}

pub fn sample(k: usize, seed: u64) -> Vec<Formula> {
    let mut pool = enumerate(3000);
    pool.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    pool.truncate(k);
    pool
}

pub fn free_vars(fs: &[&Formula]) -> Vec<Var> {
    let all: BTreeSet<Var> = fs.iter().flat_map(|f| f.free_vars()).collect();
    all.into_iter().collect()
}

pub fn environments(vars: &[Var], n: usize) -> Vec<BTreeMap<Var, usize>> {
    let mut out = vec![BTreeMap::new()];
    for v in vars {
        out = out
            .into_iter()
            .flat_map(|env| {
                (0..n).map(move |e| {
                    let mut env = env.clone();
                    env.insert(*v, e);
                    env
                })
            })
            .collect();
    }
    out
}

// frame assumptions hold for every value of the constants they mention
pub fn frame_holds(m: &FiniteModel, f: &Formula, env: &BTreeMap<Var, usize>) -> bool {
    let extra: Vec<Var> = f.free_vars().into_iter().filter(|v| !env.contains_key(v)).collect();
    environments(&extra, m.size()).into_iter().all(|more| {
        let mut env = env.clone();
        env.extend(more);
        eval(m, f, &env).unwrap()
    })
}

/// Counterexamples among models of size at most 2.
pub fn countermodels(axioms: &[Formula], goal: &Formula, r: &ProofResult) -> Vec<String> {
    let goal = match r.status {
        ProofStatus::Proved => goal.clone(),
        ProofStatus::Refuted => Formula::not(goal.clone()),
        ProofStatus::OutOfBudget => return Vec::new(),
    };
    let mut refs: Vec<&Formula> = axioms.iter().collect();
    refs.push(&goal);
    let vars = free_vars(&refs);
    let mut bad = Vec::new();
    for n in 1..=2 {
        for m in all_models(n) {
            for env in environments(&vars, n) {
                let premises = axioms.iter().all(|a| eval(&m, a, &env).unwrap())
                    && r.frame_assumptions.iter().all(|f| frame_holds(&m, f, &env));
                if premises && !eval(&m, &goal, &env).unwrap() {
                    bad.push(format!("{} {env:?}", m.compact()));
                }
            }
        }
    }
    bad
}

pub fn corpus() -> Vec<(Vec<Formula>, Formula)> {
    let ru = lookup("Ru").unwrap();
    let mut out = vec![
        (vec![], Formula::Verum),
        (vec![Formula::Set(ru.clone())], Formula::Falsum),
        (vec![], Formula::not(Formula::Set(ru))),
        (vec![p("set(x1)")], p("set(x1) or slim(x1)")),
        (vec![p("set(x1)")], p("not set(x1)")),
        (vec![], constant_axiom(SchemaId::ZF5).unwrap()),
        (vec![p("forall x1: x1 in x")], p("x in x")),
        (vec![p("x = x1"), p("x in x")], p("x1 in x1")),
        (vec![], p("forall x1: (x1 in x or not x1 in x)")),
        (vec![p("slim(x) and not slim(x)")], p("x in x")),
        (vec![], p("x = x")),
        (vec![], p("x in {x1: x1 = x1}")),
    ];
    for a in sample(15, 9) {
        out.push((instance(SchemaId::Axiom5, &a), conjunction(instance(SchemaId::Axiom5a, &a))));
        out.push((instance(SchemaId::SiNSA, &a), conjunction(instance(SchemaId::PriNSA, &a))));
    }
    // random sequents from the stream: two premises and a goal
    let pool = enumerate(60);
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..150 {
        let pick: Vec<&Formula> = pool.choose_multiple(&mut rng, 3).collect();
        out.push((vec![pick[0].clone(), pick[1].clone()], pick[2].clone()));
    }
    out
}
