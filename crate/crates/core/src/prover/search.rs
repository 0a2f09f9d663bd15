//! Depth-first signed tableau with a per-branch allowance of gamma
//! instances and cuts.

use im::{HashMap, HashSet, Vector};

use super::frame::{as_pair, eq_instance, is_singleton, singleton_core, term_size};
use super::trace::{Closure, Rule, Signed, SplitKind, Step, Tree};
use super::ProofBudget;
use crate::formula::{alpha_key, alpha_key_term, substitute, Formula, Term, Var};

type Key = (bool, Formula);

#[derive(Clone)]
struct Entry {
    s: Signed,
    depth: u32,
}

#[derive(Clone, Copy)]
enum UniKind {
    ForAll,
    Eq,
}

/// Collections are persistent so that splitting a branch shares its
/// history instead of copying it.
#[derive(Clone)]
struct Branch {
    entries: Vector<Entry>,
    keys: HashMap<Key, usize>,
    next: usize,
    pool: Vector<(Term, usize)>,
    /// Pool terms up to renaming, with the entry asserting their sethood.
    pool_keys: HashMap<Term, usize>,
    universals: Vector<(usize, UniKind)>,
    /// For each universal, how much of the pool it has been applied to.
    cursors: Vector<usize>,
    deltas: Vector<usize>,
    /// Branching entries in arrival order, for splitting.
    betas: Vector<usize>,
    /// Branching entries already satisfied or reduced to one alternative.
    beta_done: HashSet<usize>,
    /// Branching entries to revisit when a key (an alternative or its
    /// complement) reaches the branch.
    beta_watch: HashMap<Key, Vector<usize>>,
    beta_ready: Vector<usize>,
    /// Pair-shaped terms not yet known to be sets.
    pairs: Vector<Term>,
    /// Closed abstractions from the roots; only these head a cut.
    cut_heads: HashSet<Term>,
    pair_keys: HashSet<Term>,
    /// Quantifier instances and cuts so far.
    used: u32,
    limited: bool,
    next_const: u32,
    steps: Vec<Step>,
    closed: Option<Closure>,
}

pub(super) enum Outcome {
    Closed(Tree),
    Open { limited: bool },
    Abort,
}

struct Abort;

pub(super) struct Search<'a> {
    pub budget: &'a ProofBudget,
    pub steps: u64,
    pub limit: u32,
}

fn key(s: &Signed) -> Key {
    (s.sign, alpha_key(&s.formula))
}

/// The two alternatives of a branching entry.
fn disjuncts(s: &Signed) -> Option<(Signed, Signed)> {
    if s.sign {
        return None;
    }
    match &s.formula {
        Formula::And(a, b) => Some((Signed::f((**a).clone()), Signed::f((**b).clone()))),
        Formula::Member(t, Term::Abs { var, body, .. }) => {
            Some((Signed::f(Formula::Set(t.clone())), Signed::f(substitute(body, *var, t))))
        }
        _ => None,
    }
}

fn abstractions(f: &Formula, out: &mut HashSet<Term>) {
    fn term(t: &Term, out: &mut HashSet<Term>) {
        if let Term::Abs { body, .. } = t {
            if t.is_closed() {
                out.insert(alpha_key_term(t));
            }
            abstractions(body, out);
        }
    }
    match f {
        Formula::Verum | Formula::Falsum => {}
        Formula::Member(a, b) | Formula::Equal(a, b) => {
            term(a, out);
            term(b, out);
        }
        Formula::Set(a) | Formula::Slim(a) | Formula::Fund(a) => term(a, out),
        Formula::Not(a) | Formula::ForAll(_, a) | Formula::Exists(_, a) => abstractions(a, out),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            abstractions(a, out);
            abstractions(b, out);
        }
    }
}

impl Branch {
    fn new(roots: &[Signed]) -> Branch {
        let mut b = Branch {
            entries: Vector::new(),
            keys: HashMap::new(),
            next: 0,
            pool: Vector::new(),
            pool_keys: HashMap::new(),
            universals: Vector::new(),
            cursors: Vector::new(),
            deltas: Vector::new(),
            betas: Vector::new(),
            beta_done: HashSet::new(),
            beta_watch: HashMap::new(),
            beta_ready: Vector::new(),
            pairs: Vector::new(),
            cut_heads: HashSet::new(),
            pair_keys: HashSet::new(),
            used: 0,
            limited: false,
            next_const: 0,
            steps: Vec::new(),
            closed: None,
        };
        let mut max_const = None;
        for r in roots {
            for v in r.formula.all_vars() {
                if v.is_constant() {
                    max_const = max_const.max(Some(v.index()));
                }
            }
        }
        if let Some(m) = max_const {
            b.next_const = m - crate::formula::CONST_BASE + 1;
        }
        for r in roots {
            abstractions(&r.formula, &mut b.cut_heads);
            b.insert(r.clone(), 0);
        }
        b
    }

    fn has(&self, s: &Signed) -> bool {
        self.keys.contains_key(&key(s))
    }

    fn position(&self, s: &Signed) -> Option<usize> {
        self.keys.get(&key(s)).copied()
    }

    /// Append `s` unless present; returns its position if new.
    fn insert(&mut self, s: Signed, depth: u32) -> Option<usize> {
        let k = key(&s);
        if self.keys.contains_key(&k) {
            return None;
        }
        let i = self.entries.len();
        let flipped = (!k.0, k.1.clone());
        if self.closed.is_none() {
            if let Some(&j) = self.keys.get(&flipped) {
                self.closed = Some(Closure::Complement(j, i));
            } else {
                match (&s.sign, &s.formula) {
                    (true, Formula::Falsum) => self.closed = Some(Closure::Falsum(i)),
                    (false, Formula::Verum) => self.closed = Some(Closure::Verum(i)),
                    (false, Formula::Equal(a, b)) if alpha_key_term(a) == alpha_key_term(b) => {
                        self.closed = Some(Closure::Reflexive(i))
                    }
                    _ => {}
                }
            }
        }
        if let Some(bs) = self.beta_watch.get(&k) {
            self.beta_ready.append(bs.clone());
        }
        self.keys.insert(k, i);
        self.entries.push_back(Entry { s, depth });
        Some(i)
    }

    fn add_beta(&mut self, i: usize) {
        let (d1, d2) = disjuncts(&self.entries[i].s).expect("branching entry");
        for d in [&d1, &d2] {
            for k in [key(d), key(&d.flip())] {
                self.beta_watch.entry(k).or_default().push_back(i);
            }
        }
        self.betas.push_back(i);
        self.beta_ready.push_back(i);
    }

    fn add_universal(&mut self, i: usize, kind: UniKind) {
        self.universals.push_back((i, kind));
        self.cursors.push_back(0);
    }

    fn fresh_constant(&mut self) -> Var {
        let c = Var::constant(self.next_const);
        self.next_const += 1;
        c
    }

    fn child(&self) -> Branch {
        let mut c = self.clone();
        c.steps = Vec::new();
        c
    }
}

impl Search<'_> {
    fn tick(&mut self) -> Result<(), Abort> {
        self.steps += 1;
        if self.steps > self.budget.max_steps {
            Err(Abort)
        } else {
            Ok(())
        }
    }

    /// Record one rule application; conclusions already on the branch are
    /// dropped and an application with nothing new is not a step at all.
    fn apply(
        &mut self,
        br: &mut Branch,
        rule: Rule,
        premises: Vec<usize>,
        term: Option<Term>,
        conclusions: Vec<Signed>,
        depth: u32,
    ) -> Result<bool, Abort> {
        let fresh: Vec<Signed> = {
            let mut seen = std::collections::HashSet::new();
            conclusions.into_iter().filter(|c| !br.has(c) && seen.insert(key(c))).collect()
        };
        if fresh.is_empty() {
            return Ok(false);
        }
        self.tick()?;
        for c in &fresh {
            br.insert(c.clone(), depth);
        }
        br.steps.push(Step { rule, premises, term, conclusions: fresh });
        Ok(true)
    }

    fn process(&mut self, br: &mut Branch, i: usize) -> Result<(), Abort> {
        let Entry { s, depth } = br.entries[i].clone();
        match (s.sign, &s.formula) {
            (sign, Formula::Not(a)) => {
                let c = Signed { sign: !sign, formula: (**a).clone() };
                self.apply(br, Rule::Alpha, vec![i], None, vec![c], depth)?;
            }
            (true, Formula::And(a, b)) => {
                let cs = vec![Signed::t((**a).clone()), Signed::t((**b).clone())];
                self.apply(br, Rule::Alpha, vec![i], None, cs, depth)?;
            }
            (false, Formula::And(..)) => br.add_beta(i),
            (true, Formula::ForAll(..)) => br.add_universal(i, UniKind::ForAll),
            (false, Formula::ForAll(..)) => br.deltas.push_back(i),
            (sign, Formula::Member(t, s2)) => {
                self.note_pairs(br, t);
                self.note_pairs(br, s2);
                match (sign, s2) {
                    (true, Term::Abs { var, body, .. }) => {
                        let cs = vec![Signed::t(Formula::Set(t.clone())), Signed::t(substitute(body, *var, t))];
                        self.apply(br, Rule::Unfold, vec![i], None, cs, depth)?;
                    }
                    (true, _) => {
                        let cs = vec![Signed::t(Formula::Set(t.clone()))];
                        self.apply(br, Rule::SetOfMember, vec![i], None, cs, depth)?;
                    }
                    (false, Term::Abs { .. }) => br.add_beta(i),
                    (false, _) => {}
                }
            }
            (true, Formula::Set(t)) => {
                self.note_pairs(br, t);
                let k = alpha_key_term(t);
                if !br.pool_keys.contains_key(&k) && term_size(t) <= self.budget.max_term_size {
                    br.pool_keys.insert(k, i);
                    br.pool.push_back((t.clone(), i));
                    if !is_singleton(t) {
                        let single = singleton_core(t);
                        if term_size(&single) <= self.budget.max_term_size {
                            let c = vec![Signed::t(Formula::Set(single))];
                            self.apply(br, Rule::Singleton, vec![i], None, c, depth)?;
                        }
                    }
                }
            }
            (false, Formula::Set(t)) | (_, Formula::Slim(t)) => self.note_pairs(br, t),
            (true, Formula::Equal(..)) if depth < self.budget.max_equality_depth => br.add_universal(i, UniKind::Eq),
            (false, Formula::Equal(..)) if depth < self.budget.max_equality_depth => br.deltas.push_back(i),
            _ => {}
        }
        Ok(())
    }

    fn note_pairs(&mut self, br: &mut Branch, t: &Term) {
        if as_pair(t).is_some() {
            let k = alpha_key_term(t);
            if br.pair_keys.insert(k).is_none() {
                br.pairs.push_back(t.clone());
            }
        }
    }

    fn pool_index(br: &Branch, t: &Term) -> Option<usize> {
        br.pool_keys.get(&alpha_key_term(t)).copied()
    }

    /// Apply every rule that needs no allowance until nothing changes or the
    /// branch closes.
    fn saturate(&mut self, br: &mut Branch) -> Result<(), Abort> {
        loop {
            while br.next < br.entries.len() {
                if br.closed.is_some() {
                    return Ok(());
                }
                let i = br.next;
                br.next += 1;
                self.process(br, i)?;
            }
            if br.closed.is_some() {
                return Ok(());
            }
            if self.unit_beta(br)? || self.pair_frame(br)? || self.delta(br)? {
                continue;
            }
            return Ok(());
        }
    }

    fn unit_beta(&mut self, br: &mut Branch) -> Result<bool, Abort> {
        while let Some(b) = br.beta_ready.pop_front() {
            if br.beta_done.contains(&b) {
                continue;
            }
            let (d1, d2) = disjuncts(&br.entries[b].s).expect("branching entry");
            if br.has(&d1) || br.has(&d2) {
                br.beta_done.insert(b);
                continue;
            }
            for (d, other) in [(&d1, &d2), (&d2, &d1)] {
                if let Some(j) = br.position(&d.flip()) {
                    br.beta_done.insert(b);
                    let depth = br.entries[b].depth;
                    self.apply(br, Rule::BetaUnit, vec![b, j], None, vec![other.clone()], depth)?;
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    fn pair_frame(&mut self, br: &mut Branch) -> Result<bool, Abort> {
        br.pairs.retain(|t| !br.keys.contains_key(&key(&Signed::t(Formula::Set(t.clone())))));
        for t in br.pairs.clone() {
            let target = Signed::t(Formula::Set(t.clone()));
            let (a, b) = as_pair(&t).expect("pair-shaped");
            if let (Some(i), Some(j)) = (Self::pool_index(br, &a), Self::pool_index(br, &b)) {
                if self.apply(br, Rule::Pair, vec![i, j], None, vec![target], 0)? {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    fn delta(&mut self, br: &mut Branch) -> Result<bool, Abort> {
        while let Some(i) = br.deltas.pop_front() {
            let Entry { s, depth } = br.entries[i].clone();
            let c = br.fresh_constant();
            let ct = Term::Var(c);
            let (rule, body, d) = match &s.formula {
                Formula::ForAll(v, a) => (Rule::Delta, substitute(a, *v, &ct), depth),
                Formula::Equal(t, u) => (Rule::EqDelta, eq_instance(&ct, t, u), depth + 1),
                _ => unreachable!("delta entry"),
            };
            let cs = vec![Signed::t(Formula::Set(ct.clone())), Signed::f(body)];
            if self.apply(br, rule, vec![i], Some(ct), cs, d)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// The next unused (universal, pool term) pair in diagonal order. Each
    /// universal meets the pool in order, so a cursor per universal marks
    /// what it has used.
    fn next_gamma(br: &Branch) -> Option<(usize, usize)> {
        let mut best: Option<((usize, usize), (usize, usize))> = None;
        for (u, &p) in br.cursors.iter().enumerate() {
            if p >= br.pool.len() {
                continue;
            }
            let rank = (u + p, p);
            if best.is_none_or(|(r, _)| rank < r) {
                best = Some((rank, (u, p)));
            }
        }
        best.map(|(_, up)| up)
    }

    fn gamma(&mut self, br: &mut Branch, u: usize, p: usize) -> Result<(), Abort> {
        br.cursors[u] = p + 1;
        let (i, kind) = br.universals[u];
        let (t, set_at) = br.pool[p].clone();
        let Entry { s, depth } = br.entries[i].clone();
        let (rule, c, d) = match (kind, &s.formula) {
            (UniKind::ForAll, Formula::ForAll(v, a)) => (Rule::Gamma, substitute(a, *v, &t), depth),
            (UniKind::Eq, Formula::Equal(l, r)) => (Rule::EqGamma, eq_instance(&t, l, r), depth + 1),
            _ => unreachable!("universal entry"),
        };
        self.apply(br, rule, vec![i, set_at], Some(t), vec![Signed::t(c)], d)?;
        Ok(())
    }

    /// Candidate cuts `t in s` for abstraction pool terms `s`: the diagonal
    /// `s in s` first, then later pool terms before earlier ones.
    fn cuts(br: &Branch) -> Vec<Formula> {
        let mut out = Vec::new();
        let open = |f: &Formula| !br.has(&Signed::t(f.clone())) && !br.has(&Signed::f(f.clone()));
        for (s, _) in &br.pool {
            if !br.cut_heads.contains(&alpha_key_term(s)) {
                continue;
            }
            let diag = Formula::Member(s.clone(), s.clone());
            if open(&diag) {
                out.push(diag);
            }
            for (t, _) in br.pool.iter().rev() {
                if t == s {
                    continue;
                }
                let f = Formula::Member(t.clone(), s.clone());
                if open(&f) {
                    out.push(f);
                }
            }
        }
        out
    }

    pub(super) fn run(&mut self, roots: &[Signed]) -> Outcome {
        let br = Branch::new(roots);
        match self.expand(br) {
            Ok(o) => o,
            Err(Abort) => Outcome::Abort,
        }
    }

    fn expand(&mut self, mut br: Branch) -> Result<Outcome, Abort> {
        loop {
            self.saturate(&mut br)?;
            if let Some(closure) = br.closed {
                return Ok(Outcome::Closed(Tree::Closed { steps: br.steps, closure }));
            }
            if let Some((u, p)) = Self::next_gamma(&br) {
                if br.used < self.limit {
                    br.used += 1;
                    self.gamma(&mut br, u, p)?;
                    continue;
                }
                br.limited = true;
            }
            while br.betas.front().is_some_and(|b| br.beta_done.contains(b)) {
                br.betas.pop_front();
            }
            if let Some(b) = br.betas.pop_front() {
                br.beta_done.insert(b);
                let (d1, d2) = disjuncts(&br.entries[b].s).expect("branching entry");
                return self.split(br, SplitKind::Beta { premise: b }, [d1, d2]);
            }
            if let Some(done) = self.try_cuts(&mut br)? {
                return Ok(done);
            }
            return Ok(Outcome::Open { limited: br.limited });
        }
    }

    /// Try each available cut in turn; `None` when no cut closes the branch.
    fn try_cuts(&mut self, br: &mut Branch) -> Result<Option<Outcome>, Abort> {
        let cuts = Self::cuts(br);
        if cuts.is_empty() {
            return Ok(None);
        }
        if br.used >= self.limit {
            br.limited = true;
            return Ok(None);
        }
        let mut base = br.clone();
        base.used += 1;
        for f in cuts {
            let sides = [Signed::t(f.clone()), Signed::f(f)];
            match self.split(base.clone(), SplitKind::Cut, sides)? {
                Outcome::Open { limited } => br.limited |= limited,
                closed => return Ok(Some(closed)),
            }
        }
        Ok(None)
    }

    fn split(&mut self, br: Branch, kind: SplitKind, sides: [Signed; 2]) -> Result<Outcome, Abort> {
        self.tick()?;
        let mut children = Vec::with_capacity(2);
        for side in sides {
            let mut child = br.child();
            let depth = match kind {
                SplitKind::Beta { premise } => br.entries[premise].depth,
                SplitKind::Cut => 0,
            };
            child.insert(side.clone(), depth);
            match self.expand(child)? {
                Outcome::Closed(tree) => children.push((side, tree)),
                open => return Ok(open),
            }
        }
        Ok(Outcome::Closed(Tree::Split { steps: br.steps, kind, children }))
    }
}
