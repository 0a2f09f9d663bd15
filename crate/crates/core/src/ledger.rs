//! The enumeration experiment: classify formulas in stream order, quarantine
//! the inconsistent ones and everything containing them, and keep an
//! append-only, hash-chained record of it all.
//!
//! A ledger file is one JSON object per line. The first line is the header
//! (format version, system, budget); every later line is a record or a
//! withdrawal. Each line carries `hash`, the hex SHA-256 of the previous
//! line's hash followed by the line's JSON without the `hash` field (the
//! header hashes against the empty string). Appending to a valid ledger
//! therefore gives the same bytes as producing it in one go.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::enumerate::FormulaStream;
use crate::formula::{alpha_key, parse_formula, subformulas, substitute, Formula, Term, Var};
use crate::prover::{refute_sethood, ProofBudget};
use crate::sa::{classify_sa, sa_formula, SaError, Verdict, VerdictKind};
use crate::schema::{comprehension, SchemaError, SystemSpec};

pub const FORMAT: &str = "nact-ledger";
pub const VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum LedgerError {
    #[error("ledger line {line}: {why}")]
    CorruptLedger { line: usize, why: String },
    #[error("ledger was written for {found}, not {expected}")]
    Mismatch { expected: String, found: String },
    #[error(transparent)]
    Schema(#[from] SchemaError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RecordVerdict {
    Inconsistent,
    Unknown,
    SAValid,
    NSAValidSet,
    /// A side condition or the HnP gate kept the formula out.
    Rejected,
}

impl From<VerdictKind> for RecordVerdict {
    fn from(k: VerdictKind) -> RecordVerdict {
        match k {
            VerdictKind::Inconsistent => RecordVerdict::Inconsistent,
            VerdictKind::Unknown => RecordVerdict::Unknown,
            VerdictKind::SAValid => RecordVerdict::SAValid,
            VerdictKind::NSAValidSet => RecordVerdict::NSAValidSet,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerRecord {
    pub index: usize,
    pub formula: String,
    pub system: String,
    /// `None` exactly when the record was skipped.
    pub verdict: Option<RecordVerdict>,
    pub steps_used: u64,
    pub quarantined_by: Option<usize>,
    pub reason: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Header {
    pub format: String,
    pub version: u32,
    pub system: SystemSpec,
    pub budget: ProofBudget,
}

/// The facts of record `index` are withdrawn because they mention the
/// formula of record `by`, which turned out inconsistent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Withdrawal {
    pub index: usize,
    pub by: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Entry {
    Header(Header),
    Record(LedgerRecord),
    Withdraw(Withdrawal),
}

#[derive(Serialize, Deserialize)]
struct Line {
    #[serde(flatten)]
    entry: Entry,
    hash: String,
}

fn chain(prev: &str, body: &str) -> String {
    let mut h = Sha256::new();
    h.update(prev.as_bytes());
    h.update(body.as_bytes());
    hex::encode(h.finalize())
}

fn encode(entry: &Entry, prev: &str) -> (String, String) {
    let body = serde_json::to_string(entry).expect("ledger entries serialize");
    let hash = chain(prev, &body);
    let line = serde_json::to_string(&Line { entry: entry.clone(), hash: hash.clone() }).expect("serialize");
    (line, hash)
}

/// A ledger read back from disk, with its chain checked.
#[derive(Clone, Debug, PartialEq)]
pub struct LedgerFile {
    pub header: Header,
    pub entries: Vec<Entry>,
    pub last_hash: String,
}

impl LedgerFile {
    pub fn records(&self) -> impl Iterator<Item = &LedgerRecord> {
        self.entries.iter().filter_map(|e| match e {
            Entry::Record(r) => Some(r),
            _ => None,
        })
    }

    pub fn withdrawals(&self) -> impl Iterator<Item = &Withdrawal> {
        self.entries.iter().filter_map(|e| match e {
            Entry::Withdraw(w) => Some(w),
            _ => None,
        })
    }
}

pub fn read_ledger(path: &Path) -> Result<LedgerFile, LedgerError> {
    let reader = BufReader::new(File::open(path)?);
    let mut prev = String::new();
    let mut header = None;
    let mut entries = Vec::new();
    let mut next_index = 0;
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        let corrupt = |why: String| LedgerError::CorruptLedger { line: n + 1, why };
        let parsed: Line = serde_json::from_str(&line).map_err(|e| corrupt(e.to_string()))?;
        let body = serde_json::to_string(&parsed.entry).expect("serialize");
        let want = chain(&prev, &body);
        if parsed.hash != want {
            return Err(corrupt("hash does not match the chain".into()));
        }
        let (again, _) = encode(&parsed.entry, &prev);
        if again != line {
            return Err(corrupt("line is not in canonical form".into()));
        }
        match (n, parsed.entry) {
            (0, Entry::Header(h)) => {
                if h.format != FORMAT || h.version != VERSION {
                    return Err(corrupt(format!("unsupported format {} v{}", h.format, h.version)));
                }
                header = Some(h);
            }
            (0, _) => return Err(corrupt("first line is not a header".into())),
            (_, Entry::Header(_)) => return Err(corrupt("second header".into())),
            (_, Entry::Record(r)) => {
                if r.index != next_index {
                    return Err(corrupt(format!("expected record {next_index}, found {}", r.index)));
                }
                if r.quarantined_by.is_some() == r.verdict.is_some() {
                    return Err(corrupt("a record is either skipped or has a verdict".into()));
                }
                next_index += 1;
                entries.push(Entry::Record(r));
            }
            (_, Entry::Withdraw(w)) => {
                if w.index >= next_index || w.by >= next_index {
                    return Err(corrupt("withdrawal refers to a later record".into()));
                }
                entries.push(Entry::Withdraw(w));
            }
        }
        prev = parsed.hash;
    }
    let header = header.ok_or(LedgerError::CorruptLedger { line: 1, why: "empty ledger".into() })?;
    Ok(LedgerFile { header, entries, last_hash: prev })
}

/// True iff some subformula of `b` is `a` applied to a variable: a
/// subformula with at most one free variable which, renamed to `x`, is
/// alpha-equal to `a`.
pub fn contains_instance(b: &Formula, a: &Formula) -> bool {
    let key = alpha_key(a);
    let size = a.size();
    subformulas(b).iter().any(|s| {
        if s.size() != size {
            return false;
        }
        let free = s.free_vars();
        match free.len() {
            0 => alpha_key(s) == key,
            1 => {
                let v = *free.iter().next().expect("one variable");
                let s = if v == Var::X { s.clone() } else { substitute(s, v, &Term::Var(Var::X)) };
                alpha_key(&s) == key
            }
            _ => false,
        }
    })
}

/// Formulas a classified record asserts.
pub fn facts(formula: &Formula, verdict: RecordVerdict, system: &SystemSpec) -> Vec<Formula> {
    let Ok(sa) = sa_formula(formula, system) else { return Vec::new() };
    match verdict {
        RecordVerdict::SAValid => vec![sa],
        RecordVerdict::NSAValidSet => vec![Formula::not(sa), Formula::Set(comprehension(formula))],
        _ => Vec::new(),
    }
}

/// An under-approximation of hereditary non-pathology: no subformula's
/// comprehension is refuted as a set within the budget.
pub fn hnp_bounded(a: &Formula, budget: &ProofBudget) -> bool {
    let mut seen = std::collections::HashSet::new();
    subformulas(a).into_iter().filter(|b| seen.insert(alpha_key(b))).all(|b| !refute_sethood(&b, budget).is_proved())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LedgerReport {
    pub system: String,
    pub budget: ProofBudget,
    pub enumerated: usize,
    pub classified: usize,
    pub skipped: usize,
    pub withdrawn: usize,
    pub counts: BTreeMap<RecordVerdict, usize>,
    /// `r_k`: inconsistent records among the first `k`, over `k`.
    pub series: Vec<f64>,
    /// Index of the next formula a resumed run would process.
    pub cursor: usize,
}

impl LedgerReport {
    pub fn from_file(file: &LedgerFile) -> LedgerReport {
        let mut report = LedgerReport {
            system: file.header.system.name.clone(),
            budget: file.header.budget,
            enumerated: 0,
            classified: 0,
            skipped: 0,
            withdrawn: file.withdrawals().count(),
            counts: BTreeMap::new(),
            series: Vec::new(),
            cursor: 0,
        };
        let mut bad = 0usize;
        for r in file.records() {
            report.enumerated += 1;
            match r.verdict {
                Some(v) => {
                    report.classified += 1;
                    *report.counts.entry(v).or_default() += 1;
                    if v == RecordVerdict::Inconsistent {
                        bad += 1;
                    }
                }
                None => report.skipped += 1,
            }
            report.series.push(bad as f64 / report.enumerated as f64);
        }
        report.cursor = report.enumerated;
        report
    }
}

struct State {
    system: SystemSpec,
    quarantine: Vec<(usize, Formula)>,
    /// Classified records with facts, not yet withdrawn.
    facts: Vec<(usize, Vec<Formula>)>,
}

impl State {
    fn replay(system: &SystemSpec, entries: &[Entry]) -> Result<State, LedgerError> {
        let mut st = State { system: system.clone(), quarantine: Vec::new(), facts: Vec::new() };
        for (n, e) in entries.iter().enumerate() {
            match e {
                Entry::Record(r) => {
                    let f = parse_formula(&r.formula).map_err(|err| LedgerError::CorruptLedger {
                        line: n + 2,
                        why: format!("unreadable formula: {err}"),
                    })?;
                    st.admit(r, &f);
                }
                Entry::Withdraw(w) => st.facts.retain(|(i, _)| *i != w.index),
                Entry::Header(_) => {}
            }
        }
        Ok(st)
    }

    fn admit(&mut self, r: &LedgerRecord, f: &Formula) {
        match r.verdict {
            Some(RecordVerdict::Inconsistent) => self.quarantine.push((r.index, f.clone())),
            Some(v) => {
                let fs = facts(f, v, &self.system);
                if !fs.is_empty() {
                    self.facts.push((r.index, fs));
                }
            }
            None => {}
        }
    }

    fn quarantined_by(&self, f: &Formula) -> Option<usize> {
        self.quarantine.iter().find(|(_, q)| contains_instance(f, q)).map(|(i, _)| *i)
    }

    /// Records whose facts mention `f`; they are dropped from the state.
    fn withdraw(&mut self, f: &Formula) -> Vec<usize> {
        let mut out = Vec::new();
        self.facts.retain(|(i, fs)| {
            let hit = fs.iter().any(|g| contains_instance(g, f));
            if hit {
                out.push(*i);
            }
            !hit
        });
        out
    }
}

fn classify(index: usize, f: &Formula, system: &SystemSpec, budget: &ProofBudget) -> Result<LedgerRecord, LedgerError> {
    let mut rec = LedgerRecord {
        index,
        formula: f.to_string(),
        system: system.name.clone(),
        verdict: None,
        steps_used: 0,
        quarantined_by: None,
        reason: None,
    };
    if system.hnp_gate && !hnp_bounded(f, budget) {
        rec.verdict = Some(RecordVerdict::Rejected);
        rec.reason = Some("a subformula's class is refutably a set".into());
        return Ok(rec);
    }
    match classify_sa(f, system, budget) {
        Ok(v) => {
            rec.steps_used = v.steps();
            rec.verdict = Some(v.kind().into());
            if let Verdict::Unknown { .. } = v {
                rec.reason = Some("budget exhausted".into());
            }
        }
        Err(SaError::SideConditionViolated { schema, reason }) => {
            rec.verdict = Some(RecordVerdict::Rejected);
            rec.reason = Some(format!("{schema}: {reason}"));
        }
        Err(SaError::Schema(e)) => return Err(e.into()),
    }
    Ok(rec)
}

/// Process the first `count` formulas of the stream into the ledger at
/// `path`. With `resume`, an existing ledger there is checked and extended;
/// otherwise the file is started afresh.
pub fn run(
    system: &SystemSpec,
    count: usize,
    budget: &ProofBudget,
    path: &Path,
    resume: bool,
) -> Result<LedgerReport, LedgerError> {
    let header = Header { format: FORMAT.into(), version: VERSION, system: system.clone(), budget: *budget };
    let existing = resume && path.exists() && std::fs::metadata(path)?.len() > 0;
    let (mut state, mut prev, mut done, mut out) = if existing {
        let file = read_ledger(path)?;
        if file.header != header {
            let show = |h: &Header| format!("{} with {:?}", h.system.name, h.budget);
            return Err(LedgerError::Mismatch { expected: show(&header), found: show(&file.header) });
        }
        let state = State::replay(system, &file.entries)?;
        let done = file.records().count();
        (state, file.last_hash, done, OpenOptions::new().append(true).open(path)?)
    } else {
        let mut out = File::create(path)?;
        let (line, hash) = encode(&Entry::Header(header), "");
        writeln!(out, "{line}")?;
        let state = State { system: system.clone(), quarantine: Vec::new(), facts: Vec::new() };
        (state, hash, 0, out)
    };
    let emit = |entry: Entry, prev: &mut String, out: &mut File| -> std::io::Result<()> {
        let (line, hash) = encode(&entry, prev);
        writeln!(out, "{line}")?;
        *prev = hash;
        Ok(())
    };
    for f in FormulaStream::new().skip(done).take(count.saturating_sub(done)) {
        let index = done;
        let rec = match state.quarantined_by(&f) {
            Some(by) => LedgerRecord {
                index,
                formula: f.to_string(),
                system: system.name.clone(),
                verdict: None,
                steps_used: 0,
                quarantined_by: Some(by),
                reason: None,
            },
            None => classify(index, &f, system, budget)?,
        };
        emit(Entry::Record(rec.clone()), &mut prev, &mut out)?;
        state.admit(&rec, &f);
        if rec.verdict == Some(RecordVerdict::Inconsistent) {
            for j in state.withdraw(&f) {
                emit(Entry::Withdraw(Withdrawal { index: j, by: index }), &mut prev, &mut out)?;
            }
        }
        out.flush()?;
        done += 1;
    }
    Ok(LedgerReport::from_file(&read_ledger(path)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeConfig {
    pub epsilon: f64,
    pub window: usize,
}

impl Default for DegreeConfig {
    fn default() -> DegreeConfig {
        DegreeConfig { epsilon: 0.001, window: 100 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Degree {
    pub series: Vec<f64>,
    pub estimate: f64,
    /// Mean of the last `window` ratios.
    pub tail_mean: f64,
    pub nearly_consistent: bool,
    pub hypothesis: String,
}

pub fn degree(report: &LedgerReport, cfg: &DegreeConfig) -> Degree {
    let series = report.series.clone();
    let estimate = series.last().copied().unwrap_or(0.0);
    let tail = &series[series.len().saturating_sub(cfg.window.max(1))..];
    let tail_mean = if tail.is_empty() { 0.0 } else { tail.iter().sum::<f64>() / tail.len() as f64 };
    Degree {
        series,
        estimate,
        tail_mean,
        nearly_consistent: tail_mean < cfg.epsilon,
        hypothesis: "hypothesis, not a measurement: the consistency degree of the NSA systems is probably 1".into(),
    }
}
