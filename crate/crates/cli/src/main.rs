mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use serde_json::json;

use config::{Config, Format, DEFAULT_COUNT};
use nact::enumerate::FormulaStream;
use nact::formula::{parse_formula, Formula};
use nact::ledger::{degree, read_ledger, DegreeConfig, LedgerReport};
use nact::model::{check_system, search_models, FiniteModel};
use nact::prover::{check_trace, prove, ProofResult};
use nact::sa::{classify_sa, SaError, Verdict};
use nact::schema::{SystemSpec, PRESETS};
use nact::stratify::{stratify, Stratification};

/// Workbench for the NACT class theories.
#[derive(Parser)]
#[command(name = "nact", version)]
struct Cli {
    /// TOML config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output format [default: text, or the config's].
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the preset systems and their schemata.
    Systems,
    /// Print the first formulas of the canonical stream.
    Enumerate {
        /// How many formulas [default: config `count`, else 1000].
        #[arg(long)]
        count: Option<usize>,
        /// Stop before formulas with more nodes than this.
        #[arg(long)]
        max_len: Option<usize>,
    },
    /// Decide stratifiability and show the type assignment or the bad cycle.
    Stratify { formula: String },
    /// Classify the self-application of a formula in `x`.
    Sa {
        formula: String,
        /// Preset name [default: config, else NACT-PriNSA].
        #[arg(long)]
        system: Option<String>,
        /// Step budget per attempt [default: NACT_MAX_STEPS, config, else 50000].
        #[arg(long)]
        max_steps: Option<u64>,
        /// Write the deciding proof trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Prove a goal from axioms; the trace is re-checked.
    Prove {
        #[arg(long = "axiom")]
        axioms: Vec<String>,
        #[arg(long)]
        goal: String,
        #[arg(long)]
        max_steps: Option<u64>,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Check one model, or search all models up to a size.
    ModelCheck {
        #[arg(long)]
        system: Option<String>,
        #[arg(long, default_value_t = 3)]
        max_size: usize,
        /// A model such as `2/00/10` (row i, column j: j is in i).
        #[arg(long)]
        model: Option<String>,
    },
    /// Classify the stream into a ledger.
    Run {
        #[arg(long)]
        system: Option<String>,
        #[arg(long)]
        count: Option<usize>,
        #[arg(long)]
        max_steps: Option<u64>,
        /// Ledger file [default: NACT_LEDGER, config, else ledger.jsonl].
        #[arg(long)]
        ledger: Option<PathBuf>,
        /// Extend an existing ledger instead of starting over.
        #[arg(long)]
        resume: bool,
    },
    /// The inconsistency-degree series of a ledger.
    Degree {
        #[arg(long)]
        ledger: Option<PathBuf>,
        /// [default: 0.001]
        #[arg(long)]
        epsilon: Option<f64>,
        /// [default: 100]
        #[arg(long)]
        window: Option<usize>,
    },
}

enum Failure {
    Usage(anyhow::Error),
    Operational(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Failure {
        Failure::Operational(e.into())
    }
}

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

fn formula(text: &str) -> Result<Formula, Failure> {
    parse_formula(text).map_err(|e| usage(anyhow::anyhow!("`{text}`: {e}")))
}

struct Out {
    format: Format,
    lines: Vec<String>,
}

impl Out {
    fn text(&mut self, s: impl Into<String>) {
        if self.format == Format::Text {
            self.lines.push(s.into());
        }
    }

    fn record(&mut self, v: serde_json::Value) {
        if self.format == Format::Jsonl {
            self.lines.push(v.to_string());
        }
    }
}

fn write_trace(path: &PathBuf, proof: &ProofResult) -> anyhow::Result<()> {
    let mut f = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    for line in proof.trace.as_ref().map(|t| t.lines()).unwrap_or_default() {
        writeln!(f, "{line}")?;
    }
    Ok(())
}

fn describe(s: &SystemSpec) -> String {
    let ids: Vec<String> = s.active.iter().map(|i| i.to_string()).collect();
    let mut flags = Vec::new();
    if s.parameter_free_only {
        flags.push("parameter-free");
    }
    if s.meta_singsa {
        flags.push("meta-SiNGSA");
    }
    if s.hnp_gate {
        flags.push("HnP gate");
    }
    let choice = s.choice_axiom.map(|c| format!(" + {c:?}")).unwrap_or_default();
    let flags = if flags.is_empty() { String::new() } else { format!(" [{}]", flags.join(", ")) };
    format!("{}: {}{choice}{flags}", s.name, ids.join(", "))
}

fn dispatch(cli: Cli) -> Result<Vec<String>, Failure> {
    let cfg = match &cli.config {
        Some(p) => Config::load(p).map_err(usage)?,
        None => Config::default(),
    };
    let format = cli.format.or(cfg.format).unwrap_or_default();
    let mut out = Out { format, lines: Vec::new() };
    match cli.command {
        Command::Systems => {
            for name in PRESETS {
                let s = SystemSpec::preset(name).expect("listed presets exist");
                out.text(describe(&s));
                out.record(serde_json::to_value(&s)?);
            }
        }
        Command::Enumerate { count, max_len } => {
            let count = count.or(cfg.count).unwrap_or(DEFAULT_COUNT);
            let stream = match max_len {
                Some(l) => FormulaStream::new().with_max_len(l),
                None => FormulaStream::new(),
            };
            for (i, f) in stream.take(count).enumerate() {
                out.text(f.to_string());
                out.record(json!({"index": i, "formula": f.to_string(), "size": f.size()}));
            }
        }
        Command::Stratify { formula: text } => {
            let f = formula(&text)?;
            match stratify(&f) {
                Stratification::Stratified(t) => {
                    out.text("Stratified");
                    for (n, k) in &t.types {
                        out.text(format!("  t({n}) = {k}"));
                    }
                    let types: Vec<_> = t.types.iter().map(|(n, k)| json!([n.to_string(), k])).collect();
                    out.record(json!({"formula": f.to_string(), "stratified": true, "types": types}));
                }
                Stratification::Unstratifiable(cycle) => {
                    out.text("Unstratifiable");
                    for c in &cycle {
                        out.text(format!("  {c}"));
                    }
                    let cycle: Vec<String> = cycle.iter().map(|c| c.to_string()).collect();
                    out.record(json!({"formula": f.to_string(), "stratified": false, "cycle": cycle}));
                }
            }
        }
        Command::Sa { formula: text, system, max_steps, trace } => {
            let f = formula(&text)?;
            let system = cfg.system(system.as_deref()).map_err(usage)?;
            let budget = cfg.budget(max_steps).map_err(usage)?;
            let verdict = match classify_sa(&f, &system, &budget) {
                Ok(v) => v,
                Err(e @ SaError::SideConditionViolated { .. }) => {
                    out.text(format!("Rejected: {e}"));
                    out.record(json!({"formula": f.to_string(), "system": system.name, "verdict": "Rejected", "reason": e.to_string()}));
                    return Ok(out.lines);
                }
                Err(e) => return Err(usage(e)),
            };
            let proof = match &verdict {
                Verdict::Inconsistent { proof } | Verdict::SAValid { proof } | Verdict::NSAValidSet { proof } => {
                    Some(proof)
                }
                Verdict::Unknown { .. } => None,
            };
            if let (Some(path), Some(proof)) = (&trace, proof) {
                write_trace(path, proof)?;
            }
            out.text(format!("{:?} ({} steps)", verdict.kind(), verdict.steps()));
            out.record(json!({
                "formula": f.to_string(),
                "system": system.name,
                "verdict": verdict.kind(),
                "steps_used": verdict.steps(),
                "trace": trace.filter(|_| proof.is_some()).map(|p| p.display().to_string()),
            }));
        }
        Command::Prove { axioms, goal, max_steps, trace } => {
            let axioms = axioms.iter().map(|a| formula(a)).collect::<Result<Vec<_>, _>>()?;
            let goal = formula(&goal)?;
            let budget = cfg.budget(max_steps).map_err(usage)?;
            let r = prove(&axioms, &goal, &budget);
            let checked = match &r.trace {
                Some(t) => Some(check_trace(&axioms, &goal, r.status, t).is_ok()),
                None => None,
            };
            if checked == Some(false) {
                return Err(anyhow::anyhow!("the proof trace failed to re-check").into());
            }
            if let Some(path) = &trace {
                write_trace(path, &r)?;
            }
            let saturated = if r.saturated { ", saturated" } else { "" };
            out.text(format!("{:?} ({} steps{saturated})", r.status, r.steps_used));
            if checked == Some(true) {
                out.text("trace re-checked");
            }
            for f in &r.frame_assumptions {
                out.text(format!("  frame: {f}"));
            }
            out.record(json!({
                "status": r.status,
                "steps_used": r.steps_used,
                "saturated": r.saturated,
                "checked": checked,
                "frame_assumptions": r.frame_assumptions.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
            }));
        }
        Command::ModelCheck { system, max_size, model } => {
            let system = cfg.system(system.as_deref()).map_err(usage)?;
            match model {
                Some(text) => {
                    let m = if text.contains('/') { FiniteModel::from_compact(&text) } else { text.parse() };
                    let m = m.map_err(usage)?;
                    let report = check_system(&m, &system).map_err(usage)?;
                    let verdict = if report.holds { "holds" } else { "fails" };
                    out.text(format!("{} {verdict} in {}", system.name, m.compact()));
                    for (id, c) in &report.counterexamples {
                        out.text(format!("  {id} fails at class {c:0width$b}", width = m.size()));
                    }
                    out.record(json!({"model": m.compact(), "system": system.name, "report": report}));
                }
                None => {
                    let models = search_models(max_size, &system).map_err(usage)?;
                    for m in &models {
                        out.text(m.compact());
                        out.record(json!({"model": m.compact(), "size": m.size()}));
                    }
                    out.text(format!("{} models of {} with at most {max_size} elements", models.len(), system.name));
                }
            }
        }
        Command::Run { system, count, max_steps, ledger, resume } => {
            let system = cfg.system(system.as_deref()).map_err(usage)?;
            let budget = cfg.budget(max_steps).map_err(usage)?;
            let count = count.or(cfg.count).unwrap_or(DEFAULT_COUNT);
            let path = cfg.ledger(ledger);
            let report = nact::ledger::run(&system, count, &budget, &path, resume)?;
            summary(&mut out, &report);
        }
        Command::Degree { ledger, epsilon, window } => {
            let path = cfg.ledger(ledger);
            let file = read_ledger(&path)?;
            let report = LedgerReport::from_file(&file);
            let mut dc = DegreeConfig::default();
            if let Some(e) = epsilon.or(cfg.epsilon) {
                dc.epsilon = e;
            }
            if let Some(w) = window.or(cfg.window) {
                dc.window = w;
            }
            let d = degree(&report, &dc);
            out.text(format!("estimate r_{} = {}", d.series.len(), d.estimate));
            out.text(format!("tail mean over {} = {}", dc.window.min(d.series.len()), d.tail_mean));
            out.text(format!("nearly consistent (< {}): {}", dc.epsilon, d.nearly_consistent));
            out.text(d.hypothesis.clone());
            for (k, r) in d.series.iter().enumerate() {
                out.record(json!({"k": k + 1, "ratio": r}));
            }
            out.record(json!({
                "estimate": d.estimate,
                "tail_mean": d.tail_mean,
                "nearly_consistent": d.nearly_consistent,
                "hypothesis": d.hypothesis,
            }));
        }
    }
    Ok(out.lines)
}

fn summary(out: &mut Out, r: &LedgerReport) {
    out.text(format!(
        "{}: {} enumerated, {} classified, {} skipped, {} withdrawn",
        r.system, r.enumerated, r.classified, r.skipped, r.withdrawn
    ));
    for (v, n) in &r.counts {
        out.text(format!("  {v:?}: {n}"));
    }
    let mut v = serde_json::to_value(r).expect("reports serialize");
    v.as_object_mut().expect("object").remove("series");
    out.record(v);
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // help and version go to stdout with status 0, real errors exit 2
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(lines) => {
            let mut stdout = std::io::stdout().lock();
            for l in lines {
                if writeln!(stdout, "{l}").is_err() {
                    return ExitCode::from(1);
                }
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            eprintln!("usage: nact [--config FILE] [--format text|jsonl] <COMMAND>; see `nact --help`");
            ExitCode::from(2)
        }
        Err(Failure::Operational(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
