//! Runs (solver × algorithm) matrices over a directory of models and keeps
//! one JSON record per run.
//!
//! A config file is TOML:
//!
//! ```toml
//! corpus = "models"            # directory of .lus files, one property each
//! out = "bench-out"            # records and summaries go here
//! solvers = ["z3", "yices"]    # presets, or { name = "...", command = "..." }
//! algorithms = ["uc", "ucbf", "bf"]
//! max_k = 20
//! timeout_secs = 60            # wall-clock limit per prover run
//! jobs = 2                     # runs in flight at once
//! gadgets = ["counter_bound"]  # corpus models to also wrap in the reduction gadget
//! ```
//!
//! Relative paths are taken from the config file's directory.

use std::fs;
use std::io::Write as _;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use serde::Deserialize;

mod summary;

pub use summary::{summarize, IncreaseRow, Summary};

use crate::analysis::{gadget, overhead, RunRecord, RunStatus};
use crate::engine::{EngineError, ProverConfig};
use crate::ivc::{millis, run, Algorithm, IvcConfig, IvcError, IvcOutcome};
use crate::model::LoadedModel;
use crate::smt::{SessionConfig, SmtError, SolverSpec};
use crate::ts::TransitionSystem;

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum SolverEntry {
    Preset(String),
    Command { name: String, command: String },
}

impl SolverEntry {
    pub fn spec(&self) -> Result<SolverSpec, SmtError> {
        match self {
            SolverEntry::Preset(s) => SolverSpec::parse(s),
            SolverEntry::Command { name, command } => {
                let mut spec = SolverSpec::parse(command)?;
                spec.name = name.clone();
                Ok(spec)
            }
        }
    }
}

fn default_solvers() -> Vec<SolverEntry> {
    vec![SolverEntry::Preset("z3".into())]
}
fn default_algorithms() -> Vec<Algorithm> {
    Algorithm::ALL.to_vec()
}
fn default_max_k() -> u32 {
    20
}
fn default_timeout() -> f64 {
    60.0
}
fn default_jobs() -> usize {
    1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub corpus: PathBuf,
    pub out: PathBuf,
    #[serde(default = "default_solvers")]
    pub solvers: Vec<SolverEntry>,
    #[serde(default = "default_algorithms")]
    pub algorithms: Vec<Algorithm>,
    #[serde(default = "default_max_k")]
    pub max_k: u32,
    #[serde(default = "default_timeout")]
    pub timeout_secs: f64,
    #[serde(default = "default_jobs")]
    pub jobs: usize,
    #[serde(default)]
    pub gadgets: Vec<String>,
    /// Re-run configurations that already have a record.
    #[serde(default)]
    pub force: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("config: {0}")]
    Config(String),
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> BenchError + '_ {
    move |source| BenchError::Io { path: path.display().to_string(), source }
}

impl BenchConfig {
    pub fn new(corpus: impl Into<PathBuf>, out: impl Into<PathBuf>) -> Self {
        BenchConfig {
            corpus: corpus.into(),
            out: out.into(),
            solvers: default_solvers(),
            algorithms: default_algorithms(),
            max_k: default_max_k(),
            timeout_secs: default_timeout(),
            jobs: default_jobs(),
            gadgets: Vec::new(),
            force: false,
        }
    }

    pub fn from_toml(text: &str, base: &Path) -> Result<Self, BenchError> {
        let mut cfg: BenchConfig = toml::from_str(text).map_err(|e| BenchError::Config(e.to_string()))?;
        for p in [&mut cfg.corpus, &mut cfg.out] {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, BenchError> {
        let text = fs::read_to_string(path).map_err(io(path))?;
        Self::from_toml(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if !self.timeout_secs.is_finite() || self.timeout_secs <= 0.0 {
            return Err(BenchError::Config("timeout_secs must be positive".into()));
        }
        if self.solvers.is_empty() || self.algorithms.is_empty() {
            return Err(BenchError::Config("need at least one solver and one algorithm".into()));
        }
        if self.max_k == 0 {
            return Err(BenchError::Config("max_k must be at least 1".into()));
        }
        for s in &self.solvers {
            s.spec().map_err(|e| BenchError::Config(e.to_string()))?;
        }
        Ok(())
    }

    fn timeout(&self) -> Duration {
        Duration::from_secs_f64(self.timeout_secs)
    }
}

/// Where a benchmark model comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelSource {
    File(PathBuf),
    /// The reduction gadget around a corpus file.
    Gadget(PathBuf),
}

impl ModelSource {
    pub fn name(&self) -> String {
        let stem = |p: &PathBuf| p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        match self {
            ModelSource::File(p) => stem(p),
            ModelSource::Gadget(p) => format!("gadget-{}", stem(p)),
        }
    }
}

/// The corpus `.lus` files in name order, then the requested gadgets.
pub fn corpus(cfg: &BenchConfig) -> Result<Vec<ModelSource>, BenchError> {
    let mut files: Vec<PathBuf> = fs::read_dir(&cfg.corpus)
        .map_err(io(&cfg.corpus))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "lus"))
        .collect();
    files.sort();
    let mut out: Vec<ModelSource> = files.iter().cloned().map(ModelSource::File).collect();
    for g in &cfg.gadgets {
        let path = cfg.corpus.join(format!("{}.lus", g.trim_end_matches(".lus")));
        if !files.contains(&path) {
            return Err(BenchError::Config(format!("gadget base `{g}` is not in the corpus")));
        }
        out.push(ModelSource::Gadget(path));
    }
    Ok(out)
}

pub fn record_path(out: &Path, model: &str, solver: &str, alg: Algorithm) -> PathBuf {
    out.join(format!("{model}__{solver}__{alg}.json"))
}

/// Writes through a temporary file in the same directory and renames it
/// into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), BenchError> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io(dir))?;
    tmp.write_all(contents).map_err(io(path))?;
    tmp.persist(path).map_err(|e| BenchError::Io { path: path.display().to_string(), source: e.error })?;
    Ok(())
}

struct Task {
    source: ModelSource,
    solver: SolverSpec,
    algorithm: Algorithm,
}

/// Runs every (model, solver, algorithm) combination and returns the records
/// in matrix order. Existing records are reused unless `force` is set.
pub fn run_matrix(cfg: &BenchConfig) -> Result<Vec<RunRecord>, BenchError> {
    cfg.validate()?;
    fs::create_dir_all(&cfg.out).map_err(io(&cfg.out))?;
    let solvers: Vec<SolverSpec> = cfg
        .solvers
        .iter()
        .map(|s| s.spec())
        .collect::<Result<_, _>>()
        .map_err(|e| BenchError::Config(e.to_string()))?;
    let mut tasks = Vec::new();
    for source in corpus(cfg)? {
        for solver in &solvers {
            for &algorithm in &cfg.algorithms {
                tasks.push(Task { source: source.clone(), solver: solver.clone(), algorithm });
            }
        }
    }

    let results: Vec<Mutex<Option<Result<RunRecord, BenchError>>>> = tasks.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let worker = || loop {
        let i = next.fetch_add(1, Ordering::SeqCst);
        let Some(task) = tasks.get(i) else { break };
        let r = run_task(cfg, task);
        *results[i].lock().unwrap_or_else(|e| e.into_inner()) = Some(r);
    };
    std::thread::scope(|s| {
        for _ in 0..cfg.jobs.clamp(1, tasks.len().max(1)) {
            s.spawn(worker);
        }
    });
    results.into_iter().map(|m| m.into_inner().unwrap_or_else(|e| e.into_inner()).expect("every task ran")).collect()
}

fn run_task(cfg: &BenchConfig, task: &Task) -> Result<RunRecord, BenchError> {
    let model = task.source.name();
    let path = record_path(&cfg.out, &model, &task.solver.name, task.algorithm);
    if !cfg.force && path.exists() {
        let text = fs::read_to_string(&path).map_err(io(&path))?;
        match serde_json::from_str::<RunRecord>(&text) {
            Ok(r) => {
                log::info!("{model} {} {}: reusing record", task.solver.name, task.algorithm);
                return Ok(r);
            }
            Err(e) => log::warn!("{}: unreadable record, re-running: {e}", path.display()),
        }
    }
    log::info!("{model} {} {}", task.solver.name, task.algorithm);
    let record = catch_unwind(AssertUnwindSafe(|| run_one(cfg, task, &model))).unwrap_or_else(|panic| {
        let msg = panic
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into());
        error_record(&model, task, format!("internal error: {msg}"))
    });
    let text = serde_json::to_string_pretty(&record).expect("records serialize");
    write_atomic(&path, text.as_bytes())?;
    Ok(record)
}

fn error_record(model: &str, task: &Task, message: String) -> RunRecord {
    RunRecord {
        model: model.to_owned(),
        property: None,
        solver: task.solver.name.clone(),
        algorithm: task.algorithm,
        status: RunStatus::Error,
        core: None,
        minimal: None,
        k: None,
        invariants: Vec::new(),
        candidates: 0,
        slice: None,
        proof_ms: 0.0,
        ivc_ms: 0.0,
        overhead_pct: None,
        cex_length: None,
        message: Some(message),
    }
}

fn load(source: &ModelSource) -> Result<(TransitionSystem, String, Option<Vec<String>>), String> {
    match source {
        ModelSource::File(p) => {
            let m = LoadedModel::from_file(p).map_err(|e| e.to_string())?;
            if m.ts.properties.len() != 1 {
                return Err(format!("expected exactly one property, found {}", m.ts.properties.len()));
            }
            let prop = m.property().map_err(|e| e.to_string())?.to_owned();
            let slice = m.slice(&prop).map_err(|e| e.to_string())?;
            let slice = m.ts.candidates().into_iter().filter(|c| slice.contains(c)).collect();
            Ok((m.ts, prop, Some(slice)))
        }
        ModelSource::Gadget(p) => {
            let m = LoadedModel::from_file(p).map_err(|e| e.to_string())?;
            let g = gadget(&m.ts).map_err(|e| e.to_string())?;
            Ok((g.ts, g.property, None))
        }
    }
}

fn run_one(cfg: &BenchConfig, task: &Task, model: &str) -> RunRecord {
    let (ts, prop, slice) = match load(&task.source) {
        Ok(x) => x,
        Err(msg) => return error_record(model, task, msg),
    };
    let mut session = SessionConfig::new(task.solver.clone());
    session.timeout = cfg.timeout();
    let mut prover = ProverConfig::new(session);
    prover.max_k = cfg.max_k;
    prover.budget = Some(cfg.timeout());
    let mut rec = error_record(model, task, String::new());
    rec.property = Some(prop.clone());
    rec.candidates = ts.candidates().len();
    rec.slice = slice;
    rec.message = None;
    match run(&IvcConfig::new(prover), &ts, &prop, task.algorithm) {
        Ok(IvcOutcome::Core { ivc, proof }) => {
            rec.status = RunStatus::Proved;
            rec.minimal = Some(ivc.minimal);
            rec.k = Some(ivc.k);
            rec.invariants = ivc.invariants;
            rec.proof_ms = millis(proof.time);
            rec.ivc_ms = ivc.ivc_ms;
            rec.overhead_pct = overhead(rec.ivc_ms, rec.proof_ms);
            rec.core = Some(ivc.core);
        }
        Ok(IvcOutcome::Falsified(cex)) => {
            rec.status = RunStatus::Cex;
            rec.cex_length = Some(cex.length);
        }
        Ok(IvcOutcome::Unknown(why)) => {
            rec.status = RunStatus::Unknown;
            rec.message = Some(why);
        }
        Err(e) if inconclusive(&e) => {
            rec.status = RunStatus::Unknown;
            rec.message = Some(e.to_string());
        }
        Err(e) => {
            rec.status = RunStatus::Error;
            rec.message = Some(e.to_string());
        }
    }
    rec
}

fn inconclusive(e: &IvcError) -> bool {
    matches!(
        e,
        IvcError::Engine(EngineError::Inconclusive(_)) | IvcError::Stage { source: EngineError::Inconclusive(_), .. }
    )
}

/// Writes `summary.json` and `summary.csv` next to the records.
pub fn write_summary(out: &Path, summary: &Summary) -> Result<(), BenchError> {
    let json = serde_json::to_string_pretty(summary).expect("summaries serialize");
    write_atomic(&out.join("summary.json"), json.as_bytes())?;
    write_atomic(&out.join("summary.csv"), summary.to_csv().as_bytes())
}

/// Every record in `dir`, in file-name order.
pub fn load_records(dir: &Path) -> Result<Vec<RunRecord>, BenchError> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io(dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "json") && p.file_name().is_some_and(|n| n != "summary.json"))
        .collect();
    paths.sort();
    let mut out = Vec::new();
    for p in paths {
        let text = fs::read_to_string(&p).map_err(io(&p))?;
        match serde_json::from_str::<RunRecord>(&text) {
            Ok(r) => out.push(r),
            Err(e) => log::warn!("{}: not a run record: {e}", p.display()),
        }
    }
    Ok(out)
}
