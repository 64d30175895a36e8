//! The `ivc-kind` command line.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::analysis::diversity_report;
use crate::bench::{self, BenchConfig, BenchError, SolverEntry};
use crate::engine::{prove, Counterexample, EngineError, InductiveProof, ProveOutcome, ProverConfig};
use crate::ivc::{self, Algorithm, IvcConfig, IvcError, IvcOutcome, IvcResult};
use crate::model::{LoadError, LoadedModel};
use crate::smt::{SessionConfig, SmtError, SolverSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSIFIED: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_USAGE: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "ivc-kind", version, about = "k-induction and inductive validity cores for Lustre programs")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Solver preset (z3, yices) or command line; defaults to $IVC_KIND_SOLVER, then z3
    #[arg(long, global = true)]
    solver: Option<String>,
    /// Seconds allowed per prover run
    #[arg(long, global = true, default_value_t = 60.0)]
    timeout: f64,
    #[arg(long, global = true, default_value_t = 20)]
    max_k: u32,
    /// Write JSON instead of text: to stdout, or to the given file
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "-", value_name = "FILE")]
    json: Option<PathBuf>,
    /// Keep a replayable SMT-LIB transcript of every solver session here
    #[arg(long, global = true, value_name = "DIR")]
    dump_smt: Option<PathBuf>,
    /// Write the transition system in VMT form to this file
    #[arg(long, global = true, value_name = "FILE")]
    dump_ts: Option<PathBuf>,
    /// Parallel prover runs
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[arg(short, long, global = true, conflicts_with = "verbose")]
    quiet: bool,
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Prove or falsify a property by k-induction
    Check {
        model: PathBuf,
        #[arg(long)]
        property: Option<String>,
        /// Skip invariant generation
        #[arg(long)]
        no_invariants: bool,
    },
    /// Extract an inductive validity core
    Ivc {
        model: PathBuf,
        #[arg(long)]
        property: Option<String>,
        /// uc, ucbf, bf, or all
        #[arg(long, short, default_value = "ucbf")]
        algorithm: String,
    },
    /// Backward static slice of a property
    Slice {
        model: PathBuf,
        #[arg(long)]
        property: Option<String>,
    },
    /// Diversity of the cores in a directory of run records
    Diversity {
        records: PathBuf,
        /// Where the CSV tables go; defaults to the records directory
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a solver × algorithm matrix over a corpus
    Bench {
        /// TOML config; flags below override it
        config: Option<PathBuf>,
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Comma-separated algorithms
        #[arg(long, value_delimiter = ',')]
        algorithms: Vec<String>,
        /// Comma-separated solvers; overrides --solver
        #[arg(long, value_delimiter = ',')]
        solvers: Vec<String>,
        /// Re-run configurations that already have a record
        #[arg(long)]
        force: bool,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error(transparent)]
    Smt(#[from] SmtError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Ivc(#[from] IvcError),
    #[error(transparent)]
    Bench(#[from] BenchError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Load(_) | CliError::Io { .. } => EXIT_USAGE,
            CliError::Bench(BenchError::Io { .. } | BenchError::Config(_)) => EXIT_USAGE,
            CliError::Engine(EngineError::Inconclusive(_)) => EXIT_UNKNOWN,
            CliError::Ivc(IvcError::Engine(EngineError::Inconclusive(_))) => EXIT_UNKNOWN,
            CliError::Ivc(IvcError::Stage { source: EngineError::Inconclusive(_), .. }) => EXIT_UNKNOWN,
            _ => EXIT_INTERNAL,
        }
    }
}

/// Parses `argv` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    init_logging(&cli.common);
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.code()
        }
    }
}

fn init_logging(c: &Common) {
    let level = match (c.quiet, c.verbose) {
        (true, _) => log::LevelFilter::Error,
        (_, 0) => log::LevelFilter::Warn,
        (_, 1) => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new().filter_level(level).parse_default_env().try_init();
}

impl Common {
    fn solver(&self) -> Result<SolverSpec, CliError> {
        Ok(match &self.solver {
            Some(s) => SolverSpec::parse(s)?,
            None => SolverSpec::from_env()?,
        })
    }

    fn timeout(&self) -> Result<Duration, CliError> {
        if !self.timeout.is_finite() || self.timeout <= 0.0 {
            return Err(CliError::Usage("--timeout must be positive".into()));
        }
        Ok(Duration::from_secs_f64(self.timeout))
    }

    fn prover(&self) -> Result<ProverConfig, CliError> {
        if self.max_k == 0 {
            return Err(CliError::Usage("--max-k must be at least 1".into()));
        }
        if self.jobs == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        let mut s = SessionConfig::new(self.solver()?);
        s.timeout = self.timeout()?;
        s.dump_dir = self.dump_smt.clone();
        if let Some(d) = &s.dump_dir {
            std::fs::create_dir_all(d).map_err(|source| CliError::Io { path: d.display().to_string(), source })?;
        }
        let mut p = ProverConfig::new(s);
        p.max_k = self.max_k;
        p.budget = Some(self.timeout()?);
        Ok(p)
    }

    /// JSON to the `--json` target, or `text` to stdout.
    fn emit(&self, value: &impl Serialize, text: &str) -> Result<(), CliError> {
        match &self.json {
            None => print!("{text}"),
            Some(p) if p.as_os_str() == "-" => {
                println!("{}", serde_json::to_string_pretty(value).expect("output serializes"))
            }
            Some(p) => {
                let body = serde_json::to_string_pretty(value).expect("output serializes") + "\n";
                std::fs::write(p, body).map_err(|source| CliError::Io { path: p.display().to_string(), source })?;
            }
        }
        Ok(())
    }
}

fn load(common: &Common, path: &Path, property: &Option<String>) -> Result<(LoadedModel, String), CliError> {
    let m = LoadedModel::from_file(path)?;
    let prop = match property {
        Some(p) => {
            m.ts.property(p).map_err(|_| CliError::Usage(format!("no property `{p}` in {}", path.display())))?;
            p.clone()
        }
        None => m.property()?.to_owned(),
    };
    if let Some(out) = &common.dump_ts {
        std::fs::write(out, m.ts.to_vmt())
            .map_err(|source| CliError::Io { path: out.display().to_string(), source })?;
    }
    Ok((m, prop))
}

fn execute(cli: &Cli) -> Result<i32, CliError> {
    let c = &cli.common;
    match &cli.command {
        Command::Check { model, property, no_invariants } => {
            let (m, prop) = load(c, model, property)?;
            let mut p = c.prover()?;
            p.invariants = !no_invariants;
            let outcome = prove(&p, &m.ts, &prop)?;
            let (value, text, code) = match &outcome {
                ProveOutcome::Proved(proof) => {
                    (json!({"status": "proved", "proof": proof}), render_proof(proof), EXIT_OK)
                }
                ProveOutcome::Falsified(cex) => {
                    (json!({"status": "falsified", "counterexample": cex}), render_cex(cex), EXIT_FALSIFIED)
                }
                ProveOutcome::Unknown(why) => (
                    json!({"status": "unknown", "property": prop, "reason": why}),
                    format!("{prop}: unknown ({why})\n"),
                    EXIT_UNKNOWN,
                ),
            };
            c.emit(&value, &text)?;
            Ok(code)
        }
        Command::Ivc { model, property, algorithm } => {
            let algs: Vec<Algorithm> = if algorithm.eq_ignore_ascii_case("all") {
                Algorithm::ALL.to_vec()
            } else {
                vec![algorithm.parse().map_err(CliError::Usage)?]
            };
            let (m, prop) = load(c, model, property)?;
            let cfg = IvcConfig { prover: c.prover()?, jobs: c.jobs };
            let mut results: Vec<IvcResult> = Vec::new();
            for alg in algs {
                match ivc::run(&cfg, &m.ts, &prop, alg)? {
                    IvcOutcome::Core { ivc, .. } => results.push(ivc),
                    IvcOutcome::Falsified(cex) => {
                        c.emit(&json!({"status": "falsified", "counterexample": cex}), &render_cex(&cex))?;
                        return Ok(EXIT_FALSIFIED);
                    }
                    IvcOutcome::Unknown(why) => {
                        let text = format!("{prop}: unknown ({why})\n");
                        c.emit(&json!({"status": "unknown", "property": prop, "reason": why}), &text)?;
                        return Ok(EXIT_UNKNOWN);
                    }
                }
            }
            let candidates = m.ts.candidates().len();
            let mut text = String::new();
            for r in &results {
                let _ = writeln!(
                    text,
                    "{:<5}{{{}}}  {} of {candidates} candidates, k = {}, {}, {:.1} ms",
                    r.algorithm.name(),
                    r.core.join(", "),
                    r.core.len(),
                    r.k,
                    if r.minimal { "minimal" } else { "not certified minimal" },
                    r.ivc_ms
                );
                if !r.fixed.is_empty() {
                    let _ = writeln!(text, "     fixed by annotation: {}", r.fixed.join(", "));
                }
            }
            c.emit(&json!({"status": "proved", "property": prop, "results": results}), &text)?;
            Ok(EXIT_OK)
        }
        Command::Slice { model, property } => {
            let (m, prop) = load(c, model, property)?;
            let slice = m.slice(&prop)?;
            let ordered: Vec<String> = m.ts.candidates().into_iter().filter(|v| slice.contains(v)).collect();
            let text =
                format!("{{{}}}  {} of {} candidates\n", ordered.join(", "), ordered.len(), m.ts.candidates().len());
            c.emit(&json!({"property": prop, "slice": ordered, "candidates": m.ts.candidates()}), &text)?;
            Ok(EXIT_OK)
        }
        Command::Diversity { records, out } => {
            let recs = bench::load_records(records)?;
            if recs.is_empty() {
                return Err(CliError::Usage(format!("no run records in {}", records.display())));
            }
            let report = diversity_report(&recs);
            let out = out.clone().unwrap_or_else(|| records.clone());
            std::fs::create_dir_all(&out).map_err(|source| CliError::Io { path: out.display().to_string(), source })?;
            bench::write_atomic(&out.join("diversity_models.csv"), report.models_csv().as_bytes())?;
            bench::write_atomic(&out.join("diversity_distances.csv"), report.distances_csv().as_bytes())?;
            bench::write_atomic(&out.join("diversity_configurations.csv"), report.configurations_csv().as_bytes())?;
            let mut text = report.models_csv();
            let _ = writeln!(text, "\n{}", report.configurations_csv());
            c.emit(&report, &text)?;
            Ok(EXIT_OK)
        }
        Command::Bench { config, corpus, out, algorithms, solvers, force } => {
            let mut cfg = match (config, corpus, out) {
                (Some(p), _, _) => BenchConfig::from_file(p)?,
                (None, Some(corpus), Some(out)) => {
                    let mut b = BenchConfig::new(corpus, out);
                    b.solvers = vec![SolverEntry::Preset(c.solver.clone().unwrap_or_else(|| "z3".into()))];
                    b.timeout_secs = c.timeout;
                    b.max_k = c.max_k;
                    b.jobs = c.jobs;
                    b
                }
                _ => return Err(CliError::Usage("bench needs a config file or both --corpus and --out".into())),
            };
            if let Some(p) = corpus {
                cfg.corpus = p.clone();
            }
            if let Some(p) = out {
                cfg.out = p.clone();
            }
            if !algorithms.is_empty() {
                cfg.algorithms =
                    algorithms.iter().map(|a| a.parse()).collect::<Result<_, _>>().map_err(CliError::Usage)?;
            }
            if !solvers.is_empty() {
                cfg.solvers = solvers.iter().map(|s| SolverEntry::Preset(s.clone())).collect();
            }
            cfg.force |= force;
            let records = bench::run_matrix(&cfg)?;
            let summary = bench::summarize(&records);
            bench::write_summary(&cfg.out, &summary)?;
            let mut text = String::new();
            for r in &records {
                let _ = writeln!(
                    text,
                    "{:<28} {:<8} {:<5} {:<8} {}",
                    r.model,
                    r.solver,
                    r.algorithm.name(),
                    format!("{:?}", r.status).to_lowercase(),
                    r.core.as_ref().map(|c| format!("{{{}}}", c.join(", "))).unwrap_or_default()
                );
            }
            let _ = write!(text, "\n{}", summary.to_csv());
            c.emit(&summary, &text)?;
            Ok(EXIT_OK)
        }
    }
}

fn render_proof(p: &InductiveProof) -> String {
    let mut s = format!("{}: proved by {} at k = {}\n", p.property, p.engine, p.k);
    for (name, _) in &p.invariants {
        let _ = writeln!(s, "  invariant {name}");
    }
    s
}

/// A step-by-variable table of the trace, leaving out internal variables.
fn render_cex(c: &Counterexample) -> String {
    let mut s = format!("{}: falsified after {} steps\n", c.property, c.length);
    let states = c.trace.get(1..).unwrap_or_default();
    let names: Vec<&String> = states
        .first()
        .map(|st| st.keys().filter(|k| !k.starts_with('%') && !k.contains('~')).collect())
        .unwrap_or_default();
    let mut rows =
        vec![std::iter::once("step".to_string()).chain(names.iter().map(|n| n.to_string())).collect::<Vec<_>>()];
    for (i, st) in states.iter().enumerate() {
        rows.push(
            std::iter::once(i.to_string())
                .chain(names.iter().map(|n| st.get(*n).map(|v| v.to_string()).unwrap_or_default()))
                .collect(),
        );
    }
    let widths: Vec<usize> = (0..rows[0].len()).map(|j| rows.iter().map(|r| r[j].len()).max().unwrap_or(0)).collect();
    for r in rows {
        let line: Vec<String> = r.iter().zip(&widths).map(|(cell, w)| format!("{cell:<w$}")).collect();
        let _ = writeln!(s, "{}", line.join("  ").trim_end());
    }
    s
}
