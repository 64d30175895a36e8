use std::collections::{BTreeMap, BTreeSet};
use std::fs::{File, OpenOptions};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::sync::Arc;
use std::thread;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;

use super::sexp::{self, Sexp};
use crate::lustre::Type;
use crate::ts::{sort_name, Formula};
use crate::value::Value;

/// Environment variable naming the default solver.
pub const SOLVER_ENV: &str = "IVC_KIND_SOLVER";

/// How to launch a solver that speaks SMT-LIB2 on stdin/stdout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverSpec {
    pub name: String,
    pub program: String,
    pub args: Vec<String>,
}

impl SolverSpec {
    pub fn z3() -> Self {
        SolverSpec { name: "z3".into(), program: "z3".into(), args: vec!["-in".into()] }
    }

    pub fn yices() -> Self {
        SolverSpec { name: "yices".into(), program: "yices-smt2".into(), args: vec!["--incremental".into()] }
    }

    /// `z3` and `yices` name the presets; anything else is a command line
    /// whose first word is the program.
    pub fn parse(s: &str) -> Result<Self, SmtError> {
        match s.trim() {
            "z3" => Ok(Self::z3()),
            "yices" | "yices2" => Ok(Self::yices()),
            cmd => {
                let mut words = cmd.split_whitespace().map(str::to_owned);
                let program = words.next().ok_or_else(|| SmtError::Spawn {
                    program: String::new(),
                    message: "empty solver command".into(),
                })?;
                let name = Path::new(&program)
                    .file_name()
                    .map(|f| f.to_string_lossy().into_owned())
                    .unwrap_or_else(|| program.clone());
                Ok(SolverSpec { name, program, args: words.collect() })
            }
        }
    }

    /// The solver named by `IVC_KIND_SOLVER`, or z3.
    pub fn from_env() -> Result<Self, SmtError> {
        match std::env::var(SOLVER_ENV) {
            Ok(s) if !s.trim().is_empty() => Self::parse(&s),
            _ => Ok(Self::z3()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SessionConfig {
    pub solver: SolverSpec,
    /// Per-query limit; a query running longer kills the solver.
    pub timeout: Duration,
    /// Directory receiving a replayable transcript of every session.
    pub dump_dir: Option<PathBuf>,
}

impl SessionConfig {
    pub fn new(solver: SolverSpec) -> Self {
        SessionConfig { solver, timeout: Duration::from_secs(60), dump_dir: None }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SmtError {
    #[error("cannot start solver `{program}`: {message}")]
    Spawn { program: String, message: String },
    #[error("solver handshake failed: {0}")]
    Handshake(String),
    #[error("solver lacks required capability: {0}")]
    Capability(String),
    #[error("solver reported an error: {0}")]
    Solver(String),
    #[error("unexpected solver response: {0}")]
    Protocol(String),
    #[error("solver process exited")]
    Crashed,
    #[error("session is no longer usable after a timeout")]
    Dead,
    #[error("no unsat core: the last check was not unsat")]
    NoCore,
    #[error("solver returned unknown: {0}")]
    Inconclusive(String),
    #[error("symbol `{0}` redeclared with a different sort")]
    Redeclared(String),
    #[error("i/o error talking to solver: {0}")]
    Io(#[from] io::Error),
}

/// Linear-arithmetic logic covering a set of variable types.
pub fn logic_for(types: impl IntoIterator<Item = Type>) -> &'static str {
    let (mut int, mut real) = (false, false);
    for t in types {
        int |= t == Type::Int;
        real |= t == Type::Real;
    }
    match (int, real) {
        (_, false) => "QF_LIA",
        (false, true) => "QF_LRA",
        (true, true) => "QF_LIRA",
    }
}

/// A fresh Boolean that switches a guarded formula on when assumed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActivationLiteral {
    pub name: Arc<str>,
    pub payload: String,
}

impl ActivationLiteral {
    pub fn formula(&self) -> Formula {
        Formula::Lit(self.name.clone())
    }
}

/// Values of the state symbols of a satisfying assignment, keyed by solver
/// symbol.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Model(pub BTreeMap<String, Value>);

impl Model {
    pub fn get(&self, symbol: &str) -> Option<&Value> {
        self.0.get(symbol)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatResult {
    Sat(Model),
    Unsat,
    Unknown(String),
}

impl SatResult {
    pub fn is_unsat(&self) -> bool {
        matches!(self, SatResult::Unsat)
    }

    pub fn is_sat(&self) -> bool {
        matches!(self, SatResult::Sat(_))
    }
}

static SESSION_COUNTER: AtomicUsize = AtomicUsize::new(0);

/// One live solver process.
pub struct Session {
    spec: SolverSpec,
    child: Child,
    stdin: BufWriter<ChildStdin>,
    responses: Receiver<io::Result<Sexp>>,
    timeout: Duration,
    deadline: Option<Instant>,
    transcript: Option<BufWriter<File>>,
    /// Declared symbols with sort and the scope depth they belong to.
    symbols: BTreeMap<String, (&'static str, usize)>,
    depth: usize,
    next_lit: usize,
    lits: BTreeSet<Arc<str>>,
    last_core: Option<Vec<Arc<str>>>,
    dead: bool,
    queries: usize,
}

impl Session {
    /// Starts the solver, enables assumption cores, sets `logic` and probes
    /// that `check-sat-assuming`/`get-unsat-assumptions` work.
    pub fn open(cfg: &SessionConfig, logic: &str) -> Result<Session, SmtError> {
        let mut child = Command::new(&cfg.solver.program)
            .args(&cfg.solver.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| SmtError::Spawn { program: cfg.solver.program.clone(), message: e.to_string() })?;
        let stdin = BufWriter::new(child.stdin.take().expect("piped stdin"));
        let stdout = child.stdout.take().expect("piped stdout");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            let mut r = BufReader::new(stdout);
            loop {
                match sexp::read(&mut r) {
                    Ok(Some(x)) => {
                        if tx.send(Ok(x)).is_err() {
                            return;
                        }
                    }
                    Ok(None) => return,
                    Err(e) => {
                        let _ = tx.send(Err(e));
                        return;
                    }
                }
            }
        });
        let transcript = match &cfg.dump_dir {
            Some(dir) => Some(BufWriter::new(create_transcript(dir)?)),
            None => None,
        };
        let mut s = Session {
            spec: cfg.solver.clone(),
            child,
            stdin,
            responses: rx,
            timeout: cfg.timeout,
            deadline: None,
            transcript,
            symbols: BTreeMap::new(),
            depth: 0,
            next_lit: 0,
            lits: BTreeSet::new(),
            last_core: None,
            dead: false,
            queries: 0,
        };
        s.command("(set-option :print-success true)").map_err(|e| SmtError::Handshake(e.to_string()))?;
        s.command("(set-option :produce-unsat-assumptions true)")
            .map_err(|e| SmtError::Capability(format!("produce-unsat-assumptions: {e}")))?;
        s.command(&format!("(set-logic {logic})"))?;
        s.probe()?;
        Ok(s)
    }

    fn probe(&mut self) -> Result<(), SmtError> {
        let cap = |e: SmtError| SmtError::Capability(format!("unsat assumptions: {e}"));
        self.push()?;
        self.command("(declare-fun %probe0 () Bool)").map_err(cap)?;
        self.command("(declare-fun %probe1 () Bool)").map_err(cap)?;
        self.command("(assert (not (and %probe0 %probe1)))").map_err(cap)?;
        let r = self.command("(check-sat-assuming (%probe0 %probe1))").map_err(cap)?;
        if r.atom() != Some("unsat") {
            return Err(SmtError::Capability(format!("probe answered `{r}` instead of unsat")));
        }
        let core = self.command("(get-unsat-assumptions)").map_err(cap)?;
        let names: Vec<&str> = core.list().unwrap_or_default().iter().filter_map(Sexp::atom).collect();
        if names.is_empty() || names.iter().any(|n| !n.starts_with("%probe")) {
            return Err(SmtError::Capability(format!("probe core `{core}` is malformed")));
        }
        self.pop()
    }

    pub fn solver(&self) -> &SolverSpec {
        &self.spec
    }

    /// Number of satisfiability checks issued so far.
    pub fn queries(&self) -> usize {
        self.queries
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Queries stop at `deadline` even when the per-query timeout is longer.
    pub fn set_deadline(&mut self, deadline: Option<Instant>) {
        self.deadline = deadline;
    }

    pub fn is_declared(&self, symbol: &str) -> bool {
        self.symbols.contains_key(symbol)
    }

    /// Declares a constant unless it already exists with the same sort.
    pub fn declare(&mut self, symbol: &str, ty: Type) -> Result<(), SmtError> {
        let sort = sort_name(ty);
        if let Some((s, _)) = self.symbols.get(symbol) {
            return if *s == sort { Ok(()) } else { Err(SmtError::Redeclared(symbol.to_owned())) };
        }
        self.command(&format!("(declare-fun {symbol} () {sort})"))?;
        self.symbols.insert(symbol.to_owned(), (sort, self.depth));
        Ok(())
    }

    /// Creates a fresh activation literal; `payload` documents what it guards.
    pub fn new_actlit(&mut self, payload: impl Into<String>) -> Result<ActivationLiteral, SmtError> {
        let name: Arc<str> = format!("%act{}", self.next_lit).into();
        self.next_lit += 1;
        self.command(&format!("(declare-fun {name} () Bool)"))?;
        self.symbols.insert(name.to_string(), ("Bool", self.depth));
        self.lits.insert(name.clone());
        Ok(ActivationLiteral { name, payload: payload.into() })
    }

    /// Asserts `lit ⇒ f` in the current scope.
    pub fn assert_guarded(&mut self, lit: &ActivationLiteral, f: &Formula) -> Result<(), SmtError> {
        self.assert(&Formula::implies(lit.formula(), f.clone()))
    }

    pub fn assert(&mut self, f: &Formula) -> Result<(), SmtError> {
        let mut cmd = String::from("(assert ");
        f.write_smt(&mut cmd);
        cmd.push(')');
        self.command(&cmd).map(|_| ())
    }

    pub fn push(&mut self) -> Result<(), SmtError> {
        self.command("(push 1)")?;
        self.depth += 1;
        Ok(())
    }

    pub fn pop(&mut self) -> Result<(), SmtError> {
        if self.depth == 0 {
            return Err(SmtError::Protocol("pop at depth 0".into()));
        }
        self.command("(pop 1)")?;
        let d = self.depth;
        self.symbols.retain(|_, (_, level)| *level < d);
        let symbols = &self.symbols;
        self.lits.retain(|l| symbols.contains_key(l.as_ref()));
        self.depth -= 1;
        Ok(())
    }

    /// Checks `F` with every literal of `assumptions` held true. `F` is
    /// asserted in a temporary scope, so the session is unchanged afterwards.
    /// On unsat the core is kept for [`Session::unsat_core`].
    pub fn check_sat(&mut self, assumptions: &[ActivationLiteral], f: &Formula) -> Result<SatResult, SmtError> {
        let names: Vec<Arc<str>> = assumptions.iter().map(|a| a.name.clone()).collect();
        self.check_names(&names, f)
    }

    fn check_names(&mut self, names: &[Arc<str>], f: &Formula) -> Result<SatResult, SmtError> {
        self.last_core = None;
        self.push()?;
        let result = self.check_in_scope(names, f);
        if self.dead {
            return result;
        }
        self.pop()?;
        result
    }

    fn check_in_scope(&mut self, names: &[Arc<str>], f: &Formula) -> Result<SatResult, SmtError> {
        if *f != Formula::Bool(true) {
            self.assert(f)?;
        }
        let cmd = format!("(check-sat-assuming ({}))", names.iter().map(|n| n.as_ref()).collect::<Vec<_>>().join(" "));
        self.queries += 1;
        let answer = match self.query(&cmd) {
            Err(SmtError::Dead) if self.dead => return Ok(SatResult::Unknown("timeout".into())),
            other => other?,
        };
        match answer.atom() {
            Some("unsat") => {
                let core = self.command("(get-unsat-assumptions)")?;
                let list = core.list().ok_or_else(|| SmtError::Protocol(core.to_string()))?;
                let mut out = Vec::new();
                for x in list {
                    let n = x.atom().ok_or_else(|| SmtError::Protocol(core.to_string()))?;
                    let n = n.trim_matches('|');
                    match names.iter().find(|m| m.as_ref() == n) {
                        Some(m) => out.push(m.clone()),
                        None => return Err(SmtError::Protocol(format!("core names unknown literal `{n}`"))),
                    }
                }
                self.last_core = Some(out);
                Ok(SatResult::Unsat)
            }
            Some("sat") => Ok(SatResult::Sat(self.model()?)),
            Some("unknown") => {
                let why = self.command("(get-info :reason-unknown)").ok();
                let reason = why
                    .as_ref()
                    .and_then(|w| w.list().and_then(|l| l.get(1)).map(|r| r.to_string().trim_matches('"').to_owned()))
                    .unwrap_or_else(|| "unknown".into());
                Ok(SatResult::Unknown(reason))
            }
            _ => Err(SmtError::Protocol(answer.to_string())),
        }
    }

    fn model(&mut self) -> Result<Model, SmtError> {
        let wanted: Vec<(String, &'static str)> = self
            .symbols
            .iter()
            .filter(|(n, _)| !self.lits.contains(n.as_str()) && !n.starts_with("%probe"))
            .map(|(n, (s, _))| (n.clone(), *s))
            .collect();
        let mut model = Model::default();
        if wanted.is_empty() {
            return Ok(model);
        }
        let names: Vec<&str> = wanted.iter().map(|(n, _)| n.as_str()).collect();
        let resp = self.command(&format!("(get-value ({}))", names.join(" ")))?;
        let pairs = resp.list().ok_or_else(|| SmtError::Protocol(resp.to_string()))?;
        for (pair, (name, sort)) in pairs.iter().zip(&wanted) {
            let v = pair
                .list()
                .and_then(|p| p.get(1))
                .and_then(|v| parse_value(v, sort))
                .ok_or_else(|| SmtError::Protocol(format!("bad value for {name}: {pair}")))?;
            model.0.insert(name.clone(), v);
        }
        Ok(model)
    }

    /// Literals of the unsat core from the previous check. Not necessarily
    /// minimal.
    pub fn unsat_core(&self) -> Result<Vec<ActivationLiteral>, SmtError> {
        let core = self.last_core.as_ref().ok_or(SmtError::NoCore)?;
        Ok(core.iter().map(|n| ActivationLiteral { name: n.clone(), payload: String::new() }).collect())
    }

    /// Deletion-based minimization: each literal is tried once, in order,
    /// and dropped when the query stays unsat without it.
    pub fn minimize_core(
        &mut self,
        core: &[ActivationLiteral],
        f: &Formula,
    ) -> Result<Vec<ActivationLiteral>, SmtError> {
        let mut keep: Vec<ActivationLiteral> = core.to_vec();
        let mut i = 0;
        while i < keep.len() {
            let mut trial = keep.clone();
            trial.remove(i);
            match self.check_sat(&trial, f)? {
                SatResult::Unsat => keep = trial,
                SatResult::Sat(_) => i += 1,
                SatResult::Unknown(why) => return Err(SmtError::Inconclusive(why)),
            }
        }
        debug_assert!(self.check_sat(&keep, f).map(|r| r.is_unsat()).unwrap_or(true));
        Ok(keep)
    }

    /// Sends a command and waits for its single response.
    fn command(&mut self, cmd: &str) -> Result<Sexp, SmtError> {
        let r = self.query(cmd)?;
        if let Some(xs) = r.list() {
            if xs.first().and_then(Sexp::atom) == Some("error") {
                let msg = xs.get(1).map(|m| m.to_string().trim_matches('"').to_owned()).unwrap_or_default();
                return Err(SmtError::Solver(msg));
            }
        }
        Ok(r)
    }

    fn query(&mut self, cmd: &str) -> Result<Sexp, SmtError> {
        if self.dead {
            return Err(SmtError::Dead);
        }
        if let Some(t) = self.transcript.as_mut() {
            writeln!(t, "{cmd}")?;
        }
        writeln!(self.stdin, "{cmd}").map_err(|_| SmtError::Crashed)?;
        self.stdin.flush().map_err(|_| SmtError::Crashed)?;
        let mut limit = self.timeout;
        if let Some(d) = self.deadline {
            limit = limit.min(d.saturating_duration_since(Instant::now()));
        }
        let r = match self.responses.recv_timeout(limit) {
            Ok(Ok(r)) => r,
            Ok(Err(e)) => return Err(SmtError::Protocol(e.to_string())),
            Err(RecvTimeoutError::Timeout) => {
                self.dead = true;
                let _ = self.child.kill();
                if let Some(t) = self.transcript.as_mut() {
                    let _ = writeln!(t, "; timeout");
                }
                return Err(SmtError::Dead);
            }
            Err(RecvTimeoutError::Disconnected) => return Err(SmtError::Crashed),
        };
        if let Some(t) = self.transcript.as_mut() {
            if r.atom() != Some("success") {
                for line in r.to_string().lines() {
                    writeln!(t, "; {line}")?;
                }
            }
        }
        Ok(r)
    }

    /// Whether a timeout has killed the solver.
    pub fn is_dead(&self) -> bool {
        self.dead
    }
}

impl Drop for Session {
    fn drop(&mut self) {
        if !self.dead {
            let _ = writeln!(self.stdin, "(exit)");
            let _ = self.stdin.flush();
        }
        if let Some(t) = self.transcript.as_mut() {
            let _ = t.flush();
        }
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

fn create_transcript(dir: &Path) -> Result<File, SmtError> {
    std::fs::create_dir_all(dir)?;
    loop {
        let n = SESSION_COUNTER.fetch_add(1, Ordering::Relaxed);
        let path = dir.join(format!("session-{n}.smt2"));
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(f) => return Ok(f),
            Err(e) if e.kind() == io::ErrorKind::AlreadyExists => continue,
            Err(e) => return Err(e.into()),
        }
    }
}

/// Reads a solver value of the given sort: `true`, `12`, `(- 3)`, `0.5`,
/// `(/ 1 3)` and nestings of these.
fn parse_value(v: &Sexp, sort: &str) -> Option<Value> {
    match sort {
        "Bool" => match v.atom()? {
            "true" => Some(Value::Bool(true)),
            "false" => Some(Value::Bool(false)),
            _ => None,
        },
        "Int" => {
            let r = parse_number(v)?;
            r.is_integer().then(|| Value::Int(r.to_integer()))
        }
        "Real" => parse_number(v).map(Value::Real),
        _ => None,
    }
}

fn parse_number(v: &Sexp) -> Option<BigRational> {
    match v {
        Sexp::Atom(a) => match a.split_once('.') {
            Some((int, frac)) => {
                let digits = BigInt::from_str(&format!("{int}{frac}")).ok()?;
                let scale = BigInt::from(10).pow(frac.len() as u32);
                Some(BigRational::new(digits, scale))
            }
            None => BigInt::from_str(a).ok().map(BigRational::from_integer),
        },
        Sexp::List(xs) => match (xs.first()?.atom()?, xs.len()) {
            ("-", 2) => parse_number(&xs[1]).map(|x| -x),
            ("-", 3) => Some(parse_number(&xs[1])? - parse_number(&xs[2])?),
            ("/", 3) => {
                let d = parse_number(&xs[2])?;
                (d != BigRational::from_integer(0.into())).then_some(())?;
                Some(parse_number(&xs[1])? / d)
            }
            ("to_real", 2) => parse_number(&xs[1]),
            _ => None,
        },
    }
}
