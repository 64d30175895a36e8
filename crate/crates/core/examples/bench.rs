//! A small matrix over three models written to a temporary directory,
//! including one that does not parse.

use std::fs;

use ivc_kind::bench::{run_matrix, summarize, BenchConfig, SolverEntry};
use ivc_kind::ivc::Algorithm;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let corpus = dir.path().join("corpus");
    fs::create_dir(&corpus)?;
    let models = concat!(env!("CARGO_MANIFEST_DIR"), "/models");
    for name in ["filter.lus", "counter_bound.lus"] {
        fs::copy(format!("{models}/{name}"), corpus.join(name))?;
    }
    fs::write(corpus.join("broken.lus"), "node broken( returns")?;

    let mut cfg = BenchConfig::new(&corpus, dir.path().join("out"));
    cfg.solvers = vec![SolverEntry::Preset("yices".into())];
    cfg.algorithms = vec![Algorithm::Uc, Algorithm::Ucbf];
    cfg.timeout_secs = 10.0;
    cfg.jobs = 2;
    let records = run_matrix(&cfg)?;
    for r in &records {
        println!("{:<14} {:<5} {:?} {:?}", r.model, r.algorithm.name(), r.status, r.core);
    }
    print!("\n{}", summarize(&records).to_csv());
    Ok(())
}
