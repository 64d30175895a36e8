//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits non-zero if any fails.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use ivc_kind::analysis::{
    core_set, gadget, jaccard, overall_dissimilarity, overhead, pairwise_stats, RunRecord, RunStatus, GADGET_BASE,
};
use ivc_kind::bench::{load_records, run_matrix, summarize, write_summary, BenchConfig, SolverEntry};
use ivc_kind::engine::{guard, ind_query, prove, ProveOutcome, ProverConfig};
use ivc_kind::ivc::{
    check_ivc, is_minimal, minimize_k, reduce_invariants, run, Algorithm, IvcConfig, IvcOutcome, Verdict,
};
use ivc_kind::model::LoadedModel;
use ivc_kind::ts::{Cmp, Formula, Step};
use num_rational::BigRational;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Check = Result<String, String>;
type Criterion = fn() -> Check;
type Triple = (LoadedModel, Vec<String>, BTreeSet<String>);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    };
}

fn load(name: &str) -> LoadedModel {
    LoadedModel::from_file(&common::model_path(name)).unwrap()
}

fn yices() -> ProverConfig {
    ProverConfig::new(common::yices())
}

fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn set(xs: &[&'static str]) -> BTreeSet<&'static str> {
    xs.iter().copied().collect()
}

fn jobs() -> usize {
    std::thread::available_parallelism().map_or(4, |n| n.get()).min(8)
}

/// Bench records for the whole corpus under both solvers and all algorithms.
fn corpus_records() -> &'static Result<Vec<RunRecord>, String> {
    static RECORDS: OnceLock<Result<Vec<RunRecord>, String>> = OnceLock::new();
    RECORDS.get_or_init(|| {
        let out = tempfile::tempdir().map_err(|e| e.to_string())?;
        let mut cfg = BenchConfig::new(common::models_dir(), out.path());
        cfg.solvers = vec![SolverEntry::Preset("z3".into()), SolverEntry::Preset("yices".into())];
        cfg.timeout_secs = 30.0;
        cfg.jobs = jobs();
        run_matrix(&cfg).map_err(|e| e.to_string())
    })
}

fn records() -> Result<&'static [RunRecord], String> {
    corpus_records().as_deref().map_err(|e| format!("bench failed: {e}"))
}

fn find<'a>(rs: &'a [RunRecord], model: &str, solver: &str, alg: Algorithm) -> Option<&'a RunRecord> {
    rs.iter().find(|r| r.model == model && r.solver == solver && r.algorithm == alg)
}

fn core_of(cfg: &ProverConfig, m: &LoadedModel, alg: Algorithm) -> Result<Vec<String>, String> {
    match run(&IvcConfig::new(cfg.clone()), &m.ts, m.property().unwrap(), alg) {
        Ok(IvcOutcome::Core { ivc, .. }) => Ok(ivc.core),
        other => Err(format!("{} {alg}: {other:?}", m.name)),
    }
}

fn criterion_1() -> Check {
    let m = load("filter.lus");
    for session in common::solvers() {
        let cfg = ProverConfig::new(session.clone());
        for alg in Algorithm::ALL {
            let start = Instant::now();
            let core = core_of(&cfg, &m, alg)?;
            ensure!(core == ["b", "y"], "{} {alg} gave {core:?}", session.solver.name);
            ensure!(start.elapsed() < Duration::from_secs(5), "{alg} took {:?}", start.elapsed());
        }
    }
    Ok("uc, bf and ucbf give {b, y} under z3 and yices".into())
}

fn criterion_2() -> Check {
    let m = load("toy.lus");
    let mut seen = BTreeSet::new();
    for session in common::solvers() {
        let cfg = ProverConfig::new(session);
        for alg in Algorithm::ALL {
            let core = core_of(&cfg, &m, alg)?;
            ensure!(core.len() == 1, "{alg} gave {core:?}");
            ensure!(core_of(&cfg, &m, alg)? == core, "{alg} is not deterministic");
            seen.insert(core[0].clone());
        }
    }
    ensure!(seen.len() == 2, "only saw {seen:?}");
    for s in &seen {
        ensure!(check_ivc(&yices(), &m.ts, "ok", &[s]).map_err(|e| e.to_string())? == Verdict::Yes, "{{{s}}} rejected");
    }
    Ok(format!("singletons {seen:?} both pass check_ivc"))
}

/// Validity of every subset of the candidates, by bitmask.
fn power_set(m: &LoadedModel, cands: &[String]) -> Result<Vec<bool>, String> {
    let prop = m.property().unwrap();
    (0u32..1 << cands.len())
        .map(|mask| {
            let subset: Vec<&String> = (0..cands.len()).filter(|i| mask & (1 << i) != 0).map(|i| &cands[i]).collect();
            let ts = m.ts.restrict_to_core(&subset).map_err(|e| e.to_string())?;
            match prove(&yices(), &ts, prop).map_err(|e| e.to_string())? {
                ProveOutcome::Proved(_) => Ok(true),
                ProveOutcome::Falsified(_) => Ok(false),
                ProveOutcome::Unknown(why) => Err(format!("{}: {subset:?} undecided: {why}", m.name)),
            }
        })
        .collect()
}

fn criterion_3() -> Check {
    let start = Instant::now();
    let rs = records()?;
    let mut names: Vec<&str> =
        rs.iter().filter(|r| r.status == RunStatus::Proved && r.candidates <= 12).map(|r| r.model.as_str()).collect();
    names.sort();
    names.dedup();
    let checked: Vec<Result<usize, String>> = std::thread::scope(|s| {
        let handles: Vec<_> = names
            .iter()
            .map(|name| {
                s.spawn(move || -> Result<usize, String> {
                    let m = load(&format!("{name}.lus"));
                    let cands = m.ts.candidates();
                    let valid = power_set(&m, &cands)?;
                    let mask = |core: &[String]| -> u32 {
                        core.iter().map(|c| 1 << cands.iter().position(|x| x == c).unwrap()).sum()
                    };
                    let minimal = |bits: u32| {
                        valid[bits as usize]
                            && (0..cands.len()).all(|i| bits & (1 << i) == 0 || !valid[(bits & !(1 << i)) as usize])
                    };
                    let mut n = 0;
                    for r in rs.iter().filter(|r| r.model == *name && r.algorithm != Algorithm::Uc) {
                        let core = r.core.as_ref().ok_or_else(|| format!("{name} {}: no core", r.configuration()))?;
                        let bits = mask(core);
                        ensure!(minimal(bits), "{name} {}: {core:?} is not a minimal core", r.configuration());
                        ensure!(r.minimal == Some(true), "{name} {}: not reported minimal", r.configuration());
                        n += 1;
                    }
                    Ok(n)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap_or_else(|_| Err("oracle panicked".into()))).collect()
    });
    let mut cores = 0;
    for c in checked {
        cores += c?;
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(600), "took {elapsed:?}");
    Ok(format!(
        "{cores} bf/ucbf cores over {} models match the power-set oracle in {:.1}s",
        names.len(),
        elapsed.as_secs_f64()
    ))
}

fn criterion_4() -> Check {
    let rs = records()?;
    let mut compared = 0;
    let mut uc_above = BTreeSet::new();
    let mut slice_above = BTreeSet::new();
    for uc in rs.iter().filter(|r| r.algorithm == Algorithm::Uc) {
        let Some(ucbf) = find(rs, &uc.model, &uc.solver, Algorithm::Ucbf) else { continue };
        let (Some(u), Some(b), Some(slice)) = (&uc.core, &ucbf.core, &uc.slice) else { continue };
        compared += 1;
        let slice_set: BTreeSet<&String> = slice.iter().collect();
        for rec in [uc, ucbf] {
            let core = rec.core.as_ref().unwrap();
            ensure!(
                core.iter().all(|c| slice_set.contains(c)),
                "{} {}: core outside slice",
                rec.model,
                rec.configuration()
            );
        }
        ensure!(
            b.len() <= u.len() && u.len() <= slice.len(),
            "{} {}: {} / {} / {}",
            uc.model,
            uc.solver,
            b.len(),
            u.len(),
            slice.len()
        );
        if u.len() > b.len() {
            uc_above.insert(uc.model.as_str());
        }
        if slice.len() > u.len() {
            slice_above.insert(uc.model.as_str());
        }
    }
    ensure!(compared > 0, "nothing to compare");
    ensure!(!uc_above.is_empty(), "no model with |UC| > |UCBF|");
    ensure!(slice_above.len() >= 3, "only {slice_above:?} with |slice| > |UC|");
    Ok(format!(
        "ordering holds on {compared}/{compared} runs; UC > UCBF on {uc_above:?}; slice > UC on {} models",
        slice_above.len()
    ))
}

fn ge0(v: &str) -> Formula {
    Formula::cmp(Cmp::Ge, Formula::var(v, Step::Cur), Formula::int(0))
}

/// The least k in `1..=max` at which `p` is k-inductive, by direct queries.
fn least_k(m: &LoadedModel, p: &Formula, max: u32) -> Option<u32> {
    (1..=max).find(|&k| common::valid(&common::yices(), &m.ts, &ind_query(&m.ts, p, p, k).unwrap(), k))
}

fn criterion_5() -> Check {
    let counter = load("counter.lus");
    let p = counter.ts.property("ok").unwrap().clone();
    let strengthened = Formula::and([p.clone(), guard(&ge0("c"))]);
    let cfg = common::yices();
    let one = minimize_k(&cfg, &counter.ts, &strengthened, 5).map_err(|e| e.to_string())?;
    let two = minimize_k(&cfg, &counter.ts, &p, 5).map_err(|e| e.to_string())?;
    ensure!((one, two) == (1, 2), "minimize_k gave {one} and {two}");
    ensure!(least_k(&counter, &strengthened, 5) == Some(1) && least_k(&counter, &p, 5) == Some(2), "oracle disagrees");

    let empty = reduce_invariants(&cfg, &counter.ts, &[], ("ok", &p), 2).map_err(|e| e.to_string())?;
    ensure!(
        empty.len() == 1 && empty[0].0 == "ok",
        "Q = {{}} gave {:?}",
        empty.iter().map(|e| &e.0).collect::<Vec<_>>()
    );

    let chain = load("chain.lus");
    let p = chain.ts.property("ok").unwrap().clone();
    let q: Vec<(String, Formula)> = vec![
        ("q2".into(), guard(&Formula::and([ge0("y"), ge0("z")]))),
        ("q1".into(), guard(&ge0("y"))),
        ("qx".into(), guard(&ge0("x"))),
    ];
    let inductive: Vec<BTreeSet<&str>> = (0u32..1 << q.len())
        .filter_map(|mask| {
            let chosen: Vec<&(String, Formula)> =
                (0..q.len()).filter(|i| mask & (1 << i) != 0).map(|i| &q[i]).collect();
            let all = Formula::and(std::iter::once(p.clone()).chain(chosen.iter().map(|(_, f)| f.clone())));
            common::valid(&cfg, &chain.ts, &ind_query(&chain.ts, &all, &all, 1).unwrap(), 1)
                .then(|| chosen.iter().map(|(n, _)| n.as_str()).collect())
        })
        .collect();
    let got = reduce_invariants(&cfg, &chain.ts, &q, ("ok", &p), 1).map_err(|e| e.to_string())?;
    let names: Vec<&str> = got.iter().map(|(n, _)| n.as_str()).collect();
    ensure!(names == ["ok", "q1", "q2"], "chain gave {names:?}");
    let picked: BTreeSet<&str> = names[1..].iter().copied().collect();
    ensure!(inductive.contains(&picked), "{picked:?} is not inductive per the oracle");
    let smallest = inductive.iter().map(BTreeSet::len).min().unwrap_or(usize::MAX);
    ensure!(smallest < picked.len(), "oracle finds nothing smaller than {picked:?}");
    Ok(format!(
        "minimize_k 1 and 2; Q = {{}} gives {{P}}; chain gives {{P, Q1, Q2}} while the {}-subset oracle has a size-{smallest} set",
        1 << q.len()
    ))
}

fn criterion_6() -> Check {
    let rs = records()?;
    let pool: Vec<&RunRecord> = rs.iter().filter(|r| r.solver == "yices" && r.core.is_some()).collect();
    ensure!(!pool.is_empty(), "no cores");
    let mut rng = StdRng::seed_from_u64(0x1e33a1);
    let mut triples = Vec::new();
    for _ in 0..200 {
        let rec = pool[rng.gen_range(0..pool.len())];
        let m = load(&format!("{}.lus", rec.model));
        let core = rec.core.clone().unwrap();
        let mut superset: BTreeSet<String> = core.iter().cloned().collect();
        for c in m.ts.candidates() {
            if rng.gen_bool(0.5) {
                superset.insert(c);
            }
        }
        triples.push((m, core, superset));
    }
    let chunks: Vec<&[Triple]> = triples.chunks(200 / jobs() + 1).collect();
    let failures: Vec<String> = std::thread::scope(|s| {
        let handles: Vec<_> = chunks
            .iter()
            .map(|chunk| {
                s.spawn(move || {
                    let mut bad = Vec::new();
                    for (m, core, superset) in chunk.iter() {
                        let sup: Vec<&String> = superset.iter().collect();
                        match check_ivc(&yices(), &m.ts, m.property().unwrap(), &sup) {
                            Ok(Verdict::Yes) => {}
                            other => bad.push(format!("{}: {core:?} ⊆ {sup:?} gave {other:?}", m.name)),
                        }
                    }
                    bad
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().unwrap_or_else(|_| vec!["panicked".into()])).collect()
    });
    ensure!(failures.is_empty(), "{}", failures.join("; "));
    let models: BTreeSet<&str> = triples.iter().map(|(m, _, _)| m.name.as_str()).collect();
    Ok(format!("200 supersets of valid cores over {} models all pass check_ivc", models.len()))
}

/// Jaccard distance from element counts over a fixed universe.
fn jaccard_oracle(a: u8, b: u8) -> BigRational {
    let (mut inter, mut union) = (0, 0);
    for bit in 0..8 {
        let (x, y) = (a >> bit & 1 == 1, b >> bit & 1 == 1);
        inter += (x && y) as i64;
        union += (x || y) as i64;
    }
    if union == 0 {
        r(0, 1)
    } else {
        r(union - inter, union)
    }
}

fn bits(mask: u8) -> BTreeSet<u8> {
    (0..8).filter(|b| mask >> b & 1 == 1).collect()
}

fn criterion_7() -> Check {
    let ab = set(&["a", "b"]);
    ensure!(jaccard(&ab, &ab) == r(0, 1), "identity");
    ensure!(jaccard(&set(&["a"]), &set(&["b", "c"])) == r(1, 1), "disjoint");
    ensure!(jaccard(&ab, &set(&["b", "c"])) == r(2, 3), "{{a,b}} vs {{b,c}}");

    let st = pairwise_stats(&vec![ab.clone(); 13]).ok_or("13 cores")?;
    ensure!(st.count == 78 && st.max == r(0, 1) && st.mean == r(0, 1), "13 identical cores");
    let st = pairwise_stats(&[set(&["a"]), set(&["a"]), set(&["b"])]).ok_or("3 cores")?;
    ensure!(st.count == 3 && st.mean == r(2, 3) && st.min == r(0, 1) && st.max == r(1, 1), "{{a}},{{a}},{{b}}");
    ensure!(st.variance == r(2, 9), "variance {}", st.variance);
    let st = pairwise_stats(&[ab.clone(), set(&["a"])]).ok_or("2 cores")?;
    ensure!(st.min == st.max && st.max == st.mean && st.stdev == 0.0, "2 cores");
    ensure!(pairwise_stats(std::slice::from_ref(&ab)).is_none(), "n < 2");

    ensure!(core_set(&[ab.clone(), set(&["a", "c"])]) == set(&["a"]), "core set");
    ensure!(core_set(&[ab.clone(), ab.clone()]) == ab, "identical core set");
    ensure!(core_set(&[set(&["a"]), set(&["b"])]).is_empty(), "disjoint core set");
    ensure!(overall_dissimilarity(&[ab.clone(), ab.clone()]) == r(0, 1), "identical dissimilarity");
    ensure!(overall_dissimilarity(&[ab.clone(), set(&["a"])]) == r(1, 4), "{{a,b}},{{a}}");
    ensure!(overall_dissimilarity(std::slice::from_ref(&ab)) == r(0, 1), "n = 1");

    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..1000 {
        let (a, b, c) = (rng.gen::<u8>(), rng.gen::<u8>(), rng.gen::<u8>());
        let (sa, sb, sc) = (bits(a), bits(b), bits(c));
        let d = jaccard(&sa, &sb);
        ensure!(d == jaccard_oracle(a, b), "{sa:?} {sb:?}: {d}");
        ensure!(d == jaccard(&sb, &sa), "asymmetric on {sa:?} {sb:?}");
        ensure!((d == r(0, 1)) == (a == b), "identity on {sa:?} {sb:?}");
        ensure!(jaccard(&sa, &sc) <= &d + jaccard(&sb, &sc), "triangle on {sa:?} {sb:?} {sc:?}");
    }
    Ok("tabulated examples exact; symmetry, identity and triangle inequality on 1000 random triples".into())
}

fn criterion_8() -> Check {
    ensure!(overhead(1000.0, 4000.0) == Some(25.0), "25%");
    ensure!(overhead(3000.0, 1000.0) == Some(300.0), "300%");
    ensure!(overhead(0.0, 10.0) == Some(0.0), "0%");
    ensure!(overhead(5.0, 0.0).is_none(), "zero baseline");
    let rs = records()?;
    let mut models = BTreeSet::new();
    let mut above = 0;
    let mut proved = 0;
    for rec in rs.iter().filter(|r| r.status == RunStatus::Proved) {
        proved += 1;
        models.insert(rec.model.as_str());
        ensure!(rec.proof_ms > 0.0, "{} {}: zero baseline", rec.model, rec.configuration());
        let expect = 100.0 * rec.ivc_ms / rec.proof_ms;
        let got = rec.overhead_pct.ok_or_else(|| format!("{} {}: no overhead", rec.model, rec.configuration()))?;
        ensure!(
            (got - expect).abs() <= 1e-9 * expect.max(1.0),
            "{} {}: {got} vs {expect}",
            rec.model,
            rec.configuration()
        );
        if got > 100.0 {
            above += 1;
        }
    }
    for rec in rs.iter().filter(|r| r.status != RunStatus::Proved) {
        ensure!(rec.overhead_pct.is_none(), "{} {}: overhead without a proof", rec.model, rec.configuration());
    }
    Ok(format!("{proved} proved runs over {} models match 100 x ivc/proof; {above} above 100%", models.len()))
}

fn criterion_9() -> Check {
    let p = yices();
    let invalid = gadget(&load("counter_bound.lus").ts).map_err(|e| e.to_string())?;
    let v = is_minimal(&p, &invalid.ts, &invalid.property, &invalid.core).map_err(|e| e.to_string())?;
    ensure!(v == Verdict::Yes, "invalid base: is_minimal = {v:?}");
    for base in ["counter.lus", "filter.lus"] {
        let valid = gadget(&load(base).ts).map_err(|e| e.to_string())?;
        ensure!(valid.core[1] == GADGET_BASE, "second conjunct is {}", valid.core[1]);
        let v = check_ivc(&p, &valid.ts, &valid.property, &[&valid.core[1]]).map_err(|e| e.to_string())?;
        ensure!(v == Verdict::Yes, "{base}: second conjunct alone gives {v:?}");
    }
    Ok("invalid base: two-conjunct core minimal; valid base: second conjunct alone is an IVC".into())
}

fn criterion_10() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let corpus = dir.path().join("corpus");
    std::fs::create_dir(&corpus).map_err(|e| e.to_string())?;
    std::fs::write(corpus.join("broken.lus"), "node broken(x: int) returns (y: int); let y = x +; tel")
        .map_err(|e| e.to_string())?;
    for (name, to) in [("counter_bound.lus", "falsified.lus"), ("parity.lus", "slow.lus")] {
        std::fs::copy(common::model_path(name), corpus.join(to)).map_err(|e| e.to_string())?;
    }
    let out = dir.path().join("out");
    let mut cfg = BenchConfig::new(&corpus, &out);
    cfg.solvers = vec![SolverEntry::Preset("yices".into())];
    cfg.timeout_secs = 1.0;
    cfg.max_k = 100_000;
    cfg.jobs = 3;
    let rs = run_matrix(&cfg).map_err(|e| e.to_string())?;
    ensure!(rs.len() == 9, "{} records", rs.len());
    let expect =
        BTreeMap::from([("broken", RunStatus::Error), ("falsified", RunStatus::Cex), ("slow", RunStatus::Unknown)]);
    for rec in &rs {
        ensure!(expect[rec.model.as_str()] == rec.status, "{} {}: {:?}", rec.model, rec.algorithm, rec.status);
        ensure!(rec.core.is_none() && rec.overhead_pct.is_none(), "{} {}: has a core", rec.model, rec.algorithm);
    }
    let summary = summarize(&rs);
    write_summary(&out, &summary).map_err(|e| e.to_string())?;
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
    ensure!(json["records"] == 9, "summary counts {}", json["records"]);
    let csv = std::fs::read_to_string(out.join("summary.csv")).map_err(|e| e.to_string())?;
    ensure!(csv.starts_with("section,group,metric,count,min,max,mean,stdev\n"), "bad summary.csv");
    let reloaded = load_records(&out).map_err(|e| e.to_string())?;
    ensure!(reloaded.len() == 9, "{} records on disk", reloaded.len());
    ensure!(summarize(&reloaded) == summary, "summary differs after reload");
    Ok("error / cex / unknown per record; summary.json and summary.csv written and consistent".into())
}

fn main() {
    let criteria: [(&str, Criterion); 10] = [
        ("filter cores", criterion_1),
        ("toy non-uniqueness", criterion_2),
        ("oracle minimality", criterion_3),
        ("size ordering", criterion_4),
        ("pipeline stages", criterion_5),
        ("monotonicity", criterion_6),
        ("diversity math", criterion_7),
        ("overhead accounting", criterion_8),
        ("reduction gadget", criterion_9),
        ("bench robustness", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail} [{secs:.1}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {why} [{secs:.1}s]", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
