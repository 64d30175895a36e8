mod common;

use ivc_kind::engine::{guard, ind_query, prove, ProverConfig};
use ivc_kind::ivc::{
    check_ivc, is_minimal, minimize_k, reduce_invariants, run, Algorithm, IvcConfig, IvcOutcome, Verdict,
};
use ivc_kind::model::LoadedModel;
use ivc_kind::smt::SessionConfig;
use ivc_kind::ts::{Cmp, Formula, Step};

use common::valid;

fn load(name: &str) -> LoadedModel {
    LoadedModel::from_file(&common::model_path(name)).unwrap()
}

fn core(cfg: &SessionConfig, m: &LoadedModel, alg: Algorithm) -> (Vec<String>, bool) {
    let icfg = IvcConfig::new(ProverConfig::new(cfg.clone()));
    match run(&icfg, &m.ts, m.property().unwrap(), alg).unwrap() {
        IvcOutcome::Core { ivc, .. } => (ivc.core, ivc.minimal),
        other => panic!("{}: {other:?}", m.name),
    }
}

fn ge0(v: &str) -> Formula {
    Formula::cmp(Cmp::Ge, Formula::var(v, Step::Cur), Formula::int(0))
}

#[test]
fn filter_core_drops_a() {
    let m = load("filter.lus");
    for cfg in common::solvers() {
        for alg in Algorithm::ALL {
            let (c, minimal) = core(&cfg, &m, alg);
            assert_eq!(c, ["b", "y"], "{alg} with {}", cfg.solver.name);
            assert_eq!(minimal, alg != Algorithm::Uc);
        }
    }
}

#[test]
fn toy_cores_are_singletons_and_both_valid() {
    let m = load("toy.lus");
    let p = ProverConfig::new(common::z3());
    let mut seen = std::collections::BTreeSet::new();
    for cfg in common::solvers() {
        for alg in Algorithm::ALL {
            let (c, _) = core(&cfg, &m, alg);
            assert_eq!(c.len(), 1, "{alg}");
            assert_eq!(core(&cfg, &m, alg).0, c, "{alg} is not deterministic");
            seen.insert(c[0].clone());
        }
    }
    assert_eq!(seen.len(), 2, "expected both singletons across algorithms");
    for s in ["a", "b"] {
        assert_eq!(check_ivc(&p, &m.ts, "ok", &[s]).unwrap(), Verdict::Yes);
        assert_eq!(is_minimal(&p, &m.ts, "ok", &[s]).unwrap(), Verdict::Yes);
    }
    assert_eq!(check_ivc(&p, &m.ts, "ok", &[] as &[&str]).unwrap(), Verdict::No);
    assert_eq!(is_minimal(&p, &m.ts, "ok", &["a", "b"]).unwrap(), Verdict::No);
}

#[test]
fn uc_keeps_an_equation_only_its_invariants_need() {
    let m = load("redundant.lus");
    for cfg in common::solvers() {
        assert_eq!(core(&cfg, &m, Algorithm::Uc).0, ["a", "w"]);
        assert_eq!(core(&cfg, &m, Algorithm::Ucbf).0, ["a"]);
        assert_eq!(core(&cfg, &m, Algorithm::Bf).0, ["a"]);
    }
}

#[test]
fn parallel_brute_force_matches_sequential() {
    for name in ["filter.lus", "redundant.lus", "chain.lus", "toy.lus"] {
        let m = load(name);
        let mut icfg = IvcConfig::new(ProverConfig::new(common::yices()));
        let prop = m.property().unwrap();
        let seq = run(&icfg, &m.ts, prop, Algorithm::Bf);
        icfg.jobs = 4;
        let par = run(&icfg, &m.ts, prop, Algorithm::Bf);
        let (IvcOutcome::Core { ivc: a, .. }, IvcOutcome::Core { ivc: b, .. }) = (seq.unwrap(), par.unwrap()) else {
            panic!("{name} not proved");
        };
        assert_eq!(a.core, b.core, "{name}");
    }
}

#[test]
fn minimize_k_finds_least_k() {
    for cfg in common::solvers() {
        let counter = load("counter.lus");
        let p = counter.ts.property("ok").unwrap().clone();
        let strengthened = Formula::and([p.clone(), guard(&ge0("c"))]);
        assert_eq!(minimize_k(&cfg, &counter.ts, &strengthened, 5).unwrap(), 1);
        assert_eq!(minimize_k(&cfg, &counter.ts, &p, 5).unwrap(), 2);

        let toggle = load("toggle.lus");
        let p = toggle.ts.property("ok").unwrap().clone();
        assert_eq!(minimize_k(&cfg, &toggle.ts, &p, 2).unwrap(), 2);
        assert_eq!(minimize_k(&cfg, &toggle.ts, &p, 7).unwrap(), 2);
    }
}

#[test]
fn reduce_invariants_with_no_invariants_is_the_property() {
    let m = load("counter.lus");
    let p = m.ts.property("ok").unwrap();
    for cfg in common::solvers() {
        let r = reduce_invariants(&cfg, &m.ts, &[], ("ok", p), 2).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].0, "ok");
    }
}

/// Every subset of `q` whose conjunction with `p` is 1-inductive.
fn inductive_subsets(cfg: &SessionConfig, m: &LoadedModel, p: &Formula, q: &[(String, Formula)]) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << q.len()) {
        let chosen: Vec<&(String, Formula)> = (0..q.len()).filter(|i| mask & (1 << i) != 0).map(|i| &q[i]).collect();
        let all = Formula::and(std::iter::once(p.clone()).chain(chosen.iter().map(|(_, f)| f.clone())));
        if valid(cfg, &m.ts, &ind_query(&m.ts, &all, &all, 1).unwrap(), 1) {
            out.push(chosen.iter().map(|(n, _)| n.clone()).collect());
        }
    }
    out
}

#[test]
fn reduce_invariants_reproduces_the_chain() {
    let m = load("chain.lus");
    let p = m.ts.property("ok").unwrap().clone();
    let q: Vec<(String, Formula)> = vec![
        ("q2".into(), guard(&Formula::and([ge0("y"), ge0("z")]))),
        ("q1".into(), guard(&ge0("y"))),
        ("qx".into(), guard(&ge0("x"))),
    ];
    for cfg in common::solvers() {
        let oracle = inductive_subsets(&cfg, &m, &p, &q);
        let smallest = oracle.iter().map(Vec::len).min().unwrap();
        assert_eq!(smallest, 1);
        assert!(oracle.contains(&vec!["q2".to_string()]));

        let r = reduce_invariants(&cfg, &m.ts, &q, ("ok", &p), 1).unwrap();
        let names: Vec<&str> = r.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(names, ["ok", "q1", "q2"]);
        let picked: Vec<String> = names[1..].iter().map(|s| s.to_string()).collect();
        let mut sorted = picked.clone();
        sorted.sort_by_key(|n| q.iter().position(|(m, _)| m == n));
        assert!(oracle.contains(&sorted), "result must be inductive");
        assert!(picked.len() > smallest, "chain outcome is not minimal");
    }
}

#[test]
fn property_alone_is_not_enough_for_chain() {
    let m = load("chain.lus");
    let p = ProverConfig::new(common::z3());
    let outcome = prove(&p, &m.ts, "ok").unwrap();
    assert!(outcome.is_proved());
    assert_eq!(check_ivc(&p, &m.ts, "ok", &["x", "y", "z"]).unwrap(), Verdict::Yes);
    assert_eq!(check_ivc(&p, &m.ts, "ok", &["x", "y"]).unwrap(), Verdict::No);
}
