mod common;

use std::collections::BTreeSet;

use ivc_kind::analysis::{core_set, gadget, jaccard, overall_dissimilarity, pairwise_stats, GADGET_BASE, GADGET_LINK};
use ivc_kind::engine::ProverConfig;
use ivc_kind::ivc::{check_ivc, is_minimal, run, Algorithm, IvcConfig, IvcOutcome, Verdict};
use ivc_kind::model::LoadedModel;
use num_rational::BigRational;
use proptest::prelude::*;

fn load(name: &str) -> LoadedModel {
    LoadedModel::from_file(&common::model_path(name)).unwrap()
}

#[test]
fn gadget_over_invalid_base_is_minimal() {
    let g = gadget(&load("counter_bound.lus").ts).unwrap();
    for cfg in common::solvers() {
        let p = ProverConfig::new(cfg);
        assert_eq!(is_minimal(&p, &g.ts, &g.property, &g.core).unwrap(), Verdict::Yes);
        assert_eq!(check_ivc(&p, &g.ts, &g.property, &[GADGET_BASE]).unwrap(), Verdict::No);
    }
}

#[test]
fn gadget_over_valid_base_needs_only_the_base_conjunct() {
    for base in ["counter.lus", "filter.lus"] {
        let g = gadget(&load(base).ts).unwrap();
        for cfg in common::solvers() {
            let p = ProverConfig::new(cfg.clone());
            assert_eq!(check_ivc(&p, &g.ts, &g.property, &[GADGET_BASE]).unwrap(), Verdict::Yes, "{base}");
            assert_eq!(check_ivc(&p, &g.ts, &g.property, &[GADGET_LINK]).unwrap(), Verdict::No, "{base}");
            assert_eq!(is_minimal(&p, &g.ts, &g.property, &g.core).unwrap(), Verdict::No, "{base}");
            let out = run(&IvcConfig::new(p), &g.ts, &g.property, Algorithm::Ucbf).unwrap();
            let IvcOutcome::Core { ivc, .. } = out else { panic!("{base}: {out:?}") };
            assert_eq!(ivc.core, [GADGET_BASE]);
        }
    }
}

fn small_set() -> impl Strategy<Value = BTreeSet<u8>> {
    proptest::collection::btree_set(0u8..8, 0..6)
}

/// Reference Jaccard distance in floating point.
fn jaccard_f64(a: &BTreeSet<u8>, b: &BTreeSet<u8>) -> f64 {
    let union: BTreeSet<_> = a.union(b).collect();
    if union.is_empty() {
        return 0.0;
    }
    1.0 - a.intersection(b).count() as f64 / union.len() as f64
}

fn to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn jaccard_is_a_metric(a in small_set(), b in small_set(), c in small_set()) {
        let ab = jaccard(&a, &b);
        prop_assert!((to_f64(&ab) - jaccard_f64(&a, &b)).abs() < 1e-12);
        prop_assert_eq!(&ab, &jaccard(&b, &a));
        prop_assert!(ab >= BigRational::from_integer(0.into()) && ab <= BigRational::from_integer(1.into()));
        prop_assert_eq!(ab == BigRational::from_integer(0.into()), a == b);
        prop_assert!(jaccard(&a, &c) <= &ab + jaccard(&b, &c));
    }

    #[test]
    fn core_set_bounds(cores in proptest::collection::vec(small_set(), 1..6)) {
        let c = core_set(&cores);
        for s in &cores {
            prop_assert!(c.is_subset(s));
            // when C ⊆ S the distance is 1 - |C|/|S|
            if !s.is_empty() {
                let expect = BigRational::new(((s.len() - c.len()) as i64).into(), (s.len() as i64).into());
                prop_assert_eq!(jaccard(s, &c), expect);
            }
        }
        let d = overall_dissimilarity(&cores);
        prop_assert!(d >= BigRational::from_integer(0.into()) && d <= BigRational::from_integer(1.into()));
        if let Some(st) = pairwise_stats(&cores) {
            prop_assert_eq!(st.count, cores.len() * (cores.len() - 1) / 2);
            prop_assert!(st.min <= st.mean && st.mean <= st.max);
        }
    }
}
