//! Diversity and overhead metrics over IVC results, and the reduction
//! gadget used to stress minimality checks.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

mod gadget;
mod report;

pub use gadget::{gadget, Gadget, GadgetError, GADGET_BASE, GADGET_LINK, GADGET_PROPERTY};
pub use report::{diversity_report, ConfigStats, DiversityReport, ModelDiversity, RunRecord, RunStatus};

fn ratio(n: usize, d: usize) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `1 − |A∩B| / |A∪B|`, with two empty sets at distance 0.
pub fn jaccard<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> BigRational {
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    if union == 0 {
        return BigRational::zero();
    }
    ratio(union - inter, union)
}

/// Summary of a list of exact values. The variance is the population
/// variance; `stdev` is its square root, which is generally irrational.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stats {
    pub count: usize,
    #[serde(serialize_with = "report::rational")]
    pub min: BigRational,
    #[serde(serialize_with = "report::rational")]
    pub max: BigRational,
    #[serde(serialize_with = "report::rational")]
    pub mean: BigRational,
    #[serde(serialize_with = "report::rational")]
    pub variance: BigRational,
    pub stdev: f64,
}

impl Stats {
    pub fn of(values: &[BigRational]) -> Option<Stats> {
        let n = values.len();
        if n == 0 {
            return None;
        }
        let count = ratio(n, 1);
        let mean = values.iter().fold(BigRational::zero(), |a, v| a + v) / &count;
        let variance = values.iter().fold(BigRational::zero(), |a, v| {
            let d = v - &mean;
            a + &d * &d
        }) / &count;
        Some(Stats {
            count: n,
            min: values.iter().min().cloned()?,
            max: values.iter().max().cloned()?,
            stdev: variance.to_f64().unwrap_or(f64::NAN).sqrt(),
            mean,
            variance,
        })
    }

    pub fn of_f64(values: &[f64]) -> Option<Stats> {
        let exact: Vec<BigRational> = values.iter().filter_map(|v| BigRational::from_float(*v)).collect();
        Stats::of(&exact)
    }
}

/// Distances over all unordered pairs; `None` with fewer than two cores.
pub fn pairwise_stats<T: Ord>(cores: &[BTreeSet<T>]) -> Option<Stats> {
    Stats::of(&pairwise_distances(cores))
}

pub fn pairwise_distances<T: Ord>(cores: &[BTreeSet<T>]) -> Vec<BigRational> {
    let mut out = Vec::new();
    for i in 0..cores.len() {
        for j in i + 1..cores.len() {
            out.push(jaccard(&cores[i], &cores[j]));
        }
    }
    out
}

/// Intersection of all cores; empty for an empty list.
pub fn core_set<T: Ord + Clone>(cores: &[BTreeSet<T>]) -> BTreeSet<T> {
    let Some((first, rest)) = cores.split_first() else {
        return BTreeSet::new();
    };
    rest.iter().fold(first.clone(), |acc, c| acc.intersection(c).cloned().collect())
}

/// Mean distance of each core to their common core set.
pub fn overall_dissimilarity<T: Ord + Clone>(cores: &[BTreeSet<T>]) -> BigRational {
    if cores.is_empty() {
        return BigRational::zero();
    }
    let c = core_set(cores);
    let sum = cores.iter().fold(BigRational::zero(), |a, s| a + jaccard(s, &c));
    sum / ratio(cores.len(), 1)
}

/// `100 × ivc / baseline`, undefined for a zero baseline. Values above 100
/// mean the core took longer than the proof.
pub fn overhead(ivc_ms: f64, baseline_ms: f64) -> Option<f64> {
    (baseline_ms > 0.0).then(|| 100.0 * ivc_ms / baseline_ms)
}
