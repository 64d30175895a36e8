use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize, Serializer};

use super::{core_set, jaccard, overall_dissimilarity, pairwise_stats, Stats};
use crate::ivc::Algorithm;

pub(crate) fn rational<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    if r.is_integer() {
        s.serialize_str(&r.numer().to_string())
    } else {
        s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
    }
}

fn decimal(r: &BigRational) -> String {
    format!("{:.6}", r.to_f64().unwrap_or(f64::NAN))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Proved,
    Cex,
    Unknown,
    Error,
}

/// One (model, solver, algorithm) run. `core` is present exactly when the
/// property was proved and a core extracted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub model: String,
    pub property: Option<String>,
    pub solver: String,
    pub algorithm: Algorithm,
    pub status: RunStatus,
    pub core: Option<Vec<String>>,
    pub minimal: Option<bool>,
    pub k: Option<u32>,
    #[serde(default)]
    pub invariants: Vec<String>,
    pub candidates: usize,
    /// Candidate equations in the backward slice of the property, when the
    /// model came from source.
    pub slice: Option<Vec<String>>,
    pub proof_ms: f64,
    pub ivc_ms: f64,
    pub overhead_pct: Option<f64>,
    pub cex_length: Option<u32>,
    pub message: Option<String>,
}

impl RunRecord {
    pub fn configuration(&self) -> String {
        format!("{}/{}", self.solver, self.algorithm)
    }

    pub fn core_set(&self) -> Option<BTreeSet<String>> {
        self.core.as_ref().map(|c| c.iter().cloned().collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairDistance {
    pub a: String,
    pub b: String,
    #[serde(serialize_with = "rational")]
    pub distance: BigRational,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelDiversity {
    pub model: String,
    /// Core per configuration, for the configurations that produced one.
    pub cores: BTreeMap<String, Vec<String>>,
    pub pairs: Vec<PairDistance>,
    pub pairwise: Option<Stats>,
    pub core_set: Vec<String>,
    #[serde(serialize_with = "rational")]
    pub dissimilarity: BigRational,
    /// Same, leaving out brute-force cores.
    #[serde(serialize_with = "rational")]
    pub dissimilarity_without_bf: BigRational,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigStats {
    pub configuration: String,
    pub cores: usize,
    pub core_size: Option<Stats>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiversityReport {
    pub models: Vec<ModelDiversity>,
    pub configurations: Vec<ConfigStats>,
    pub note: &'static str,
}

const NOTE: &str = "Jaccard distances are exact rationals; two empty cores are at distance 0. \
Standard deviations are population deviations.";

/// Groups records by model and compares the cores of every configuration
/// that proved the property.
pub fn diversity_report(records: &[RunRecord]) -> DiversityReport {
    let mut by_model: BTreeMap<&str, Vec<&RunRecord>> = BTreeMap::new();
    let mut by_config: BTreeMap<String, Vec<BigRational>> = BTreeMap::new();
    for r in records {
        by_model.entry(&r.model).or_default();
        if let Some(c) = &r.core {
            by_model.get_mut(r.model.as_str()).unwrap().push(r);
            by_config.entry(r.configuration()).or_default().push(BigRational::from_integer(c.len().into()));
        }
    }
    let models = by_model
        .into_iter()
        .map(|(model, mut rs)| {
            rs.sort_by_key(|r| r.configuration());
            let labelled: Vec<(String, BTreeSet<String>)> =
                rs.iter().map(|r| (r.configuration(), r.core_set().unwrap_or_default())).collect();
            let sets: Vec<BTreeSet<String>> = labelled.iter().map(|(_, s)| s.clone()).collect();
            let without_bf: Vec<BTreeSet<String>> =
                rs.iter().filter(|r| r.algorithm != Algorithm::Bf).filter_map(|r| r.core_set()).collect();
            let mut pairs = Vec::new();
            for i in 0..labelled.len() {
                for j in i + 1..labelled.len() {
                    pairs.push(PairDistance {
                        a: labelled[i].0.clone(),
                        b: labelled[j].0.clone(),
                        distance: jaccard(&labelled[i].1, &labelled[j].1),
                    });
                }
            }
            ModelDiversity {
                model: model.to_owned(),
                cores: rs.iter().map(|r| (r.configuration(), r.core.clone().unwrap_or_default())).collect(),
                pairs,
                pairwise: pairwise_stats(&sets),
                core_set: core_set(&sets).into_iter().collect(),
                dissimilarity: overall_dissimilarity(&sets),
                dissimilarity_without_bf: overall_dissimilarity(&without_bf),
            }
        })
        .collect();
    let configurations = by_config
        .into_iter()
        .map(|(configuration, sizes)| ConfigStats { configuration, cores: sizes.len(), core_size: Stats::of(&sizes) })
        .collect();
    DiversityReport { models, configurations, note: NOTE }
}

fn csv_string(write: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    write(&mut w).expect("writing to memory");
    String::from_utf8(w.into_inner().expect("flushing to memory")).expect("csv output is utf-8")
}

fn stat_cells(s: &Option<Stats>) -> [String; 4] {
    match s {
        Some(s) => [decimal(&s.min), decimal(&s.max), decimal(&s.mean), format!("{:.6}", s.stdev)],
        None => Default::default(),
    }
}

impl DiversityReport {
    /// One row per model, most diverse first.
    pub fn models_csv(&self) -> String {
        let mut rows: Vec<&ModelDiversity> = self.models.iter().collect();
        rows.sort_by(|a, b| {
            let key = |m: &ModelDiversity| m.pairwise.as_ref().map(|s| s.mean.clone());
            key(b).cmp(&key(a)).then_with(|| a.model.cmp(&b.model))
        });
        csv_string(|w| {
            w.write_record([
                "model",
                "cores",
                "pairs",
                "min",
                "max",
                "mean",
                "stdev",
                "core_set_size",
                "dissimilarity",
                "dissimilarity_without_bf",
            ])?;
            for m in rows {
                let [min, max, mean, sd] = stat_cells(&m.pairwise);
                w.write_record([
                    m.model.clone(),
                    m.cores.len().to_string(),
                    m.pairs.len().to_string(),
                    min,
                    max,
                    mean,
                    sd,
                    m.core_set.len().to_string(),
                    decimal(&m.dissimilarity),
                    decimal(&m.dissimilarity_without_bf),
                ])?;
            }
            Ok(())
        })
    }

    /// Every pairwise distance, per model in ascending order.
    pub fn distances_csv(&self) -> String {
        csv_string(|w| {
            w.write_record(["model", "rank", "a", "b", "distance"])?;
            for m in &self.models {
                let mut pairs: Vec<&PairDistance> = m.pairs.iter().collect();
                pairs.sort_by(|x, y| x.distance.cmp(&y.distance).then_with(|| (&x.a, &x.b).cmp(&(&y.a, &y.b))));
                for (i, p) in pairs.iter().enumerate() {
                    w.write_record([&m.model, &(i + 1).to_string(), &p.a, &p.b, &decimal(&p.distance)])?;
                }
            }
            Ok(())
        })
    }

    /// Core size statistics per configuration.
    pub fn configurations_csv(&self) -> String {
        csv_string(|w| {
            w.write_record(["configuration", "cores", "min", "max", "mean", "stdev"])?;
            for c in &self.configurations {
                let [min, max, mean, sd] = stat_cells(&c.core_size);
                w.write_record([c.configuration.clone(), c.cores.to_string(), min, max, mean, sd])?;
            }
            Ok(())
        })
    }
}
