use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::analysis::{RunRecord, RunStatus, Stats};
use crate::ivc::Algorithm;

/// Runtime and overhead figures for one solver/algorithm pair, over the
/// runs that proved their property.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigSummary {
    pub configuration: String,
    pub statuses: BTreeMap<RunStatus, usize>,
    pub proof_ms: Option<Stats>,
    pub ivc_ms: Option<Stats>,
    pub overhead_pct: Option<Stats>,
}

/// Percentage by which one set of cores exceeds another, per model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IncreaseRow {
    pub group: String,
    pub per_model: BTreeMap<String, f64>,
    pub stats: Option<Stats>,
    /// Models left out because the smaller core was empty.
    pub skipped: usize,
}

/// `|UCBF| ≤ |UC| ≤ |slice|` over the models where all three are known.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderingCheck {
    pub solver: String,
    pub compared: usize,
    pub violations: Vec<String>,
    pub uc_above_ucbf: Vec<String>,
    pub slice_above_uc: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub records: usize,
    pub configurations: Vec<ConfigSummary>,
    pub uc_vs_ucbf: Vec<IncreaseRow>,
    pub slice_vs_core: Vec<IncreaseRow>,
    pub ordering: Vec<OrderingCheck>,
}

fn increase(larger: usize, smaller: usize) -> Option<BigRational> {
    (smaller > 0).then(|| BigRational::new(BigInt::from(100) * (larger as i64 - smaller as i64), BigInt::from(smaller)))
}

fn increase_row(group: String, pairs: impl Iterator<Item = (String, usize, usize)>) -> IncreaseRow {
    let mut per_model = BTreeMap::new();
    let mut values = Vec::new();
    let mut skipped = 0;
    for (model, larger, smaller) in pairs {
        match increase(larger, smaller) {
            Some(v) => {
                per_model.insert(model, v.to_f64().unwrap_or(f64::NAN));
                values.push(v);
            }
            None => skipped += 1,
        }
    }
    IncreaseRow { group, per_model, stats: Stats::of(&values), skipped }
}

/// Aggregates records into the study tables. The result depends only on
/// the set of records, not their order.
pub fn summarize(records: &[RunRecord]) -> Summary {
    let mut records: Vec<&RunRecord> = records.iter().collect();
    records.sort_by(|a, b| (&a.model, &a.solver, a.algorithm).cmp(&(&b.model, &b.solver, b.algorithm)));

    let mut by_config: BTreeMap<String, Vec<&RunRecord>> = BTreeMap::new();
    for r in &records {
        by_config.entry(r.configuration()).or_default().push(r);
    }
    let configurations = by_config
        .into_iter()
        .map(|(configuration, rs)| {
            let mut statuses = BTreeMap::new();
            for r in &rs {
                *statuses.entry(r.status).or_insert(0) += 1;
            }
            let proved: Vec<&&RunRecord> = rs.iter().filter(|r| r.status == RunStatus::Proved).collect();
            let f = |g: &dyn Fn(&RunRecord) -> Option<f64>| -> Option<Stats> {
                Stats::of_f64(&proved.iter().filter_map(|r| g(r)).collect::<Vec<_>>())
            };
            ConfigSummary {
                configuration,
                statuses,
                proof_ms: f(&|r| Some(r.proof_ms)),
                ivc_ms: f(&|r| Some(r.ivc_ms)),
                overhead_pct: f(&|r| r.overhead_pct),
            }
        })
        .collect();

    let core_len = |model: &str, solver: &str, alg: Algorithm| -> Option<usize> {
        records
            .iter()
            .find(|r| r.model == model && r.solver == solver && r.algorithm == alg)
            .and_then(|r| r.core.as_ref().map(Vec::len))
    };
    let mut solvers: Vec<&str> = records.iter().map(|r| r.solver.as_str()).collect();
    solvers.sort();
    solvers.dedup();
    let mut models: Vec<&str> = records.iter().map(|r| r.model.as_str()).collect();
    models.dedup();

    let uc_vs_ucbf = solvers
        .iter()
        .map(|s| {
            let pairs = models.iter().filter_map(|m| {
                Some((m.to_string(), core_len(m, s, Algorithm::Uc)?, core_len(m, s, Algorithm::Ucbf)?))
            });
            increase_row(s.to_string(), pairs)
        })
        .collect();

    let mut slice_groups: BTreeMap<String, Vec<(String, usize, usize)>> = BTreeMap::new();
    for r in &records {
        if let (Some(core), Some(slice)) = (&r.core, &r.slice) {
            slice_groups.entry(r.configuration()).or_default().push((r.model.clone(), slice.len(), core.len()));
        }
    }
    let slice_vs_core = slice_groups.into_iter().map(|(g, pairs)| increase_row(g, pairs.into_iter())).collect();

    let ordering = solvers
        .iter()
        .map(|s| {
            let mut check = OrderingCheck {
                solver: s.to_string(),
                compared: 0,
                violations: Vec::new(),
                uc_above_ucbf: Vec::new(),
                slice_above_uc: Vec::new(),
            };
            for m in &models {
                let slice = records
                    .iter()
                    .find(|r| r.model == *m && r.solver == *s && r.algorithm == Algorithm::Uc)
                    .and_then(|r| r.slice.as_ref().map(Vec::len));
                let (Some(uc), Some(ucbf), Some(slice)) =
                    (core_len(m, s, Algorithm::Uc), core_len(m, s, Algorithm::Ucbf), slice)
                else {
                    continue;
                };
                check.compared += 1;
                if !(ucbf <= uc && uc <= slice) {
                    check.violations.push(m.to_string());
                }
                if uc > ucbf {
                    check.uc_above_ucbf.push(m.to_string());
                }
                if slice > uc {
                    check.slice_above_uc.push(m.to_string());
                }
            }
            check
        })
        .collect();

    Summary { records: records.len(), configurations, uc_vs_ucbf, slice_vs_core, ordering }
}

impl Summary {
    /// Flat `section,group,metric,count,min,max,mean,stdev` rows.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut rows: Vec<(&str, &str, &str, &Option<Stats>)> = Vec::new();
        for c in &self.configurations {
            rows.push(("runtime", &c.configuration, "proof_ms", &c.proof_ms));
            rows.push(("runtime", &c.configuration, "ivc_ms", &c.ivc_ms));
            rows.push(("overhead", &c.configuration, "overhead_pct", &c.overhead_pct));
        }
        for r in &self.uc_vs_ucbf {
            rows.push(("uc_vs_ucbf", &r.group, "increase_pct", &r.stats));
        }
        for r in &self.slice_vs_core {
            rows.push(("slice_vs_core", &r.group, "increase_pct", &r.stats));
        }
        let go = || -> csv::Result<()> {
            w.write_record(["section", "group", "metric", "count", "min", "max", "mean", "stdev"])?;
            for (section, group, metric, s) in rows {
                let cells = match s {
                    Some(s) => [s.count.to_string(), fmt(&s.min), fmt(&s.max), fmt(&s.mean), format!("{:.3}", s.stdev)],
                    None => ["0".into(), String::new(), String::new(), String::new(), String::new()],
                };
                w.write_record([section, group, metric].into_iter().map(str::to_owned).chain(cells))?;
            }
            Ok(())
        };
        go().expect("writing to memory");
        String::from_utf8(w.into_inner().expect("flushing to memory")).expect("csv output is utf-8")
    }
}

fn fmt(r: &BigRational) -> String {
    format!("{:.3}", r.to_f64().unwrap_or(f64::NAN))
}
