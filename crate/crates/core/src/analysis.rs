//! Aggregation of measurement records: per-condition optimal cuts, top-k
//! frequency distributions, per-axis sensitivity, and static-vs-best gain
//! tables.

use std::collections::BTreeMap;

use ordered_float::NotNan;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::LayerId;
use crate::sweep::MeasurementRecord;

/// One grid combination present in the data.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct ConditionKey {
    pub model: String,
    pub platform: String,
    pub cpu_stress: NotNan<f64>,
    pub mem_stress: NotNan<f64>,
    pub net_rate_mbps: NotNan<f64>,
}

/// The cut with the lowest aggregated latency for a condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimalCut {
    pub key: ConditionKey,
    pub cut_after: LayerId,
    pub mean_latency_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Aggregation {
    Mean,
    /// For outlier-heavy real measurements.
    Median,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Axis {
    Cpu,
    Mem,
    Net,
}

impl Axis {
    fn level(&self, r: &MeasurementRecord) -> f64 {
        match self {
            Axis::Cpu => r.cpu_stress,
            Axis::Mem => r.mem_stress,
            Axis::Net => r.net_rate_mbps,
        }
    }

    pub fn label(&self, level: f64) -> String {
        match self {
            Axis::Cpu => format!("cpu {:.0}%", level * 100.0),
            Axis::Mem => format!("mem {:.0}%", level * 100.0),
            Axis::Net => format!("net {} Mb/s", level),
        }
    }
}

#[derive(Default)]
struct GroupStat {
    sum: f64,
    count: u64,
    samples: Vec<f64>, // kept only for median aggregation
}

/// Streaming group-by with bounded per-group state (for the mean).
pub struct Aggregator {
    agg: Aggregation,
    groups: BTreeMap<ConditionKey, BTreeMap<LayerId, GroupStat>>,
}

impl Aggregator {
    pub fn new(agg: Aggregation) -> Self {
        Aggregator {
            agg,
            groups: BTreeMap::new(),
        }
    }

    pub fn push(&mut self, r: &MeasurementRecord) -> Result<()> {
        if !(r.latency_s > 0.0) {
            return Err(Error::Validation(format!(
                "non-positive latency {} for model {} cut {}",
                r.latency_s, r.model, r.cut_after
            )));
        }
        let key = ConditionKey {
            model: r.model.clone(),
            platform: r.platform.clone(),
            cpu_stress: NotNan::new(r.cpu_stress)
                .map_err(|_| Error::Validation("NaN cpu_stress".into()))?,
            mem_stress: NotNan::new(r.mem_stress)
                .map_err(|_| Error::Validation("NaN mem_stress".into()))?,
            net_rate_mbps: NotNan::new(r.net_rate_mbps)
                .map_err(|_| Error::Validation("NaN net_rate".into()))?,
        };
        let stat = self
            .groups
            .entry(key)
            .or_default()
            .entry(r.cut_after)
            .or_default();
        stat.sum += r.latency_s;
        stat.count += 1;
        if self.agg == Aggregation::Median {
            stat.samples.push(r.latency_s);
        }
        Ok(())
    }

    fn aggregate(&self, stat: &GroupStat) -> f64 {
        match self.agg {
            Aggregation::Mean => stat.sum / stat.count as f64,
            Aggregation::Median => {
                let mut v = stat.samples.clone();
                v.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let n = v.len();
                if n % 2 == 1 {
                    v[n / 2]
                } else {
                    (v[n / 2 - 1] + v[n / 2]) / 2.0
                }
            }
        }
    }

    /// Aggregated latency per (key, cut), keys in deterministic order.
    pub fn latencies(&self) -> Vec<(ConditionKey, Vec<(LayerId, f64)>)> {
        self.groups
            .iter()
            .map(|(k, cuts)| {
                (
                    k.clone(),
                    cuts.iter()
                        .map(|(cut, stat)| (*cut, self.aggregate(stat)))
                        .collect(),
                )
            })
            .collect()
    }

    /// Per key, the argmin cut over aggregated latencies; ties break to
    /// the smallest cut index.
    pub fn optimal_cuts(&self) -> Result<Vec<OptimalCut>> {
        if self.groups.is_empty() {
            return Err(Error::EmptyInput("no measurement records".into()));
        }
        Ok(self
            .latencies()
            .into_iter()
            .map(|(key, cuts)| {
                let (cut_after, mean_latency_s) = argmin_cut(&cuts).expect("group non-empty");
                OptimalCut {
                    key,
                    cut_after,
                    mean_latency_s,
                }
            })
            .collect())
    }
}

fn argmin_cut(cuts: &[(LayerId, f64)]) -> Option<(LayerId, f64)> {
    cuts.iter()
        .copied()
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)))
}

/// Mean-aggregated optimal cut per condition over a record stream.
pub fn optimal_cuts<I>(records: I) -> Result<Vec<OptimalCut>>
where
    I: IntoIterator<Item = Result<MeasurementRecord>>,
{
    optimal_cuts_with(records, Aggregation::Mean)
}

pub fn optimal_cuts_with<I>(records: I, agg: Aggregation) -> Result<Vec<OptimalCut>>
where
    I: IntoIterator<Item = Result<MeasurementRecord>>,
{
    let mut a = Aggregator::new(agg);
    for r in records {
        a.push(&r?)?;
    }
    a.optimal_cuts()
}

/// Frequency of each cut among the per-condition optima, as a percentage.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutShare {
    pub cut_after: LayerId,
    pub percentage: f64,
    pub count: u64,
}

/// The `k` most frequent optimal cuts; ties break to the smaller index.
pub fn topk_distribution(optima: &[OptimalCut], k: usize) -> Result<Vec<CutShare>> {
    if optima.is_empty() {
        return Err(Error::EmptyInput("no optima to rank".into()));
    }
    if k < 1 {
        return Err(Error::Validation("k must be >= 1".into()));
    }
    let mut counts: BTreeMap<LayerId, u64> = BTreeMap::new();
    for o in optima {
        *counts.entry(o.cut_after).or_default() += 1;
    }
    let total = optima.len() as f64;
    let mut shares: Vec<CutShare> = counts
        .into_iter()
        .map(|(cut_after, count)| CutShare {
            cut_after,
            percentage: 100.0 * count as f64 / total,
            count,
        })
        .collect();
    shares.sort_by(|a, b| b.count.cmp(&a.count).then(a.cut_after.cmp(&b.cut_after)));
    shares.truncate(k);
    Ok(shares)
}

/// How a table of per-level means is judged sensitive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SensitivityRule {
    /// Sensitive iff the optimal cut differs across the axis levels.
    CutShift,
    /// Sensitive iff the best achievable gain over the baseline-level
    /// optimum reaches the threshold (percent) at some level.
    GainThreshold(f64),
}

/// Per-level view of one axis at the baseline of the other axes.
struct AxisSlice {
    /// level -> per-cut aggregated latency
    levels: BTreeMap<NotNan<f64>, Vec<(LayerId, f64)>>,
}

/// Baseline for the non-studied axes: zero added stress and the maximum
/// network rate present in the data.
fn axis_slices(
    records: &[MeasurementRecord],
    axis: Axis,
    agg: Aggregation,
) -> Result<BTreeMap<(String, String), AxisSlice>> {
    if records.is_empty() {
        return Err(Error::EmptyInput("no measurement records".into()));
    }
    // Max net rate per (model, platform), used as the network baseline.
    let mut max_net: BTreeMap<(String, String), f64> = BTreeMap::new();
    for r in records {
        let e = max_net
            .entry((r.model.clone(), r.platform.clone()))
            .or_insert(r.net_rate_mbps);
        if r.net_rate_mbps > *e {
            *e = r.net_rate_mbps;
        }
    }

    // Every axis level observed anywhere for the (model, platform).
    let mut all_levels: BTreeMap<(String, String), Vec<NotNan<f64>>> = BTreeMap::new();
    for r in records {
        let lv = NotNan::new(axis.level(r)).map_err(|_| Error::Validation("NaN level".into()))?;
        let e = all_levels
            .entry((r.model.clone(), r.platform.clone()))
            .or_default();
        if !e.contains(&lv) {
            e.push(lv);
        }
    }

    let mut agg_state: BTreeMap<(String, String), BTreeMap<NotNan<f64>, Aggregator>> =
        BTreeMap::new();
    for r in records {
        let mp = (r.model.clone(), r.platform.clone());
        let at_baseline = match axis {
            Axis::Cpu => r.mem_stress == 0.0 && r.net_rate_mbps == max_net[&mp],
            Axis::Mem => r.cpu_stress == 0.0 && r.net_rate_mbps == max_net[&mp],
            Axis::Net => r.cpu_stress == 0.0 && r.mem_stress == 0.0,
        };
        if !at_baseline {
            continue;
        }
        let lv = NotNan::new(axis.level(r)).unwrap();
        agg_state
            .entry(mp)
            .or_default()
            .entry(lv)
            .or_insert_with(|| Aggregator::new(agg))
            .push(r)?;
    }

    let mut out = BTreeMap::new();
    for (mp, expected) in all_levels {
        let by_level = agg_state.remove(&mp).unwrap_or_default();
        let mut levels = BTreeMap::new();
        for lv in expected {
            let a = by_level.get(&lv).ok_or_else(|| {
                Error::MissingGroup(format!(
                    "model {} platform {}: no baseline records at level {}",
                    mp.0, mp.1, lv
                ))
            })?;
            let cuts = a
                .latencies()
                .into_iter()
                .next()
                .map(|(_, cuts)| cuts)
                .unwrap_or_default();
            levels.insert(lv, cuts);
        }
        out.insert(mp, AxisSlice { levels });
    }
    Ok(out)
}

/// Whether each (model, platform) is sensitive to `axis` with the other
/// axes held at baseline.
pub fn sensitivity(
    records: &[MeasurementRecord],
    axis: Axis,
    rule: SensitivityRule,
) -> Result<BTreeMap<(String, String), bool>> {
    let slices = axis_slices(records, axis, Aggregation::Mean)?;
    let mut out = BTreeMap::new();
    for (mp, slice) in slices {
        let optima: Vec<(LayerId, f64)> = slice
            .levels
            .values()
            .map(|cuts| argmin_cut(cuts).expect("level group non-empty"))
            .collect();
        let sensitive = match rule {
            SensitivityRule::CutShift => optima.windows(2).any(|w| w[0].0 != w[1].0),
            SensitivityRule::GainThreshold(th) => {
                let baseline_cut = optima[0].0;
                slice.levels.values().any(|cuts| {
                    let stat = cuts.iter().find(|(c, _)| *c == baseline_cut);
                    let best = argmin_cut(cuts);
                    match (stat, best) {
                        (Some((_, s)), Some((_, b))) => 100.0 * (s - b) / s >= th,
                        _ => false,
                    }
                })
            }
        };
        out.insert(mp, sensitive);
    }
    Ok(out)
}

/// One non-baseline level of a gain table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GainRow {
    pub level: f64,
    pub label: String,
    /// Latency of the baseline-optimal cut under this level's condition.
    pub static_latency_s: f64,
    pub best_cut: LayerId,
    pub best_latency_s: f64,
    pub gain_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GainTable {
    pub model: String,
    pub platform: String,
    pub axis_label: String,
    pub baseline_level: f64,
    pub baseline_cut: LayerId,
    pub baseline_latency_s: f64,
    pub rows: Vec<GainRow>,
}

/// Fix the baseline-optimal cut, then per other level compare that static
/// cut's latency against the level's optimum.
pub fn gain_table(
    records: &[MeasurementRecord],
    axis: Axis,
    baseline_level: f64,
) -> Result<Vec<GainTable>> {
    gain_table_with(records, axis, baseline_level, Aggregation::Mean)
}

pub fn gain_table_with(
    records: &[MeasurementRecord],
    axis: Axis,
    baseline_level: f64,
    agg: Aggregation,
) -> Result<Vec<GainTable>> {
    let slices = axis_slices(records, axis, agg)?;
    let base_key = NotNan::new(baseline_level)
        .map_err(|_| Error::Validation("NaN baseline level".into()))?;
    let mut out = Vec::new();
    for (mp, slice) in slices {
        let base = slice.levels.get(&base_key).ok_or_else(|| {
            Error::MissingGroup(format!(
                "model {} platform {}: baseline level {} absent",
                mp.0, mp.1, baseline_level
            ))
        })?;
        let (baseline_cut, baseline_latency_s) =
            argmin_cut(base).ok_or_else(|| Error::EmptyInput("empty baseline group".into()))?;
        let mut rows = Vec::new();
        for (lv, cuts) in &slice.levels {
            if *lv == base_key {
                continue;
            }
            let static_latency_s = cuts
                .iter()
                .find(|(c, _)| *c == baseline_cut)
                .map(|(_, l)| *l)
                .ok_or_else(|| {
                    Error::MissingGroup(format!(
                        "model {} platform {}: cut {} missing at level {}",
                        mp.0, mp.1, baseline_cut, lv
                    ))
                })?;
            let (best_cut, best_latency_s) = argmin_cut(cuts).unwrap();
            let gain_pct = 100.0 * (static_latency_s - best_latency_s) / static_latency_s;
            rows.push(GainRow {
                level: lv.into_inner(),
                label: axis.label(lv.into_inner()),
                static_latency_s,
                best_cut,
                best_latency_s,
                gain_pct,
            });
        }
        out.push(GainTable {
            model: mp.0,
            platform: mp.1,
            axis_label: axis.label(baseline_level),
            baseline_level,
            baseline_cut,
            baseline_latency_s,
            rows,
        });
    }
    Ok(out)
}
