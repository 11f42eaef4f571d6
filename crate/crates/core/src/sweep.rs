//! Exhaustive measurement sweeps: every cut under every grid condition,
//! with repetitions and seeded multiplicative jitter. Records stream to
//! the sink in (cut, condition, run) order regardless of parallelism.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::costmodel::{
    partition_latency, NetworkModel, OperationalCondition, StressResponse,
};
use crate::cutpoints::{enumerate_cutpoints, CutPoint};
use crate::error::{Error, Result};
use crate::graph::{DnnGraph, LayerId};

/// The measurement grid of §-style stress levels and network rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionGrid {
    pub cpu_levels: Vec<f64>,
    pub mem_levels: Vec<f64>,
    pub net_levels: Vec<f64>,
    pub repetitions: u32,
}

impl ConditionGrid {
    pub fn validate(&self) -> Result<()> {
        if self.repetitions < 1 {
            return Err(Error::Validation("repetitions must be >= 1".into()));
        }
        if self.cpu_levels.is_empty() || self.mem_levels.is_empty() || self.net_levels.is_empty()
        {
            return Err(Error::Validation("grid axes may not be empty".into()));
        }
        for &v in self.cpu_levels.iter().chain(&self.mem_levels) {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Validation(format!("stress level {v} out of [0,1]")));
            }
        }
        for &v in &self.net_levels {
            if !(v > 0.0) {
                return Err(Error::Validation(format!("net rate {v} must be positive")));
            }
        }
        Ok(())
    }

    /// Cartesian product in (cpu, mem, net) order.
    pub fn combinations(&self) -> impl Iterator<Item = OperationalCondition> + '_ {
        self.cpu_levels.iter().flat_map(move |&cpu| {
            self.mem_levels.iter().flat_map(move |&mem| {
                self.net_levels.iter().map(move |&net| OperationalCondition {
                    cpu_stress: cpu,
                    mem_stress: mem,
                    net_rate_mbps: net,
                })
            })
        })
    }

    pub fn combination_count(&self) -> usize {
        self.cpu_levels.len() * self.mem_levels.len() * self.net_levels.len()
    }

    pub fn load(text: &str) -> Result<Self> {
        let g: ConditionGrid =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        g.validate()?;
        Ok(g)
    }
}

/// The 5 x 5 x 4 condition grid with 10 repetitions.
pub fn default_grid() -> ConditionGrid {
    ConditionGrid {
        cpu_levels: vec![0.0, 0.22, 0.45, 0.67, 0.90],
        mem_levels: vec![0.0, 0.22, 0.45, 0.67, 0.90],
        net_levels: vec![10.0, 25.0, 37.5, 50.0],
        repetitions: 10,
    }
}

/// One observed (or simulated) end-to-end latency sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub model: String,
    pub platform: String,
    pub cpu_stress: f64,
    pub mem_stress: f64,
    pub net_rate_mbps: f64,
    pub cut_after: LayerId,
    pub run_index: u32,
    pub latency_s: f64,
}

/// Sweep parameters beyond the grid itself.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub platform: String,
    pub edge_profile: String,
    pub cloud_profile: String,
    pub resp: StressResponse,
    pub base_rtt_s: f64,
    /// Relative sigma of the multiplicative jitter; 0 disables noise.
    pub noise: f64,
    pub seed: u64,
    /// Worker threads for condition evaluation; output order is unaffected.
    pub jobs: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            platform: "sim".into(),
            edge_profile: "edge".into(),
            cloud_profile: "cloud".into(),
            resp: StressResponse::default(),
            base_rtt_s: 0.0,
            noise: 0.02,
            seed: 0,
            jobs: 1,
        }
    }
}

// Jitter is keyed by the record's linear index, never by sampling order,
// so streams are byte-identical at any worker count.
fn jitter_factor(seed: u64, record_index: u64, sigma: f64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(record_index);
    let eps = Normal::new(0.0, sigma).unwrap().sample(&mut rng);
    (1.0 + eps).max(0.1)
}

fn evaluate_condition(
    graph: &DnnGraph,
    cut: &CutPoint,
    cond: &OperationalCondition,
    cfg: &SweepConfig,
    reps: u32,
    base_index: u64,
) -> Result<Vec<MeasurementRecord>> {
    let net = NetworkModel::new(cond.net_rate_mbps, cfg.base_rtt_s)?;
    let est = partition_latency(
        graph,
        cut,
        cond,
        &cfg.resp,
        &net,
        &cfg.edge_profile,
        &cfg.cloud_profile,
    )?;
    let mut out = Vec::with_capacity(reps as usize);
    for rep in 0..reps {
        let latency_s = if cfg.noise == 0.0 {
            est.total_s
        } else {
            est.total_s * jitter_factor(cfg.seed, base_index + rep as u64, cfg.noise)
        };
        out.push(MeasurementRecord {
            model: graph.name().to_string(),
            platform: cfg.platform.clone(),
            cpu_stress: cond.cpu_stress,
            mem_stress: cond.mem_stress,
            net_rate_mbps: cond.net_rate_mbps,
            cut_after: cut.after_layer,
            run_index: rep,
            latency_s,
        });
    }
    Ok(out)
}

/// Evaluate every cut under every grid condition, `repetitions` times
/// each, streaming records to `sink` in (cut, condition, run) order.
/// Returns the number of records emitted.
pub fn run_sweep(
    graph: &DnnGraph,
    grid: &ConditionGrid,
    cfg: &SweepConfig,
    mut sink: impl FnMut(&MeasurementRecord) -> Result<()>,
) -> Result<u64> {
    grid.validate()?;
    let cuts = enumerate_cutpoints(graph);
    if cuts.is_empty() {
        return Err(Error::NoCutPoints);
    }
    let combos: Vec<OperationalCondition> = grid.combinations().collect();
    let reps = grid.repetitions;
    let mut emitted = 0u64;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs.max(1))
        .build()
        .map_err(|e| Error::Validation(e.to_string()))?;

    for (ci, cut) in cuts.iter().enumerate() {
        // One cut at a time keeps memory bounded; rayon's ordered collect
        // restores (condition, run) order.
        let batches: Vec<Result<Vec<MeasurementRecord>>> = pool.install(|| {
            combos
                .par_iter()
                .enumerate()
                .map(|(ki, cond)| {
                    let base = ((ci * combos.len() + ki) as u64) * reps as u64;
                    evaluate_condition(graph, cut, cond, cfg, reps, base)
                })
                .collect()
        });
        for batch in batches {
            for rec in batch? {
                sink(&rec)?;
                emitted += 1;
            }
        }
    }
    Ok(emitted)
}

/// Write records as CSV with the shared measurement schema. Floats use
/// round-trip precision.
pub fn csv_writer<W: std::io::Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().has_headers(true).from_writer(w)
}

/// Read measurement records from CSV in the shared schema.
pub fn read_records_csv<R: std::io::Read>(
    r: R,
) -> impl Iterator<Item = Result<MeasurementRecord>> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(r)
        .into_deserialize::<MeasurementRecord>()
        .map(|r| r.map_err(Error::from))
}
