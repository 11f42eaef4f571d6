//! Partition planning and simulation for DNNs distributed across an edge
//! node and a cloud node.
//!
//! The pipeline mirrors an exhaustive benchmarking workflow:
//!
//! 1. [`graph`] loads and validates a layer DAG with per-device base
//!    latencies and output tensor sizes.
//! 2. [`cutpoints`] enumerates the positions where a single tensor
//!    crosses the edge/cloud boundary; parallel paths coalesce into
//!    indivisible blocks.
//! 3. [`costmodel`] predicts end-to-end latency for a (cut, condition)
//!    pair: stressed edge compute + transfer + cloud compute.
//! 4. [`sweep`] evaluates every cut under a grid of CPU stress, memory
//!    stress and network rates, emitting CSV measurement records.
//! 5. [`analysis`] aggregates records into per-condition optima, top-k
//!    cut distributions, sensitivity verdicts and gain tables.
//! 6. [`adaptive`] decides when a deployed cut should move and replays
//!    condition timelines against request schedules.
//!
//! [`fixtures`] generates deterministic synthetic models for all of the
//! above.

pub mod adaptive;
pub mod analysis;
pub mod costmodel;
pub mod cutpoints;
pub mod error;
pub mod fixtures;
pub mod graph;
pub mod sweep;

pub use adaptive::{decide, plan, simulate, simulate_static, RepartitionPolicy, Scenario};
pub use analysis::{gain_table, optimal_cuts, sensitivity, topk_distribution, Axis};
pub use costmodel::{
    load_stress_response, partition_latency, transfer_time, NetworkModel, OperationalCondition,
    StressResponse,
};
pub use cutpoints::{blocks, enumerate_cutpoints, Block, CutPoint};
pub use error::{Error, Result};
pub use graph::{DnnGraph, LayerId, LayerKind, LayerProfile, TopoOrder};
pub use sweep::{default_grid, run_sweep, ConditionGrid, MeasurementRecord, SweepConfig};
