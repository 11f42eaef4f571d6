//! Latency model: end-to-end latency of a partitioned DNN is edge compute
//! (scaled by stress multipliers) + crossing-tensor transfer + cloud compute.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cutpoints::CutPoint;
use crate::error::{Error, Result};
use crate::graph::DnnGraph;

/// The environment a distributed DNN runs under.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperationalCondition {
    /// Edge CPU utilization applied, in [0, 1].
    pub cpu_stress: f64,
    /// Edge memory utilization applied, in [0, 1].
    pub mem_stress: f64,
    /// Edge-to-cloud data transfer rate in Mb/s (10^6 bits per second).
    pub net_rate_mbps: f64,
}

impl OperationalCondition {
    pub fn new(cpu_stress: f64, mem_stress: f64, net_rate_mbps: f64) -> Result<Self> {
        let c = OperationalCondition {
            cpu_stress,
            mem_stress,
            net_rate_mbps,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.cpu_stress) || !(0.0..=1.0).contains(&self.mem_stress) {
            return Err(Error::Validation(format!(
                "stress fractions must be in [0,1], got cpu={} mem={}",
                self.cpu_stress, self.mem_stress
            )));
        }
        if !(self.net_rate_mbps > 0.0) {
            return Err(Error::Validation(format!(
                "net rate must be positive, got {}",
                self.net_rate_mbps
            )));
        }
        Ok(())
    }
}

/// Piecewise-linear map from a stress fraction to a slowdown multiplier.
/// Anchored at (0, 1), non-decreasing, clamped at the last anchor.
#[derive(Debug, Clone, PartialEq)]
pub struct StressCurve {
    anchors: Vec<(f64, f64)>,
}

impl StressCurve {
    pub fn new(mut anchors: Vec<(f64, f64)>) -> Result<Self> {
        anchors.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        if anchors.first().map(|a| a.0) != Some(0.0) || anchors[0].1 != 1.0 {
            return Err(Error::Calibration(
                "stress curve must anchor stress=0 at multiplier 1".into(),
            ));
        }
        for w in anchors.windows(2) {
            if w[1].1 < w[0].1 {
                return Err(Error::Calibration(format!(
                    "stress curve is non-monotone at stress={}",
                    w[1].0
                )));
            }
            if w[1].0 == w[0].0 {
                return Err(Error::Calibration(format!(
                    "duplicate stress anchor {}",
                    w[0].0
                )));
            }
        }
        for (x, y) in &anchors {
            if !x.is_finite() || !y.is_finite() || *x < 0.0 || *y < 1.0 {
                return Err(Error::Calibration(format!(
                    "invalid stress anchor ({x}, {y})"
                )));
            }
        }
        Ok(StressCurve { anchors })
    }

    pub fn identity() -> Self {
        StressCurve {
            anchors: vec![(0.0, 1.0)],
        }
    }

    pub fn eval(&self, stress: f64) -> f64 {
        let a = &self.anchors;
        if stress <= a[0].0 {
            return a[0].1;
        }
        for w in a.windows(2) {
            if stress <= w[1].0 {
                let t = (stress - w[0].0) / (w[1].0 - w[0].0);
                return w[0].1 + t * (w[1].1 - w[0].1);
            }
        }
        a.last().unwrap().1
    }
}

/// Edge-side stress response. CPU and memory multipliers apply
/// multiplicatively; the cloud partition is modeled as unstressed.
#[derive(Debug, Clone, PartialEq)]
pub struct StressResponse {
    pub cpu_curve: StressCurve,
    pub mem_curve: StressCurve,
}

impl StressResponse {
    pub fn identity() -> Self {
        StressResponse {
            cpu_curve: StressCurve::identity(),
            mem_curve: StressCurve::identity(),
        }
    }

    /// Joint slowdown multiplier for a condition.
    pub fn multiplier(&self, cond: &OperationalCondition) -> f64 {
        self.cpu_curve.eval(cond.cpu_stress) * self.mem_curve.eval(cond.mem_stress)
    }
}

impl Default for StressResponse {
    /// Conservative non-measured defaults; calibrate per device profile
    /// for anything beyond simulation.
    fn default() -> Self {
        let anchors = vec![
            (0.0, 1.0),
            (0.22, 1.15),
            (0.45, 1.5),
            (0.67, 2.0),
            (0.9, 3.0),
        ];
        StressResponse {
            cpu_curve: StressCurve::new(anchors.clone()).unwrap(),
            mem_curve: StressCurve::new(anchors).unwrap(),
        }
    }
}

/// Edge-to-cloud link: rate in Mb/s plus a fixed per-request latency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkModel {
    pub rate_mbps: f64,
    pub base_rtt_s: f64,
}

impl NetworkModel {
    pub fn new(rate_mbps: f64, base_rtt_s: f64) -> Result<Self> {
        if !(rate_mbps > 0.0) || base_rtt_s < 0.0 {
            return Err(Error::Validation(format!(
                "invalid network model: rate={rate_mbps} rtt={base_rtt_s}"
            )));
        }
        Ok(NetworkModel {
            rate_mbps,
            base_rtt_s,
        })
    }
}

/// Latency decomposition for one inference over a partitioned DNN.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LatencyEstimate {
    pub edge_s: f64,
    pub transfer_s: f64,
    pub cloud_s: f64,
    pub total_s: f64,
}

/// Time to move `bytes` over the link: bytes * 8 / (rate * 10^6) + rtt.
pub fn transfer_time(bytes: u64, net: &NetworkModel) -> f64 {
    bytes as f64 * 8.0 / (net.rate_mbps * 1e6) + net.base_rtt_s
}

/// End-to-end latency of one inference for a given cut and condition.
/// Stress multipliers apply to the edge partition only.
pub fn partition_latency(
    graph: &DnnGraph,
    cut: &CutPoint,
    cond: &OperationalCondition,
    resp: &StressResponse,
    net: &NetworkModel,
    edge_profile: &str,
    cloud_profile: &str,
) -> Result<LatencyEstimate> {
    if !graph.has_profile(edge_profile) {
        return Err(Error::UnknownProfile(edge_profile.into()));
    }
    if !graph.has_profile(cloud_profile) {
        return Err(Error::UnknownProfile(cloud_profile.into()));
    }
    if cut.edge_set.len() + cut.cloud_set.len() != graph.len() {
        return Err(Error::CutMismatch(graph.name().into()));
    }
    cond.validate()?;

    let mult = resp.multiplier(cond);
    let edge_s: f64 = cut
        .edge_set
        .iter()
        .map(|l| graph.layer(*l).base_latency[edge_profile])
        .sum::<f64>()
        * mult;
    let transfer_s = transfer_time(cut.crossing_bytes(graph), net);
    let cloud_s: f64 = cut
        .cloud_set
        .iter()
        .map(|l| graph.layer(*l).base_latency[cloud_profile])
        .sum();
    Ok(LatencyEstimate {
        edge_s,
        transfer_s,
        cloud_s,
        total_s: edge_s + transfer_s + cloud_s,
    })
}

/// Calibration document: per-axis stress curves and a fixed link RTT.
#[derive(Debug, Deserialize)]
struct RawCalibration {
    #[serde(default)]
    cpu_curve: BTreeMap<String, f64>,
    #[serde(default)]
    mem_curve: BTreeMap<String, f64>,
    #[serde(default)]
    base_rtt_s: f64,
}

#[derive(Debug, Clone)]
pub struct Calibration {
    pub response: StressResponse,
    pub base_rtt_s: f64,
}

fn curve_from_map(map: &BTreeMap<String, f64>) -> Result<StressCurve> {
    if map.is_empty() {
        return Ok(StressCurve::identity());
    }
    let mut anchors = Vec::with_capacity(map.len());
    for (k, v) in map {
        let x: f64 = k
            .parse()
            .map_err(|_| Error::Calibration(format!("bad stress anchor key `{k}`")))?;
        anchors.push((x, *v));
    }
    StressCurve::new(anchors)
}

/// Parse a calibration table. Requires a 0-anchor at multiplier 1 and
/// non-decreasing multipliers.
pub fn load_stress_response(text: &str) -> Result<Calibration> {
    let raw: RawCalibration =
        serde_json::from_str(text).map_err(|e| Error::Calibration(e.to_string()))?;
    if raw.base_rtt_s < 0.0 {
        return Err(Error::Calibration("base_rtt_s must be >= 0".into()));
    }
    Ok(Calibration {
        response: StressResponse {
            cpu_curve: curve_from_map(&raw.cpu_curve)?,
            mem_curve: curve_from_map(&raw.mem_curve)?,
        },
        base_rtt_s: raw.base_rtt_s,
    })
}
