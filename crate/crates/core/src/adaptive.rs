//! Repartitioning controller: pick the best cut for the current
//! conditions, decide whether moving the deployed cut is worth the
//! switching overhead, and replay a condition timeline against a request
//! schedule.

use serde::{Deserialize, Serialize};

use crate::costmodel::{
    partition_latency, LatencyEstimate, NetworkModel, OperationalCondition, StressResponse,
};
use crate::cutpoints::{enumerate_cutpoints, CutPoint};
use crate::error::{Error, Result};
use crate::graph::{DnnGraph, LayerId};

/// Model parameters shared by planning and simulation.
#[derive(Debug, Clone)]
pub struct PlannerContext<'a> {
    pub graph: &'a DnnGraph,
    pub resp: &'a StressResponse,
    pub base_rtt_s: f64,
    pub edge_profile: &'a str,
    pub cloud_profile: &'a str,
}

impl<'a> PlannerContext<'a> {
    pub fn latency(&self, cut: &CutPoint, cond: &OperationalCondition) -> Result<LatencyEstimate> {
        let net = NetworkModel::new(cond.net_rate_mbps, self.base_rtt_s)?;
        partition_latency(
            self.graph,
            cut,
            cond,
            self.resp,
            &net,
            self.edge_profile,
            self.cloud_profile,
        )
    }
}

/// Exhaustively evaluate every cut under `cond` and return the argmin;
/// ties resolve to the earliest cut.
pub fn plan(
    ctx: &PlannerContext<'_>,
    cond: &OperationalCondition,
) -> Result<(CutPoint, LatencyEstimate)> {
    let cuts = enumerate_cutpoints(ctx.graph);
    plan_over(ctx, &cuts, cond)
}

fn plan_over(
    ctx: &PlannerContext<'_>,
    cuts: &[CutPoint],
    cond: &OperationalCondition,
) -> Result<(CutPoint, LatencyEstimate)> {
    if cuts.is_empty() {
        return Err(Error::NoCutPoints);
    }
    let mut best: Option<(CutPoint, LatencyEstimate)> = None;
    for cut in cuts {
        let est = ctx.latency(cut, cond)?;
        let better = match &best {
            None => true,
            Some((_, b)) => est.total_s < b.total_s,
        };
        if better {
            best = Some((cut.clone(), est));
        }
    }
    Ok(best.unwrap())
}

/// Where the deployed partition currently sits.
#[derive(Debug, Clone)]
pub struct DeploymentState {
    pub current_cut: CutPoint,
    /// Simulation time the current cut was deployed.
    pub deployed_since: f64,
    /// Time of the last repartition, if any; the cooldown counts from here.
    pub last_switch: Option<f64>,
}

/// When repartitioning is worth taking.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Serialize)]
pub struct RepartitionPolicy {
    /// Minimum predicted gain (percent) to move the cut.
    #[serde(default = "default_min_gain")]
    pub min_gain_pct: f64,
    /// One-time cost of redeploying the partitions.
    #[serde(default = "default_overhead")]
    pub switch_overhead_s: f64,
    /// Minimum time between switches.
    #[serde(default)]
    pub cooldown_s: f64,
}

fn default_min_gain() -> f64 {
    5.0
}
fn default_overhead() -> f64 {
    1.0
}

impl Default for RepartitionPolicy {
    /// Placeholder defaults; set per deployment.
    fn default() -> Self {
        RepartitionPolicy {
            min_gain_pct: 5.0,
            switch_overhead_s: 1.0,
            cooldown_s: 0.0,
        }
    }
}

impl RepartitionPolicy {
    pub fn validate(&self) -> Result<()> {
        if self.min_gain_pct < 0.0 || self.switch_overhead_s < 0.0 || self.cooldown_s < 0.0 {
            return Err(Error::Validation(
                "policy fields must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    Keep,
    Switch,
}

/// Controller output for one evaluation.
#[derive(Debug, Clone)]
pub struct RepartitionDecision {
    pub action: Action,
    pub target_cut: CutPoint,
    pub predicted_static_s: f64,
    pub predicted_best_s: f64,
    pub predicted_gain_pct: f64,
}

/// Compare the deployed cut against the best cut for `cond`; switch iff
/// the predicted gain clears the threshold, the best cut differs, and the
/// cooldown has elapsed.
pub fn decide(
    ctx: &PlannerContext<'_>,
    state: &DeploymentState,
    cond: &OperationalCondition,
    policy: &RepartitionPolicy,
    now: f64,
) -> Result<RepartitionDecision> {
    policy.validate()?;
    let static_est = ctx.latency(&state.current_cut, cond)?;
    let (best_cut, best_est) = plan(ctx, cond)?;
    let gain_pct = 100.0 * (static_est.total_s - best_est.total_s) / static_est.total_s;
    let cooldown_ok = match state.last_switch {
        None => true,
        Some(t) => now - t >= policy.cooldown_s,
    };
    let should_switch = gain_pct >= policy.min_gain_pct
        && best_cut.after_layer != state.current_cut.after_layer
        && cooldown_ok;
    Ok(RepartitionDecision {
        action: if should_switch {
            Action::Switch
        } else {
            Action::Keep
        },
        target_cut: if should_switch {
            best_cut
        } else {
            state.current_cut.clone()
        },
        predicted_static_s: static_est.total_s,
        predicted_best_s: best_est.total_s,
        predicted_gain_pct: gain_pct,
    })
}

/// Partial condition update at a point in time.
#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct ConditionEvent {
    pub t_s: f64,
    pub cpu: Option<f64>,
    pub mem: Option<f64>,
    pub net: Option<f64>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct InitialCondition {
    pub cpu: f64,
    pub mem: f64,
    pub net: f64,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(untagged)]
pub enum RequestSchedule {
    Explicit { times: Vec<f64> },
    Rate { rate_per_s: f64, duration_s: f64 },
}

/// Scenario document: initial conditions, timed condition changes, a
/// request schedule, and the repartitioning policy.
#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct Scenario {
    pub initial: InitialCondition,
    #[serde(default)]
    pub events: Vec<ConditionEvent>,
    pub requests: RequestSchedule,
    #[serde(default)]
    pub policy: Option<RepartitionPolicy>,
}

impl Scenario {
    pub fn load(text: &str) -> Result<Self> {
        let s: Scenario =
            serde_json::from_str(text).map_err(|e| Error::Scenario(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        OperationalCondition::new(self.initial.cpu, self.initial.mem, self.initial.net)
            .map_err(|e| Error::Scenario(e.to_string()))?;
        let mut prev = f64::NEG_INFINITY;
        for e in &self.events {
            if e.t_s <= prev {
                return Err(Error::Scenario(format!(
                    "event timestamps must be strictly increasing (at t={})",
                    e.t_s
                )));
            }
            if e.t_s < 0.0 {
                return Err(Error::Scenario("event time must be >= 0".into()));
            }
            prev = e.t_s;
        }
        match &self.requests {
            RequestSchedule::Explicit { times } => {
                if times.windows(2).any(|w| w[1] < w[0]) || times.iter().any(|t| *t < 0.0) {
                    return Err(Error::Scenario(
                        "request times must be sorted and non-negative".into(),
                    ));
                }
            }
            RequestSchedule::Rate {
                rate_per_s,
                duration_s,
            } => {
                if !(*rate_per_s > 0.0) || !(*duration_s > 0.0) {
                    return Err(Error::Scenario(
                        "rate_per_s and duration_s must be positive".into(),
                    ));
                }
            }
        }
        if let Some(p) = &self.policy {
            p.validate().map_err(|e| Error::Scenario(e.to_string()))?;
        }
        Ok(())
    }

    pub fn request_times(&self) -> Vec<f64> {
        match &self.requests {
            RequestSchedule::Explicit { times } => times.clone(),
            RequestSchedule::Rate {
                rate_per_s,
                duration_s,
            } => {
                let step = 1.0 / rate_per_s;
                let n = (duration_s * rate_per_s).floor() as usize;
                (0..n).map(|i| i as f64 * step).collect()
            }
        }
    }
}

/// One served request in the trace.
#[derive(Debug, Clone, Serialize)]
pub struct RequestEntry {
    pub t_s: f64,
    pub cut_after: LayerId,
    pub latency_s: f64,
    pub cumulative_s: f64,
}

/// One controller evaluation in the trace.
#[derive(Debug, Clone, Serialize)]
pub struct DecisionEntry {
    pub t_s: f64,
    pub action: Action,
    pub from_cut: LayerId,
    pub to_cut: LayerId,
    pub predicted_gain_pct: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationTrace {
    pub requests: Vec<RequestEntry>,
    pub decisions: Vec<DecisionEntry>,
    pub switch_count: u32,
    /// Sum of per-request serving latencies, excluding overheads.
    pub serving_latency_s: f64,
    /// switch_count x switch_overhead_s.
    pub overhead_s: f64,
    /// serving + overhead.
    pub cumulative_latency_s: f64,
}

/// Replay a scenario: serve each request with the current cut's modeled
/// latency; re-evaluate the cut at every condition change; charge the
/// switch overhead before the next request. The initial cut is the plan
/// for the initial conditions and does not count as a switch.
pub fn simulate(
    ctx: &PlannerContext<'_>,
    scenario: &Scenario,
    policy: &RepartitionPolicy,
) -> Result<SimulationTrace> {
    scenario.validate()?;
    policy.validate()?;

    let mut cond =
        OperationalCondition::new(scenario.initial.cpu, scenario.initial.mem, scenario.initial.net)?;
    let (initial_cut, _) = plan(ctx, &cond)?;
    let mut state = DeploymentState {
        current_cut: initial_cut,
        deployed_since: 0.0,
        last_switch: None,
    };

    let requests = scenario.request_times();
    let mut trace = SimulationTrace {
        requests: Vec::with_capacity(requests.len()),
        decisions: Vec::new(),
        switch_count: 0,
        serving_latency_s: 0.0,
        overhead_s: 0.0,
        cumulative_latency_s: 0.0,
    };

    let mut events = scenario.events.iter().peekable();
    for &rt in &requests {
        // Apply every condition change due before this request; in-flight
        // work completes before a switch takes effect.
        while events.peek().map_or(false, |e| e.t_s <= rt) {
            let e = events.next().unwrap();
            cond = OperationalCondition::new(
                e.cpu.unwrap_or(cond.cpu_stress),
                e.mem.unwrap_or(cond.mem_stress),
                e.net.unwrap_or(cond.net_rate_mbps),
            )?;
            let decision = decide(ctx, &state, &cond, policy, e.t_s)?;
            trace.decisions.push(DecisionEntry {
                t_s: e.t_s,
                action: decision.action,
                from_cut: state.current_cut.after_layer,
                to_cut: decision.target_cut.after_layer,
                predicted_gain_pct: decision.predicted_gain_pct,
            });
            if decision.action == Action::Switch {
                state.current_cut = decision.target_cut;
                state.deployed_since = e.t_s;
                state.last_switch = Some(e.t_s);
                trace.switch_count += 1;
                trace.overhead_s += policy.switch_overhead_s;
            }
        }
        let est = ctx.latency(&state.current_cut, &cond)?;
        trace.serving_latency_s += est.total_s;
        trace.requests.push(RequestEntry {
            t_s: rt,
            cut_after: state.current_cut.after_layer,
            latency_s: est.total_s,
            cumulative_s: trace.serving_latency_s + trace.overhead_s,
        });
    }
    // Drain remaining events so trailing decisions still appear in the trace.
    for e in events {
        let new_cond = OperationalCondition::new(
            e.cpu.unwrap_or(cond.cpu_stress),
            e.mem.unwrap_or(cond.mem_stress),
            e.net.unwrap_or(cond.net_rate_mbps),
        )?;
        cond = new_cond;
        let decision = decide(ctx, &state, &cond, policy, e.t_s)?;
        trace.decisions.push(DecisionEntry {
            t_s: e.t_s,
            action: decision.action,
            from_cut: state.current_cut.after_layer,
            to_cut: decision.target_cut.after_layer,
            predicted_gain_pct: decision.predicted_gain_pct,
        });
        if decision.action == Action::Switch {
            state.current_cut = decision.target_cut;
            state.deployed_since = e.t_s;
            state.last_switch = Some(e.t_s);
            trace.switch_count += 1;
            trace.overhead_s += policy.switch_overhead_s;
        }
    }
    trace.cumulative_latency_s = trace.serving_latency_s + trace.overhead_s;
    Ok(trace)
}

/// The same replay with repartitioning disabled: the initial cut serves
/// every request.
pub fn simulate_static(
    ctx: &PlannerContext<'_>,
    scenario: &Scenario,
) -> Result<SimulationTrace> {
    let frozen = RepartitionPolicy {
        min_gain_pct: f64::INFINITY,
        switch_overhead_s: 0.0,
        cooldown_s: 0.0,
    };
    simulate(ctx, scenario, &frozen)
}
