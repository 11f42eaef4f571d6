//! Acceptance gate for the partition-planning engine. Each test covers one
//! numbered criterion and prints a single pass/fail line; run with
//! `cargo test --test acceptance -- --nocapture` to see them all.

use std::collections::BTreeMap;
use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use edgecut::adaptive::{
    self, ConditionEvent, InitialCondition, PlannerContext, RepartitionPolicy, RequestSchedule,
    Scenario,
};
use edgecut::analysis::{gain_table, Axis};
use edgecut::costmodel::{
    partition_latency, NetworkModel, OperationalCondition, StressResponse,
};
use edgecut::cutpoints::enumerate_cutpoints;
use edgecut::fixtures;
use edgecut::graph::{DnnGraph, LayerId, LayerKind, LayerProfile};
use edgecut::sweep::{self, default_grid, MeasurementRecord, SweepConfig};

fn report(name: &str, limit: Duration, body: impl FnOnce()) {
    let start = Instant::now();
    let outcome = panic::catch_unwind(AssertUnwindSafe(body));
    let elapsed = start.elapsed();
    let within = elapsed <= limit;
    let status = if outcome.is_ok() && within { "PASS" } else { "FAIL" };
    println!("{status}: {name} ({elapsed:.2?}, limit {limit:?})");
    if let Err(p) = outcome {
        panic::resume_unwind(p);
    }
    assert!(within, "{name} exceeded its runtime limit: {elapsed:?} > {limit:?}");
}

// ---------------------------------------------------------------------------
// criterion 1: gain reproduction from the published measurement tables

/// One non-baseline level: (level, static latency, best cut, best latency,
/// expected gain %). `best_cut` None means the source row reuses the static
/// cut's label for a different latency, so the fixture stores the best
/// latency under a synthetic cut id and only the gain is checked.
type LevelRow = (f64, f64, Option<usize>, f64, f64);

struct ModelRows {
    model: &'static str,
    base_cut: usize,
    base_latency: f64,
    levels: Vec<LevelRow>,
}

fn rec(model: &str, axis: Axis, level: f64, cut: usize, run: u32, latency: f64) -> MeasurementRecord {
    let (cpu, mem, net) = match axis {
        Axis::Cpu => (level, 0.0, 50.0),
        Axis::Mem => (0.0, level, 50.0),
        Axis::Net => (0.0, 0.0, level),
    };
    MeasurementRecord {
        model: model.into(),
        platform: "pi4".into(),
        cpu_stress: cpu,
        mem_stress: mem,
        net_rate_mbps: net,
        cut_after: LayerId(cut),
        run_index: run,
        latency_s: latency,
    }
}

fn fixture_records(rows: &[ModelRows], axis: Axis, baseline_level: f64) -> Vec<MeasurementRecord> {
    let mut out = Vec::new();
    for m in rows {
        for run in 0..10 {
            out.push(rec(m.model, axis, baseline_level, m.base_cut, run, m.base_latency));
        }
        for &(level, static_lat, best_cut, best_lat, _) in &m.levels {
            for run in 0..10 {
                out.push(rec(m.model, axis, level, m.base_cut, run, static_lat));
            }
            let best_id = best_cut.unwrap_or(m.base_cut + 1000);
            if best_id != m.base_cut {
                for run in 0..10 {
                    out.push(rec(m.model, axis, level, best_id, run, best_lat));
                }
            }
        }
    }
    out
}

fn check_axis(rows: &[ModelRows], axis: Axis, baseline_level: f64) {
    let records = fixture_records(rows, axis, baseline_level);
    let tables = gain_table(&records, axis, baseline_level).unwrap();
    assert_eq!(tables.len(), rows.len());
    for m in rows {
        let t = tables.iter().find(|t| t.model == m.model).unwrap();
        assert_eq!(t.baseline_cut, LayerId(m.base_cut), "{} baseline cut", m.model);
        assert!((t.baseline_latency_s - m.base_latency).abs() < 1e-9);
        for &(level, _, best_cut, best_lat, expected_gain) in &m.levels {
            let row = t
                .rows
                .iter()
                .find(|r| (r.level - level).abs() < 1e-9)
                .unwrap_or_else(|| panic!("{} missing level {level}", m.model));
            assert!(
                (row.gain_pct - expected_gain).abs() <= 0.01,
                "{} {axis:?} level {level}: gain {:.4} expected {expected_gain:.4}",
                m.model,
                row.gain_pct
            );
            if let Some(c) = best_cut {
                assert_eq!(row.best_cut, LayerId(c), "{} {axis:?} level {level} best cut", m.model);
            }
            assert!((row.best_latency_s - best_lat).abs() < 1e-9);
        }
    }
}

#[test]
fn criterion_1_gain_reproduction() {
    report("criterion 1: gain tables reproduce the reference rows", Duration::from_secs(1), || {
        let cpu_rows = vec![
            ModelRows { model: "vgg16", base_cut: 1, base_latency: 1.048, levels: vec![
                (0.45, 3.236, Some(4), 2.022, 37.51),
                (0.90, 3.260, Some(4), 2.349, 27.94),
            ]},
            // Source row prints 26.10 for the 90 % level, but the printed
            // latencies give 100*(3.468-2.564)/3.468 = 26.0669; we assert
            // the value implied by the latencies.
            ModelRows { model: "vgg19", base_cut: 1, base_latency: 1.261, levels: vec![
                (0.45, 3.395, Some(4), 2.417, 28.81),
                (0.90, 3.468, None, 2.564, 26.0669),
            ]},
            ModelRows { model: "mobilenet", base_cut: 88, base_latency: 0.280, levels: vec![
                (0.45, 0.524, Some(83), 0.291, 44.47),
                (0.90, 0.554, Some(78), 0.370, 33.21),
            ]},
            ModelRows { model: "densenet", base_cut: 428, base_latency: 1.179, levels: vec![
                (0.45, 1.554, Some(2), 1.276, 17.89),
                (0.90, 2.254, Some(2), 1.296, 42.50),
            ]},
            ModelRows { model: "resnet50", base_cut: 112, base_latency: 0.952, levels: vec![
                (0.45, 1.046, Some(1), 0.960, 8.22),
                (0.90, 1.827, Some(5), 0.953, 47.84),
            ]},
        ];
        check_axis(&cpu_rows, Axis::Cpu, 0.0);

        let mem_rows = vec![
            ModelRows { model: "vgg16", base_cut: 1, base_latency: 1.048, levels: vec![
                (0.45, 1.897, Some(4), 1.817, 4.22),
                (0.90, 2.059, Some(1), 2.059, 0.0),
            ]},
            ModelRows { model: "vgg19", base_cut: 1, base_latency: 1.261, levels: vec![
                (0.45, 3.389, Some(4), 2.040, 39.81),
                (0.90, 3.385, None, 2.039, 39.76),
            ]},
            // Source row prints 10.31 for the 90 % level, but the printed
            // latencies give 100*(1.048-0.941)/1.048 = 10.2099.
            ModelRows { model: "resnet50", base_cut: 112, base_latency: 0.952, levels: vec![
                (0.45, 1.054, Some(1), 0.945, 10.34),
                (0.90, 1.048, Some(1), 0.941, 10.2099),
            ]},
            ModelRows { model: "resnet50v2", base_cut: 2, base_latency: 0.678, levels: vec![
                (0.45, 0.684, Some(1), 0.676, 1.17),
                (0.90, 2.094, Some(87), 0.753, 64.04),
            ]},
            ModelRows { model: "lenet", base_cut: 3, base_latency: 0.008, levels: vec![
                (0.45, 0.010, Some(6), 0.009, 10.00),
                (0.90, 0.012, Some(7), 0.011, 8.33),
            ]},
        ];
        check_axis(&mem_rows, Axis::Mem, 0.0);

        let net_rows = vec![
            ModelRows { model: "vgg16", base_cut: 1, base_latency: 1.048, levels: vec![
                (25.0, 1.131, Some(1), 1.131, 0.0),
                (10.0, 3.606, Some(6), 3.004, 16.70),
            ]},
            ModelRows { model: "vgg19", base_cut: 1, base_latency: 1.261, levels: vec![
                (25.0, 5.585, Some(7), 2.489, 55.43),
                (10.0, 14.307, Some(7), 3.254, 77.25),
            ]},
            ModelRows { model: "mobilenet", base_cut: 88, base_latency: 0.280, levels: vec![
                (25.0, 0.319, Some(90), 0.293, 8.15),
                (10.0, 0.384, Some(90), 0.346, 9.89),
            ]},
            ModelRows { model: "alexnet", base_cut: 3, base_latency: 0.107, levels: vec![
                (25.0, 0.446, Some(23), 0.278, 37.67),
                (10.0, 0.516, Some(10), 0.345, 33.14),
            ]},
            ModelRows { model: "resnet50", base_cut: 112, base_latency: 0.952, levels: vec![
                (25.0, 1.174, Some(1), 0.971, 17.29),
                (10.0, 1.632, Some(1), 1.196, 26.72),
            ]},
            ModelRows { model: "resnet50v2", base_cut: 2, base_latency: 0.678, levels: vec![
                (25.0, 0.721, Some(1), 0.717, 0.55),
                (10.0, 2.295, Some(155), 0.974, 57.56),
            ]},
        ];
        check_axis(&net_rows, Axis::Net, 50.0);
    });
}

// ---------------------------------------------------------------------------
// criterion 2: cut-point counts on chains and the fan-out fixture

#[test]
fn criterion_2_cutpoint_counts() {
    report("criterion 2: chain and fan-out cut counts", Duration::from_secs(1), || {
        for n in 2..=50 {
            let g = fixtures::chain(n, n as u64);
            assert_eq!(enumerate_cutpoints(&g).len(), n - 1, "chain of {n}");
        }
        let g = fixtures::fig2();
        let cuts = enumerate_cutpoints(&g);
        let after: Vec<usize> = cuts.iter().map(|c| c.after_layer.0).collect();
        assert_eq!(after, vec![0, 8, 9]);
        // none inside the parallel block (0-based layers 1..=7)
        assert!(after.iter().all(|&a| !(1..=7).contains(&a)));
    });
}

// ---------------------------------------------------------------------------
// criterion 3: enumeration equals the brute-force prefix oracle

/// Independent oracle: for every topo prefix, collect the producers inside
/// the prefix that still feed a layer outside it, straight from the raw
/// input lists; the prefix is a cut iff exactly one producer crosses.
fn oracle_cuts(g: &DnnGraph) -> Vec<(usize, usize)> {
    let topo = g.topo_order();
    let n = g.len();
    let mut out = Vec::new();
    for i in 0..n.saturating_sub(1) {
        let prefix: std::collections::BTreeSet<usize> =
            topo.order[..=i].iter().map(|l| l.0).collect();
        let mut crossing = std::collections::BTreeSet::new();
        for j in 0..n {
            if prefix.contains(&j) {
                continue;
            }
            for inp in &g.layer(LayerId(j)).inputs {
                if prefix.contains(&inp.0) {
                    crossing.insert(inp.0);
                }
            }
        }
        if crossing.len() == 1 {
            out.push((topo.order[i].0, *crossing.iter().next().unwrap()));
        }
    }
    out
}

#[test]
fn criterion_3_cutpoint_oracle() {
    report("criterion 3: enumeration matches the prefix oracle on 500 DAGs", Duration::from_secs(10), || {
        for seed in 0..500 {
            let g = fixtures::random_dag(20, seed);
            let got: Vec<(usize, usize)> = enumerate_cutpoints(&g)
                .iter()
                .map(|c| (c.after_layer.0, c.crossing_tensor.0))
                .collect();
            assert_eq!(got, oracle_cuts(&g), "seed {seed}, model {}", g.name());
        }
    });
}

// ---------------------------------------------------------------------------
// criterion 4: grid protocol record accounting

#[test]
fn criterion_4_grid_protocol() {
    report("criterion 4: 100 grid combinations, 4000 records for 4 cuts", Duration::from_secs(5), || {
        let grid = default_grid();
        assert_eq!(grid.combination_count(), 100);
        assert_eq!(grid.repetitions, 10);

        let g = fixtures::chain(5, 1);
        assert_eq!(enumerate_cutpoints(&g).len(), 4);
        let mut n = 0u64;
        let total = sweep::run_sweep(&g, &grid, &SweepConfig::default(), |_| {
            n += 1;
            Ok(())
        })
        .unwrap();
        assert_eq!(total, 4_000);
        assert_eq!(n, 4_000);
    });
}

// ---------------------------------------------------------------------------
// criterion 5: planner optimality against brute force

fn planner_ctx<'a>(g: &'a DnnGraph, resp: &'a StressResponse) -> PlannerContext<'a> {
    PlannerContext {
        graph: g,
        resp,
        base_rtt_s: 0.0,
        edge_profile: "edge",
        cloud_profile: "cloud",
    }
}

/// Chain whose layers all compute in zero time with equal tensors, so
/// every cut ties exactly.
fn flat_chain(n: usize) -> DnnGraph {
    let layers = (0..n)
        .map(|i| LayerProfile {
            id: LayerId(i),
            name: format!("layer{}", i + 1),
            kind: if i == 0 {
                LayerKind::Input
            } else if i + 1 == n {
                LayerKind::Softmax
            } else {
                LayerKind::Convolution
            },
            inputs: if i == 0 { vec![] } else { vec![LayerId(i - 1)] },
            output_bytes: 1_000,
            base_latency: BTreeMap::from([("edge".to_string(), 0.0), ("cloud".to_string(), 0.0)]),
        })
        .collect();
    DnnGraph::new("flat".to_string(), layers).unwrap()
}

#[test]
fn criterion_5_planner_optimality() {
    use rand::{Rng, SeedableRng};
    report("criterion 5: plan equals brute-force argmin on 1000 instances", Duration::from_secs(10), || {
        let resp = StressResponse::default();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x51a7);
        for seed in 0..1000u64 {
            let g = fixtures::random_dag(12, 10_000 + seed);
            let cond = OperationalCondition::new(
                rng.gen_range(0.0..=1.0),
                rng.gen_range(0.0..=1.0),
                rng.gen_range(5.0..60.0),
            )
            .unwrap();
            let ctx = planner_ctx(&g, &resp);
            let (got, got_est) = adaptive::plan(&ctx, &cond).unwrap();

            let net = NetworkModel::new(cond.net_rate_mbps, 0.0).unwrap();
            let mut best: Option<(usize, f64)> = None;
            for cut in enumerate_cutpoints(&g) {
                let est =
                    partition_latency(&g, &cut, &cond, &resp, &net, "edge", "cloud").unwrap();
                if best.map_or(true, |(_, b)| est.total_s < b) {
                    best = Some((cut.after_layer.0, est.total_s));
                }
            }
            let (want_cut, want_total) = best.unwrap();
            assert_eq!(got.after_layer.0, want_cut, "seed {seed}");
            assert_eq!(got_est.total_s, want_total, "seed {seed}");
        }

        // all-tie graph: the smallest-index cut must win
        let g = flat_chain(6);
        let ctx = planner_ctx(&g, &resp);
        let cond = OperationalCondition::new(0.45, 0.22, 25.0).unwrap();
        let (tie, _) = adaptive::plan(&ctx, &cond).unwrap();
        assert_eq!(tie.after_layer, LayerId(0));
    });
}

// ---------------------------------------------------------------------------
// criterion 6: monotonicity in each condition axis

#[test]
fn criterion_6_monotonicity() {
    report("criterion 6: latency monotone in each axis for 100 graphs", Duration::from_secs(10), || {
        let resp = StressResponse::default();
        let grid = default_grid();
        let (ncpu, nmem, nnet) = (
            grid.cpu_levels.len(),
            grid.mem_levels.len(),
            grid.net_levels.len(),
        );
        for seed in 0..100 {
            let g = fixtures::random_dag(15, 20_000 + seed);
            for cut in enumerate_cutpoints(&g) {
                let mut lat = vec![0.0f64; ncpu * nmem * nnet];
                for (ci, &cpu) in grid.cpu_levels.iter().enumerate() {
                    for (mi, &mem) in grid.mem_levels.iter().enumerate() {
                        for (ni, &net_rate) in grid.net_levels.iter().enumerate() {
                            let cond = OperationalCondition::new(cpu, mem, net_rate).unwrap();
                            let net = NetworkModel::new(net_rate, 0.0).unwrap();
                            let est = partition_latency(
                                &g, &cut, &cond, &resp, &net, "edge", "cloud",
                            )
                            .unwrap();
                            lat[(ci * nmem + mi) * nnet + ni] = est.total_s;
                        }
                    }
                }
                let at = |ci: usize, mi: usize, ni: usize| lat[(ci * nmem + mi) * nnet + ni];
                for ci in 0..ncpu {
                    for mi in 0..nmem {
                        for ni in 0..nnet {
                            if ci + 1 < ncpu {
                                assert!(at(ci + 1, mi, ni) >= at(ci, mi, ni), "cpu, seed {seed}");
                            }
                            if mi + 1 < nmem {
                                assert!(at(ci, mi + 1, ni) >= at(ci, mi, ni), "mem, seed {seed}");
                            }
                            // net_levels ascend, so latency may only drop
                            if ni + 1 < nnet {
                                assert!(at(ci, mi, ni + 1) <= at(ci, mi, ni), "net, seed {seed}");
                            }
                        }
                    }
                }
            }
        }
    });
}

// ---------------------------------------------------------------------------
// criterion 7: adaptive dominance over the static deployment

/// Chain with competitive edge compute and geometrically shrinking
/// tensors, so the best cut moves with the conditions: deep under a fast
/// idle edge, shallow once stress or a slow link makes edge work costly.
fn pyramid_chain(n: usize, seed: u64) -> DnnGraph {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let edge_base = rng.gen_range(0.015..0.03);
    let cloud_ratio = rng.gen_range(0.7..0.9);
    let start_bytes = rng.gen_range(300_000..500_000u64);
    let layers = (0..n)
        .map(|i| LayerProfile {
            id: LayerId(i),
            name: format!("layer{}", i + 1),
            kind: if i == 0 {
                LayerKind::Input
            } else if i + 1 == n {
                LayerKind::Softmax
            } else {
                LayerKind::Convolution
            },
            inputs: if i == 0 { vec![] } else { vec![LayerId(i - 1)] },
            output_bytes: (start_bytes >> i).max(2_000),
            base_latency: BTreeMap::from([
                ("edge".to_string(), edge_base),
                ("cloud".to_string(), edge_base * cloud_ratio),
            ]),
        })
        .collect();
    DnnGraph::new(format!("pyramid{n}"), layers).unwrap()
}

#[test]
fn criterion_7_adaptive_dominance() {
    use rand::{Rng, SeedableRng};
    report("criterion 7: adaptive never loses to static on 50 scenarios", Duration::from_secs(10), || {
        let resp = StressResponse::default();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let levels = [0.0, 0.22, 0.45, 0.67, 0.90];
        let rates = [10.0, 25.0, 37.5, 50.0];
        let mut switched = 0;
        for seed in 0..50u64 {
            // pyramid chains with an extreme phase change keep the switch
            // path hot; odd seeds stay fully random
            let g = if seed % 2 == 0 {
                pyramid_chain(6 + (seed as usize % 6), 30_000 + seed)
            } else {
                fixtures::random_dag(10, 30_000 + seed)
            };
            let pick = |rng: &mut rand_chacha::ChaCha8Rng| {
                (
                    levels[rng.gen_range(0..levels.len())],
                    levels[rng.gen_range(0..levels.len())],
                    rates[rng.gen_range(0..rates.len())],
                )
            };
            let ((cpu_a, mem_a, net_a), (cpu_b, mem_b, net_b)) = if seed % 2 == 0 {
                ((0.0, 0.0, 50.0), (0.90, 0.67, 10.0))
            } else {
                (pick(&mut rng), pick(&mut rng))
            };
            let policy = RepartitionPolicy {
                min_gain_pct: 5.0,
                switch_overhead_s: rng.gen_range(0.0..2.0),
                cooldown_s: 0.0,
            };
            let scenario = Scenario {
                initial: InitialCondition { cpu: cpu_a, mem: mem_a, net: net_a },
                events: vec![ConditionEvent {
                    t_s: 5.0,
                    cpu: Some(cpu_b),
                    mem: Some(mem_b),
                    net: Some(net_b),
                }],
                requests: RequestSchedule::Rate { rate_per_s: 1.0, duration_s: 10.0 },
                policy: None,
            };
            let ctx = planner_ctx(&g, &resp);
            let adaptive_t = adaptive::simulate(&ctx, &scenario, &policy).unwrap();
            let static_t = adaptive::simulate_static(&ctx, &scenario).unwrap();
            assert_eq!(static_t.switch_count, 0);

            let allowance = adaptive_t.switch_count as f64 * policy.switch_overhead_s;
            assert!(
                adaptive_t.cumulative_latency_s <= static_t.serving_latency_s + allowance + 1e-9,
                "seed {seed}"
            );
            if adaptive_t.switch_count > 0 {
                switched += 1;
                // the switch cleared the gain threshold, so the requests
                // after it must be strictly faster in aggregate
                assert!(
                    adaptive_t.serving_latency_s < static_t.serving_latency_s,
                    "seed {seed}: {} !< {}",
                    adaptive_t.serving_latency_s,
                    static_t.serving_latency_s
                );
            }
        }
        assert!(switched > 0, "no scenario exercised a switch");
    });
}

// ---------------------------------------------------------------------------
// criterion 8: determinism of sweep and simulate, at any job count

#[test]
fn criterion_8_determinism() {
    report("criterion 8: identical bytes for identical seeds", Duration::from_secs(60), || {
        // library level: record streams are identical across runs and jobs
        let g = fixtures::chain(5, 2);
        let sweep_bytes = |jobs: usize| {
            let cfg = SweepConfig { seed: 9, jobs, ..SweepConfig::default() };
            let mut w = sweep::csv_writer(Vec::new());
            sweep::run_sweep(&g, &default_grid(), &cfg, |r| {
                w.serialize(r)?;
                Ok(())
            })
            .unwrap();
            w.into_inner().unwrap()
        };
        let a = sweep_bytes(1);
        assert_eq!(a, sweep_bytes(1));
        assert_eq!(a, sweep_bytes(4));

        // binary level: two full CLI runs agree byte for byte
        let dir = tempfile::tempdir().unwrap();
        let bin = env!("CARGO_BIN_EXE_edgecut");
        let model = dir.path().join("model.json");
        let run = |args: &[&str]| {
            let out = std::process::Command::new(bin).args(args).output().unwrap();
            assert!(out.status.success(), "edgecut {args:?}: {}", String::from_utf8_lossy(&out.stderr));
            out.stdout
        };
        run(&["gen-fixture", "chain", "--n", "6", "--seed", "3", "--out", model.to_str().unwrap()]);

        let csv_a = dir.path().join("a.csv");
        let csv_b = dir.path().join("b.csv");
        let sweep_args = |out: &std::path::Path, jobs: &str| {
            vec![
                "sweep".to_string(),
                model.to_str().unwrap().to_string(),
                "--seed".into(),
                "5".into(),
                "--jobs".into(),
                jobs.into(),
                "--out".into(),
                out.to_str().unwrap().to_string(),
            ]
        };
        let run_owned = |args: Vec<String>| {
            let out = std::process::Command::new(bin).args(&args).output().unwrap();
            assert!(out.status.success(), "edgecut {args:?}");
        };
        run_owned(sweep_args(&csv_a, "1"));
        run_owned(sweep_args(&csv_b, "4"));
        let a = std::fs::read(&csv_a).unwrap();
        let b = std::fs::read(&csv_b).unwrap();
        assert!(!a.is_empty());
        assert_eq!(a, b);
        run_owned(sweep_args(&csv_b, "1"));
        assert_eq!(a, std::fs::read(&csv_b).unwrap());

        let scenario = dir.path().join("scenario.json");
        std::fs::write(
            &scenario,
            r#"{
                "initial": {"cpu": 0.0, "mem": 0.0, "net": 50.0},
                "events": [{"t_s": 3.0, "net": 10.0}],
                "requests": {"rate_per_s": 2.0, "duration_s": 8.0},
                "policy": {"min_gain_pct": 1.0, "switch_overhead_s": 0.5, "cooldown_s": 0.0}
            }"#,
        )
        .unwrap();
        let sim = || {
            run(&[
                "simulate",
                model.to_str().unwrap(),
                scenario.to_str().unwrap(),
                "--trace",
                dir.path().join("trace.csv").to_str().unwrap(),
            ])
        };
        let first = sim();
        let first_trace = std::fs::read(dir.path().join("trace.csv")).unwrap();
        assert_eq!(first, sim());
        assert_eq!(first_trace, std::fs::read(dir.path().join("trace.csv")).unwrap());
    });
}
