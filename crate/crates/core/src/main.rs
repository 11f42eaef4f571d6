use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use edgecut::adaptive::{self, PlannerContext, RepartitionPolicy, Scenario};
use edgecut::analysis::{self, Aggregation, Axis, SensitivityRule};
use edgecut::costmodel::{load_stress_response, OperationalCondition, StressResponse};
use edgecut::cutpoints::enumerate_cutpoints_opts;
use edgecut::error::Error;
use edgecut::fixtures;
use edgecut::graph::DnnGraph;
use edgecut::sweep::{self, ConditionGrid, MeasurementRecord, SweepConfig};

/// Partition planner and simulator for edge-cloud distributed DNNs.
#[derive(Parser)]
#[command(name = "edgecut", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Verbose diagnostics on stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportKind {
    Topk,
    Sensitivity,
    Gains,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Table,
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum FixtureShape {
    Chain,
    Diamond,
    Fig2,
    Table1Like,
}

#[derive(Subcommand)]
enum Command {
    /// List the valid partition points of a model.
    Cutpoints {
        model: PathBuf,
        /// Also emit the all-cloud cut (nothing on the edge).
        #[arg(long)]
        allow_all_cloud: bool,
    },
    /// Pick the best cut for one operational condition.
    Plan {
        model: PathBuf,
        /// Edge CPU stress fraction in [0,1].
        #[arg(long, default_value_t = 0.0)]
        cpu: f64,
        /// Edge memory stress fraction in [0,1].
        #[arg(long, default_value_t = 0.0)]
        mem: f64,
        /// Network data transfer rate in Mb/s.
        #[arg(long, default_value_t = 50.0)]
        net: f64,
        #[arg(long)]
        calibration: Option<PathBuf>,
        #[arg(long, default_value_t = 0.0)]
        rtt: f64,
        #[arg(long, default_value = "edge")]
        edge_profile: String,
        #[arg(long, default_value = "cloud")]
        cloud_profile: String,
    },
    /// Evaluate every cut under a condition grid and emit CSV records.
    Sweep {
        model: PathBuf,
        /// Condition grid document; defaults to the 5x5x4 grid, 10 reps.
        #[arg(long)]
        grid: Option<PathBuf>,
        /// Relative sigma of multiplicative jitter.
        #[arg(long, default_value_t = 0.02)]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output CSV path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "sim")]
        platform: String,
        #[arg(long)]
        calibration: Option<PathBuf>,
        #[arg(long, default_value = "edge")]
        edge_profile: String,
        #[arg(long, default_value = "cloud")]
        cloud_profile: String,
        /// Worker threads; output is identical at any value.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Aggregate a measurement CSV into reports.
    Analyze {
        csv: PathBuf,
        #[arg(long, value_enum)]
        report: ReportKind,
        /// Number of cuts in the top-k distribution.
        #[arg(long, default_value_t = 5)]
        k: usize,
        /// Operational-condition axis for sensitivity/gains reports.
        #[arg(long, value_enum)]
        axis: Option<Axis>,
        /// Baseline axis level for the gains report; defaults to 0 for
        /// stress axes and the maximum rate for the network axis.
        #[arg(long)]
        baseline_level: Option<f64>,
        /// Judge sensitivity by best gain reaching this percentage
        /// instead of by a shifted optimal cut.
        #[arg(long)]
        gain_threshold: Option<f64>,
        /// Aggregate repetitions with the median instead of the mean.
        #[arg(long)]
        median: bool,
        #[arg(long, value_enum, default_value = "table")]
        format: OutputFormat,
    },
    /// Replay a condition timeline against a request schedule.
    Simulate {
        model: PathBuf,
        scenario: PathBuf,
        /// Write per-request trace CSV here.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        calibration: Option<PathBuf>,
        #[arg(long, default_value = "edge")]
        edge_profile: String,
        #[arg(long, default_value = "cloud")]
        cloud_profile: String,
    },
    /// Emit a synthetic model document.
    GenFixture {
        #[arg(value_enum)]
        shape: FixtureShape,
        /// Layer count for chain fixtures.
        #[arg(long, default_value_t = 5)]
        n: usize,
        /// Sequential model shape name for table1-like fixtures.
        #[arg(long)]
        model: Option<String>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read_file(path: &Path) -> Result<String, Error> {
    let mut text = String::new();
    File::open(path)
        .map_err(|e| Error::Validation(format!("cannot open {}: {e}", path.display())))?
        .read_to_string(&mut text)?;
    Ok(text)
}

fn load_model(path: &Path) -> Result<DnnGraph, Error> {
    DnnGraph::from_json_str(&read_file(path)?)
}

fn load_calibration(path: Option<&PathBuf>) -> Result<(StressResponse, f64), Error> {
    match path {
        Some(p) => {
            let cal = load_stress_response(&read_file(p)?)?;
            Ok((cal.response, cal.base_rtt_s))
        }
        None => Ok((StressResponse::default(), 0.0)),
    }
}

/// Honors EDGECUT_OUT_DIR for relative output paths.
fn resolve_out(path: &Path) -> PathBuf {
    match std::env::var_os("EDGECUT_OUT_DIR") {
        Some(dir) if path.is_relative() => PathBuf::from(dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn out_writer(path: Option<&PathBuf>) -> Result<Box<dyn Write>, Error> {
    match path {
        Some(p) => {
            let p = resolve_out(p);
            Ok(Box::new(File::create(&p).map_err(|e| {
                Error::Validation(format!("cannot create {}: {e}", p.display()))
            })?))
        }
        None => Ok(Box::new(io::stdout().lock())),
    }
}

/// Reports use the 1-based layer naming of the measurement tables;
/// machine formats keep the 0-based ids from the CSV schema.
fn layer_label(id: edgecut::LayerId) -> String {
    format!("layer {}", id.0 + 1)
}

fn cmd_cutpoints(model: &Path, allow_all_cloud: bool) -> Result<(), Error> {
    let graph = load_model(model)?;
    let cuts = enumerate_cutpoints_opts(&graph, allow_all_cloud);
    let mut stdout = io::stdout().lock();
    for (i, cut) in cuts.iter().enumerate() {
        writeln!(
            stdout,
            "{}\t{}\t{} bytes",
            i,
            graph.layer(cut.after_layer).name,
            cut.crossing_bytes(&graph)
        )?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_plan(
    model: &Path,
    cpu: f64,
    mem: f64,
    net: f64,
    calibration: Option<&PathBuf>,
    rtt: f64,
    edge_profile: &str,
    cloud_profile: &str,
) -> Result<(), Error> {
    let graph = load_model(model)?;
    let (resp, cal_rtt) = load_calibration(calibration)?;
    let cond = OperationalCondition::new(cpu, mem, net)?;
    let ctx = PlannerContext {
        graph: &graph,
        resp: &resp,
        base_rtt_s: if rtt > 0.0 { rtt } else { cal_rtt },
        edge_profile,
        cloud_profile,
    };
    let (cut, est) = adaptive::plan(&ctx, &cond)?;
    println!(
        "best cut: after {} ({}), crossing {} bytes",
        layer_label(cut.after_layer),
        graph.layer(cut.after_layer).name,
        cut.crossing_bytes(&graph)
    );
    println!(
        "latency: edge {:.6} s + transfer {:.6} s + cloud {:.6} s = {:.6} s",
        est.edge_s, est.transfer_s, est.cloud_s, est.total_s
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    model: &Path,
    grid: Option<&PathBuf>,
    noise: f64,
    seed: u64,
    out: Option<&PathBuf>,
    platform: String,
    calibration: Option<&PathBuf>,
    edge_profile: String,
    cloud_profile: String,
    jobs: usize,
) -> Result<(), Error> {
    let graph = load_model(model)?;
    let grid = match grid {
        Some(p) => ConditionGrid::load(&read_file(p)?)?,
        None => sweep::default_grid(),
    };
    let (resp, base_rtt_s) = load_calibration(calibration)?;
    let cfg = SweepConfig {
        platform,
        edge_profile,
        cloud_profile,
        resp,
        base_rtt_s,
        noise,
        seed,
        jobs,
    };
    let mut w = sweep::csv_writer(out_writer(out)?);
    let n = sweep::run_sweep(&graph, &grid, &cfg, |rec| {
        w.serialize(rec)?;
        Ok(())
    })?;
    w.flush()?;
    log::info!("emitted {n} records");
    Ok(())
}

fn read_all_records(path: &Path) -> Result<Vec<MeasurementRecord>, Error> {
    let file = File::open(path)
        .map_err(|e| Error::Validation(format!("cannot open {}: {e}", path.display())))?;
    sweep::read_records_csv(file).collect()
}

fn require_axis(axis: Option<Axis>) -> Result<Axis, Error> {
    axis.ok_or_else(|| Error::Validation("--axis is required for this report".into()))
}

fn default_baseline(records: &[MeasurementRecord], axis: Axis) -> f64 {
    match axis {
        Axis::Cpu | Axis::Mem => 0.0,
        Axis::Net => records
            .iter()
            .map(|r| r.net_rate_mbps)
            .fold(f64::NEG_INFINITY, f64::max),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_analyze(
    csv: &Path,
    report: ReportKind,
    k: usize,
    axis: Option<Axis>,
    baseline_level: Option<f64>,
    gain_threshold: Option<f64>,
    median: bool,
    format: OutputFormat,
) -> Result<(), Error> {
    let records = read_all_records(csv)?;
    let agg = if median {
        Aggregation::Median
    } else {
        Aggregation::Mean
    };
    let mut stdout = io::stdout().lock();
    match report {
        ReportKind::Topk => {
            let optima = analysis::optimal_cuts_with(records.into_iter().map(Ok), agg)?;
            // one distribution per (model, platform)
            let mut groups: BTreeMap<(String, String), Vec<analysis::OptimalCut>> =
                BTreeMap::new();
            for o in optima {
                groups
                    .entry((o.key.model.clone(), o.key.platform.clone()))
                    .or_default()
                    .push(o);
            }
            let mut all = Vec::new();
            for ((model, platform), optima) in groups {
                let top = analysis::topk_distribution(&optima, k)?;
                match format {
                    OutputFormat::Table => {
                        writeln!(stdout, "{model} on {platform}: top {k} cuts over {} conditions", optima.len())?;
                        for s in &top {
                            writeln!(
                                stdout,
                                "  {:<10} {:>6.2} %  ({} conditions)",
                                layer_label(s.cut_after),
                                s.percentage,
                                s.count
                            )?;
                        }
                    }
                    OutputFormat::Csv => {
                        for s in &top {
                            writeln!(
                                stdout,
                                "{model},{platform},{},{},{}",
                                s.cut_after, s.percentage, s.count
                            )?;
                        }
                    }
                    OutputFormat::Json => {
                        all.push(serde_json::json!({
                            "model": model, "platform": platform, "top": top
                        }));
                    }
                }
            }
            if matches!(format, OutputFormat::Json) {
                writeln!(stdout, "{}", serde_json::to_string_pretty(&all)?)?;
            }
        }
        ReportKind::Sensitivity => {
            let rule = match gain_threshold {
                Some(th) => SensitivityRule::GainThreshold(th),
                None => SensitivityRule::CutShift,
            };
            let axes = match axis {
                Some(a) => vec![a],
                None => vec![Axis::Cpu, Axis::Mem, Axis::Net],
            };
            let mut rows: BTreeMap<(String, String), BTreeMap<String, bool>> = BTreeMap::new();
            for a in axes {
                let name = format!("{a:?}").to_lowercase();
                for (mp, y) in analysis::sensitivity(&records, a, rule)? {
                    rows.entry(mp).or_default().insert(name.clone(), y);
                }
            }
            match format {
                OutputFormat::Json => {
                    let v: Vec<_> = rows
                        .iter()
                        .map(|((m, p), by_axis)| {
                            serde_json::json!({"model": m, "platform": p, "sensitive": by_axis})
                        })
                        .collect();
                    writeln!(stdout, "{}", serde_json::to_string_pretty(&v)?)?;
                }
                _ => {
                    for ((m, p), by_axis) in rows {
                        let cells: Vec<String> = by_axis
                            .iter()
                            .map(|(a, y)| format!("{a}={}", if *y { "Y" } else { "N" }))
                            .collect();
                        writeln!(stdout, "{m} on {p}: {}", cells.join(" "))?;
                    }
                }
            }
        }
        ReportKind::Gains => {
            let axis = require_axis(axis)?;
            let baseline = baseline_level.unwrap_or_else(|| default_baseline(&records, axis));
            let tables = analysis::gain_table_with(&records, axis, baseline, agg)?;
            match format {
                OutputFormat::Json => {
                    writeln!(stdout, "{}", serde_json::to_string_pretty(&tables)?)?;
                }
                OutputFormat::Csv => {
                    writeln!(
                        stdout,
                        "model,platform,level,static_cut,static_latency_s,best_cut,best_latency_s,gain_pct"
                    )?;
                    for t in &tables {
                        for r in &t.rows {
                            writeln!(
                                stdout,
                                "{},{},{},{},{},{},{},{:.2}",
                                t.model,
                                t.platform,
                                r.level,
                                t.baseline_cut,
                                r.static_latency_s,
                                r.best_cut,
                                r.best_latency_s,
                                r.gain_pct
                            )?;
                        }
                    }
                }
                OutputFormat::Table => {
                    for t in &tables {
                        writeln!(
                            stdout,
                            "{} on {} (baseline {}: {:.3} s at {})",
                            t.model,
                            t.platform,
                            t.axis_label,
                            t.baseline_latency_s,
                            layer_label(t.baseline_cut)
                        )?;
                        for r in &t.rows {
                            writeln!(
                                stdout,
                                "  {:<14} static {:.3} s ({}) best {:.3} s ({}) gain {:.2} %",
                                r.label,
                                r.static_latency_s,
                                layer_label(t.baseline_cut),
                                r.best_latency_s,
                                layer_label(r.best_cut),
                                r.gain_pct
                            )?;
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

fn cmd_simulate(
    model: &Path,
    scenario_path: &Path,
    trace_out: Option<&PathBuf>,
    calibration: Option<&PathBuf>,
    edge_profile: &str,
    cloud_profile: &str,
) -> Result<(), Error> {
    let graph = load_model(model)?;
    let scenario = Scenario::load(&read_file(scenario_path)?)?;
    let (resp, base_rtt_s) = load_calibration(calibration)?;
    let policy = scenario.policy.unwrap_or_else(RepartitionPolicy::default);
    let ctx = PlannerContext {
        graph: &graph,
        resp: &resp,
        base_rtt_s,
        edge_profile,
        cloud_profile,
    };
    let trace = adaptive::simulate(&ctx, &scenario, &policy)?;

    if let Some(path) = trace_out {
        let mut w = out_writer(Some(path))?;
        writeln!(w, "t_s,cut_after,latency_s,cumulative_s")?;
        for r in &trace.requests {
            writeln!(w, "{},{},{},{}", r.t_s, r.cut_after, r.latency_s, r.cumulative_s)?;
        }
    }
    println!(
        "requests {}  switches {}  serving {:.6} s  overhead {:.6} s  total {:.6} s",
        trace.requests.len(),
        trace.switch_count,
        trace.serving_latency_s,
        trace.overhead_s,
        trace.cumulative_latency_s
    );
    for d in &trace.decisions {
        println!(
            "t={:.3}: {:?} {} -> {} (predicted gain {:.2} %)",
            d.t_s,
            d.action,
            layer_label(d.from_cut),
            layer_label(d.to_cut),
            d.predicted_gain_pct
        );
    }
    Ok(())
}

fn cmd_gen_fixture(
    shape: FixtureShape,
    n: usize,
    model: Option<&str>,
    seed: u64,
    out: Option<&PathBuf>,
) -> Result<(), Error> {
    let graph = match shape {
        FixtureShape::Chain => {
            if n < 1 {
                return Err(Error::Validation("chain needs at least 1 layer".into()));
            }
            fixtures::chain(n, seed)
        }
        FixtureShape::Diamond => fixtures::diamond(),
        FixtureShape::Fig2 => fixtures::fig2(),
        FixtureShape::Table1Like => {
            let name = model.ok_or_else(|| {
                Error::Validation("--model is required for table1-like fixtures".into())
            })?;
            fixtures::table1_like(name, seed)?
        }
    };
    let mut w = out_writer(out)?;
    writeln!(w, "{}", graph.to_json_string())?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Cutpoints {
            model,
            allow_all_cloud,
        } => cmd_cutpoints(&model, allow_all_cloud),
        Command::Plan {
            model,
            cpu,
            mem,
            net,
            calibration,
            rtt,
            edge_profile,
            cloud_profile,
        } => cmd_plan(
            &model,
            cpu,
            mem,
            net,
            calibration.as_ref(),
            rtt,
            &edge_profile,
            &cloud_profile,
        ),
        Command::Sweep {
            model,
            grid,
            noise,
            seed,
            out,
            platform,
            calibration,
            edge_profile,
            cloud_profile,
            jobs,
        } => cmd_sweep(
            &model,
            grid.as_ref(),
            noise,
            seed,
            out.as_ref(),
            platform,
            calibration.as_ref(),
            edge_profile,
            cloud_profile,
            jobs,
        ),
        Command::Analyze {
            csv,
            report,
            k,
            axis,
            baseline_level,
            gain_threshold,
            median,
            format,
        } => cmd_analyze(
            &csv,
            report,
            k,
            axis,
            baseline_level,
            gain_threshold,
            median,
            format,
        ),
        Command::Simulate {
            model,
            scenario,
            trace,
            calibration,
            edge_profile,
            cloud_profile,
        } => cmd_simulate(
            &model,
            &scenario,
            trace.as_ref(),
            calibration.as_ref(),
            &edge_profile,
            &cloud_profile,
        ),
        Command::GenFixture {
            shape,
            n,
            model,
            seed,
            out,
        } => cmd_gen_fixture(shape, n, model.as_deref(), seed, out.as_ref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::from_env(
        env_logger::Env::default().default_filter_or(if cli.verbose { "info" } else { "warn" }),
    )
    .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
