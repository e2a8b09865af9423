// Copyright (c) 2026 The Iris-CC Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Batch front door behind the `iris` binary: run scenario files, write
//! traces and summaries, fit `Δrtt = k·(x − r) + b` on recorded traces and
//! sweep one scenario parameter.
//!
//! Trace CSV columns: `time_ms, flow_id, send_rate, throughput, rtt_ms,
//! queue_pkts, drops`. Rates are packets/ms; `throughput` is the sender's
//! receiving-rate estimate for the epoch. `throughput` and `rtt_ms` are
//! empty for epochs that produced no measurement.

use std::fmt::Write as _;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::thread;

use clap::{Parser, Subcommand};
use log::info;
use serde::{Deserialize, Serialize};

use crate::config::ScenarioFile;
use crate::error::{Error, Result};
use crate::iris::EpochRecord;
use crate::metrics::{self, FairnessReport, FlowSummary};
use crate::netsim::{run_scenario, FlowTrace, Scenario};
use crate::regression::{fit_k_b, plcc, samples_from_records, RegressionFit, Sample};
use crate::units::pkts_per_ms_to_mbps;

pub const TRACE_COLUMNS: [&str; 7] = [
    "time_ms",
    "flow_id",
    "send_rate",
    "throughput",
    "rtt_ms",
    "queue_pkts",
    "drops",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceCsvRow {
    pub time_ms: f64,
    pub flow_id: usize,
    pub send_rate: f64,
    pub throughput: Option<f64>,
    pub rtt_ms: Option<f64>,
    pub queue_pkts: usize,
    pub drops: u32,
}

/// Rows of all flows, ordered by time and then flow.
pub fn trace_rows(traces: &[FlowTrace]) -> Vec<TraceCsvRow> {
    let mut rows: Vec<TraceCsvRow> = traces
        .iter()
        .flat_map(|t| {
            t.rows.iter().map(move |r| TraceCsvRow {
                time_ms: r.time,
                flow_id: t.flow_id,
                send_rate: r.send_rate,
                throughput: r.measured.then_some(r.recv_rate),
                rtt_ms: r.measured.then_some(r.rtt),
                queue_pkts: r.queue,
                drops: r.losses,
            })
        })
        .collect();
    rows.sort_by(|a, b| {
        a.time_ms
            .total_cmp(&b.time_ms)
            .then(a.flow_id.cmp(&b.flow_id))
    });
    rows
}

pub fn write_trace_csv(traces: &[FlowTrace], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in trace_rows(traces) {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a trace CSV, checking that every required column is present.
/// Extra columns are ignored.
pub fn read_trace_csv(input: impl Read) -> Result<Vec<TraceCsvRow>> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers()?.clone();
    let missing: Vec<&str> = TRACE_COLUMNS
        .iter()
        .copied()
        .filter(|c| !headers.iter().any(|h| h == *c))
        .collect();
    if !missing.is_empty() {
        return Err(Error::Schema(format!(
            "missing column(s): {}",
            missing.join(", ")
        )));
    }
    let mut rows = Vec::new();
    for rec in r.deserialize() {
        rows.push(rec?);
    }
    Ok(rows)
}

/// Splits rows into per-flow runs of consecutive measured epochs. A gap
/// in measurement breaks the run so no `Δrtt` spans it.
pub fn measured_runs(rows: &[TraceCsvRow]) -> Vec<(usize, Vec<EpochRecord>)> {
    let mut flows: Vec<usize> = rows.iter().map(|r| r.flow_id).collect();
    flows.sort_unstable();
    flows.dedup();
    let mut runs = Vec::new();
    for flow in flows {
        let mut mine: Vec<&TraceCsvRow> = rows.iter().filter(|r| r.flow_id == flow).collect();
        mine.sort_by(|a, b| a.time_ms.total_cmp(&b.time_ms));
        let mut run: Vec<EpochRecord> = Vec::new();
        for (i, r) in mine.iter().enumerate() {
            match (r.throughput, r.rtt_ms) {
                (Some(recv), Some(rtt)) => {
                    let delta_rtt = run.last().map_or(0.0, |p| rtt - p.rtt);
                    run.push(EpochRecord {
                        index: i as u64,
                        send_rate: r.send_rate,
                        recv_rate: recv,
                        rtt,
                        delta_rtt,
                        epoch_end_time: r.time_ms,
                    });
                }
                _ => {
                    if !run.is_empty() {
                        runs.push((flow, std::mem::take(&mut run)));
                    }
                }
            }
        }
        if !run.is_empty() {
            runs.push((flow, run));
        }
    }
    runs
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowAnalysis {
    pub flow_id: usize,
    pub fit: Option<RegressionFit>,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisReport {
    pub fit: RegressionFit,
    pub per_flow: Vec<FlowAnalysis>,
}

impl AnalysisReport {
    pub fn render(&self) -> String {
        let f = &self.fit;
        let mut s = String::new();
        let _ = writeln!(s, "k     {:.6}", f.k);
        let _ = writeln!(s, "b     {:.6}", f.b);
        match f.plcc {
            Some(p) => {
                let _ = writeln!(s, "plcc  {p:.6}");
            }
            None => {
                let _ = writeln!(s, "plcc  undefined");
            }
        }
        let _ = writeln!(s, "n     {}", f.n);
        if self.per_flow.len() > 1 {
            let _ = writeln!(s, "\nflow  n       k            b            plcc");
            for a in &self.per_flow {
                match &a.fit {
                    Some(f) => {
                        let p = f.plcc.map_or("undefined".into(), |p| format!("{p:.4}"));
                        let _ = writeln!(
                            s,
                            "{:<5} {:<7} {:<12.6} {:<12.6} {}",
                            a.flow_id, a.samples, f.k, f.b, p
                        );
                    }
                    None => {
                        let _ = writeln!(s, "{:<5} {:<7} unfittable", a.flow_id, a.samples);
                    }
                }
            }
        }
        s
    }
}

/// Pools `(x − r, Δrtt)` samples across flows and fits them.
pub fn analyze_rows(rows: &[TraceCsvRow]) -> Result<AnalysisReport> {
    let runs = measured_runs(rows);
    let mut pooled: Vec<Sample> = Vec::new();
    let mut per_flow: Vec<(usize, Vec<Sample>)> = Vec::new();
    for (flow, run) in &runs {
        let s = samples_from_records(run);
        match per_flow.last_mut() {
            Some((f, v)) if f == flow => v.extend_from_slice(&s),
            _ => per_flow.push((*flow, s.clone())),
        }
        pooled.extend(s);
    }
    let fit = fit_k_b(&pooled).map_err(|why| Error::Unfittable(why.to_string()))?;
    debug_assert_eq!(fit.plcc, plcc(&pooled));
    Ok(AnalysisReport {
        fit,
        per_flow: per_flow
            .into_iter()
            .map(|(flow_id, s)| FlowAnalysis {
                flow_id,
                fit: fit_k_b(&s).ok(),
                samples: s.len(),
            })
            .collect(),
    })
}

pub fn analyze(trace: impl AsRef<Path>) -> Result<AnalysisReport> {
    let rows = read_trace_csv(fs::File::open(trace)?)?;
    analyze_rows(&rows)
}

/// Aggregate view of one finished run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub packet_size: u32,
    pub duration: f64,
    pub flows: Vec<FlowSummary>,
    pub utilization: f64,
    /// Jain index of whole-run per-flow throughput.
    pub jain: Option<f64>,
    pub convergence_time: Option<f64>,
    pub stability: f64,
}

impl RunSummary {
    pub fn new(scenario: &Scenario, traces: &[FlowTrace], packet_size: u32) -> Self {
        let end = scenario.duration;
        let flows: Vec<FlowSummary> = traces
            .iter()
            .map(|t| FlowSummary::new(t, 0.0, end))
            .collect();
        let rates: Vec<f64> = flows.iter().map(|f| f.throughput).collect();
        let fairness = FairnessReport::new(traces);
        RunSummary {
            packet_size,
            duration: end,
            utilization: metrics::utilization(traces, &scenario.link, 0.0, end),
            jain: metrics::jain_index(&rates),
            convergence_time: if traces.len() > 1 {
                fairness.convergence_time
            } else {
                None
            },
            stability: fairness.stability,
            flows,
        }
    }

    fn mbps(&self, rate: f64) -> f64 {
        pkts_per_ms_to_mbps(rate, self.packet_size)
    }

    pub fn render_text(&self) -> String {
        let opt = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.2}"));
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<5} {:<10} {:>10} {:>10} {:>10} {:>10} {:>10} {:>8}",
            "flow", "controller", "tput_mbps", "rtt_ms", "qdelay_ms", "sent", "dropped", "loss_%"
        );
        for f in &self.flows {
            let _ = writeln!(
                s,
                "{:<5} {:<10} {:>10.3} {:>10} {:>10} {:>10} {:>10} {:>8.3}",
                f.flow_id,
                f.controller,
                self.mbps(f.throughput),
                opt(f.mean_rtt),
                opt(f.queuing_delay),
                f.sent,
                f.dropped,
                100.0 * f.loss_rate
            );
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "duration_ms       {}", self.duration);
        let _ = writeln!(s, "utilization       {:.4}", self.utilization);
        let _ = writeln!(
            s,
            "jain              {}",
            self.jain.map_or("-".into(), |j| format!("{j:.4}"))
        );
        let _ = writeln!(s, "convergence_ms    {}", opt(self.convergence_time));
        let _ = writeln!(s, "stability_pkt_ms  {:.4}", self.stability);
        s
    }

    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        #[derive(Serialize)]
        struct Row<'a> {
            flow_id: usize,
            controller: &'a str,
            throughput_pkts_per_ms: f64,
            throughput_mbps: f64,
            mean_rtt_ms: Option<f64>,
            queuing_delay_ms: Option<f64>,
            sent: u64,
            delivered: u64,
            dropped: u64,
            loss_rate: f64,
        }
        let mut w = csv::Writer::from_writer(out);
        for f in &self.flows {
            w.serialize(Row {
                flow_id: f.flow_id,
                controller: &f.controller,
                throughput_pkts_per_ms: f.throughput,
                throughput_mbps: self.mbps(f.throughput),
                mean_rtt_ms: f.mean_rtt,
                queuing_delay_ms: f.queuing_delay,
                sent: f.sent,
                delivered: f.delivered,
                dropped: f.dropped,
                loss_rate: f.loss_rate,
            })?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub traces: Vec<FlowTrace>,
    pub summary: RunSummary,
    pub trace_path: PathBuf,
}

/// Runs a parsed scenario file and writes its trace and summaries under
/// `out_dir`.
pub fn run_file(file: &ScenarioFile, out_dir: &Path, seed: Option<u64>) -> Result<RunOutput> {
    let mut file = file.clone();
    if let Some(seed) = seed {
        file.link.seed = seed;
    }
    let scenario = file.to_scenario()?;
    fs::create_dir_all(out_dir)?;
    info!(
        "running {} flow(s) for {} ms",
        scenario.flows.len(),
        scenario.duration
    );
    let traces = run_scenario(&scenario)?;
    let trace_path = out_dir.join(&file.output.trace);
    write_trace_csv(&traces, fs::File::create(&trace_path)?)?;
    let summary = RunSummary::new(&scenario, &traces, file.packet_size);
    fs::write(out_dir.join(&file.output.summary), summary.render_text())?;
    summary.write_csv(fs::File::create(out_dir.join(&file.output.summary_csv))?)?;
    Ok(RunOutput {
        traces,
        summary,
        trace_path,
    })
}

pub fn run(
    config: impl AsRef<Path>,
    out_dir: impl AsRef<Path>,
    seed: Option<u64>,
) -> Result<RunOutput> {
    let file = ScenarioFile::load(config)?;
    run_file(&file, out_dir.as_ref(), seed)
}

/// Scenario parameters `sweep` can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    /// Link random loss probability.
    RandomLoss,
    /// Link one-way propagation delay, ms.
    PropDelay,
    /// Replicates the first flow entry this many times, keeping its
    /// stagger; other entries are dropped.
    FlowCount,
    /// Constant link capacity in Mbps, replacing the schedule.
    Bandwidth,
}

impl SweepParam {
    pub const NAMES: [&'static str; 4] = ["random_loss", "prop_delay", "flow_count", "bandwidth"];

    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "random_loss" => SweepParam::RandomLoss,
            "prop_delay" => SweepParam::PropDelay,
            "flow_count" => SweepParam::FlowCount,
            "bandwidth" => SweepParam::Bandwidth,
            other => {
                return Err(Error::Usage(format!(
                    "unknown sweep parameter `{other}` (expected one of {})",
                    Self::NAMES.join(", ")
                )))
            }
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            SweepParam::RandomLoss => "random_loss",
            SweepParam::PropDelay => "prop_delay",
            SweepParam::FlowCount => "flow_count",
            SweepParam::Bandwidth => "bandwidth",
        }
    }

    pub fn apply(self, file: &ScenarioFile, value: f64) -> Result<ScenarioFile> {
        let mut f = file.clone();
        match self {
            SweepParam::RandomLoss => f.link.random_loss = value,
            SweepParam::PropDelay => f.link.prop_delay = value,
            SweepParam::FlowCount => {
                if !(value >= 1.0 && value.fract() == 0.0) {
                    return Err(Error::Usage(format!(
                        "flow_count must be a positive integer, got {value}"
                    )));
                }
                let mut first = f
                    .flows
                    .first()
                    .cloned()
                    .ok_or_else(|| Error::invalid("flows", "at least one flow is required"))?;
                first.count = value as usize;
                f.flows = vec![first];
            }
            SweepParam::Bandwidth => {
                f.link.bandwidth = vec![crate::config::BandwidthEntry {
                    start: 0.0,
                    capacity: None,
                    mbps: Some(value),
                }];
            }
        }
        Ok(f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub flows: usize,
    pub utilization: f64,
    pub throughput_mbps: f64,
    pub mean_rtt_ms: Option<f64>,
    pub queuing_delay_ms: Option<f64>,
    pub loss_rate: f64,
    pub jain: Option<f64>,
    pub convergence_ms: Option<f64>,
    pub stability: f64,
}

impl SweepRow {
    fn new(value: f64, s: &RunSummary) -> Self {
        let n = s.flows.len().max(1) as f64;
        let mean = |v: Vec<f64>| (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);
        let sent: u64 = s.flows.iter().map(|f| f.sent).sum();
        let dropped: u64 = s.flows.iter().map(|f| f.dropped).sum();
        SweepRow {
            value,
            flows: s.flows.len(),
            utilization: s.utilization,
            throughput_mbps: s.flows.iter().map(|f| s.mbps(f.throughput)).sum::<f64>() / n,
            mean_rtt_ms: mean(s.flows.iter().filter_map(|f| f.mean_rtt).collect()),
            queuing_delay_ms: mean(s.flows.iter().filter_map(|f| f.queuing_delay).collect()),
            loss_rate: if sent == 0 {
                0.0
            } else {
                dropped as f64 / sent as f64
            },
            jain: s.jain,
            convergence_ms: s.convergence_time,
            stability: s.stability,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub param: SweepParam,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn render_text(&self) -> String {
        let opt = |v: Option<f64>, p: usize| v.map_or("-".to_string(), |v| format!("{v:.p$}"));
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:>12} {:>5} {:>7} {:>10} {:>9} {:>9} {:>8} {:>6} {:>10} {:>9}",
            self.param.name(),
            "flows",
            "util",
            "tput_mbps",
            "rtt_ms",
            "qdelay_ms",
            "loss_%",
            "jain",
            "conv_ms",
            "stability"
        );
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:>12} {:>5} {:>7.4} {:>10.3} {:>9} {:>9} {:>8.3} {:>6} {:>10} {:>9.4}",
                r.value,
                r.flows,
                r.utilization,
                r.throughput_mbps,
                opt(r.mean_rtt_ms, 2),
                opt(r.queuing_delay_ms, 2),
                100.0 * r.loss_rate,
                opt(r.jain, 3),
                opt(r.convergence_ms, 0),
                r.stability
            );
        }
        s
    }

    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for r in &self.rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Runs the scenario once per value, in parallel, and returns rows in the
/// order the values were given. With `out_dir`, each run's files go to
/// `<out_dir>/<param>_<i>/` and the table to `<out_dir>/sweep.csv`.
pub fn sweep_file(
    file: &ScenarioFile,
    param: SweepParam,
    values: &[f64],
    out_dir: Option<&Path>,
) -> Result<SweepReport> {
    if values.is_empty() {
        return Err(Error::Usage("sweep needs at least one value".into()));
    }
    let files = values
        .iter()
        .map(|&v| param.apply(file, v))
        .collect::<Result<Vec<_>>>()?;
    // Validate everything before spending time on any run.
    for f in &files {
        f.to_scenario()?;
    }
    let workers = thread::available_parallelism().map_or(1, |n| n.get());
    let mut summaries: Vec<Result<RunSummary>> = Vec::with_capacity(files.len());
    for (chunk_idx, chunk) in files.chunks(workers).enumerate() {
        let results: Vec<Result<RunSummary>> = thread::scope(|s| {
            let handles: Vec<_> = chunk
                .iter()
                .enumerate()
                .map(|(j, f)| {
                    let i = chunk_idx * workers + j;
                    s.spawn(move || -> Result<RunSummary> {
                        match out_dir {
                            Some(dir) => {
                                let sub = dir.join(format!("{}_{i}", param.name()));
                                Ok(run_file(f, &sub, None)?.summary)
                            }
                            None => {
                                let scenario = f.to_scenario()?;
                                let traces = run_scenario(&scenario)?;
                                Ok(RunSummary::new(&scenario, &traces, f.packet_size))
                            }
                        }
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("sweep worker panicked"))
                .collect()
        });
        summaries.extend(results);
    }
    let mut rows = Vec::with_capacity(values.len());
    for (v, s) in values.iter().zip(summaries) {
        let s = s?;
        rows.push(SweepRow::new(*v, &s));
    }
    let report = SweepReport { param, rows };
    if let Some(dir) = out_dir {
        report.write_csv(fs::File::create(dir.join("sweep.csv"))?)?;
    }
    Ok(report)
}

pub fn sweep(
    config: impl AsRef<Path>,
    param: &str,
    values: &[f64],
    out_dir: Option<&Path>,
) -> Result<SweepReport> {
    let param = SweepParam::parse(param)?;
    if values.is_empty() {
        return Err(Error::Usage("sweep needs at least one value".into()));
    }
    let file = ScenarioFile::load(config)?;
    sweep_file(&file, param, values, out_dir)
}

#[derive(Debug, Parser)]
#[command(
    name = "iris",
    version,
    about = "Iris congestion control simulator and trace analyzer"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a scenario file and write trace.csv, summary.txt and summary.csv.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides link.seed from the file.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Fit Δrtt = k·(x − r) + b on a trace CSV and report k, b, PLCC and n.
    Analyze {
        #[arg(long)]
        trace: PathBuf,
    },
    /// Re-run a scenario once per value of one parameter.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// One of random_loss, prop_delay, flow_count, bandwidth.
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        values: Vec<f64>,
        /// Also write each run's files and sweep.csv here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Executes a parsed command line, returning what should go to stdout.
pub fn execute(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Run { config, out, seed } => {
            let r = run(config, out, *seed)?;
            Ok(format!(
                "{}\ntrace written to {}\n",
                r.summary.render_text(),
                r.trace_path.display()
            ))
        }
        Command::Analyze { trace } => Ok(analyze(trace)?.render()),
        Command::Sweep {
            config,
            param,
            values,
            out,
        } => Ok(sweep(config, param, values, out.as_deref())?.render_text()),
    }
}

/// Process exit code for an error: 2 for usage mistakes, 1 otherwise.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Usage(_) => 2,
        _ => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(t: f64, flow: usize, x: f64, r: Option<f64>, rtt: Option<f64>) -> TraceCsvRow {
        TraceCsvRow {
            time_ms: t,
            flow_id: flow,
            send_rate: x,
            throughput: r,
            rtt_ms: rtt,
            queue_pkts: 0,
            drops: 0,
        }
    }

    #[test]
    fn csv_round_trip_keeps_empty_fields() {
        let rows = vec![
            row(0.0, 0, 1.0, None, None),
            row(50.0, 0, 1.5, Some(1.25), Some(41.5)),
        ];
        let mut buf = Vec::new();
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            for r in &rows {
                w.serialize(r).unwrap();
            }
        }
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("time_ms,flow_id,send_rate,throughput,rtt_ms,queue_pkts,drops\n"));
        assert!(text.contains("\n0.0,0,1.0,,,0,0\n"));
        assert_eq!(read_trace_csv(buf.as_slice()).unwrap(), rows);
    }

    #[test]
    fn missing_columns_are_a_schema_error() {
        let e = read_trace_csv("time_ms,flow_id,send_rate\n0,0,1\n".as_bytes()).unwrap_err();
        match e {
            Error::Schema(msg) => {
                assert!(
                    msg.contains("throughput") && msg.contains("rtt_ms"),
                    "{msg}"
                );
            }
            other => panic!("expected schema error, got {other}"),
        }
    }

    #[test]
    fn gaps_split_runs() {
        let rows = vec![
            row(0.0, 0, 1.0, Some(1.0), Some(40.0)),
            row(50.0, 0, 1.0, Some(1.0), Some(41.0)),
            row(100.0, 0, 1.0, None, None),
            row(150.0, 0, 1.0, Some(1.0), Some(90.0)),
            row(0.0, 1, 1.0, Some(1.0), Some(40.0)),
        ];
        let runs = measured_runs(&rows);
        let lens: Vec<(usize, usize)> = runs.iter().map(|(f, r)| (*f, r.len())).collect();
        assert_eq!(lens, vec![(0, 2), (0, 1), (1, 1)]);
    }

    #[test]
    fn analyze_recovers_a_line() {
        // Δrtt = 3·(x − r) + 0.5, spread over two flows.
        let mut rows = Vec::new();
        for flow in 0..2 {
            let mut rtt = 50.0;
            for i in 0..20 {
                let d = ((i * 7 + flow * 3) % 11) as f64 / 10.0 - 0.5;
                rtt += 3.0 * d + 0.5;
                rows.push(row(i as f64 * 50.0, flow, 2.0 + d, Some(2.0), Some(rtt)));
            }
        }
        let rep = analyze_rows(&rows).unwrap();
        assert!((rep.fit.k - 3.0).abs() < 1e-9);
        assert!((rep.fit.b - 0.5).abs() < 1e-9);
        assert_eq!(rep.fit.n, 38);
        assert!((rep.fit.plcc.unwrap() - 1.0).abs() < 1e-9);
        assert_eq!(rep.per_flow.len(), 2);
        assert!(rep.render().starts_with("k     3.000000\n"));
    }

    #[test]
    fn two_rows_are_unfittable() {
        let rows = vec![
            row(0.0, 0, 1.0, Some(1.0), Some(40.0)),
            row(50.0, 0, 1.2, Some(1.0), Some(41.0)),
        ];
        assert!(matches!(analyze_rows(&rows), Err(Error::Unfittable(_))));
    }

    #[test]
    fn sweep_params() {
        assert!(matches!(SweepParam::parse("queue"), Err(Error::Usage(_))));
        for n in SweepParam::NAMES {
            assert_eq!(SweepParam::parse(n).unwrap().name(), n);
        }
    }
}
