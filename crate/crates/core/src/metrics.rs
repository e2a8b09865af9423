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

//! Evaluation quantities computed from finished traces: throughput,
//! delay, Jain fairness, convergence time and stability.
//!
//! Everything here is a pure function of the traces. Throughput means
//! delivered packets attributed to the epoch that sent them.

use crate::netsim::{FlowTrace, LinkConfig, TraceRow};

pub const DEFAULT_JAIN_WINDOW: f64 = 1_000.0;
pub const DEFAULT_JAIN_THRESHOLD: f64 = 0.9;
pub const DEFAULT_HOLD: f64 = 5_000.0;

/// `(Σx)² / (n·Σx²)`. `None` for an empty list, all-zero rates, or any
/// negative or non-finite rate.
pub fn jain_index(rates: &[f64]) -> Option<f64> {
    if rates.is_empty() || rates.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
        return None;
    }
    let sum: f64 = rates.iter().sum();
    let sq: f64 = rates.iter().map(|r| r * r).sum();
    if sq == 0.0 {
        return None;
    }
    // Rounding can push an all-equal vector a hair above 1.
    Some((sum * sum / (rates.len() as f64 * sq)).min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JainPoint {
    /// Start of the averaging window, ms.
    pub time: f64,
    pub index: f64,
}

fn rows_in(trace: &FlowTrace, from: f64, to: f64) -> impl Iterator<Item = &TraceRow> {
    trace
        .rows
        .iter()
        .filter(move |r| r.time >= from && r.time < to)
}

/// Delivered packets per ms over `[from, to)`.
pub fn throughput(trace: &FlowTrace, from: f64, to: f64) -> f64 {
    if to <= from {
        return 0.0;
    }
    let delivered: u64 = rows_in(trace, from, to)
        .map(|r| u64::from(r.delivered))
        .sum();
    delivered as f64 / (to - from)
}

/// Jain index of per-flow throughput over windows `[t, t + window)` for
/// `t = from, from + step, …` while the window fits before `to`. Only
/// flows that have started by `t` take part.
pub fn jain_series(
    traces: &[FlowTrace],
    from: f64,
    to: f64,
    window: f64,
    step: f64,
) -> Vec<JainPoint> {
    assert!(
        window > 0.0 && step > 0.0,
        "window and step must be positive"
    );
    let mut out = Vec::new();
    let mut i = 0u64;
    loop {
        let t = from + i as f64 * step;
        if t + window > to {
            break;
        }
        let rates: Vec<f64> = traces
            .iter()
            .filter(|tr| tr.start <= t)
            .map(|tr| throughput(tr, t, t + window))
            .collect();
        if let Some(index) = jain_index(&rates) {
            out.push(JainPoint { time: t, index });
        }
        i += 1;
    }
    out
}

/// Earliest offset from `series[0]`-time `start` after which every point
/// stays above `threshold` for at least `hold` ms. The series must extend
/// a full `hold` past the candidate, otherwise it does not count.
pub fn convergence_in_series(
    series: &[JainPoint],
    start: f64,
    threshold: f64,
    hold: f64,
) -> Option<f64> {
    let last = series.last()?.time;
    let mut run_start: Option<f64> = None;
    for p in series.iter().filter(|p| p.time >= start) {
        if p.index > threshold {
            let s = *run_start.get_or_insert(p.time);
            if p.time - s >= hold {
                return Some(s - start);
            }
        } else {
            run_start = None;
        }
    }
    // A run that reaches the end only counts if it already spans `hold`.
    run_start.filter(|s| last - s >= hold).map(|s| s - start)
}

/// Time from `new_flow_start` until Jain's index over 1 s windows stays
/// above `threshold` for `hold` ms; `None` if that never happens before
/// the traces end.
pub fn convergence_time(
    traces: &[FlowTrace],
    new_flow_start: f64,
    threshold: f64,
    hold: f64,
) -> Option<f64> {
    let end = trace_end(traces);
    let step = traces
        .iter()
        .map(|t| t.epoch_len)
        .fold(f64::INFINITY, f64::min);
    let series = jain_series(traces, new_flow_start, end, DEFAULT_JAIN_WINDOW, step);
    convergence_in_series(&series, new_flow_start, threshold, hold)
}

/// End of the longest trace: start of its last epoch plus one epoch.
pub fn trace_end(traces: &[FlowTrace]) -> f64 {
    traces
        .iter()
        .filter_map(|t| t.rows.last().map(|r| r.time + t.epoch_len))
        .fold(0.0, f64::max)
}

/// Population standard deviation; 0 for fewer than two values.
pub fn std_dev(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt()
}

/// Mean over flows of the standard deviation of per-epoch goodput from
/// `from` on, packets/ms.
pub fn stability(traces: &[FlowTrace], from: f64) -> f64 {
    let devs: Vec<f64> = traces
        .iter()
        .map(|t| {
            let g: Vec<f64> = rows_in(t, from, f64::INFINITY).map(|r| r.goodput).collect();
            std_dev(&g)
        })
        .collect();
    if devs.is_empty() {
        0.0
    } else {
        devs.iter().sum::<f64>() / devs.len() as f64
    }
}

/// Mean RTT of the measured epochs in `[from, to)`, ms.
pub fn mean_rtt(trace: &FlowTrace, from: f64, to: f64) -> Option<f64> {
    let (sum, n) = rows_in(trace, from, to)
        .filter(|r| r.measured)
        .fold((0.0, 0u32), |(s, n), r| (s + r.rtt, n + 1));
    (n > 0).then(|| sum / f64::from(n))
}

/// `mean_rtt − RTprop`, ms.
pub fn queuing_delay(trace: &FlowTrace, from: f64, to: f64) -> Option<f64> {
    mean_rtt(trace, from, to).map(|rtt| rtt - trace.rtprop)
}

/// Aggregate delivered packets over what the link could serve in
/// `[from, to)`.
pub fn utilization(traces: &[FlowTrace], link: &LinkConfig, from: f64, to: f64) -> f64 {
    let cap = link.capacity_integral(from, to);
    if cap <= 0.0 {
        return 0.0;
    }
    traces.iter().map(|t| throughput(t, from, to)).sum::<f64>() * (to - from) / cap
}

#[derive(Debug, Clone, PartialEq)]
pub struct FairnessReport {
    pub jain_series: Vec<JainPoint>,
    /// Relative to the last flow's start, ms.
    pub convergence_time: Option<f64>,
    /// Packets/ms, measured after convergence (or after the last start if
    /// the flows never converged).
    pub stability: f64,
    pub per_flow_mean_rate: Vec<f64>,
    pub per_flow_mean_rtt: Vec<Option<f64>>,
}

impl FairnessReport {
    pub fn new(traces: &[FlowTrace]) -> Self {
        let last_start = traces.iter().map(|t| t.start).fold(0.0, f64::max);
        let end = trace_end(traces);
        let step = traces
            .iter()
            .map(|t| t.epoch_len)
            .fold(f64::INFINITY, f64::min);
        let jain_series = if step.is_finite() {
            jain_series(traces, last_start, end, DEFAULT_JAIN_WINDOW, step)
        } else {
            Vec::new()
        };
        let convergence_time = convergence_in_series(
            &jain_series,
            last_start,
            DEFAULT_JAIN_THRESHOLD,
            DEFAULT_HOLD,
        );
        let settled = last_start + convergence_time.unwrap_or(0.0);
        FairnessReport {
            stability: stability(traces, settled),
            per_flow_mean_rate: traces.iter().map(|t| throughput(t, settled, end)).collect(),
            per_flow_mean_rtt: traces.iter().map(|t| mean_rtt(t, settled, end)).collect(),
            jain_series,
            convergence_time,
        }
    }
}

/// Per-flow numbers for summary reports.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowSummary {
    pub flow_id: usize,
    pub controller: String,
    /// Packets/ms.
    pub throughput: f64,
    pub mean_rtt: Option<f64>,
    pub queuing_delay: Option<f64>,
    pub sent: u64,
    pub delivered: u64,
    pub dropped: u64,
    /// Dropped over sent.
    pub loss_rate: f64,
}

impl FlowSummary {
    pub fn new(trace: &FlowTrace, from: f64, to: f64) -> Self {
        let s = &trace.stats;
        let dropped = s.dropped_overflow + s.dropped_random;
        FlowSummary {
            flow_id: trace.flow_id,
            controller: trace.controller.clone(),
            throughput: throughput(trace, from.max(trace.start), to),
            mean_rtt: mean_rtt(trace, from, to),
            queuing_delay: queuing_delay(trace, from, to),
            sent: s.sent,
            delivered: s.delivered,
            dropped,
            loss_rate: if s.sent == 0 {
                0.0
            } else {
                dropped as f64 / s.sent as f64
            },
        }
    }
}
