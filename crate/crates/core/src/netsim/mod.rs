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

//! Deterministic discrete-event simulator of flows sharing one bottleneck.
//!
//! Topology is a dumbbell reduced to its essentials: every sender feeds a
//! single drop-tail FIFO, the bottleneck serves it at the scheduled
//! capacity, and each flow has its own propagation delay on both sides of
//! the link. The reverse path is ideal: ACKs are never queued or lost.
//! Random loss is applied to packets as they arrive at the queue.
//!
//! All randomness comes from one ChaCha stream seeded by
//! [`LinkConfig::seed`], consumed in event order, so a scenario and seed
//! always produce bit-identical traces.

mod controller;
mod event;
mod link;
mod sender;

pub use controller::{AckSample, Controller, ControllerSnapshot, EpochFeedback, IrisController};
pub use event::{ms_to_ns, ns_to_ms, EventKind, EventQueue, Nanos, SimEvent};
pub use link::{Bottleneck, EnqueueOutcome, QueuedPacket};
pub use sender::{estimate_receiving_rate, EpochPlan, FlowSender};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::baselines::{AimdController, AimdParams, VegasController, VegasParams};
use crate::error::{Error, Result};
use crate::iris::{IrisParams, RateDecision};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandwidthStep {
    /// When this capacity takes effect, ms.
    pub start: f64,
    /// Packets/ms.
    pub capacity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkConfig {
    pub bandwidth_schedule: Vec<BandwidthStep>,
    /// Default one-way propagation delay, ms. Round-trip propagation is
    /// twice this.
    pub prop_delay: f64,
    pub queue_capacity: usize,
    pub random_loss: f64,
    pub seed: u64,
}

impl LinkConfig {
    /// Constant-capacity link.
    pub fn constant(capacity: f64, prop_delay: f64, queue_capacity: usize) -> Self {
        LinkConfig {
            bandwidth_schedule: vec![BandwidthStep {
                start: 0.0,
                capacity,
            }],
            prop_delay,
            queue_capacity,
            random_loss: 0.0,
            seed: 0,
        }
    }

    /// Capacity in force at `time`.
    pub fn capacity_at(&self, time: f64) -> f64 {
        self.bandwidth_schedule
            .iter()
            .take_while(|s| s.start <= time)
            .last()
            .map_or(self.bandwidth_schedule[0].capacity, |s| s.capacity)
    }

    /// Packets the schedule can serve over `[from, to)`.
    pub fn capacity_integral(&self, from: f64, to: f64) -> f64 {
        let mut total = 0.0;
        for (i, step) in self.bandwidth_schedule.iter().enumerate() {
            let end = self
                .bandwidth_schedule
                .get(i + 1)
                .map_or(f64::INFINITY, |n| n.start);
            let lo = step.start.max(from);
            let hi = end.min(to);
            if hi > lo {
                total += (hi - lo) * step.capacity;
            }
        }
        total
    }

    pub fn validate(&self) -> Result<()> {
        let sched = &self.bandwidth_schedule;
        if sched.is_empty() {
            return Err(Error::invalid("link.bandwidth", "schedule is empty"));
        }
        if sched[0].start != 0.0 {
            return Err(Error::invalid(
                "link.bandwidth",
                "schedule must start at 0 ms",
            ));
        }
        for w in sched.windows(2) {
            if !(w[1].start > w[0].start) {
                return Err(Error::invalid(
                    "link.bandwidth",
                    "schedule times must be strictly increasing",
                ));
            }
        }
        if let Some(s) = sched
            .iter()
            .find(|s| !(s.capacity.is_finite() && s.capacity > 0.0))
        {
            return Err(Error::invalid(
                "link.bandwidth",
                format!("capacity must be positive, got {}", s.capacity),
            ));
        }
        if !(self.prop_delay.is_finite() && self.prop_delay >= 0.0) {
            return Err(Error::invalid(
                "link.prop_delay",
                "must be a nonnegative number",
            ));
        }
        if self.queue_capacity < 1 {
            return Err(Error::invalid(
                "link.queue_capacity",
                "must be at least 1 packet",
            ));
        }
        if !(0.0..1.0).contains(&self.random_loss) {
            return Err(Error::invalid(
                "link.random_loss",
                format!("must be in [0, 1), got {}", self.random_loss),
            ));
        }
        Ok(())
    }
}

/// Which controller a flow runs, with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum ControllerSpec {
    Iris(IrisParams),
    Aimd(AimdParams),
    Vegas(VegasParams),
}

impl ControllerSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ControllerSpec::Iris(_) => "iris",
            ControllerSpec::Aimd(_) => "aimd",
            ControllerSpec::Vegas(_) => "vegas",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ControllerSpec::Iris(p) => p.validate(),
            ControllerSpec::Aimd(p) => p.validate(),
            ControllerSpec::Vegas(p) => p.validate(),
        }
    }

    pub fn build(&self) -> Result<Box<dyn Controller>> {
        Ok(match self {
            ControllerSpec::Iris(p) => Box::new(IrisController::new(p.clone())?),
            ControllerSpec::Aimd(p) => Box::new(AimdController::new(p.clone())?),
            ControllerSpec::Vegas(p) => Box::new(VegasController::new(p.clone())?),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowSpec {
    pub controller: ControllerSpec,
    /// ms.
    pub start: f64,
    /// One-way propagation delay override, ms.
    pub prop_delay: Option<f64>,
}

impl FlowSpec {
    pub fn new(controller: ControllerSpec, start: f64) -> Self {
        FlowSpec {
            controller,
            start,
            prop_delay: None,
        }
    }

    pub fn iris(start: f64) -> Self {
        Self::new(ControllerSpec::Iris(IrisParams::default()), start)
    }

    pub fn aimd(start: f64) -> Self {
        Self::new(ControllerSpec::Aimd(AimdParams::default()), start)
    }

    pub fn vegas(start: f64) -> Self {
        Self::new(ControllerSpec::Vegas(VegasParams::default()), start)
    }

    pub fn with_prop_delay(mut self, one_way_ms: f64) -> Self {
        self.prop_delay = Some(one_way_ms);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub link: LinkConfig,
    pub flows: Vec<FlowSpec>,
    /// ms.
    pub duration: f64,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.link.validate()?;
        if self.flows.is_empty() {
            return Err(Error::invalid("flows", "at least one flow is required"));
        }
        if !(self.duration.is_finite() && self.duration >= 0.0) {
            return Err(Error::invalid("duration", "must be a nonnegative number"));
        }
        for (i, f) in self.flows.iter().enumerate() {
            if !(f.start.is_finite() && f.start >= 0.0) {
                return Err(Error::invalid(
                    format!("flows[{i}].start"),
                    "must be nonnegative",
                ));
            }
            if let Some(p) = f.prop_delay {
                if !(p.is_finite() && p >= 0.0) {
                    return Err(Error::invalid(
                        format!("flows[{i}].prop_delay"),
                        "must be nonnegative",
                    ));
                }
            }
            f.controller.validate().map_err(|e| match e {
                Error::InvalidConfig { field, reason } => {
                    Error::invalid(format!("flows[{i}].{field}"), reason)
                }
                other => other,
            })?;
        }
        Ok(())
    }

    pub fn one_way_delay(&self, flow: usize) -> f64 {
        self.flows[flow].prop_delay.unwrap_or(self.link.prop_delay)
    }

    pub fn rtprop(&self, flow: usize) -> f64 {
        2.0 * self.one_way_delay(flow)
    }
}

/// One row per sending epoch.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TraceRow {
    /// Epoch start, ms.
    pub time: f64,
    /// Rate the controller asked for, packets/ms.
    pub pacing_rate: f64,
    /// Packets actually sent in the epoch divided by its length.
    pub send_rate: f64,
    /// The sender's receiving-rate estimate for the epoch.
    pub recv_rate: f64,
    /// Packets of this epoch that were delivered, per ms of epoch.
    pub goodput: f64,
    /// Mean RTT of the epoch's acknowledged packets, ms; 0 before the
    /// first measurement.
    pub rtt: f64,
    /// Bottleneck queue occupancy when the epoch started, packets.
    pub queue: usize,
    pub sent: u32,
    pub delivered: u32,
    pub losses: u32,
    pub measured: bool,
    pub in_startup: bool,
    pub k: Option<f64>,
    pub target_delay: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FlowStats {
    pub sent: u64,
    pub delivered: u64,
    pub acked: u64,
    pub dropped_overflow: u64,
    pub dropped_random: u64,
    /// Packets queued or propagating toward the receiver when the run ended.
    pub in_flight: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowTrace {
    pub flow_id: usize,
    pub controller: String,
    pub start: f64,
    pub rtprop: f64,
    pub epoch_len: f64,
    pub rows: Vec<TraceRow>,
    pub decisions: Vec<(f64, RateDecision)>,
    pub stats: FlowStats,
}

/// Per-packet log entry, kept only when requested.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketRecord {
    pub flow_id: usize,
    pub packet_id: u64,
    pub sent_at: f64,
    pub outcome: EnqueueOutcome,
    pub occupancy_at_arrival: usize,
    /// Remaining service time of the packet being transmitted, ms.
    pub busy_remaining: f64,
    pub service_time: f64,
    pub departed_at: Option<f64>,
    pub delivered_at: Option<f64>,
    pub acked_at: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SimOutput {
    pub traces: Vec<FlowTrace>,
    /// Indexed by flow, then packet id.
    pub packets: Option<Vec<Vec<PacketRecord>>>,
    /// Number of events processed.
    pub events: u64,
}

struct FlowRuntime {
    controller: Box<dyn Controller>,
    sender: FlowSender,
    fwd: Nanos,
    rev: Nanos,
    rows: Vec<TraceRow>,
    settled: Vec<bool>,
    decisions: Vec<(f64, RateDecision)>,
    stats: FlowStats,
}

impl FlowRuntime {
    fn absorb_feedback(&mut self, fbs: &[EpochFeedback]) {
        for fb in fbs {
            let i = fb.epoch as usize;
            let row = &mut self.rows[i];
            row.recv_rate = fb.recv_rate.unwrap_or(0.0);
            row.rtt = fb.mean_rtt.unwrap_or(0.0);
            row.delivered = fb.delivered;
            row.losses = fb.lost_count();
            row.goodput = f64::from(fb.delivered) / fb.len;
            row.measured = fb.measured;
            self.settled[i] = true;
        }
    }
}

pub struct Simulation {
    scenario: Scenario,
    link: Bottleneck,
    events: EventQueue,
    rng: ChaCha8Rng,
    flows: Vec<FlowRuntime>,
    depart_pending: bool,
    end: Nanos,
    packets: Option<Vec<Vec<PacketRecord>>>,
    processed: u64,
}

impl Simulation {
    pub fn new(scenario: Scenario) -> Result<Self> {
        scenario.validate()?;
        let mut flows = Vec::with_capacity(scenario.flows.len());
        for (i, f) in scenario.flows.iter().enumerate() {
            let controller = f.controller.build()?;
            let sender = FlowSender::new(controller.epoch_len());
            let one_way = ms_to_ns(scenario.one_way_delay(i));
            flows.push(FlowRuntime {
                controller,
                sender,
                fwd: one_way,
                rev: one_way,
                rows: Vec::new(),
                settled: Vec::new(),
                decisions: Vec::new(),
                stats: FlowStats::default(),
            });
        }
        let link = Bottleneck::new(
            scenario.link.bandwidth_schedule[0].capacity,
            scenario.link.queue_capacity,
            scenario.link.random_loss,
        );
        let mut events = EventQueue::new();
        let end = ms_to_ns(scenario.duration);
        for (i, step) in scenario.link.bandwidth_schedule.iter().enumerate().skip(1) {
            events.push(
                ms_to_ns(step.start),
                EventKind::BandwidthChange,
                0,
                i as u64,
                0,
            );
        }
        for (i, f) in scenario.flows.iter().enumerate() {
            events.push(ms_to_ns(f.start), EventKind::EpochTimer, i, 0, 0);
        }
        Ok(Simulation {
            rng: ChaCha8Rng::seed_from_u64(scenario.link.seed),
            scenario,
            link,
            events,
            flows,
            depart_pending: false,
            end,
            packets: None,
            processed: 0,
        })
    }

    /// Keep a per-packet log (memory grows with the packet count).
    pub fn record_packets(mut self) -> Self {
        self.packets = Some(vec![Vec::new(); self.flows.len()]);
        self
    }

    pub fn run(mut self) -> SimOutput {
        while let Some(t) = self.events.peek_time() {
            if t >= self.end {
                break;
            }
            let ev = self.events.pop().expect("peeked");
            self.processed += 1;
            self.handle(ev);
        }
        self.finish()
    }

    fn handle(&mut self, ev: SimEvent) {
        let now = ev.time;
        match ev.kind {
            EventKind::BandwidthChange => {
                let step = self.scenario.link.bandwidth_schedule[ev.packet_id as usize];
                self.link.set_rate(step.capacity);
            }
            EventKind::EpochTimer => self.on_timer(ev.flow_id, now),
            EventKind::PacketArriveQueue => self.on_arrival(ev, now),
            EventKind::PacketDepartQueue => self.on_depart(now),
            EventKind::PacketDelivered => {
                let f = &mut self.flows[ev.flow_id];
                f.stats.delivered += 1;
                let rev = f.rev;
                self.log(ev.flow_id, ev.packet_id, |p| {
                    p.delivered_at = Some(ns_to_ms(now))
                });
                self.events.push(
                    now + rev,
                    EventKind::AckDelivered,
                    ev.flow_id,
                    ev.packet_id,
                    ev.sent_at,
                );
            }
            EventKind::AckDelivered => {
                let f = &mut self.flows[ev.flow_id];
                f.stats.acked += 1;
                f.sender.on_ack(ev.packet_id, ev.sent_at, now);
                self.log(ev.flow_id, ev.packet_id, |p| {
                    p.acked_at = Some(ns_to_ms(now))
                });
            }
        }
    }

    fn log(&mut self, flow: usize, id: u64, update: impl FnOnce(&mut PacketRecord)) {
        if let Some(p) = self
            .packets
            .as_mut()
            .and_then(|v| v[flow].get_mut(id as usize))
        {
            update(p);
        }
    }

    fn on_timer(&mut self, flow: usize, now: Nanos) {
        let occupancy = self.link.occupancy();
        let f = &mut self.flows[flow];
        f.sender.expire(now);
        let fbs = f.sender.take_ready();
        f.absorb_feedback(&fbs);
        let now_ms = ns_to_ms(now);
        let rate = f.controller.on_epoch_timer(now_ms, &fbs);
        f.decisions.extend(f.controller.take_decisions());
        let snap = f.controller.snapshot();
        let plan = f.sender.plan_epoch(now, rate);
        let epoch_len = f.controller.epoch_len();
        debug_assert_eq!(plan.index as usize, f.rows.len());
        f.rows.push(TraceRow {
            time: now_ms,
            pacing_rate: rate,
            send_rate: plan.send_times.len() as f64 / epoch_len,
            queue: occupancy,
            sent: plan.send_times.len() as u32,
            in_startup: snap.in_startup,
            k: snap.k,
            target_delay: snap.target_delay,
            ..TraceRow::default()
        });
        f.settled.push(false);
        let next = now + f.sender.epoch_ns();
        for (j, &t) in plan.send_times.iter().enumerate() {
            self.events.push(
                t,
                EventKind::PacketArriveQueue,
                flow,
                plan.first_id + j as u64,
                t,
            );
        }
        self.events.push(next, EventKind::EpochTimer, flow, 0, 0);
    }

    fn on_arrival(&mut self, ev: SimEvent, now: Nanos) {
        let occupancy = self.link.occupancy();
        let busy = self.link.busy_until().saturating_sub(now);
        let service = self.link.service_time();
        let pkt = QueuedPacket {
            flow_id: ev.flow_id,
            packet_id: ev.packet_id,
            sent_at: ev.sent_at,
        };
        let outcome = self.link.enqueue(pkt, &mut self.rng);
        let stats = &mut self.flows[ev.flow_id].stats;
        stats.sent += 1;
        match outcome {
            EnqueueOutcome::Queued => {
                if !self.depart_pending {
                    let t = self.link.next_departure(now).expect("just queued");
                    self.events.push(
                        t,
                        EventKind::PacketDepartQueue,
                        ev.flow_id,
                        ev.packet_id,
                        ev.sent_at,
                    );
                    self.depart_pending = true;
                }
            }
            EnqueueOutcome::DroppedOverflow => stats.dropped_overflow += 1,
            EnqueueOutcome::DroppedRandom => stats.dropped_random += 1,
        }
        if let Some(log) = self.packets.as_mut() {
            debug_assert_eq!(log[ev.flow_id].len() as u64, ev.packet_id);
            log[ev.flow_id].push(PacketRecord {
                flow_id: ev.flow_id,
                packet_id: ev.packet_id,
                sent_at: ns_to_ms(ev.sent_at),
                outcome,
                occupancy_at_arrival: occupancy,
                busy_remaining: ns_to_ms(busy),
                service_time: ns_to_ms(service),
                departed_at: None,
                delivered_at: None,
                acked_at: None,
            });
        }
    }

    fn on_depart(&mut self, now: Nanos) {
        let pkt = self
            .link
            .depart(now)
            .expect("departure scheduled for a queued packet");
        let fwd = self.flows[pkt.flow_id].fwd;
        self.events.push(
            now + fwd,
            EventKind::PacketDelivered,
            pkt.flow_id,
            pkt.packet_id,
            pkt.sent_at,
        );
        self.log(pkt.flow_id, pkt.packet_id, |p| {
            p.departed_at = Some(ns_to_ms(now))
        });
        match (self.link.next_departure(now), self.link.head()) {
            (Some(t), Some(head)) => {
                let (flow, id, sent) = (head.flow_id, head.packet_id, head.sent_at);
                self.events
                    .push(t, EventKind::PacketDepartQueue, flow, id, sent);
            }
            _ => self.depart_pending = false,
        }
    }

    fn finish(mut self) -> SimOutput {
        for q in self.link.queued() {
            self.flows[q.flow_id].stats.in_flight += 1;
        }
        for ev in self.events.iter() {
            if ev.kind == EventKind::PacketDelivered {
                self.flows[ev.flow_id].stats.in_flight += 1;
            }
        }
        let mut traces = Vec::with_capacity(self.flows.len());
        for (i, mut f) in self.flows.into_iter().enumerate() {
            let fbs = f.sender.take_ready();
            f.absorb_feedback(&fbs);
            f.decisions.extend(f.controller.take_decisions());
            // epochs still in flight carry the last measurement forward
            let mut last = (0.0, 0.0);
            for (row, settled) in f.rows.iter_mut().zip(&f.settled) {
                if *settled && row.measured {
                    last = (row.recv_rate, row.rtt);
                } else if !*settled || !row.measured {
                    row.recv_rate = last.0;
                    row.rtt = last.1;
                }
            }
            traces.push(FlowTrace {
                flow_id: i,
                controller: f.controller.name().to_string(),
                start: self.scenario.flows[i].start,
                rtprop: self.scenario.rtprop(i),
                epoch_len: f.controller.epoch_len(),
                rows: f.rows,
                decisions: f.decisions,
                stats: f.stats,
            });
        }
        SimOutput {
            traces,
            packets: self.packets,
            events: self.processed,
        }
    }
}

/// Validates and runs a scenario to completion.
pub fn run_scenario(scenario: &Scenario) -> Result<Vec<FlowTrace>> {
    Ok(Simulation::new(scenario.clone())?.run().traces)
}
