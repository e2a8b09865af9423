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

//! What a sender-side controller sees: once per epoch, the epochs whose
//! packets have all been accounted for, with the ACK and loss details.

use crate::iris::{EpochRecord, IrisParams, IrisState, Phase, RateDecision};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AckSample {
    pub packet_id: u64,
    pub sent_at: f64,
    pub acked_at: f64,
    pub rtt: f64,
}

/// Outcome of one sending epoch, available once the fate of all of its
/// packets is known (or the sender gave up waiting).
#[derive(Debug, Clone, PartialEq)]
pub struct EpochFeedback {
    pub epoch: u64,
    pub start: f64,
    pub len: f64,
    pub sent: u32,
    pub delivered: u32,
    /// `sent / len`, packets/ms.
    pub send_rate: f64,
    /// Receiving rate estimate. Carried over from the last measured epoch
    /// when `measured` is false; `None` before any measurement.
    pub recv_rate: Option<f64>,
    /// Mean RTT of the acknowledged packets, carried over like `recv_rate`.
    pub mean_rtt: Option<f64>,
    /// ACK arrival time of the epoch's last acknowledged packet.
    pub last_ack_at: Option<f64>,
    /// At least one packet of the epoch was acknowledged.
    pub measured: bool,
    pub acks: Vec<AckSample>,
    /// Send times of the packets found lost.
    pub lost: Vec<f64>,
}

impl EpochFeedback {
    pub fn lost_count(&self) -> u32 {
        self.sent - self.delivered
    }

    pub fn loss_rate(&self) -> f64 {
        if self.sent == 0 {
            0.0
        } else {
            f64::from(self.lost_count()) / f64::from(self.sent)
        }
    }
}

/// Controller-specific values copied into each trace row.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ControllerSnapshot {
    pub in_startup: bool,
    pub k: Option<f64>,
    pub target_delay: Option<f64>,
}

/// A rate controller driven by epoch boundaries.
pub trait Controller: Send {
    fn name(&self) -> &'static str;

    fn epoch_len(&self) -> f64;

    /// Called at every epoch boundary with the epochs completed since the
    /// previous call, in order. Returns the sending rate, packets/ms, for
    /// the epoch that starts at `now`.
    fn on_epoch_timer(&mut self, now: f64, completed: &[EpochFeedback]) -> f64;

    fn snapshot(&self) -> ControllerSnapshot {
        ControllerSnapshot::default()
    }

    /// Steady-state decisions made since the last call, with their times.
    fn take_decisions(&mut self) -> Vec<(f64, RateDecision)> {
        Vec::new()
    }
}

/// Adapts [`IrisState`] to the epoch-feedback interface.
#[derive(Debug, Clone)]
pub struct IrisController {
    state: IrisState,
    prev_rtt: Option<f64>,
    decisions: Vec<(f64, RateDecision)>,
    /// Epochs planned so far; the epoch starting at the current timer has
    /// this index.
    planned: u64,
    /// Steady-state feedback for earlier epochs is recorded, not acted on.
    decide_from: u64,
}

impl IrisController {
    pub fn new(params: IrisParams) -> Result<Self> {
        Ok(IrisController {
            state: IrisState::new(params)?,
            prev_rtt: None,
            decisions: Vec::new(),
            planned: 0,
            decide_from: 0,
        })
    }

    pub fn state(&self) -> &IrisState {
        &self.state
    }

    fn observe(&mut self, fb: &EpochFeedback, now: f64) {
        let (Some(r), Some(rtt)) = (fb.recv_rate, fb.mean_rtt) else {
            if self.state.phase() == Phase::ColdStart {
                self.state.cold_start_empty_epoch();
            }
            return;
        };
        if !fb.measured {
            match self.state.phase() {
                // nothing sent yet: keep probing
                Phase::ColdStart if fb.sent == 0 => {
                    self.state.cold_start_empty_epoch();
                }
                // a fully lost epoch still counts as rising loss
                Phase::ColdStart => {
                    let rec = self.record(fb, r, rtt, now);
                    self.state.cold_start_step(rec, fb.loss_rate());
                }
                Phase::Steady => {}
            }
            return;
        }
        let rec = self.record(fb, r, rtt, now);
        self.prev_rtt = Some(rtt);
        match self.state.phase() {
            Phase::ColdStart => {
                self.state.cold_start_step(rec, fb.loss_rate());
                if self.state.phase() == Phase::Steady
                    && self.state.params().settle_after_cold_start
                {
                    self.decide_from = self.planned;
                }
            }
            Phase::Steady if fb.epoch < self.decide_from => {
                self.state.observe(rec, fb.loss_rate(), now);
            }
            Phase::Steady => {
                if let Ok(d) = self.state.on_epoch_end(rec, fb.loss_rate(), now) {
                    self.decisions.push((now, d));
                }
            }
        }
    }

    fn record(&self, fb: &EpochFeedback, r: f64, rtt: f64, now: f64) -> EpochRecord {
        EpochRecord {
            index: fb.epoch,
            send_rate: fb.send_rate,
            recv_rate: r,
            rtt,
            delta_rtt: self.prev_rtt.map_or(0.0, |p| rtt - p),
            epoch_end_time: now,
        }
    }
}

impl Controller for IrisController {
    fn name(&self) -> &'static str {
        "iris"
    }

    fn epoch_len(&self) -> f64 {
        self.state.params().epoch_len
    }

    fn on_epoch_timer(&mut self, now: f64, completed: &[EpochFeedback]) -> f64 {
        for fb in completed {
            self.observe(fb, now);
        }
        self.planned += 1;
        self.state.current_rate()
    }

    fn snapshot(&self) -> ControllerSnapshot {
        let startup = self.state.phase() == Phase::ColdStart;
        ControllerSnapshot {
            in_startup: startup,
            k: (!startup).then(|| self.state.k()),
            target_delay: self.state.target_delay(),
        }
    }

    fn take_decisions(&mut self) -> Vec<(f64, RateDecision)> {
        std::mem::take(&mut self.decisions)
    }
}

#[cfg(test)]
mod tests {
    use crate::units::mbps_to_pkts_per_ms;
    use crate::{run_scenario, ControllerSpec, FlowSpec, IrisParams, LinkConfig, Scenario};

    /// Largest epoch-to-epoch rate ratio of the late flow once it has been
    /// steady for a second.
    fn late_flow_swing(settle: bool) -> f64 {
        let c = mbps_to_pkts_per_ms(20.0, 1200);
        let p = IrisParams {
            settle_after_cold_start: settle,
            ..IrisParams::default()
        };
        let flows = (0..3)
            .map(|i| FlowSpec::new(ControllerSpec::Iris(p.clone()), 5_000.0 * i as f64))
            .collect();
        let s = Scenario {
            link: LinkConfig::constant(c, 25.0, (c * 25.0).ceil() as usize),
            flows,
            duration: 14_000.0,
        };
        let traces = run_scenario(&s).unwrap();
        let t = &traces[2];
        let steady = t.rows.iter().position(|r| !r.in_startup).unwrap();
        t.rows[steady + 20..]
            .windows(2)
            .map(|w| {
                w[1].pacing_rate.max(w[0].pacing_rate) / w[1].pacing_rate.min(w[0].pacing_rate)
            })
            .fold(1.0, f64::max)
    }

    #[test]
    fn settling_stops_cold_start_rates_from_echoing() {
        assert!(late_flow_swing(true) < 1.2);
        assert!(late_flow_swing(false) > 1.5);
    }
}
