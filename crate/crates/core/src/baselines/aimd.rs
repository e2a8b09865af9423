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

use serde::{Deserialize, Serialize};

use super::Srtt;
use crate::error::{Error, Result};
use crate::netsim::{Controller, ControllerSnapshot, EpochFeedback};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AimdParams {
    pub epoch_len: f64,
    pub initial_cwnd: f64,
    pub initial_ssthresh: f64,
    /// RTT assumed before the first sample, ms.
    pub initial_rtt: f64,
}

impl Default for AimdParams {
    fn default() -> Self {
        AimdParams {
            epoch_len: 50.0,
            initial_cwnd: 10.0,
            initial_ssthresh: 1e9,
            initial_rtt: 100.0,
        }
    }
}

impl AimdParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("epoch_len", self.epoch_len),
            ("initial_rtt", self.initial_rtt),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(name, "must be positive"));
            }
        }
        if !(self.initial_cwnd >= 1.0) {
            return Err(Error::invalid("initial_cwnd", "must be at least 1"));
        }
        if !(self.initial_ssthresh >= 1.0) {
            return Err(Error::invalid("initial_ssthresh", "must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AimdMode {
    SlowStart,
    Avoidance,
}

/// Window state: slow start adds one packet per ACK, congestion avoidance
/// one packet per window of ACKs, and any loss halves the window.
#[derive(Debug, Clone, PartialEq)]
pub struct AimdState {
    pub cwnd: f64,
    pub ssthresh: f64,
    pub mode: AimdMode,
    ack_credit: f64,
}

impl AimdState {
    pub fn new(cwnd: f64, ssthresh: f64) -> Self {
        let mode = if cwnd < ssthresh {
            AimdMode::SlowStart
        } else {
            AimdMode::Avoidance
        };
        AimdState {
            cwnd: cwnd.max(1.0),
            ssthresh,
            mode,
            ack_credit: 0.0,
        }
    }

    pub fn on_ack(&mut self) {
        match self.mode {
            AimdMode::SlowStart => {
                self.cwnd += 1.0;
                if self.cwnd >= self.ssthresh {
                    self.mode = AimdMode::Avoidance;
                }
            }
            AimdMode::Avoidance => {
                self.ack_credit += 1.0;
                if self.ack_credit >= self.cwnd.floor() {
                    self.ack_credit -= self.cwnd.floor();
                    self.cwnd += 1.0;
                }
            }
        }
    }

    pub fn on_loss(&mut self) {
        self.cwnd = (self.cwnd / 2.0).max(1.0);
        self.ssthresh = self.cwnd;
        self.mode = AimdMode::Avoidance;
        self.ack_credit = 0.0;
    }
}

#[derive(Debug, Clone)]
pub struct AimdController {
    params: AimdParams,
    state: AimdState,
    srtt: Srtt,
    /// Losses of packets sent before this time belong to a window that was
    /// already reduced.
    recovery_start: f64,
}

impl AimdController {
    pub fn new(params: AimdParams) -> Result<Self> {
        params.validate()?;
        Ok(AimdController {
            state: AimdState::new(params.initial_cwnd, params.initial_ssthresh),
            params,
            srtt: Srtt::new(),
            recovery_start: f64::NEG_INFINITY,
        })
    }

    pub fn state(&self) -> &AimdState {
        &self.state
    }

    fn rtt_est(&self) -> f64 {
        self.srtt.get().unwrap_or(self.params.initial_rtt)
    }
}

impl Controller for AimdController {
    fn name(&self) -> &'static str {
        "aimd"
    }

    fn epoch_len(&self) -> f64 {
        self.params.epoch_len
    }

    fn on_epoch_timer(&mut self, now: f64, completed: &[EpochFeedback]) -> f64 {
        for fb in completed {
            for ack in &fb.acks {
                self.srtt.update(ack.rtt);
                self.state.on_ack();
            }
            if fb.lost.iter().any(|&sent| sent >= self.recovery_start) {
                self.state.on_loss();
                self.recovery_start = now;
            }
        }
        self.state.cwnd / self.rtt_est()
    }

    fn snapshot(&self) -> ControllerSnapshot {
        ControllerSnapshot {
            in_startup: self.state.mode == AimdMode::SlowStart,
            ..ControllerSnapshot::default()
        }
    }
}
