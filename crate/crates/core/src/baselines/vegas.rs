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
pub struct VegasParams {
    pub epoch_len: f64,
    /// Lower edge of the target band, packets queued.
    pub alpha: f64,
    /// Upper edge of the target band.
    pub beta: f64,
    /// Slow start ends once the queued estimate exceeds this.
    pub gamma: f64,
    pub initial_cwnd: f64,
    pub initial_rtt: f64,
}

impl Default for VegasParams {
    fn default() -> Self {
        VegasParams {
            epoch_len: 50.0,
            alpha: 2.0,
            beta: 4.0,
            gamma: 1.0,
            initial_cwnd: 2.0,
            initial_rtt: 100.0,
        }
    }
}

impl VegasParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("epoch_len", self.epoch_len),
            ("initial_rtt", self.initial_rtt),
            ("alpha", self.alpha),
            ("gamma", self.gamma),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(name, "must be positive"));
            }
        }
        if !(self.alpha < self.beta) {
            return Err(Error::invalid("beta", "must exceed alpha"));
        }
        if !(self.initial_cwnd >= 1.0) {
            return Err(Error::invalid("initial_cwnd", "must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VegasState {
    pub base_rtt: f64,
    pub cwnd: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub slow_start: bool,
}

impl VegasState {
    pub fn new(params: &VegasParams) -> Self {
        VegasState {
            base_rtt: f64::INFINITY,
            cwnd: params.initial_cwnd,
            alpha: params.alpha,
            beta: params.beta,
            gamma: params.gamma,
            slow_start: true,
        }
    }

    pub fn observe_rtt(&mut self, rtt: f64) {
        self.base_rtt = self.base_rtt.min(rtt);
    }

    /// Packets this flow is estimated to keep queued:
    /// `cwnd·(1 − base_rtt/rtt)`.
    pub fn diff(&self, rtt: f64) -> f64 {
        self.cwnd * (1.0 - self.base_rtt / rtt)
    }

    /// Once-per-RTT window update; returns the new window.
    pub fn vegas_update(&mut self, rtt: f64) -> f64 {
        self.observe_rtt(rtt);
        let diff = self.diff(rtt);
        if self.slow_start {
            if diff > self.gamma {
                self.slow_start = false;
            } else {
                self.cwnd *= 2.0;
            }
        } else if diff < self.alpha {
            self.cwnd += 1.0;
        } else if diff > self.beta {
            self.cwnd -= 1.0;
        }
        self.cwnd = self.cwnd.max(1.0);
        self.cwnd
    }

    pub fn on_loss(&mut self) {
        self.cwnd = (self.cwnd / 2.0).max(1.0);
        self.slow_start = false;
    }
}

#[derive(Debug, Clone)]
pub struct VegasController {
    params: VegasParams,
    state: VegasState,
    srtt: Srtt,
    last_rtt: Option<f64>,
    last_update: f64,
    rtt_sum: f64,
    rtt_count: u32,
    recovery_start: f64,
}

impl VegasController {
    pub fn new(params: VegasParams) -> Result<Self> {
        params.validate()?;
        Ok(VegasController {
            state: VegasState::new(&params),
            params,
            srtt: Srtt::new(),
            last_rtt: None,
            last_update: f64::NEG_INFINITY,
            rtt_sum: 0.0,
            rtt_count: 0,
            recovery_start: f64::NEG_INFINITY,
        })
    }

    pub fn state(&self) -> &VegasState {
        &self.state
    }
}

impl Controller for VegasController {
    fn name(&self) -> &'static str {
        "vegas"
    }

    fn epoch_len(&self) -> f64 {
        self.params.epoch_len
    }

    fn on_epoch_timer(&mut self, now: f64, completed: &[EpochFeedback]) -> f64 {
        for fb in completed {
            for ack in &fb.acks {
                self.state.observe_rtt(ack.rtt);
                self.srtt.update(ack.rtt);
                self.rtt_sum += ack.rtt;
                self.rtt_count += 1;
            }
            if fb.lost.iter().any(|&sent| sent >= self.recovery_start) {
                self.state.on_loss();
                self.recovery_start = now;
            }
        }
        let srtt = self.srtt.get().unwrap_or(self.params.initial_rtt);
        if self.rtt_count > 0 && now - self.last_update >= srtt {
            let rtt = self.rtt_sum / f64::from(self.rtt_count);
            self.state.vegas_update(rtt);
            self.last_rtt = Some(rtt);
            self.last_update = now;
            self.rtt_sum = 0.0;
            self.rtt_count = 0;
        }
        self.state.cwnd / self.last_rtt.unwrap_or(self.params.initial_rtt)
    }

    fn snapshot(&self) -> ControllerSnapshot {
        ControllerSnapshot {
            in_startup: self.state.slow_start,
            ..ControllerSnapshot::default()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn steady(cwnd: f64, base: f64) -> VegasState {
        VegasState {
            base_rtt: base,
            cwnd,
            slow_start: false,
            ..VegasState::new(&VegasParams::default())
        }
    }

    #[test]
    fn grows_when_nothing_is_queued() {
        let mut s = steady(10.0, 50.0);
        assert_eq!(s.vegas_update(50.0), 11.0);
    }

    #[test]
    fn shrinks_above_beta() {
        // diff = 20·(1 − 50/100) = 10 > 4
        let mut s = steady(20.0, 50.0);
        assert_eq!(s.vegas_update(100.0), 19.0);
    }

    #[test]
    fn holds_inside_band() {
        // diff = 10·(1 − 50/75) ≈ 3.33
        let mut s = steady(10.0, 50.0);
        assert_eq!(s.vegas_update(75.0), 10.0);
        // diff = 3
        let mut s = steady(12.0, 50.0);
        assert_eq!(s.vegas_update(66.666_666_666_666_67), 12.0);
    }

    #[test]
    fn window_never_below_one() {
        let mut s = steady(5.0, 50.0);
        assert_eq!(s.vegas_update(1000.0), 4.0);
        for _ in 0..5 {
            s.on_loss();
        }
        assert_eq!(s.cwnd, 1.0);
    }

    #[test]
    fn slow_start_doubles_until_queue_shows() {
        let mut s = VegasState::new(&VegasParams::default());
        s.observe_rtt(50.0);
        assert_eq!(s.vegas_update(50.0), 4.0);
        assert!(s.slow_start);
        // diff = 4·(1 − 50/100) = 2 > gamma
        s.vegas_update(100.0);
        assert!(!s.slow_start);
    }

    #[test]
    fn rejects_inverted_band() {
        let p = VegasParams {
            alpha: 4.0,
            beta: 2.0,
            ..VegasParams::default()
        };
        assert!(p.validate().is_err());
    }
}
