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

use crate::error::{Error, Result};
use crate::units::{kbps_to_pkts_per_ms, DEFAULT_PACKET_SIZE};

/// Handling of a `k` fit that is non-positive, non-finite or impossible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegenerateK {
    /// Use `ε / r`, the slope a single FIFO bottleneck draining at the
    /// latest receiving rate `r` would produce.
    #[default]
    BottleneckPrior,
    /// Replace `k` by `k_min`.
    ClampToMin,
}

/// How the target delay `T` is derived from the windowed RTT samples.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetMode {
    #[default]
    MinRtt,
    MedianRtt,
}

/// Controller parameters. Times are milliseconds, rates packets/ms.
///
/// The first four defaults are the published ones: 50 ms epochs, `M = 100`,
/// `B = 10` packets and `δ = 3` ms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IrisParams {
    pub epoch_len: f64,
    /// `M`, stretches the useful range of `tanh`.
    pub tanh_scale: f64,
    /// `B`, packets the flow aims to keep queued.
    pub queue_load_target: f64,
    /// `δ`, bound on the expected RTT variation, ms.
    pub rtt_var_bound: f64,
    pub k_update_period: f64,
    pub target_mode: TargetMode,
    /// How far back `T` looks, ms. Unbounded by default: a finite window
    /// lets `T` climb onto the flow's own standing queue.
    pub rtt_window: f64,
    pub k_min: f64,
    pub history_cap: usize,
    /// Fewest samples a periodic refit of `k` accepts.
    pub min_fit_samples: usize,
    pub rate_floor: f64,
    pub initial_rate: f64,
    /// Per-epoch loss fraction that, when rising, ends cold start.
    pub loss_exit_threshold: f64,
    /// Fewest lost packets in one epoch that can end cold start, so a
    /// single stochastic drop in a small epoch does not.
    pub cold_start_min_losses: u32,
    /// After cold start, hold the exit rate until feedback arrives from an
    /// epoch sent at that rate. Epochs still in flight carry the doubling
    /// rates, and deciding on them replays that pattern indefinitely.
    pub settle_after_cold_start: bool,
    /// Cold start is abandoned once doubling would pass this rate.
    pub cold_start_ceiling: f64,
    /// Optional EWMA gain applied to the receiving rate before it is used
    /// as the next-epoch estimate. `None` uses the latest sample as is.
    pub recv_rate_ewma: Option<f64>,
    /// What a fit that yields `k ≤ 0` (or no fit at all) does to `k`.
    pub degenerate_k: DegenerateK,
}

impl Default for IrisParams {
    fn default() -> Self {
        IrisParams {
            epoch_len: 50.0,
            tanh_scale: 100.0,
            queue_load_target: 10.0,
            rtt_var_bound: 3.0,
            k_update_period: 5_000.0,
            target_mode: TargetMode::MinRtt,
            rtt_window: f64::INFINITY,
            k_min: 0.01,
            history_cap: 1000,
            min_fit_samples: 10,
            rate_floor: 0.01,
            initial_rate: kbps_to_pkts_per_ms(100.0, DEFAULT_PACKET_SIZE),
            loss_exit_threshold: 0.01,
            cold_start_min_losses: 2,
            settle_after_cold_start: true,
            cold_start_ceiling: 1e4,
            recv_rate_ewma: None,
            degenerate_k: DegenerateK::BottleneckPrior,
        }
    }
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be positive, got {v}")))
    }
}

impl IrisParams {
    pub fn validate(&self) -> Result<()> {
        positive("epoch_len", self.epoch_len)?;
        positive("tanh_scale", self.tanh_scale)?;
        positive("queue_load_target", self.queue_load_target)?;
        positive("rtt_var_bound", self.rtt_var_bound)?;
        positive("k_update_period", self.k_update_period)?;
        if !(self.rtt_window > 0.0) {
            return Err(Error::invalid(
                "rtt_window",
                "must be positive (inf allowed)",
            ));
        }
        positive("k_min", self.k_min)?;
        positive("rate_floor", self.rate_floor)?;
        positive("initial_rate", self.initial_rate)?;
        positive("cold_start_ceiling", self.cold_start_ceiling)?;
        if self.history_cap < 2 {
            return Err(Error::invalid(
                "history_cap",
                "must hold at least 2 records",
            ));
        }
        if self.min_fit_samples < 2 {
            return Err(Error::invalid("min_fit_samples", "must be at least 2"));
        }
        if !(0.0..1.0).contains(&self.loss_exit_threshold) {
            return Err(Error::invalid("loss_exit_threshold", "must be in [0, 1)"));
        }
        if let Some(g) = self.recv_rate_ewma {
            if !(g > 0.0 && g <= 1.0) {
                return Err(Error::invalid("recv_rate_ewma", "gain must be in (0, 1]"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn published_defaults() {
        let p = IrisParams::default();
        assert_eq!(p.epoch_len, 50.0);
        assert_eq!(p.tanh_scale, 100.0);
        assert_eq!(p.queue_load_target, 10.0);
        assert_eq!(p.rtt_var_bound, 3.0);
        assert_eq!(p.k_update_period, 5_000.0);
        assert_eq!(p.target_mode, TargetMode::MinRtt);
        p.validate().unwrap();
    }

    #[test]
    fn rejects_nonpositive() {
        let p = IrisParams {
            k_min: 0.0,
            ..IrisParams::default()
        };
        match p.validate() {
            Err(Error::InvalidConfig { field, .. }) => assert_eq!(field, "k_min"),
            other => panic!("{other:?}"),
        }
        let p = IrisParams {
            tanh_scale: -1.0,
            ..IrisParams::default()
        };
        assert!(p.validate().is_err());
    }
}
