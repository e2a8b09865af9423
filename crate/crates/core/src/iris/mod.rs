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

//! The Iris rate controller.
//!
//! Each completed epoch yields a measurement `(x, r, rtt)`. The controller
//! estimates its own queue load `x·(rtt − T)`, where `T` is a windowed
//! baseline RTT, and compares it with the target `B`:
//!
//! ```text
//! U      = x·(rtt − T) − B
//! d      = −δ·tanh(U / M)
//! x_next = r + d / k
//! ```
//!
//! `d` is the RTT variation the controller wants to cause next epoch, and
//! `k` converts it into a rate change using the learned relation
//! `Δrtt ≈ k·(x − r)`. `k` is refitted every few seconds from recent
//! epochs. A slow-start style cold start doubles the rate each epoch until
//! loss rises, then fits the first `k` from what it saw.

mod params;
mod state;
mod target;

pub use params::{DegenerateK, IrisParams, TargetMode};
pub use state::{IrisState, Phase};
pub use target::TargetDelay;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Measurements for one completed sending epoch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub index: u64,
    /// Sending rate `x`, packets/ms.
    pub send_rate: f64,
    /// Receiving rate `r`, packets/ms.
    pub recv_rate: f64,
    /// Mean RTT of the epoch's acknowledged packets, ms.
    pub rtt: f64,
    /// `rtt` minus the previous record's `rtt`, ms. Zero for the first
    /// record of a flow.
    pub delta_rtt: f64,
    pub epoch_end_time: f64,
}

/// Output of one steady-state decision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateDecision {
    /// Rate for the next epoch, packets/ms.
    pub next_rate: f64,
    /// Expected RTT variation `d`, ms. Always strictly inside `(−δ, δ)`.
    pub expected_rtt_var: f64,
    /// Objective `U`, packets.
    pub objective_value: f64,
    /// The `k` the decision was made with.
    pub k: f64,
    /// `rtt − T` at decision time, ms.
    pub queuing_delay: f64,
}

/// Queue-load objective `U = x·(rtt − T) − B`.
///
/// Negative when the flow holds fewer than `B` packets in the bottleneck.
/// `rtt < T` is allowed and simply gives `U < −B`.
pub fn compute_objective(x: f64, rtt: f64, target_delay: f64, queue_load_target: f64) -> f64 {
    x * (rtt - target_delay) - queue_load_target
}

/// Expected RTT variation `d = −δ·tanh(U/M)`.
pub fn expected_rtt_variation(objective: f64, rtt_var_bound: f64, tanh_scale: f64) -> f64 {
    let d = -rtt_var_bound * (objective / tanh_scale).tanh();
    // tanh rounds to ±1 beyond |x| ≈ 19; keep the bound strict.
    if d.abs() >= rtt_var_bound {
        rtt_var_bound.next_down().copysign(d)
    } else {
        d
    }
}

/// Next sending rate `max(floor, r + d/k)`.
///
/// `k` below `k_min` is a caller bug: the state machine clamps every fitted
/// value before it gets here.
pub fn next_sending_rate(r_est: f64, d: f64, k: f64, k_min: f64, rate_floor: f64) -> Result<f64> {
    if !(k >= k_min) {
        return Err(Error::Contract(format!("k = {k} is below k_min = {k_min}")));
    }
    Ok((r_est + d / k).max(rate_floor))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn objective_examples() {
        assert_eq!(compute_objective(2.0, 60.0, 50.0, 10.0), 10.0);
        assert_eq!(compute_objective(1.0, 60.0, 50.0, 10.0), 0.0);
        assert_eq!(compute_objective(0.5, 52.0, 50.0, 10.0), -9.0);
        // jitter can put rtt under the target
        assert_eq!(compute_objective(1.0, 48.0, 50.0, 10.0), -12.0);
    }

    #[test]
    fn rtt_variation_examples() {
        assert_eq!(expected_rtt_variation(0.0, 3.0, 100.0), 0.0);
        // -3·tanh(0.1), evaluated with mpmath at 30 digits
        let d = expected_rtt_variation(10.0, 3.0, 100.0);
        assert!((d - (-0.299_003_983_874_867_45)).abs() < 1e-12, "{d}");
        // -3·tanh(-10) = 2.999999987633...
        let d = expected_rtt_variation(-1000.0, 3.0, 100.0);
        assert!((d - 3.0).abs() < 1e-6 && d <= 3.0);
        let d = expected_rtt_variation(1e6, 3.0, 100.0);
        assert!(d > -3.0 && d < -2.999_999_999);
    }

    #[test]
    fn next_rate_examples() {
        assert_eq!(next_sending_rate(1.0, 0.0, 0.5, 0.01, 0.01).unwrap(), 1.0);
        let d = expected_rtt_variation(10.0, 3.0, 100.0);
        let x = next_sending_rate(1.0, d, 0.5, 0.01, 0.01).unwrap();
        assert!((x - 0.401_992_032_250_265_1).abs() < 1e-12, "{x}");
        assert_eq!(
            next_sending_rate(0.01, -3.0, 0.5, 0.01, 0.01).unwrap(),
            0.01
        );
        assert!(matches!(
            next_sending_rate(1.0, 0.0, 0.001, 0.01, 0.01),
            Err(Error::Contract(_))
        ));
        assert!(next_sending_rate(1.0, 0.0, f64::NAN, 0.01, 0.01).is_err());
    }
}
