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

//! Drives the controller by hand, one epoch at a time, without a network.
//!
//! The fake bottleneck here is a single queue of capacity 2 packets/ms: the
//! receiving rate is capped at capacity and RTT grows with the backlog.
//! Watch the objective `U` head to zero as the flow's queue load settles
//! at `B` packets.

use iris_cc::iris::{compute_objective, expected_rtt_variation};
use iris_cc::{EpochRecord, IrisParams, IrisState};

fn main() -> iris_cc::Result<()> {
    let params = IrisParams::default();
    let capacity = 2.0;
    let base_rtt = 40.0;
    let eps = params.epoch_len;

    // Start steady at half the capacity with a rough slope guess.
    let mut state = IrisState::warm(params.clone(), eps / capacity, 1.0)?;
    state.observe_rtt(0.0, base_rtt);

    let mut backlog: f64 = 0.0;
    let mut prev_rtt = base_rtt;
    println!(
        "{:>5} {:>8} {:>8} {:>8} {:>8} {:>8}",
        "epoch", "x", "r", "rtt", "U", "d"
    );
    for i in 0..120u64 {
        let x = state.current_rate();
        let r = x.min(capacity + backlog / eps);
        backlog = (backlog + (x - capacity) * eps).max(0.0);
        let rtt = base_rtt + backlog / capacity;
        let rec = EpochRecord {
            index: i,
            send_rate: x,
            recv_rate: r,
            rtt,
            delta_rtt: rtt - prev_rtt,
            epoch_end_time: (i + 1) as f64 * eps,
        };
        prev_rtt = rtt;
        let d = state.on_epoch_end(rec, 0.0, rec.epoch_end_time)?;
        if i % 10 == 0 {
            println!(
                "{:>5} {:>8.4} {:>8.4} {:>8.2} {:>8.3} {:>8.4}",
                i, x, r, rtt, d.objective_value, d.expected_rtt_var
            );
        }
    }
    println!(
        "k after refits: {:.3} ({} refits)",
        state.k(),
        state.k_updates()
    );

    // The pieces are also usable on their own.
    let u = compute_objective(1.5, 50.0, 40.0, params.queue_load_target);
    let d = expected_rtt_variation(u, params.rtt_var_bound, params.tanh_scale);
    println!("x=1.5 rtt=50 T=40: U={u:.2} packets, d={d:.4} ms");
    Ok(())
}
