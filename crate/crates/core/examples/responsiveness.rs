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

//! Bandwidth steps 20 → 40 → 20 Mbps every 40 s. Prints 1 s throughput so
//! the ramp after each step is visible.

use iris_cc::metrics::throughput;
use iris_cc::netsim::BandwidthStep;
use iris_cc::units::{mbps_to_pkts_per_ms, pkts_per_ms_to_mbps};
use iris_cc::{run_scenario, FlowSpec, LinkConfig, Scenario};

fn main() -> iris_cc::Result<()> {
    let c = |mbps| mbps_to_pkts_per_ms(mbps, 1200);
    let mut link = LinkConfig::constant(c(20.0), 25.0, 210);
    link.bandwidth_schedule = vec![
        BandwidthStep {
            start: 0.0,
            capacity: c(20.0),
        },
        BandwidthStep {
            start: 40_000.0,
            capacity: c(40.0),
        },
        BandwidthStep {
            start: 80_000.0,
            capacity: c(20.0),
        },
    ];
    let scenario = Scenario {
        link: link.clone(),
        flows: vec![FlowSpec::iris(0.0)],
        duration: 120_000.0,
    };
    let trace = &run_scenario(&scenario)?[0];
    for s in (30..120).step_by(2) {
        let t = s as f64 * 1000.0;
        let x = throughput(trace, t, t + 1000.0);
        println!(
            "{s:>4} s  capacity {:>4.0} Mbps  throughput {:>6.2} Mbps",
            pkts_per_ms_to_mbps(link.capacity_at(t), 1200),
            pkts_per_ms_to_mbps(x, 1200)
        );
    }
    Ok(())
}
