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

//! Cold start on an idle 10 Mbps link: the rate doubles every epoch from
//! 100 kbps until loss starts rising, then the controller switches to
//! steady state with `k` fitted from the startup epochs.

use iris_cc::units::{bdp_packets, mbps_to_pkts_per_ms, pkts_per_ms_to_mbps};
use iris_cc::{run_scenario, FlowSpec, LinkConfig, Scenario};

fn main() -> iris_cc::Result<()> {
    let c = mbps_to_pkts_per_ms(10.0, 1200);
    let queue = bdp_packets(c, 50.0).ceil() as usize;
    let scenario = Scenario {
        link: LinkConfig::constant(c, 25.0, queue),
        flows: vec![FlowSpec::iris(0.0)],
        duration: 3_000.0,
    };
    let trace = &run_scenario(&scenario)?[0];

    println!(
        "{:>6} {:>9} {:>9} {:>7} {:>6} {:>8}",
        "ms", "rate Mbps", "good Mbps", "rtt", "drops", "k"
    );
    for row in trace.rows.iter().take(30) {
        println!(
            "{:>6} {:>9.3} {:>9.3} {:>7.1} {:>6} {:>8}",
            row.time,
            pkts_per_ms_to_mbps(row.pacing_rate, 1200),
            pkts_per_ms_to_mbps(row.goodput, 1200),
            row.rtt,
            row.losses,
            row.k.map_or("-".into(), |k| format!("{k:.2}")),
        );
    }
    match trace.rows.iter().find(|r| !r.in_startup) {
        Some(r) => println!("steady state from {} ms", r.time),
        None => println!("still in cold start"),
    }
    println!(
        "overflow drops {}, random drops {}",
        trace.stats.dropped_overflow, trace.stats.dropped_random
    );
    Ok(())
}
