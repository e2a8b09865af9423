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

//! Three Iris flows with 50, 100 and 150 ms round-trip propagation delay
//! sharing one bottleneck. Because each flow targets the same number of
//! queued packets, throughput does not depend on RTT.

use iris_cc::metrics::{jain_index, mean_rtt, throughput};
use iris_cc::units::{mbps_to_pkts_per_ms, pkts_per_ms_to_mbps};
use iris_cc::{run_scenario, FlowSpec, LinkConfig, Scenario};

fn main() -> iris_cc::Result<()> {
    let c = mbps_to_pkts_per_ms(20.0, 1200);
    let duration = 90_000.0;
    let flows = [25.0, 50.0, 75.0]
        .iter()
        .map(|&owd| FlowSpec::iris(0.0).with_prop_delay(owd))
        .collect();
    let scenario = Scenario {
        link: LinkConfig::constant(c, 25.0, (c * 50.0).ceil() as usize),
        flows,
        duration,
    };
    let traces = run_scenario(&scenario)?;
    let from = duration - 30_000.0;
    let mut rates = Vec::new();
    for (i, t) in traces.iter().enumerate() {
        let x = throughput(t, from, duration);
        rates.push(x);
        println!(
            "flow {i}: rtprop {:>5.0} ms  throughput {:>6.2} Mbps  mean rtt {:>6.1} ms",
            scenario.rtprop(i),
            pkts_per_ms_to_mbps(x, 1200),
            mean_rtt(t, from, duration).unwrap_or(f64::NAN),
        );
    }
    println!(
        "Jain index over the last 30 s: {:.4}",
        jain_index(&rates).unwrap_or(0.0)
    );
    Ok(())
}
