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

//! The two comparison controllers on their own and against Iris on a clean
//! 20 Mbps link: AIMD fills the buffer, the Vegas-style controller keeps a
//! few packets queued, Iris keeps about `B` packets queued.

use iris_cc::metrics::FlowSummary;
use iris_cc::units::{mbps_to_pkts_per_ms, pkts_per_ms_to_mbps};
use iris_cc::{run_scenario, FlowSpec, LinkConfig, Scenario};

fn main() -> iris_cc::Result<()> {
    let c = mbps_to_pkts_per_ms(20.0, 1200);
    let duration = 30_000.0;
    println!("{:>6} {:>10} {:>10} {:>9}", "", "Mbps", "qdelay ms", "loss");
    for flow in [
        FlowSpec::iris(0.0),
        FlowSpec::aimd(0.0),
        FlowSpec::vegas(0.0),
    ] {
        let s = Scenario {
            link: LinkConfig::constant(c, 25.0, (c * 50.0).ceil() as usize),
            flows: vec![flow],
            duration,
        };
        let traces = run_scenario(&s)?;
        let f = FlowSummary::new(&traces[0], 10_000.0, duration);
        println!(
            "{:>6} {:>10.2} {:>10.1} {:>8.3}%",
            f.controller,
            pkts_per_ms_to_mbps(f.throughput, 1200),
            f.queuing_delay.unwrap_or(f64::NAN),
            100.0 * f.loss_rate
        );
    }
    Ok(())
}
