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

//! Iris against the AIMD and Vegas-style baselines on a 20 Mbps, 50 ms
//! link with increasing random loss. Loss-based control collapses quickly;
//! Iris reacts to delay and mostly ignores random drops.

use iris_cc::metrics::utilization;
use iris_cc::units::mbps_to_pkts_per_ms;
use iris_cc::{run_scenario, FlowSpec, LinkConfig, Scenario};

fn main() -> iris_cc::Result<()> {
    let c = mbps_to_pkts_per_ms(20.0, 1200);
    let duration = 40_000.0;
    println!("{:>6} {:>7} {:>7} {:>7}", "loss", "iris", "aimd", "vegas");
    for loss in [0.0, 0.001, 0.005, 0.01, 0.02, 0.05] {
        let mut link = LinkConfig::constant(c, 25.0, (c * 50.0).ceil() as usize);
        link.random_loss = loss;
        link.seed = 7;
        let util = |flow: FlowSpec| -> iris_cc::Result<f64> {
            let s = Scenario {
                link: link.clone(),
                flows: vec![flow],
                duration,
            };
            let traces = run_scenario(&s)?;
            Ok(utilization(&traces, &link, duration / 2.0, duration))
        };
        println!(
            "{:>5.1}% {:>7.3} {:>7.3} {:>7.3}",
            100.0 * loss,
            util(FlowSpec::iris(0.0))?,
            util(FlowSpec::aimd(0.0))?,
            util(FlowSpec::vegas(0.0))?,
        );
    }
    Ok(())
}
