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

//! Staggered arrivals: three Iris flows joining 5 s apart. Prints Jain's
//! index over 1 s windows, the convergence time after the last arrival and
//! the post-convergence stability, next to the same run with AIMD.

use iris_cc::metrics::FairnessReport;
use iris_cc::units::mbps_to_pkts_per_ms;
use iris_cc::{run_scenario, FlowSpec, LinkConfig, Scenario};

fn report(name: &str, make: fn(f64) -> FlowSpec) -> iris_cc::Result<()> {
    let c = mbps_to_pkts_per_ms(20.0, 1200);
    let scenario = Scenario {
        link: LinkConfig::constant(c, 25.0, (c * 25.0).ceil() as usize),
        flows: (0..3).map(|i| make(5_000.0 * i as f64)).collect(),
        duration: 40_000.0,
    };
    let traces = run_scenario(&scenario)?;
    let r = FairnessReport::new(&traces);
    println!("== {name}");
    for p in r.jain_series.iter().step_by(40) {
        println!("  t={:>6.0} ms  jain={:.3}", p.time, p.index);
    }
    match r.convergence_time {
        Some(t) => println!("  converged {t:.0} ms after the last arrival"),
        None => println!("  never converged"),
    }
    println!(
        "  stability (std of per-epoch goodput): {:.4} pkt/ms",
        r.stability
    );
    println!("  mean rates: {:.3?} pkt/ms", r.per_flow_mean_rate);
    Ok(())
}

fn main() -> iris_cc::Result<()> {
    report("iris", FlowSpec::iris)?;
    report("aimd", FlowSpec::aimd)
}
