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

//! The data study behind the step size: fit `Δrtt = k·(x − r) + b` and
//! report the Pearson correlation, first on synthetic samples with a known
//! slope, then on epochs measured from a simulated flow whose sending rate
//! is pushed around by competing traffic.

use iris_cc::iris::EpochRecord;
use iris_cc::regression::{analyze_trace, fit_k_b, plcc, Sample};
use iris_cc::units::mbps_to_pkts_per_ms;
use iris_cc::{run_scenario, FlowSpec, LinkConfig, Scenario};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> iris_cc::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let true_k = 25.0;
    let samples: Vec<Sample> = (0..500)
        .map(|_| {
            let diff: f64 = rng.random_range(-0.2..0.2);
            let noise: f64 = rng.random_range(-0.5..0.5);
            Sample::new(diff, true_k * diff + noise)
        })
        .collect();
    match fit_k_b(&samples) {
        Ok(fit) => println!("synthetic (k = {true_k}): {fit}"),
        Err(e) => println!("synthetic: unfittable: {e}"),
    }

    // A measured trace: one Iris flow plus an AIMD flow that keeps the
    // queue moving, so x − r and Δrtt both vary.
    let c = mbps_to_pkts_per_ms(20.0, 1200);
    let scenario = Scenario {
        link: LinkConfig::constant(c, 5.0, (c * 10.0).ceil() as usize),
        flows: vec![FlowSpec::iris(0.0), FlowSpec::aimd(2_000.0)],
        duration: 30_000.0,
    };
    let traces = run_scenario(&scenario)?;
    let records: Vec<EpochRecord> = traces[0]
        .rows
        .iter()
        .filter(|r| r.measured && r.time >= 3_000.0)
        .enumerate()
        .map(|(i, r)| EpochRecord {
            index: i as u64,
            send_rate: r.send_rate,
            recv_rate: r.recv_rate,
            rtt: r.rtt,
            delta_rtt: 0.0,
            epoch_end_time: r.time,
        })
        .collect();
    match analyze_trace(&records) {
        Ok(fit) => println!("simulated flow: {fit}"),
        Err(e) => println!("simulated flow: unfittable: {e}"),
    }
    println!(
        "plcc of the synthetic samples: {:.4}",
        plcc(&samples).unwrap_or(f64::NAN)
    );
    Ok(())
}
