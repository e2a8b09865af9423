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

//! Sweeps the random loss rate over a scenario file in parallel and prints
//! the resulting table, the same as `iris sweep`.

use iris_cc::cli::{sweep_file, SweepParam};
use iris_cc::config::ScenarioFile;

const SCENARIO: &str = r#"
duration = 30000

[link]
bandwidth = [{ start = 0, mbps = 20 }]
prop_delay = 25
queue_bdp = 1.0

[[flows]]
controller = "iris"
"#;

fn main() -> iris_cc::Result<()> {
    let file = ScenarioFile::parse(SCENARIO)?;
    let report = sweep_file(
        &file,
        SweepParam::RandomLoss,
        &[0.0, 0.005, 0.01, 0.02, 0.05],
        None,
    )?;
    print!("{}", report.render_text());
    Ok(())
}
