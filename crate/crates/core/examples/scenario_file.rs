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

//! The file-driven workflow the `iris` binary wraps: load a TOML scenario,
//! run it, write the trace CSV and summaries, then fit `k` back out of the
//! trace.
//!
//!     cargo run --example scenario_file -- scenarios/three_flows.toml

use std::path::PathBuf;

use iris_cc::cli::{analyze, run};

fn main() -> iris_cc::Result<()> {
    let config = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/single_flow.toml")
        });
    let dir = tempfile::tempdir()?;
    let out = run(&config, dir.path(), None)?;
    print!("{}", out.summary.render_text());
    println!(
        "trace: {} ({} flows)",
        out.trace_path.display(),
        out.traces.len()
    );
    print!("{}", analyze(&out.trace_path)?.render());
    Ok(())
}
