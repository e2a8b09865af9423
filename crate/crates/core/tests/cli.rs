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

//! The `iris` binary end to end.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn iris(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iris"))
        .args(args)
        .output()
        .expect("spawn iris")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

const SCENARIO: &str = r#"
duration = 5000.0

[link]
prop_delay = 25.0
queue_bdp = 1.0
bandwidth = [{ mbps = 20.0 }]
random_loss = 0.01
seed = 3

[[flows]]
controller = "iris"

[[flows]]
controller = "aimd"
start = 1000.0
"#;

#[test]
fn run_writes_a_trace_with_one_row_per_epoch() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.toml", SCENARIO);
    let out = dir.path().join("out");
    let o = iris(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("trace.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "time_ms,flow_id,send_rate,throughput,rtt_ms,queue_pkts,drops"
    );
    // flow 0 runs 100 epochs, flow 1 runs 80
    assert!(lines.count() >= 180);
    assert!(out.join("summary.txt").exists());
    assert!(out.join("summary.csv").exists());
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.toml", SCENARIO);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        assert!(
            iris(&["run", "--config", &cfg, "--out", d.to_str().unwrap()])
                .status
                .success()
        );
    }
    assert_eq!(
        fs::read(a.join("trace.csv")).unwrap(),
        fs::read(b.join("trace.csv")).unwrap()
    );
    assert_eq!(
        fs::read(a.join("summary.csv")).unwrap(),
        fs::read(b.join("summary.csv")).unwrap()
    );
}

#[test]
fn invalid_loss_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "s.toml",
        &SCENARIO.replace("random_loss = 0.01", "random_loss = 1.5"),
    );
    let o = iris(&[
        "run",
        "--config",
        &cfg,
        "--out",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("random_loss"));
}

#[test]
fn analyze_recovers_a_known_slope() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from("time_ms,flow_id,send_rate,throughput,rtt_ms,queue_pkts,drops\n");
    let mut rtt = 50.0;
    for i in 0..200 {
        let x = 2.0 + 0.3 * ((i * 7 % 11) as f64 / 10.0 - 0.5);
        let r = 2.0;
        // tiny deterministic wobble on top of Δrtt = 0.5·(x − r)
        rtt += 0.5 * (x - r) + 0.002 * (((i * 13) % 5) as f64 - 2.0);
        csv.push_str(&format!("{},0,{x},{r},{rtt},0,0\n", i * 50));
    }
    let path = write(dir.path(), "t.csv", &csv);
    let o = iris(&["analyze", "--trace", &path]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8_lossy(&o.stdout);
    let k: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix('k'))
        .map(|v| v.trim().parse().unwrap())
        .unwrap();
    assert!((0.45..=0.55).contains(&k), "k = {k}");
}

#[test]
fn analyze_rejects_short_and_malformed_traces() {
    let dir = tempfile::tempdir().unwrap();
    let short = write(
        dir.path(),
        "short.csv",
        "time_ms,flow_id,send_rate,throughput,rtt_ms,queue_pkts,drops\n0,0,1,1,50,0,0\n50,0,1.2,1,51,0,0\n",
    );
    let o = iris(&["analyze", "--trace", &short]);
    assert_ne!(o.status.code(), Some(0));

    let bad = write(dir.path(), "bad.csv", "time_ms,flow_id,send_rate\n0,0,1\n");
    let o = iris(&["analyze", "--trace", &bad]);
    assert_ne!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("schema"));
}

#[test]
fn sweep_prints_one_row_per_value() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.toml", &SCENARIO.replace("5000.0", "2000.0"));
    let out = dir.path().join("sw");
    let o = iris(&[
        "sweep",
        "--config",
        &cfg,
        "--param",
        "random_loss",
        "--values",
        "0,0.01,0.02,0.05",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = String::from_utf8_lossy(&o.stdout);
    assert_eq!(table.lines().count(), 5, "{table}");
    let csv = fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
    for i in 0..4 {
        assert!(out
            .join(format!("random_loss_{i}"))
            .join("trace.csv")
            .exists());
    }
}

#[test]
fn sweep_usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.toml", SCENARIO);
    let o = iris(&[
        "sweep", "--config", &cfg, "--param", "colour", "--values", "1",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = iris(&[
        "sweep",
        "--config",
        &cfg,
        "--param",
        "random_loss",
        "--values",
    ]);
    assert_eq!(o.status.code(), Some(2));
}
