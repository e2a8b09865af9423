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

//! Scenario files.
//!
//! A scenario is a TOML document. Times are milliseconds, rates are
//! packets/ms unless spelled `mbps`, queue sizes are packets:
//!
//! ```toml
//! duration = 60000.0
//! packet_size = 1200          # bytes; only used to convert `mbps`
//!
//! [link]
//! prop_delay = 25.0           # one-way, so RTprop is 50 ms
//! queue_bdp = 1.0             # or queue_capacity = 105
//! random_loss = 0.0
//! seed = 1
//! bandwidth = [
//!     { start = 0.0, mbps = 20.0 },
//!     { start = 40000.0, capacity = 4.1666 },
//! ]
//!
//! [[flows]]
//! controller = "iris"         # "iris", "aimd" or "vegas"
//! start = 0.0
//! count = 3                   # optional: replicate this entry
//! stagger = 5000.0            # start offset between replicas
//! prop_delay = 50.0           # optional per-flow override
//! params = { queue_load_target = 10.0 }
//!
//! [output]
//! trace = "trace.csv"
//! summary = "summary.txt"
//! summary_csv = "summary.csv"
//! ```

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::baselines::{AimdParams, VegasParams};
use crate::error::{Error, Result};
use crate::iris::IrisParams;
use crate::netsim::{BandwidthStep, ControllerSpec, FlowSpec, LinkConfig, Scenario};
use crate::units::{bdp_packets, mbps_to_pkts_per_ms, DEFAULT_PACKET_SIZE};

fn default_packet_size() -> u32 {
    DEFAULT_PACKET_SIZE
}

fn default_count() -> usize {
    1
}

fn is_one(n: &usize) -> bool {
    *n == 1
}

fn is_zero(v: &f64) -> bool {
    *v == 0.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub duration: f64,
    #[serde(default = "default_packet_size")]
    pub packet_size: u32,
    pub link: LinkSection,
    pub flows: Vec<FlowSection>,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkSection {
    pub bandwidth: Vec<BandwidthEntry>,
    pub prop_delay: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub queue_capacity: Option<usize>,
    /// Queue size as a multiple of the first capacity times 2·prop_delay.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub queue_bdp: Option<f64>,
    #[serde(default)]
    pub random_loss: f64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandwidthEntry {
    #[serde(default)]
    pub start: f64,
    /// Packets/ms.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mbps: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowSection {
    pub controller: String,
    #[serde(default)]
    pub start: f64,
    #[serde(default = "default_count", skip_serializing_if = "is_one")]
    pub count: usize,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub stagger: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prop_delay: Option<f64>,
    #[serde(default, skip_serializing_if = "toml::Table::is_empty")]
    pub params: toml::Table,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub trace: String,
    pub summary: String,
    pub summary_csv: String,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            trace: "trace.csv".into(),
            summary: "summary.txt".into(),
            summary_csv: "summary.csv".into(),
        }
    }
}

fn exactly_one<T>(
    field: &str,
    a: Option<T>,
    b: Option<T>,
    names: (&str, &str),
) -> Result<Either<T>> {
    match (a, b) {
        (Some(a), None) => Ok(Either::First(a)),
        (None, Some(b)) => Ok(Either::Second(b)),
        _ => Err(Error::invalid(
            field,
            format!("give exactly one of `{}` and `{}`", names.0, names.1),
        )),
    }
}

enum Either<T> {
    First(T),
    Second(T),
}

fn controller_spec(name: &str, params: &toml::Table, field: &str) -> Result<ControllerSpec> {
    let bad =
        |e: toml::de::Error| Error::invalid(format!("{field}.params"), e.message().to_string());
    let value = toml::Value::Table(params.clone());
    Ok(match name {
        "iris" => ControllerSpec::Iris(value.try_into::<IrisParams>().map_err(bad)?),
        "aimd" => ControllerSpec::Aimd(value.try_into::<AimdParams>().map_err(bad)?),
        "vegas" => ControllerSpec::Vegas(value.try_into::<VegasParams>().map_err(bad)?),
        other => {
            return Err(Error::invalid(
                format!("{field}.controller"),
                format!("unknown controller `{other}` (expected iris, aimd or vegas)"),
            ))
        }
    })
}

fn params_table<T: Serialize>(params: &T) -> Result<toml::Table> {
    toml::Table::try_from(params).map_err(|e| Error::Parse(e.to_string()))
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_toml()?)?;
        Ok(())
    }

    /// Builds and validates the scenario.
    pub fn to_scenario(&self) -> Result<Scenario> {
        if self.packet_size == 0 {
            return Err(Error::invalid("packet_size", "must be positive"));
        }
        let mut schedule = Vec::with_capacity(self.link.bandwidth.len());
        for (i, b) in self.link.bandwidth.iter().enumerate() {
            let field = format!("link.bandwidth[{i}]");
            let capacity = match exactly_one(&field, b.capacity, b.mbps, ("capacity", "mbps"))? {
                Either::First(c) => c,
                Either::Second(m) => mbps_to_pkts_per_ms(m, self.packet_size),
            };
            schedule.push(BandwidthStep {
                start: b.start,
                capacity,
            });
        }
        let queue_capacity = match exactly_one(
            "link.queue_capacity",
            self.link.queue_capacity.map(|q| q as f64),
            self.link.queue_bdp,
            ("queue_capacity", "queue_bdp"),
        )? {
            Either::First(q) => q as usize,
            Either::Second(mult) => {
                let first = schedule.first().map_or(0.0, |s| s.capacity);
                let bdp = bdp_packets(first, 2.0 * self.link.prop_delay) * mult;
                if !(bdp.is_finite() && bdp > 0.0) {
                    return Err(Error::invalid(
                        "link.queue_bdp",
                        "must give a positive queue",
                    ));
                }
                (bdp.ceil() as usize).max(1)
            }
        };
        let link = LinkConfig {
            bandwidth_schedule: schedule,
            prop_delay: self.link.prop_delay,
            queue_capacity,
            random_loss: self.link.random_loss,
            seed: self.link.seed,
        };
        let mut flows = Vec::new();
        for (i, f) in self.flows.iter().enumerate() {
            let field = format!("flows[{i}]");
            if f.count == 0 {
                return Err(Error::invalid(
                    format!("{field}.count"),
                    "must be at least 1",
                ));
            }
            if !(f.stagger.is_finite() && f.stagger >= 0.0) {
                return Err(Error::invalid(
                    format!("{field}.stagger"),
                    "must be nonnegative",
                ));
            }
            let controller = controller_spec(&f.controller, &f.params, &field)?;
            for j in 0..f.count {
                flows.push(FlowSpec {
                    controller: controller.clone(),
                    start: f.start + j as f64 * f.stagger,
                    prop_delay: f.prop_delay,
                });
            }
        }
        let scenario = Scenario {
            link,
            flows,
            duration: self.duration,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    /// A file that parses back to exactly `scenario`.
    pub fn from_scenario(scenario: &Scenario) -> Result<Self> {
        let link = &scenario.link;
        let flows = scenario
            .flows
            .iter()
            .map(|f| {
                let params = match &f.controller {
                    ControllerSpec::Iris(p) => params_table(p)?,
                    ControllerSpec::Aimd(p) => params_table(p)?,
                    ControllerSpec::Vegas(p) => params_table(p)?,
                };
                Ok(FlowSection {
                    controller: f.controller.name().to_string(),
                    start: f.start,
                    count: 1,
                    stagger: 0.0,
                    prop_delay: f.prop_delay,
                    params,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ScenarioFile {
            duration: scenario.duration,
            packet_size: DEFAULT_PACKET_SIZE,
            link: LinkSection {
                bandwidth: link
                    .bandwidth_schedule
                    .iter()
                    .map(|s| BandwidthEntry {
                        start: s.start,
                        capacity: Some(s.capacity),
                        mbps: None,
                    })
                    .collect(),
                prop_delay: link.prop_delay,
                queue_capacity: Some(link.queue_capacity),
                queue_bdp: None,
                random_loss: link.random_loss,
                seed: link.seed,
            },
            flows,
            output: OutputSection::default(),
        })
    }
}

/// Reads, parses and validates a scenario file.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<(ScenarioFile, Scenario)> {
    let file = ScenarioFile::load(path)?;
    let scenario = file.to_scenario()?;
    Ok((file, scenario))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
duration = 30000.0

[link]
prop_delay = 25.0
queue_bdp = 1.0
random_loss = 0.01
seed = 9
bandwidth = [{ mbps = 20.0 }, { start = 10000.0, capacity = 4.0 }]

[[flows]]
controller = "iris"
count = 3
stagger = 5000.0
params = { queue_load_target = 12.0 }

[[flows]]
controller = "aimd"
start = 1000.0
prop_delay = 50.0
"#;

    fn field_of(e: Error) -> String {
        match e {
            Error::InvalidConfig { field, .. } => field,
            other => panic!("expected a validation error, got {other}"),
        }
    }

    #[test]
    fn parses_sample() {
        let s = ScenarioFile::parse(SAMPLE).unwrap().to_scenario().unwrap();
        assert_eq!(s.flows.len(), 4);
        assert_eq!(s.flows[2].start, 10_000.0);
        assert_eq!(s.flows[3].prop_delay, Some(50.0));
        // 20 Mbps of 1200-byte packets over 50 ms RTprop is 104.17 packets.
        assert_eq!(s.link.queue_capacity, 105);
        assert_eq!(s.link.bandwidth_schedule[1].capacity, 4.0);
        match &s.flows[0].controller {
            ControllerSpec::Iris(p) => {
                assert_eq!(p.queue_load_target, 12.0);
                assert_eq!(p.tanh_scale, 100.0);
            }
            other => panic!("wrong controller {other:?}"),
        }
    }

    #[test]
    fn round_trip_is_identical() {
        let s = ScenarioFile::parse(SAMPLE).unwrap().to_scenario().unwrap();
        let text = ScenarioFile::from_scenario(&s).unwrap().to_toml().unwrap();
        let back = ScenarioFile::parse(&text).unwrap().to_scenario().unwrap();
        assert_eq!(s, back);
    }

    #[test]
    fn loss_out_of_range_names_the_field() {
        let text = SAMPLE.replace("random_loss = 0.01", "random_loss = 1.5");
        let e = ScenarioFile::parse(&text)
            .unwrap()
            .to_scenario()
            .unwrap_err();
        assert_eq!(field_of(e), "link.random_loss");
    }

    #[test]
    fn bad_params_name_the_flow() {
        let text = SAMPLE.replace("queue_load_target = 12.0", "queue_load_target = -1.0");
        let e = ScenarioFile::parse(&text)
            .unwrap()
            .to_scenario()
            .unwrap_err();
        assert_eq!(field_of(e), "flows[0].queue_load_target");
        let text = SAMPLE.replace("queue_load_target = 12.0", "bogus = 1");
        let e = ScenarioFile::parse(&text)
            .unwrap()
            .to_scenario()
            .unwrap_err();
        assert_eq!(field_of(e), "flows[0].params");
        let text = SAMPLE.replace("\"aimd\"", "\"cubic\"");
        let e = ScenarioFile::parse(&text)
            .unwrap()
            .to_scenario()
            .unwrap_err();
        assert_eq!(field_of(e), "flows[1].controller");
    }

    #[test]
    fn ambiguous_sizes_are_rejected() {
        let text = SAMPLE.replace("queue_bdp = 1.0", "queue_bdp = 1.0\nqueue_capacity = 10");
        let e = ScenarioFile::parse(&text)
            .unwrap()
            .to_scenario()
            .unwrap_err();
        assert_eq!(field_of(e), "link.queue_capacity");
        let text = SAMPLE.replace("{ mbps = 20.0 }", "{ mbps = 20.0, capacity = 2.0 }");
        let e = ScenarioFile::parse(&text)
            .unwrap()
            .to_scenario()
            .unwrap_err();
        assert_eq!(field_of(e), "link.bandwidth[0]");
    }

    #[test]
    fn syntax_errors_are_parse_errors() {
        assert!(matches!(
            ScenarioFile::parse("duration = "),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            ScenarioFile::parse(&SAMPLE.replace("duration", "durration")),
            Err(Error::Parse(_))
        ));
    }
}
