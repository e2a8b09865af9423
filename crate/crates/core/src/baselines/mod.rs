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

//! Comparison controllers.
//!
//! Both are deliberately small textbook versions: [`aimd`] is a Reno-like
//! loss-based window controller and [`vegas`] a Vegas-like delay-based one.
//! They are not faithful clones of any deployed algorithm. The simulator
//! is rate-driven, so each converts its window to an epoch sending rate of
//! `cwnd / rtt_est`.

pub mod aimd;
pub mod vegas;

pub use aimd::{AimdController, AimdMode, AimdParams, AimdState};
pub use vegas::{VegasController, VegasParams, VegasState};

/// Smoothed RTT with the usual 1/8 gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Srtt(Option<f64>);

impl Srtt {
    pub(crate) fn new() -> Self {
        Srtt(None)
    }

    pub(crate) fn update(&mut self, rtt: f64) {
        self.0 = Some(match self.0 {
            Some(s) => 0.875 * s + 0.125 * rtt,
            None => rtt,
        });
    }

    pub(crate) fn get(&self) -> Option<f64> {
        self.0
    }
}
