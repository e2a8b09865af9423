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

//! Iris congestion control toolkit.
//!
//! Iris is a rate-based congestion controller that keeps a small, fixed
//! number of its own packets ("queue load") resident in the bottleneck
//! queue. Each epoch it evaluates how far the measured queue load is from
//! the target, turns that into a bounded expected RTT variation, and maps
//! the RTT variation to a sending rate through a linear model
//! `Δrtt = k·(x − r) + b` that is learned online by least squares.
//!
//! The crate is organised around that controller:
//!
//! - [`iris`]: the controller itself as a clock-driven state machine.
//! - [`regression`]: least-squares fit of `k`/`b` and Pearson correlation.
//! - [`netsim`]: a deterministic discrete-event simulator of flows sharing
//!   a drop-tail FIFO bottleneck.
//! - [`baselines`]: simplified loss-based (AIMD) and delay-based (Vegas
//!   style) comparison controllers. They are stand-ins, not faithful
//!   reimplementations of any production algorithm.
//! - [`metrics`]: throughput, Jain fairness, convergence time and stability.
//! - [`config`] and [`cli`]: scenario files, trace CSVs and the batch
//!   front door used by the `iris` binary.
//!
//! Internal units are packets per millisecond for rates, milliseconds for
//! time and packets for queue load. [`units`] converts at the boundary.
//!
//! Runnable walkthroughs live in `examples/`; see the README for the list.

// `!(x > 0.0)` is used on purpose throughout validation: it rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod cli;
pub mod config;
pub mod error;
pub mod iris;
pub mod metrics;
pub mod netsim;
pub mod regression;
pub mod units;

pub use error::{Error, Result};
pub use iris::{EpochRecord, IrisParams, IrisState, Phase, RateDecision, TargetMode};
pub use netsim::{run_scenario, ControllerSpec, FlowSpec, FlowTrace, LinkConfig, Scenario};
pub use regression::{FitOutcome, RegressionFit, Sample};
