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

use std::collections::VecDeque;

use super::TargetMode;

/// Sliding window of timestamped RTT samples that yields the target delay.
///
/// In `MinRtt` mode only samples that can still become the minimum are
/// retained (a monotone deque), so an unbounded window costs O(1) memory on
/// a path whose RTT never falls.
#[derive(Debug, Clone)]
pub struct TargetDelay {
    mode: TargetMode,
    window: f64,
    samples: VecDeque<(f64, f64)>,
    value: Option<f64>,
    stale: u64,
}

impl TargetDelay {
    pub fn new(mode: TargetMode, window: f64) -> Self {
        TargetDelay {
            mode,
            window,
            samples: VecDeque::new(),
            value: None,
            stale: 0,
        }
    }

    /// Samples must arrive in nondecreasing time order.
    pub fn push(&mut self, time: f64, rtt: f64) {
        if self.mode == TargetMode::MinRtt {
            while self.samples.back().is_some_and(|&(_, r)| r >= rtt) {
                self.samples.pop_back();
            }
        }
        self.samples.push_back((time, rtt));
    }

    /// Drops samples older than the window and recomputes `T`. With no
    /// sample left the previous value is kept and the staleness counter
    /// advances.
    pub fn update(&mut self, now: f64) -> Option<f64> {
        let horizon = now - self.window;
        while self.samples.front().is_some_and(|&(t, _)| t < horizon) {
            self.samples.pop_front();
        }
        if self.samples.is_empty() {
            self.stale += 1;
            return self.value;
        }
        let v = match self.mode {
            TargetMode::MinRtt => self.samples[0].1,
            TargetMode::MedianRtt => {
                let mut v: Vec<f64> = self.samples.iter().map(|&(_, r)| r).collect();
                v.sort_by(f64::total_cmp);
                let mid = v.len() / 2;
                if v.len() % 2 == 1 {
                    v[mid]
                } else {
                    0.5 * (v[mid - 1] + v[mid])
                }
            }
        };
        self.value = Some(v);
        self.value
    }

    pub fn value(&self) -> Option<f64> {
        self.value
    }

    /// Number of updates that found the window empty.
    pub fn stale_count(&self) -> u64 {
        self.stale
    }

    /// Samples currently retained.
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn min_of_window() {
        let mut t = TargetDelay::new(TargetMode::MinRtt, 10_000.0);
        t.push(0.0, 50.0);
        t.push(1000.0, 60.0);
        assert_eq!(t.update(1000.0), Some(50.0));
    }

    #[test]
    fn expired_sample_is_evicted() {
        let mut t = TargetDelay::new(TargetMode::MinRtt, 10_000.0);
        t.push(0.0, 50.0);
        t.push(20_000.0, 60.0);
        assert_eq!(t.update(20_000.0), Some(60.0));
        assert_eq!(t.len(), 1);
    }

    #[test]
    fn median_mode() {
        let mut t = TargetDelay::new(TargetMode::MedianRtt, 10_000.0);
        for (i, r) in [70.0, 50.0, 60.0].into_iter().enumerate() {
            t.push(i as f64, r);
        }
        assert_eq!(t.update(3.0), Some(60.0));
        t.push(4.0, 80.0);
        assert_eq!(t.update(4.0), Some(65.0));
    }

    #[test]
    fn unbounded_window_keeps_only_candidates() {
        let mut t = TargetDelay::new(TargetMode::MinRtt, f64::INFINITY);
        for i in 0..10_000 {
            t.push(f64::from(i), 50.0 + f64::from(i % 7));
        }
        assert_eq!(t.update(1e9), Some(50.0));
        assert!(t.len() <= 7);
    }

    proptest! {
        #[test]
        fn sliding_min_matches_brute_force(
            rtts in prop::collection::vec(1.0f64..200.0, 1..300),
            window in 1.0f64..100.0,
        ) {
            let mut t = TargetDelay::new(TargetMode::MinRtt, window);
            for (i, &r) in rtts.iter().enumerate() {
                let now = i as f64 * 3.0;
                t.push(now, r);
                let brute = rtts[..=i]
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j as f64 * 3.0 >= now - window)
                    .map(|(_, &r)| r)
                    .fold(f64::INFINITY, f64::min);
                prop_assert_eq!(t.update(now), Some(brute));
            }
        }
    }

    #[test]
    fn empty_window_keeps_previous() {
        let mut t = TargetDelay::new(TargetMode::MinRtt, 100.0);
        t.push(0.0, 42.0);
        assert_eq!(t.update(50.0), Some(42.0));
        assert_eq!(t.update(500.0), Some(42.0));
        assert_eq!(t.stale_count(), 1);
        assert!(t.is_empty());
    }
}
