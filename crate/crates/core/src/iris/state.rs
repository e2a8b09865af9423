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

use log::{debug, trace};

use super::{
    compute_objective, expected_rtt_variation, next_sending_rate, DegenerateK, EpochRecord,
    IrisParams, RateDecision, TargetDelay,
};
use crate::error::{Error, Result};
use crate::regression::{fit_k_b, RegressionFit, Sample};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    ColdStart,
    Steady,
}

/// Complete controller state. Every input carries its own timestamp; the
/// state never reads a clock.
#[derive(Debug, Clone)]
pub struct IrisState {
    params: IrisParams,
    phase: Phase,
    current_rate: f64,
    k: f64,
    target: TargetDelay,
    history: VecDeque<EpochRecord>,
    last_k_update: f64,
    prev_loss_rate: f64,
    recv_estimate: Option<f64>,
    last_fit: Option<RegressionFit>,
    last_decision: Option<RateDecision>,
    k_updates: u64,
}

impl IrisState {
    pub fn new(params: IrisParams) -> Result<Self> {
        params.validate()?;
        Ok(IrisState {
            phase: Phase::ColdStart,
            current_rate: params.initial_rate,
            k: params.k_min,
            target: TargetDelay::new(params.target_mode, params.rtt_window),
            history: VecDeque::with_capacity(params.history_cap),
            last_k_update: 0.0,
            prev_loss_rate: 0.0,
            recv_estimate: None,
            last_fit: None,
            last_decision: None,
            k_updates: 0,
            params,
        })
    }

    /// Starts directly in steady state with a known `k`, skipping cold
    /// start. Useful for harnesses that replay measurements.
    pub fn warm(params: IrisParams, k: f64, rate: f64) -> Result<Self> {
        let mut s = IrisState::new(params)?;
        s.phase = Phase::Steady;
        s.k = if k.is_finite() && k > 0.0 {
            k.max(s.params.k_min)
        } else {
            s.params.k_min
        };
        s.current_rate = rate.max(s.params.rate_floor);
        Ok(s)
    }

    pub fn params(&self) -> &IrisParams {
        &self.params
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn current_rate(&self) -> f64 {
        self.current_rate
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn target_delay(&self) -> Option<f64> {
        self.target.value()
    }

    pub fn history(&self) -> &VecDeque<EpochRecord> {
        &self.history
    }

    pub fn last_fit(&self) -> Option<&RegressionFit> {
        self.last_fit.as_ref()
    }

    pub fn last_decision(&self) -> Option<&RateDecision> {
        self.last_decision.as_ref()
    }

    /// Successful refits of `k` since cold start ended.
    pub fn k_updates(&self) -> u64 {
        self.k_updates
    }

    pub fn stale_target_count(&self) -> u64 {
        self.target.stale_count()
    }

    /// Feeds one RTT observation into the target-delay window without
    /// recording an epoch.
    pub fn observe_rtt(&mut self, time: f64, rtt: f64) {
        self.target.push(time, rtt);
    }

    /// Refreshes and returns `T`. `None` only before the first sample.
    pub fn update_target_delay(&mut self, now: f64) -> Option<f64> {
        self.target.update(now)
    }

    fn record(&mut self, rec: EpochRecord, now: f64) {
        if self.history.len() == self.params.history_cap {
            self.history.pop_front();
        }
        self.history.push_back(rec);
        self.target.push(now, rec.rtt);
    }

    /// Samples from adjacent records whose later member ended at or after
    /// `since`.
    fn samples_since(&self, since: f64) -> Vec<Sample> {
        self.history
            .iter()
            .zip(self.history.iter().skip(1))
            .filter(|(_, b)| b.epoch_end_time >= since)
            .map(|(a, b)| Sample::new(b.send_rate - b.recv_rate, b.rtt - a.rtt))
            .collect()
    }

    /// `k` after a fit produced `fitted`, or `None` when no fit was possible.
    fn resolve_k(&self, fitted: Option<f64>) -> f64 {
        match fitted {
            Some(k) if k.is_finite() && k > 0.0 => k.max(self.params.k_min),
            _ => match self.params.degenerate_k {
                DegenerateK::BottleneckPrior => self.bottleneck_prior(),
                DegenerateK::ClampToMin => self.params.k_min,
            },
        }
    }

    /// `ε / r`: the RTT growth per unit of excess rate when a FIFO queue
    /// drains at the latest receiving rate `r`.
    fn bottleneck_prior(&self) -> f64 {
        let r = self
            .history
            .back()
            .map_or(self.current_rate, |rec| rec.recv_rate)
            .max(self.params.rate_floor);
        (self.params.epoch_len / r).max(self.params.k_min)
    }

    fn refit(&mut self, samples: &[Sample]) -> bool {
        match fit_k_b(samples) {
            Ok(fit) => {
                self.k = self.resolve_k(Some(fit.k));
                self.last_fit = Some(fit);
                self.k_updates += 1;
                debug!("refit {fit} -> k={}", self.k);
                true
            }
            Err(why) => {
                debug!("refit skipped: {why}");
                false
            }
        }
    }

    fn recv_rate_estimate(&mut self, r: f64) -> f64 {
        let est = match (self.params.recv_rate_ewma, self.recv_estimate) {
            (Some(g), Some(prev)) => g * r + (1.0 - g) * prev,
            _ => r,
        };
        self.recv_estimate = Some(est);
        est
    }

    /// Steady-state step for one completed epoch.
    pub fn on_epoch_end(
        &mut self,
        rec: EpochRecord,
        loss_rate: f64,
        now: f64,
    ) -> Result<RateDecision> {
        if self.phase != Phase::Steady {
            return Err(Error::Contract(
                "on_epoch_end called during cold start".into(),
            ));
        }
        self.record(rec, now);
        self.prev_loss_rate = loss_rate;
        let t = self.update_target_delay(now).unwrap_or(rec.rtt);

        let p = &self.params;
        let u = compute_objective(rec.send_rate, rec.rtt, t, p.queue_load_target);
        let d = expected_rtt_variation(u, p.rtt_var_bound, p.tanh_scale);
        let (k_min, floor, k) = (p.k_min, p.rate_floor, self.k);
        let r_est = self.recv_rate_estimate(rec.recv_rate);
        let next = next_sending_rate(r_est, d, k, k_min, floor)?;
        let decision = RateDecision {
            next_rate: next,
            expected_rtt_var: d,
            objective_value: u,
            k,
            queuing_delay: rec.rtt - t,
        };
        trace!(
            "epoch {} x={:.4} r={:.4} rtt={:.2} T={:.2} U={:.3} d={:.4} -> {:.4}",
            rec.index,
            rec.send_rate,
            rec.recv_rate,
            rec.rtt,
            t,
            u,
            d,
            next
        );
        self.current_rate = next;
        self.last_decision = Some(decision);

        if now - self.last_k_update >= self.params.k_update_period {
            let samples = self.samples_since(now - self.params.k_update_period);
            if samples.len() >= self.params.min_fit_samples {
                self.refit(&samples);
            } else {
                debug!("refit skipped: {} samples", samples.len());
            }
            self.last_k_update = now;
        }
        Ok(decision)
    }

    /// Records a steady-state epoch without deciding on it.
    pub fn observe(&mut self, rec: EpochRecord, loss_rate: f64, now: f64) {
        if self.phase == Phase::Steady {
            self.record(rec, now);
            self.prev_loss_rate = loss_rate;
            self.update_target_delay(now);
        }
    }

    /// Cold-start step for one completed epoch; returns the new rate.
    ///
    /// Doubles the rate unless the loss rate rose above both the previous
    /// epoch's and the exit threshold, in which case the controller moves
    /// to steady state at the last receiving rate with `k` fitted from the
    /// cold-start records.
    pub fn cold_start_step(&mut self, rec: EpochRecord, loss_rate: f64) -> f64 {
        if self.phase != Phase::ColdStart {
            return self.current_rate;
        }
        let now = rec.epoch_end_time;
        self.record(rec, now);
        self.update_target_delay(now);
        // The record's send rate is the epoch's packet count over its length.
        let lost = (loss_rate * rec.send_rate * self.params.epoch_len).round();
        let rising = loss_rate > self.prev_loss_rate
            && loss_rate > self.params.loss_exit_threshold
            && lost >= f64::from(self.params.cold_start_min_losses);
        self.prev_loss_rate = loss_rate;
        if rising {
            self.exit_cold_start(rec.recv_rate, now);
        } else if self.current_rate * 2.0 > self.params.cold_start_ceiling {
            debug!("cold start hit the rate ceiling");
            self.exit_cold_start(rec.recv_rate, now);
        } else {
            self.current_rate *= 2.0;
        }
        self.current_rate
    }

    /// Cold-start epoch in which nothing was sent or acknowledged: there is
    /// no measurement to record, but the rate still doubles.
    pub fn cold_start_empty_epoch(&mut self) -> f64 {
        if self.phase == Phase::ColdStart {
            self.current_rate = (self.current_rate * 2.0).min(self.params.cold_start_ceiling);
        }
        self.current_rate
    }

    fn exit_cold_start(&mut self, last_recv: f64, now: f64) {
        self.phase = Phase::Steady;
        let samples = self.samples_since(f64::NEG_INFINITY);
        self.current_rate = last_recv.max(self.params.rate_floor);
        if !self.refit(&samples) {
            self.k = self.resolve_k(None);
        }
        self.last_k_update = now;
        debug!(
            "cold start done at {now:.1} ms: rate={:.4} k={:.4}",
            self.current_rate, self.k
        );
    }

    /// Dispatches a completed epoch to the cold-start or steady-state step
    /// and returns the rate to use next.
    pub fn on_epoch(&mut self, rec: EpochRecord, loss_rate: f64, now: f64) -> Result<f64> {
        match self.phase {
            Phase::ColdStart => Ok(self.cold_start_step(rec, loss_rate)),
            Phase::Steady => self.on_epoch_end(rec, loss_rate, now).map(|d| d.next_rate),
        }
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    use super::*;
    use crate::iris::TargetMode;

    fn rec(index: u64, x: f64, r: f64, rtt: f64, prev_rtt: f64, t: f64) -> EpochRecord {
        EpochRecord {
            index,
            send_rate: x,
            recv_rate: r,
            rtt,
            delta_rtt: rtt - prev_rtt,
            epoch_end_time: t,
        }
    }

    #[test]
    fn convergence_point_is_a_fixed_point() {
        let mut s = IrisState::warm(IrisParams::default(), 0.5, 1.0).unwrap();
        s.observe_rtt(0.0, 50.0);
        // x = r = 1, rtt − T = B / x = 10
        let d = s
            .on_epoch_end(rec(1, 1.0, 1.0, 60.0, 60.0, 50.0), 0.0, 50.0)
            .unwrap();
        assert_eq!(d.objective_value, 0.0);
        assert_eq!(d.expected_rtt_var, 0.0);
        assert_eq!(d.next_rate, 1.0);
        assert_eq!(s.current_rate(), 1.0);
    }

    #[test]
    fn rtt_spike_is_bounded() {
        let mut s = IrisState::warm(IrisParams::default(), 0.5, 1.0).unwrap();
        s.observe_rtt(0.0, 50.0);
        let d = s
            .on_epoch_end(rec(1, 1.0, 1.0, 550.0, 50.0, 50.0), 0.0, 50.0)
            .unwrap();
        assert!(d.expected_rtt_var.abs() <= 3.0);
        assert!(d.expected_rtt_var < 0.0);
    }

    #[test]
    fn on_epoch_end_rejects_cold_start() {
        let mut s = IrisState::new(IrisParams::default()).unwrap();
        assert!(s
            .on_epoch_end(rec(0, 1.0, 1.0, 50.0, 50.0, 50.0), 0.0, 50.0)
            .is_err());
    }

    /// Independent closed-form slope: (nΣxy − ΣxΣy) / (nΣx² − (Σx)²).
    fn oracle_slope(pairs: &[(f64, f64)]) -> f64 {
        let n = pairs.len() as f64;
        let sx: f64 = pairs.iter().map(|p| p.0).sum();
        let sy: f64 = pairs.iter().map(|p| p.1).sum();
        let sxy: f64 = pairs.iter().map(|p| p.0 * p.1).sum();
        let sxx: f64 = pairs.iter().map(|p| p.0 * p.0).sum();
        (n * sxy - sx * sy) / (n * sxx - sx * sx)
    }

    #[test]
    fn periodic_refit_recovers_synthetic_k() {
        let params = IrisParams::default();
        let mut s = IrisState::warm(params.clone(), 3.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let noise = Normal::new(0.0, 0.01).unwrap();
        let mut rtt = 60.0;
        let mut pairs = Vec::new();
        s.observe_rtt(0.0, 40.0);
        // 100 epochs cover exactly one refit period
        for i in 1..=100u64 {
            let t = i as f64 * params.epoch_len;
            let x = 1.0 + 0.2 * ((i * 37 % 11) as f64 - 5.0) / 5.0;
            let r = 1.0;
            let prev = rtt;
            rtt = prev + 0.5 * (x - r) + noise.sample(&mut rng);
            if i > 1 {
                pairs.push((x - r, rtt - prev));
            }
            s.on_epoch_end(rec(i, x, r, rtt, prev, t), 0.0, t).unwrap();
        }
        assert_eq!(s.k_updates(), 1);
        let oracle = oracle_slope(&pairs);
        assert!((oracle - 0.5).abs() <= 0.025, "oracle {oracle}");
        assert!((s.k() - oracle).abs() < 1e-9, "k {} oracle {oracle}", s.k());
    }

    #[test]
    fn too_few_samples_keeps_prior_k() {
        let params = IrisParams {
            k_update_period: 200.0,
            ..IrisParams::default()
        };
        let mut s = IrisState::warm(params, 2.5, 1.0).unwrap();
        s.observe_rtt(0.0, 40.0);
        for i in 1..=6u64 {
            let t = i as f64 * 50.0;
            s.on_epoch_end(
                rec(i, 1.0 + i as f64 * 0.1, 1.0, 50.0 + i as f64, 50.0, t),
                0.0,
                t,
            )
            .unwrap();
        }
        assert_eq!(s.k(), 2.5);
        assert_eq!(s.k_updates(), 0);
    }

    fn nonpositive_fit(mode: DegenerateK) -> (IrisState, IrisParams) {
        let params = IrisParams {
            k_update_period: 500.0,
            degenerate_k: mode,
            ..IrisParams::default()
        };
        let mut s = IrisState::warm(params.clone(), 2.5, 1.0).unwrap();
        s.observe_rtt(0.0, 40.0);
        let mut rtt = 80.0;
        for i in 1..=20u64 {
            let t = i as f64 * 50.0;
            let x = 1.0 + (i % 4) as f64 * 0.1;
            let prev = rtt;
            rtt -= 2.0 * (x - 1.0);
            s.on_epoch_end(rec(i, x, 1.0, rtt, prev, t), 0.0, t)
                .unwrap();
        }
        assert!(s.k_updates() >= 1);
        assert!(s.last_fit().unwrap().k < 0.0);
        (s, params)
    }

    #[test]
    fn nonpositive_fit_falls_back_to_bottleneck_slope() {
        // every record has r = 1 pkt/ms
        let (s, _) = nonpositive_fit(DegenerateK::BottleneckPrior);
        assert_eq!(s.k(), 50.0);
    }

    #[test]
    fn nonpositive_fit_can_clamp_to_min() {
        let (s, params) = nonpositive_fit(DegenerateK::ClampToMin);
        assert_eq!(s.k(), params.k_min);
    }

    fn literal_exit() -> IrisParams {
        IrisParams {
            cold_start_min_losses: 0,
            ..IrisParams::default()
        }
    }

    #[test]
    fn cold_start_doubles_then_exits_on_rising_loss() {
        let params = literal_exit();
        let x0 = params.initial_rate;
        let mut s = IrisState::new(params).unwrap();
        let mut rtt = 50.0;
        for i in 0..3u64 {
            let x = s.current_rate();
            s.cold_start_step(rec(i, x, x, rtt, rtt, (i + 1) as f64 * 50.0), 0.0);
        }
        assert!((s.current_rate() - 8.0 * x0).abs() < 1e-12);
        assert_eq!(s.phase(), Phase::ColdStart);
        let x = s.current_rate();
        rtt += 30.0;
        s.cold_start_step(rec(3, x, 0.7 * x, rtt, 50.0, 200.0), 0.05);
        assert_eq!(s.phase(), Phase::Steady);
        assert!((s.current_rate() - 0.7 * x).abs() < 1e-12);
        assert!(s.k() >= s.params().k_min);
    }

    #[test]
    fn cold_start_without_usable_fit_uses_bottleneck_slope() {
        for (mode, expect) in [
            (DegenerateK::BottleneckPrior, 50.0 / 0.5),
            (DegenerateK::ClampToMin, 0.01),
        ] {
            let params = IrisParams {
                degenerate_k: mode,
                ..literal_exit()
            };
            let mut s = IrisState::new(params).unwrap();
            let x = s.current_rate();
            s.cold_start_step(rec(0, x, 0.5, 50.0, 50.0, 50.0), 0.2);
            assert_eq!(s.phase(), Phase::Steady);
            assert!((s.k() - expect).abs() < 1e-12, "{mode:?}: k = {}", s.k());
        }
    }

    #[test]
    fn small_loss_does_not_end_cold_start() {
        // 200 packets per epoch
        let mut s = IrisState::new(IrisParams::default()).unwrap();
        s.cold_start_step(rec(0, 4.0, 4.0, 50.0, 50.0, 50.0), 0.005);
        assert_eq!(s.phase(), Phase::ColdStart);
        s.cold_start_step(rec(1, 4.0, 4.0, 50.0, 50.0, 100.0), 0.005);
        assert_eq!(s.phase(), Phase::ColdStart, "not rising");
        s.cold_start_step(rec(2, 4.0, 4.0, 50.0, 50.0, 150.0), 0.02);
        assert_eq!(s.phase(), Phase::Steady);
    }

    #[test]
    fn single_drop_does_not_end_cold_start() {
        // two packets, one lost
        let mut s = IrisState::new(IrisParams::default()).unwrap();
        s.cold_start_step(rec(0, 0.04, 0.04, 50.0, 50.0, 50.0), 0.5);
        assert_eq!(s.phase(), Phase::ColdStart);
        let mut s = IrisState::new(literal_exit()).unwrap();
        s.cold_start_step(rec(0, 0.04, 0.04, 50.0, 50.0, 50.0), 0.5);
        assert_eq!(s.phase(), Phase::Steady);
    }

    #[test]
    fn cold_start_fit_recovers_linear_history() {
        let mut s = IrisState::new(IrisParams::default()).unwrap();
        let mut rtt = 50.0;
        let mut i = 0u64;
        while s.phase() == Phase::ColdStart {
            let x = s.current_rate();
            // receiver saturates at 1 pkt/ms; Δrtt = 0.8·(x − r) exactly
            let r = x.min(1.0);
            let prev = rtt;
            rtt += 0.8 * (x - r);
            let loss = if x > 3.0 { 0.1 } else { 0.0 };
            s.cold_start_step(rec(i, x, r, rtt, prev, (i + 1) as f64 * 50.0), loss);
            i += 1;
        }
        assert!((s.k() - 0.8).abs() <= 0.04, "k = {}", s.k());
        assert_eq!(s.current_rate(), 1.0);
    }

    #[test]
    fn cold_start_ceiling_forces_exit() {
        let params = IrisParams {
            cold_start_ceiling: 0.1,
            ..IrisParams::default()
        };
        let mut s = IrisState::new(params).unwrap();
        for i in 0..10u64 {
            let x = s.current_rate();
            s.cold_start_step(rec(i, x, x, 50.0, 50.0, (i + 1) as f64 * 50.0), 0.0);
        }
        assert_eq!(s.phase(), Phase::Steady);
    }

    #[test]
    fn median_mode_target() {
        let params = IrisParams {
            target_mode: TargetMode::MedianRtt,
            ..IrisParams::default()
        };
        let mut s = IrisState::warm(params, 1.0, 1.0).unwrap();
        s.observe_rtt(0.0, 50.0);
        s.observe_rtt(1.0, 70.0);
        s.on_epoch_end(rec(1, 1.0, 1.0, 60.0, 60.0, 50.0), 0.0, 50.0)
            .unwrap();
        assert_eq!(s.target_delay(), Some(60.0));
    }
}
