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

//! Sender-side bookkeeping for one flow: paces each epoch's packets, and
//! turns ACK arrivals into per-epoch feedback using only what a real sender
//! could observe (sequence numbers, its own send times, ACK arrival times).
//!
//! The path never reorders, so an ACK for packet `p` settles the fate of
//! every packet sent before `p`: anything still unacknowledged was lost.

use std::collections::VecDeque;

use super::controller::{AckSample, EpochFeedback};
use super::event::{ms_to_ns, ns_to_ms, Nanos};

/// Receiving rate over one epoch: the `x·epoch_len` packets sent were all
/// delivered between the previous epoch's last ACK (`t_prev`) and this
/// epoch's last ACK (`t_i`).
pub fn estimate_receiving_rate(x: f64, epoch_len: f64, t_i: f64, t_prev: f64) -> Option<f64> {
    (t_i > t_prev).then(|| x * epoch_len / (t_i - t_prev))
}

#[derive(Debug, Clone)]
struct EpochBook {
    index: u64,
    start: Nanos,
    end: Nanos,
    first_id: u64,
    count: u32,
    acked: Vec<bool>,
    delivered: u32,
    rtt_sum: f64,
    last_ack_at: Option<Nanos>,
    acks: Vec<AckSample>,
    sent_at: Vec<Nanos>,
    settled: bool,
}

impl EpochBook {
    fn contains(&self, id: u64) -> bool {
        id >= self.first_id && id < self.first_id + u64::from(self.count)
    }

    fn last_id(&self) -> Option<u64> {
        (self.count > 0).then(|| self.first_id + u64::from(self.count) - 1)
    }
}

/// A planned epoch: how many packets and when each one leaves.
#[derive(Debug, Clone)]
pub struct EpochPlan {
    pub index: u64,
    pub first_id: u64,
    pub send_times: Vec<Nanos>,
}

#[derive(Debug, Clone)]
pub struct FlowSender {
    epoch_len: f64,
    epoch_ns: Nanos,
    credit: f64,
    next_id: u64,
    next_epoch: u64,
    books: VecDeque<EpochBook>,
    ready: Vec<EpochFeedback>,
    // receiving-rate estimator state
    prev_last_ack: Option<Nanos>,
    unmeasured_sent: u32,
    last_recv_rate: Option<f64>,
    last_rtt: Option<f64>,
    max_rtt: Option<f64>,
}

impl FlowSender {
    pub fn new(epoch_len: f64) -> Self {
        FlowSender {
            epoch_len,
            epoch_ns: ms_to_ns(epoch_len),
            credit: 0.0,
            next_id: 0,
            next_epoch: 0,
            books: VecDeque::new(),
            ready: Vec::new(),
            prev_last_ack: None,
            unmeasured_sent: 0,
            last_recv_rate: None,
            last_rtt: None,
            max_rtt: None,
        }
    }

    pub fn epoch_ns(&self) -> Nanos {
        self.epoch_ns
    }

    /// Plans the epoch starting at `now` at `rate` packets/ms. Fractional
    /// packets carry over to later epochs; the epoch's packets are spread
    /// evenly, each at the middle of its slot.
    pub fn plan_epoch(&mut self, now: Nanos, rate: f64) -> EpochPlan {
        self.credit += rate.max(0.0) * self.epoch_len;
        let n = self.credit.floor();
        self.credit -= n;
        let count = n as u32;
        let slot = self.epoch_ns as f64 / f64::from(count.max(1));
        let send_times: Vec<Nanos> = (0..count)
            .map(|j| now + ((f64::from(j) + 0.5) * slot) as Nanos)
            .collect();
        let book = EpochBook {
            index: self.next_epoch,
            start: now,
            end: now + self.epoch_ns,
            first_id: self.next_id,
            count,
            acked: vec![false; count as usize],
            delivered: 0,
            rtt_sum: 0.0,
            last_ack_at: None,
            acks: Vec::new(),
            sent_at: send_times.clone(),
            settled: false,
        };
        let plan = EpochPlan {
            index: self.next_epoch,
            first_id: self.next_id,
            send_times,
        };
        self.next_id += u64::from(count);
        self.next_epoch += 1;
        self.books.push_back(book);
        plan
    }

    pub fn on_ack(&mut self, packet_id: u64, sent_at: Nanos, now: Nanos) {
        let rtt = ns_to_ms(now - sent_at);
        self.max_rtt = Some(self.max_rtt.map_or(rtt, |m| m.max(rtt)));
        let mut pos = None;
        for (i, b) in self.books.iter_mut().enumerate() {
            if b.contains(packet_id) {
                let slot = (packet_id - b.first_id) as usize;
                if !b.acked[slot] {
                    b.acked[slot] = true;
                    b.delivered += 1;
                    b.rtt_sum += rtt;
                    b.last_ack_at = Some(now);
                    b.acks.push(AckSample {
                        packet_id,
                        sent_at: ns_to_ms(sent_at),
                        acked_at: ns_to_ms(now),
                        rtt,
                    });
                }
                if b.last_id() == Some(packet_id) {
                    b.settled = true;
                }
                pos = Some(i);
                break;
            }
        }
        if let Some(i) = pos {
            for b in self.books.iter_mut().take(i) {
                b.settled = true;
            }
        }
        self.drain_settled(now);
    }

    /// Gives up on epochs whose packets should have been acknowledged long
    /// ago; whatever is missing is declared lost.
    pub fn expire(&mut self, now: Nanos) {
        let rto = match self.max_rtt {
            Some(m) => ms_to_ns((2.0 * m).max(200.0)),
            None => ms_to_ns(1000.0),
        };
        for b in self.books.iter_mut() {
            if b.end + rto <= now {
                b.settled = true;
            } else {
                break;
            }
        }
        self.drain_settled(now);
    }

    fn drain_settled(&mut self, now: Nanos) {
        while let Some(b) = self.books.front() {
            // an empty epoch has nothing to wait for once it is over
            let done = if b.count == 0 {
                b.end <= now
            } else {
                b.settled
            };
            if !done {
                break;
            }
            let b = self.books.pop_front().expect("front exists");
            let fb = self.finish(b);
            self.ready.push(fb);
        }
    }

    fn finish(&mut self, b: EpochBook) -> EpochFeedback {
        let measured = b.delivered > 0;
        let mut recv_rate = self.last_recv_rate;
        let mut mean_rtt = self.last_rtt;
        self.unmeasured_sent += b.count;
        if measured {
            let t_i = b.last_ack_at.expect("measured epoch has an ACK");
            let packets = f64::from(self.unmeasured_sent);
            let r = match self.prev_last_ack {
                Some(prev) => estimate_receiving_rate(
                    packets / self.epoch_len,
                    self.epoch_len,
                    ns_to_ms(t_i),
                    ns_to_ms(prev),
                ),
                None => None,
            };
            // first measurement of the flow: no previous ACK to measure from
            let r = r.unwrap_or(f64::from(b.count) / self.epoch_len);
            recv_rate = Some(r);
            mean_rtt = Some(b.rtt_sum / f64::from(b.delivered));
            self.prev_last_ack = Some(t_i);
            self.unmeasured_sent = 0;
            self.last_recv_rate = recv_rate;
            self.last_rtt = mean_rtt;
        } else if b.count == 0 && self.prev_last_ack.is_none() {
            self.unmeasured_sent = 0;
        }
        let lost = b
            .acked
            .iter()
            .zip(&b.sent_at)
            .filter(|(a, _)| !**a)
            .map(|(_, &t)| ns_to_ms(t))
            .collect();
        EpochFeedback {
            epoch: b.index,
            start: ns_to_ms(b.start),
            len: self.epoch_len,
            sent: b.count,
            delivered: b.delivered,
            send_rate: f64::from(b.count) / self.epoch_len,
            recv_rate,
            mean_rtt,
            last_ack_at: b.last_ack_at.map(ns_to_ms),
            measured,
            acks: b.acks,
            lost,
        }
    }

    /// Feedback for epochs settled since the last call.
    pub fn take_ready(&mut self) -> Vec<EpochFeedback> {
        std::mem::take(&mut self.ready)
    }

    /// Epochs planned but not yet settled.
    pub fn pending_epochs(&self) -> usize {
        self.books.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn receiving_rate_examples() {
        assert_eq!(estimate_receiving_rate(2.0, 50.0, 150.0, 100.0), Some(2.0));
        assert_eq!(estimate_receiving_rate(2.0, 50.0, 200.0, 100.0), Some(1.0));
        assert_eq!(estimate_receiving_rate(2.0, 50.0, 140.0, 100.0), Some(2.5));
        assert_eq!(estimate_receiving_rate(2.0, 50.0, 100.0, 100.0), None);
    }

    #[test]
    fn pacing_carries_fractions() {
        let mut s = FlowSender::new(50.0);
        let counts: Vec<usize> = (0..4)
            .map(|i| s.plan_epoch(i * 50_000_000, 0.031_25).send_times.len())
            .collect();
        // 1.5625 packets per epoch
        assert_eq!(counts, vec![1, 2, 1, 2]);
        let p = s.plan_epoch(200_000_000, 0.1);
        let ms: Vec<f64> = p.send_times.iter().map(|&t| ns_to_ms(t)).collect();
        assert_eq!(ms, vec![205.0, 215.0, 225.0, 235.0, 245.0]);
    }
}
