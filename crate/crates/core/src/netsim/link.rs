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

//! The bottleneck: a drop-tail FIFO in front of a single server whose rate
//! follows the bandwidth schedule.

use std::collections::VecDeque;

use rand::Rng;

use super::event::Nanos;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QueuedPacket {
    pub flow_id: usize,
    pub packet_id: u64,
    pub sent_at: Nanos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnqueueOutcome {
    Queued,
    DroppedOverflow,
    DroppedRandom,
}

/// Link state at the bottleneck. A packet leaves the queue when the server
/// starts transmitting it; the server is then busy for one service time,
/// `1/capacity`, computed from the capacity in force at that instant.
#[derive(Debug, Clone)]
pub struct Bottleneck {
    queue: VecDeque<QueuedPacket>,
    capacity_pkts: usize,
    random_loss: f64,
    rate: f64,
    busy_until: Nanos,
}

impl Bottleneck {
    pub fn new(rate: f64, capacity_pkts: usize, random_loss: f64) -> Self {
        Bottleneck {
            queue: VecDeque::with_capacity(capacity_pkts),
            capacity_pkts,
            random_loss,
            rate,
            busy_until: 0,
        }
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn set_rate(&mut self, rate: f64) {
        self.rate = rate;
    }

    pub fn occupancy(&self) -> usize {
        self.queue.len()
    }

    pub fn capacity_pkts(&self) -> usize {
        self.capacity_pkts
    }

    pub fn busy_until(&self) -> Nanos {
        self.busy_until
    }

    pub fn service_time(&self) -> Nanos {
        (1e6 / self.rate).round() as Nanos
    }

    pub fn head(&self) -> Option<&QueuedPacket> {
        self.queue.front()
    }

    pub fn queued(&self) -> impl Iterator<Item = &QueuedPacket> {
        self.queue.iter()
    }

    /// Random loss is drawn first, then the tail-drop check.
    pub fn enqueue<R: Rng>(&mut self, pkt: QueuedPacket, rng: &mut R) -> EnqueueOutcome {
        if self.random_loss > 0.0 && rng.random::<f64>() < self.random_loss {
            return EnqueueOutcome::DroppedRandom;
        }
        if self.queue.len() >= self.capacity_pkts {
            return EnqueueOutcome::DroppedOverflow;
        }
        self.queue.push_back(pkt);
        EnqueueOutcome::Queued
    }

    /// When the head of the queue can start service.
    pub fn next_departure(&self, now: Nanos) -> Option<Nanos> {
        (!self.queue.is_empty()).then(|| now.max(self.busy_until))
    }

    /// Starts transmitting the head packet at `now`.
    pub fn depart(&mut self, now: Nanos) -> Option<QueuedPacket> {
        debug_assert!(now >= self.busy_until);
        let pkt = self.queue.pop_front()?;
        self.busy_until = now + self.service_time();
        Some(pkt)
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn pkt(id: u64) -> QueuedPacket {
        QueuedPacket {
            flow_id: 0,
            packet_id: id,
            sent_at: 0,
        }
    }

    #[test]
    fn queued_below_capacity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut l = Bottleneck::new(2.0, 3, 0.0);
        assert_eq!(l.enqueue(pkt(0), &mut rng), EnqueueOutcome::Queued);
        assert_eq!(l.occupancy(), 1);
    }

    #[test]
    fn overflow_drops_tail() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut l = Bottleneck::new(2.0, 2, 0.0);
        l.enqueue(pkt(0), &mut rng);
        l.enqueue(pkt(1), &mut rng);
        assert_eq!(l.enqueue(pkt(2), &mut rng), EnqueueOutcome::DroppedOverflow);
        assert_eq!(l.head().unwrap().packet_id, 0);
    }

    #[test]
    fn certain_loss_always_drops() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut l = Bottleneck::new(2.0, 100, 1.0);
        for i in 0..1000 {
            assert_eq!(l.enqueue(pkt(i), &mut rng), EnqueueOutcome::DroppedRandom);
        }
    }

    #[test]
    fn service_is_back_to_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut l = Bottleneck::new(2.0, 10, 0.0);
        for i in 0..3 {
            l.enqueue(pkt(i), &mut rng);
        }
        assert_eq!(l.next_departure(100), Some(100));
        l.depart(100);
        assert_eq!(l.next_departure(100), Some(500_100));
        l.depart(500_100);
        l.set_rate(4.0);
        assert_eq!(l.next_departure(600_000), Some(1_000_100));
        l.depart(1_000_100);
        assert_eq!(l.busy_until(), 1_250_100);
        assert_eq!(l.next_departure(2_000_000), None);
    }
}
