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

use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Simulation clock in integer nanoseconds.
pub type Nanos = u64;

pub fn ms_to_ns(ms: f64) -> Nanos {
    (ms * 1e6).round().max(0.0) as Nanos
}

pub fn ns_to_ms(ns: Nanos) -> f64 {
    ns as f64 / 1e6
}

/// Event kinds. The declaration order is the tie-break order for events
/// scheduled at the same instant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventKind {
    BandwidthChange,
    PacketDepartQueue,
    PacketDelivered,
    AckDelivered,
    EpochTimer,
    PacketArriveQueue,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimEvent {
    pub time: Nanos,
    pub kind: EventKind,
    pub flow_id: usize,
    pub packet_id: u64,
    /// Send time of the packet the event refers to.
    pub sent_at: Nanos,
    seq: u64,
}

impl Ord for SimEvent {
    fn cmp(&self, other: &Self) -> Ordering {
        // reversed: BinaryHeap is a max-heap
        (
            other.time,
            other.kind,
            other.flow_id,
            other.packet_id,
            other.seq,
        )
            .cmp(&(self.time, self.kind, self.flow_id, self.packet_id, self.seq))
    }
}

impl PartialOrd for SimEvent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Default)]
pub struct EventQueue {
    heap: BinaryHeap<SimEvent>,
    seq: u64,
}

impl EventQueue {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(
        &mut self,
        time: Nanos,
        kind: EventKind,
        flow_id: usize,
        packet_id: u64,
        sent_at: Nanos,
    ) {
        self.seq += 1;
        self.heap.push(SimEvent {
            time,
            kind,
            flow_id,
            packet_id,
            sent_at,
            seq: self.seq,
        });
    }

    pub fn pop(&mut self) -> Option<SimEvent> {
        self.heap.pop()
    }

    pub fn peek_time(&self) -> Option<Nanos> {
        self.heap.peek().map(|e| e.time)
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &SimEvent> {
        self.heap.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_is_time_then_kind_then_ids() {
        let mut q = EventQueue::new();
        q.push(10, EventKind::EpochTimer, 0, 0, 0);
        q.push(10, EventKind::AckDelivered, 1, 5, 0);
        q.push(10, EventKind::AckDelivered, 0, 9, 0);
        q.push(5, EventKind::PacketArriveQueue, 3, 0, 0);
        q.push(10, EventKind::AckDelivered, 0, 2, 0);
        let order: Vec<_> = std::iter::from_fn(|| q.pop())
            .map(|e| (e.time, e.kind, e.flow_id, e.packet_id))
            .collect();
        assert_eq!(
            order,
            vec![
                (5, EventKind::PacketArriveQueue, 3, 0),
                (10, EventKind::AckDelivered, 0, 2),
                (10, EventKind::AckDelivered, 0, 9),
                (10, EventKind::AckDelivered, 1, 5),
                (10, EventKind::EpochTimer, 0, 0),
            ]
        );
    }

    #[test]
    fn ms_round_trip() {
        assert_eq!(ms_to_ns(0.48), 480_000);
        assert_eq!(ns_to_ms(25_000_000), 25.0);
    }
}
