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

//! Unit conversions between the canonical packet/millisecond domain and the
//! bit-rate figures people usually configure links with.

/// Packet size used when converting bit rates, in bytes.
pub const DEFAULT_PACKET_SIZE: u32 = 1200;

/// Converts a bit rate in Mbps to packets per millisecond.
pub fn mbps_to_pkts_per_ms(mbps: f64, packet_size: u32) -> f64 {
    mbps * 1e6 / 8.0 / f64::from(packet_size) / 1000.0
}

/// Converts packets per millisecond back to Mbps.
pub fn pkts_per_ms_to_mbps(rate: f64, packet_size: u32) -> f64 {
    rate * 1000.0 * f64::from(packet_size) * 8.0 / 1e6
}

/// Converts a rate in Kbps to packets per millisecond.
pub fn kbps_to_pkts_per_ms(kbps: f64, packet_size: u32) -> f64 {
    mbps_to_pkts_per_ms(kbps / 1000.0, packet_size)
}

/// Bandwidth-delay product in packets.
pub fn bdp_packets(capacity: f64, rtprop_ms: f64) -> f64 {
    capacity * rtprop_ms
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twenty_mbps() {
        let r = mbps_to_pkts_per_ms(20.0, DEFAULT_PACKET_SIZE);
        assert!((r - 2.083_333_333).abs() < 1e-6);
        assert!((pkts_per_ms_to_mbps(r, DEFAULT_PACKET_SIZE) - 20.0).abs() < 1e-9);
    }

    #[test]
    fn hundred_kbps_is_about_half_a_packet_per_epoch() {
        let r = kbps_to_pkts_per_ms(100.0, DEFAULT_PACKET_SIZE);
        assert!((r * 50.0 - 0.5208).abs() < 1e-3);
    }
}
