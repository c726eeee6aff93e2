//! Message payloads and their bit-exact encoding.

use serde::{Deserialize, Serialize};

use crate::graph::NodeId;

/// `⌈log₂ x⌉`, at least 1.
pub fn bits_for(x: u64) -> u32 {
    if x <= 2 {
        1
    } else {
        64 - (x - 1).leading_zeros()
    }
}

/// Field widths used to size every payload.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Encoding {
    pub id_bits: u32,
    /// Coupon length field, `⌈log₂(2λ)⌉`.
    pub length_bits: u32,
    /// Coupon serial, `⌈log₂ d⌉`.
    pub serial_bits: u32,
    pub walk_id_bits: u32,
    /// Token progress counter, `⌈log₂(τ + 1)⌉`.
    pub counter_bits: u32,
    /// Gossip token id, `⌈log₂ k⌉`.
    pub token_bits: u32,
}

impl Encoding {
    pub fn new(n: usize) -> Self {
        Self {
            id_bits: bits_for(n as u64),
            length_bits: 1,
            serial_bits: 1,
            walk_id_bits: 1,
            counter_bits: 1,
            token_bits: 1,
        }
    }

    pub fn with_walks(mut self, d: usize, lambda_walk: u64, tau: u64, walks: usize) -> Self {
        self.length_bits = bits_for(2 * lambda_walk);
        self.serial_bits = bits_for(d as u64);
        self.counter_bits = bits_for(tau + 1);
        self.walk_id_bits = bits_for(walks as u64);
        self
    }

    pub fn with_tokens(mut self, k: usize) -> Self {
        self.token_bits = bits_for(k as u64);
        self
    }

    pub fn coupon_bits(&self) -> u32 {
        2 * self.id_bits + self.length_bits + self.serial_bits
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Payload {
    /// A Phase-1 short walk in flight. `serial` is 1-based.
    Coupon {
        origin: NodeId,
        serial: u32,
        desired_length: u64,
    },
    /// Asks the holder of `(origin, serial)` to identify itself.
    CouponRequest {
        origin: NodeId,
        serial: u32,
    },
    /// A long walk being forwarded.
    Token {
        source: NodeId,
        walk_id: u32,
        completed: u64,
    },
    Gossip {
        token: u32,
    },
    Opaque {
        bits: u32,
    },
}

impl Payload {
    pub fn bit_size(&self, enc: &Encoding) -> u32 {
        match self {
            Payload::Coupon { .. } => enc.coupon_bits(),
            Payload::CouponRequest { .. } => enc.id_bits + enc.serial_bits,
            Payload::Token { .. } => enc.id_bits + enc.walk_id_bits + enc.counter_bits,
            Payload::Gossip { .. } => enc.token_bits,
            Payload::Opaque { bits } => *bits,
        }
    }
}

/// A message on a directed edge. `tag` is a simulator-side handle and is not transmitted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Envelope {
    pub from: NodeId,
    pub to: NodeId,
    pub payload: Payload,
    pub tag: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_bits() {
        assert_eq!(bits_for(1), 1);
        assert_eq!(bits_for(2), 1);
        assert_eq!(bits_for(3), 2);
        assert_eq!(bits_for(4), 2);
        assert_eq!(bits_for(5), 3);
        assert_eq!(bits_for(16), 4);
        assert_eq!(bits_for(17), 5);
        assert_eq!(bits_for(64), 6);
    }

    #[test]
    fn payload_sizes() {
        // n = 16, d = 4, λ = 5, τ = 20, one walk.
        let enc = Encoding::new(16).with_walks(4, 5, 20, 1).with_tokens(8);
        let coupon = Payload::Coupon {
            origin: NodeId(0),
            serial: 1,
            desired_length: 7,
        };
        assert_eq!(coupon.bit_size(&enc), 4 + 4 + 4 + 2);
        let req = Payload::CouponRequest {
            origin: NodeId(0),
            serial: 1,
        };
        assert_eq!(req.bit_size(&enc), 4 + 2);
        let tok = Payload::Token {
            source: NodeId(0),
            walk_id: 0,
            completed: 3,
        };
        assert_eq!(tok.bit_size(&enc), 4 + 1 + 5);
        assert_eq!(Payload::Gossip { token: 3 }.bit_size(&enc), 3);
    }
}
