//! Binary-hopping reduction network between PE-blocks of a row.
//!
//! Each node (one per block) is configured as transmitter, receiver or
//! pass-through from a level parameter and its position. Level 0 pairs even
//! nodes with their right neighbors; every level doubles the hop span, so
//! after levels `0..log2(width)` node 0 holds the row result. Pass-through
//! nodes forward combinationally, which keeps the per-jump cost flat: the
//! pipelined overlay hides the wire delay behind the Op-Pipe stage.

use alloc::vec;
use alloc::vec::Vec;

/// Role of a network node at a given level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeRole {
    Transmitter,
    Receiver,
    PassThrough,
    Idle,
}

impl NodeRole {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeRole::Transmitter => "T",
            NodeRole::Receiver => "R",
            NodeRole::PassThrough => "P",
            NodeRole::Idle => "I",
        }
    }
}

/// Role of node `index` in a row of `width` nodes at `level`.
///
/// Receivers sit at multiples of `2^(level+1)`, their paired transmitter
/// `2^level` nodes to the right; the nodes in between pass the stream
/// through. Positions whose transmitter would fall outside the row are idle,
/// as is the upper half of each span.
pub fn node_role(width: usize, level: u32, index: usize) -> NodeRole {
    debug_assert!(index < width);
    let span = 1usize << (level + 1);
    let half = 1usize << level;
    let pos = index % span;
    let group_base = index - pos;
    let transmitter_alive = group_base + half < width;
    if pos == 0 {
        if transmitter_alive {
            NodeRole::Receiver
        } else {
            NodeRole::Idle
        }
    } else if pos == half {
        NodeRole::Transmitter
    } else if pos < half && transmitter_alive {
        NodeRole::PassThrough
    } else {
        NodeRole::Idle
    }
}

/// One reduction step: routes each transmitter's bit to its paired receiver.
///
/// `bits[i]` is the bit emitted by node `i` this cycle; the returned vector
/// holds the bit delivered to each node (0 everywhere except receivers).
/// Pass-through forwarding is combinational, so a receiver sees its
/// transmitter's bit in the same cycle regardless of hop count.
pub fn net_cycle(bits: &[bool], level: u32) -> Vec<bool> {
    let width = bits.len();
    let mut delivered = vec![false; width];
    for (index, slot) in delivered.iter_mut().enumerate() {
        if node_role(width, level, index) == NodeRole::Receiver {
            let transmitter = index + (1usize << level);
            *slot = bits[transmitter];
        }
    }
    delivered
}

/// A row of network nodes at a given reduction level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NetRow {
    /// Number of blocks in the row; a power of two for full reductions.
    pub width: usize,
    /// Current level, `0 <= level`.
    pub level: u32,
}

impl NetRow {
    pub fn new(width: usize, level: u32) -> Self {
        NetRow { width, level }
    }

    /// Network jumps needed to reduce `width` blocks: `log2(width)`.
    pub fn jumps(width: usize) -> u32 {
        debug_assert!(width.is_power_of_two());
        width.trailing_zeros()
    }

    pub fn role(&self, index: usize) -> NodeRole {
        node_role(self.width, self.level, index)
    }

    pub fn step(&self, bits: &[bool]) -> Vec<bool> {
        debug_assert_eq!(bits.len(), self.width);
        net_cycle(bits, self.level)
    }
}
