//! Bit-serial processing-in-memory simulation and performance modeling for
//! the PiCaSO FPGA overlay.
//!
//! The crate is split along the hardware boundaries of the overlay:
//!
//! * [`datapath`] — combinational and sequential semantics of one PE-block:
//!   the full adder/subtractor, the op-encoder used by Booth's radix-2
//!   multiplier, the operand multiplexer (OpMux) and the 1024x16 register
//!   file backed by one BRAM.
//! * [`network`] — the binary-hopping reduction network that connects
//!   PE-blocks within a row.
//! * [`microprogram`] — builders that emit control-word sequences for
//!   ADD/SUB, Booth multiplication and row accumulation, each with an exact
//!   cycle-count contract, plus hazard-aware scheduling.
//! * [`machine`] — executes microprograms over a grid of PE-blocks, counts
//!   cycles, enforces read-after-write hazards and performs corner-turned
//!   data loading.
//! * [`perfmodel`] — analytical latency, throughput, memory-efficiency and
//!   scalability models for PiCaSO and the custom compute-in-BRAM designs
//!   (CCB, CoMeFa-D/A, A-Mod, D-Mod, SPAR-2).
//!
//! The crate is `no_std` (with `alloc`); all IO, file formats and the
//! command-line front end live in the companion `picaso-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod datapath;
pub mod error;
pub mod machine;
pub mod microprogram;
pub mod network;
pub mod perfmodel;

pub use datapath::{alu_step, encode_op, opmux_select, AluOp, EncoderConf, OpMuxConf, PeBlockState};
pub use error::Error;
pub use machine::{OperandLayout, PimArray};
pub use microprogram::{
    prog_addsub, prog_mult_booth, prog_accumulate_row, schedule_for, AddSubOp, ControlWord,
    Microprogram, PipelineConfig,
};
pub use network::{net_cycle, node_role, NetRow, NodeRole};
pub use perfmodel::{ArchId, ArchProfile, DeviceProfile};

/// PEs per block: one BRAM read port is 16 bits wide and feeds 16 ALUs.
pub const BLOCK_WIDTH: usize = 16;

/// Register-file depth in bits: each PE owns one 1024-bit bitline column.
pub const RF_DEPTH: usize = 1024;
