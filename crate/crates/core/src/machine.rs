//! Executes microprograms over a grid of PE-blocks.
//!
//! All blocks receive the same control word each cycle (pure SIMD); the
//! reduction-network level is the only per-cycle global parameter, and the
//! network connects blocks within a row. The machine validates addresses,
//! enforces the pipeline's read-after-write distance and counts cycles.
//! Parallel host data is corner-turned into bit-serial per-PE columns on
//! load.

use alloc::vec;
use alloc::vec::Vec;

use crate::datapath::{block_cycle, PeBlockState, NET_LANE};
use crate::error::Error;
use crate::microprogram::{ControlWord, Microprogram, PipelineConfig};
use crate::network::net_cycle;
use crate::{BLOCK_WIDTH, RF_DEPTH};

/// Placement of one word-parallel operand in the register file.
///
/// `base` holds the LSB; bit `i` lives at row `base + i`. Widths up to 127
/// bits round-trip through the integer load/read API.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OperandLayout {
    pub base: u16,
    pub width: u32,
    pub signed: bool,
}

impl OperandLayout {
    pub fn new(base: u16, width: u32, signed: bool) -> Result<Self, Error> {
        if u32::from(base) + width > RF_DEPTH as u32 {
            return Err(Error::AddressOverflow { base: base.into(), width });
        }
        assert!((1..=127).contains(&width), "layout width must be in 1..=127");
        Ok(OperandLayout { base, width, signed })
    }

    fn fits(&self, value: i128) -> bool {
        if self.signed {
            let lo = -(1i128 << (self.width - 1));
            let hi = 1i128 << (self.width - 1);
            (lo..hi).contains(&value)
        } else {
            (0..1i128 << self.width).contains(&value)
        }
    }
}

/// An R x C grid of PE-blocks with the row-wise reduction network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PimArray {
    rows: usize,
    cols: usize,
    blocks: Vec<PeBlockState>,
    pipe: PipelineConfig,
    cycle_counter: u64,
    // Cycle of the most recent write per row. SIMD control is uniform
    // across blocks, so one history serves the whole array.
    last_write: Vec<Option<u64>>,
}

impl PimArray {
    pub fn new(rows: usize, cols: usize, pipe: PipelineConfig) -> Self {
        assert!(rows >= 1 && cols >= 1);
        PimArray {
            rows,
            cols,
            blocks: vec![PeBlockState::new(); rows * cols],
            pipe,
            cycle_counter: 0,
            last_write: vec![None; RF_DEPTH],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn pipe(&self) -> PipelineConfig {
        self.pipe
    }

    /// Total cycles executed since construction; never decreases.
    pub fn cycle_counter(&self) -> u64 {
        self.cycle_counter
    }

    pub fn block(&self, row: usize, col: usize) -> &PeBlockState {
        &self.blocks[row * self.cols + col]
    }

    pub fn block_mut(&mut self, row: usize, col: usize) -> &mut PeBlockState {
        &mut self.blocks[row * self.cols + col]
    }

    /// Corner-turns 16 host integers into the block's bit-serial columns:
    /// bit `i` of `values[j]` lands at row `base + i`, PE column `j`.
    pub fn load_corner_turned(
        &mut self,
        block: (usize, usize),
        values: &[i128],
        layout: OperandLayout,
    ) -> Result<(), Error> {
        assert_eq!(values.len(), BLOCK_WIDTH, "one value per PE column");
        for (lane, &value) in values.iter().enumerate() {
            if !layout.fits(value) {
                return Err(Error::ValueOverflow { lane, value });
            }
        }
        let state = self.block_mut(block.0, block.1);
        for (lane, &value) in values.iter().enumerate() {
            for i in 0..layout.width {
                state.set_rf_bit(layout.base as usize + i as usize, lane, (value >> i) & 1 == 1);
            }
        }
        Ok(())
    }

    /// Decodes one PE's column back into a host integer, sign-extending
    /// when the layout is signed.
    pub fn read_value(
        &self,
        block: (usize, usize),
        lane: usize,
        layout: OperandLayout,
    ) -> Result<i128, Error> {
        if u32::from(layout.base) + layout.width > RF_DEPTH as u32 {
            return Err(Error::AddressOverflow { base: layout.base.into(), width: layout.width });
        }
        let state = self.block(block.0, block.1);
        let mut value = 0i128;
        for i in 0..layout.width {
            if state.rf_bit(layout.base as usize + i as usize, lane) {
                value |= 1i128 << i;
            }
        }
        if layout.signed && (value >> (layout.width - 1)) & 1 == 1 {
            value |= -1i128 << layout.width;
        }
        Ok(value)
    }

    /// Runs a microprogram to completion and returns the executed cycle
    /// count (always the program length; errors abort mid-program).
    ///
    /// Every word is validated before dispatch: addresses must be in range,
    /// network words need a power-of-two column count wide enough for their
    /// level, and a consuming word must not read a row written within the
    /// pipeline's hazard distance.
    pub fn run(&mut self, prog: &Microprogram) -> Result<u64, Error> {
        let distance = self.pipe.hazard_distance();
        for cw in prog.words() {
            let now = self.cycle_counter;
            self.validate(cw, now, distance)?;

            match cw.net_level {
                Some(level) => self.route_network(cw, level),
                None => {
                    for b in &mut self.blocks {
                        b.net_in = false;
                        b.net_out = false;
                    }
                }
            }

            for b in &mut self.blocks {
                block_cycle(b, cw);
            }
            if cw.wr_en {
                self.last_write[cw.wr_addr as usize] = Some(now);
            }
            self.cycle_counter += 1;
        }
        Ok(prog.len() as u64)
    }

    fn validate(&self, cw: &ControlWord, now: u64, distance: u64) -> Result<(), Error> {
        for row in [cw.rd_addr_a, cw.rd_addr_b] {
            if usize::from(row) >= RF_DEPTH {
                return Err(Error::AddressOverflow { base: row.into(), width: 0 });
            }
        }
        if cw.wr_en && usize::from(cw.wr_addr) >= RF_DEPTH {
            return Err(Error::AddressOverflow { base: cw.wr_addr.into(), width: 0 });
        }
        if let Some(level) = cw.net_level {
            let span = 1usize.checked_shl(level + 1);
            let wide_enough = span.is_some_and(|s| s <= self.cols);
            if !self.cols.is_power_of_two() || !wide_enough {
                return Err(Error::InvalidQ { q: (self.cols * BLOCK_WIDTH) as u32 });
            }
        }
        if distance > 0 && cw.is_consuming() {
            for row in [cw.rd_addr_a, cw.rd_addr_b] {
                if let Some(w) = self.last_write[row as usize] {
                    if now - w <= distance {
                        return Err(Error::HazardViolation { cycle: now, row });
                    }
                }
            }
        }
        Ok(())
    }

    /// Collects each block's transmit bit (lane 0 of the port-A row),
    /// routes one network step per grid row and latches the delivered bits.
    fn route_network(&mut self, cw: &ControlWord, level: u32) {
        let row_addr = cw.rd_addr_a as usize;
        for r in 0..self.rows {
            let outs: Vec<bool> = (0..self.cols)
                .map(|c| self.block(r, c).rf_bit(row_addr, NET_LANE))
                .collect();
            let delivered = net_cycle(&outs, level);
            for c in 0..self.cols {
                let b = self.block_mut(r, c);
                b.net_out = outs[c];
                b.net_in = delivered[c];
            }
        }
    }
}
