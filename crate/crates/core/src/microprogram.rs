//! Microprogram builders with exact cycle-count contracts.
//!
//! A microprogram is an ordered control-word sequence; running one word
//! advances every PE-block by one clock. The builders emit the canonical
//! schedules of the overlay:
//!
//! * ADD/SUB: `2N` cycles (one fetch plus one commit per bit — the BRAM
//!   read is synchronous, so an element-wise op cannot sustain one bit per
//!   cycle on two read ports).
//! * Booth radix-2 MULT: `2N^2 + 2N` cycles (`N` iterations of `N+1`
//!   fetch/commit bit pairs; the per-iteration recode of the multiplier bit
//!   pair occupies the first fetch slot).
//! * Row accumulation: `15 + q/16 + 4N + (N+4)*log2(q/16)` cycles (four
//!   widening OpMux folds at one cycle per bit, then one network jump per
//!   level with the full stream width; the fixed setup allowance and the
//!   per-block dispatch slots absorb the widening overhead).
//!
//! Emitted programs are legal under the Full-Pipe hazard distance by
//! construction for the widths the overlay targets; `schedule_for`
//! re-checks and inserts stalls where a custom program (or a very narrow
//! width) needs them.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::datapath::{EncoderConf, OpMuxConf};
use crate::error::Error;
use crate::RF_DEPTH;

/// Rows reserved for the multiplier's sign-extension scratch bit.
///
/// Each Booth iteration produces an `N+1`-bit window whose top (sign) bit
/// would be re-read one cycle after it is rewritten if it lived inside the
/// product field. The sign bit instead alternates between these two rows,
/// so the repeat read always sees the previous iteration's value.
pub const SIGN_SCRATCH: [u16; 2] = [1022, 1023];

/// Highest row usable by multiplication operands and destinations.
const MULT_ROW_LIMIT: u32 = SIGN_SCRATCH[0] as u32;

/// One cycle's SIMD control state, broadcast to every PE-block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ControlWord {
    /// Register-file row driven onto port A (the X operand path).
    pub rd_addr_a: u16,
    /// Register-file row driven onto port B (the Y operand path).
    pub rd_addr_b: u16,
    /// Destination row; meaningful only when `wr_en` is set.
    pub wr_addr: u16,
    pub wr_en: bool,
    pub opmux: OpMuxConf,
    pub encoder: EncoderConf,
    /// Capture the op-encoder output into the per-PE op latch.
    pub op_latch_en: bool,
    /// Seed the carry input this cycle: 1 for SUB lanes, 0 otherwise.
    pub carry_seed_en: bool,
    /// Reduction-network level active this cycle, if any.
    pub net_level: Option<u32>,
    pub comment: String,
}

impl ControlWord {
    /// A word with every enable off; executing it changes nothing.
    pub fn nop() -> Self {
        ControlWord {
            rd_addr_a: 0,
            rd_addr_b: 0,
            wr_addr: 0,
            wr_en: false,
            opmux: OpMuxConf::AOpB,
            encoder: EncoderConf::CPX,
            op_latch_en: false,
            carry_seed_en: false,
            net_level: None,
            comment: String::new(),
        }
    }

    fn nop_with(comment: &str) -> Self {
        let mut cw = Self::nop();
        cw.comment = String::from(comment);
        cw
    }

    /// Whether this word updates architectural state from its reads.
    ///
    /// Fetch slots and stalls drive read addresses but consume nothing;
    /// read-after-write hazard distances apply only to consuming words.
    pub fn is_consuming(&self) -> bool {
        self.wr_en || self.op_latch_en || self.net_level.is_some()
    }

    /// Renders one assembly-dump line (without the cycle prefix).
    fn asm_fields(&self) -> String {
        let wr = if self.wr_en {
            format!("{:>4}", self.wr_addr)
        } else {
            String::from("   -")
        };
        let mut flags = String::new();
        flags.push(if self.wr_en { 'W' } else { '-' });
        flags.push(if self.op_latch_en { 'L' } else { '-' });
        flags.push(if self.carry_seed_en { 'C' } else { '-' });
        match self.net_level {
            Some(level) => flags.push_str(&format!(" N{level}")),
            None => flags.push_str("   "),
        }
        format!(
            "{:>4} {:>4} {} | {:<8} {:03b} | {} | {}",
            self.rd_addr_a,
            self.rd_addr_b,
            wr,
            self.opmux.as_str(),
            self.encoder.code(),
            flags,
            self.comment
        )
    }
}

/// Pipeline configuration of the PE-block.
///
/// The configurations share one architectural semantics; they differ in the
/// distance a read must trail a write to the same row (and in achievable
/// clock frequency, which the performance models account for separately).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PipelineConfig {
    /// No pipeline registers; reads observe writes immediately.
    SingleCycle,
    /// Register at the register-file output.
    RfPipe,
    /// Register at the OpMux output.
    OpPipe,
    /// All three stages (register file, OpMux, ALU); runs at BRAM fmax.
    FullPipe,
}

impl PipelineConfig {
    /// Cycles a dependent read must trail a write by more than.
    pub fn hazard_distance(self) -> u64 {
        match self {
            PipelineConfig::SingleCycle => 0,
            PipelineConfig::RfPipe | PipelineConfig::OpPipe => 1,
            PipelineConfig::FullPipe => 3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PipelineConfig::SingleCycle => "Single-Cycle",
            PipelineConfig::RfPipe => "RF-Pipe",
            PipelineConfig::OpPipe => "Op-Pipe",
            PipelineConfig::FullPipe => "Full-Pipe",
        }
    }
}

/// Word-level op selector for `prog_addsub`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AddSubOp {
    Add,
    Sub,
}

impl AddSubOp {
    fn encoder(self) -> EncoderConf {
        match self {
            AddSubOp::Add => EncoderConf::ADD,
            AddSubOp::Sub => EncoderConf::SUB,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            AddSubOp::Add => "add",
            AddSubOp::Sub => "sub",
        }
    }
}

/// Operation described by a microprogram, with its parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProgramMeta {
    AddSub { op: AddSubOp, n: u32, dst: u16, src_a: u16, src_b: u16 },
    BoothMult { n: u32, dst: u16, multiplicand: u16, multiplier: u16 },
    AccumulateRow { n: u32, q: u32, base: u16 },
    Raw,
}

/// An ordered control-word sequence with a declared cycle count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Microprogram {
    words: Vec<ControlWord>,
    declared_cycles: usize,
    meta: ProgramMeta,
}

impl Microprogram {
    /// Wraps raw words; the declared count is the word count.
    pub fn from_words(words: Vec<ControlWord>, meta: ProgramMeta) -> Self {
        let declared_cycles = words.len();
        Microprogram { words, declared_cycles, meta }
    }

    pub fn words(&self) -> &[ControlWord] {
        &self.words
    }

    pub fn declared_cycles(&self) -> usize {
        self.declared_cycles
    }

    pub fn meta(&self) -> &ProgramMeta {
        &self.meta
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Textual assembly dump, one control word per line:
    /// `cycle | rdA rdB wr | opmux encoder | flags | comment`.
    ///
    /// The format is stable; golden tests pin it.
    pub fn assembly(&self) -> String {
        let mut out = String::new();
        for (cycle, cw) in self.words.iter().enumerate() {
            out.push_str(&format!("{:>4} | {}\n", cycle, cw.asm_fields()));
        }
        out
    }
}

fn check_range(base: u16, width: u32, limit: u32) -> Result<(), Error> {
    if u32::from(base) + width > limit {
        Err(Error::AddressOverflow { base: base.into(), width })
    } else {
        Ok(())
    }
}

fn ranges_overlap(a: u16, wa: u32, b: u16, wb: u32) -> bool {
    let (a, wa, b, wb) = (u32::from(a), wa, u32::from(b), wb);
    a < b + wb && b < a + wa
}

/// Emits the element-wise ADD/SUB program: `dst[0..n] = a op b`, two's
/// complement with wraparound at `n` bits.
///
/// Each bit costs one fetch cycle (the synchronous BRAM read of both
/// operand rows) and one commit cycle (ALU plus writeback), so
/// `declared_cycles = 2n`. Sources may alias each other freely; the
/// destination may alias a source only at identical alignment.
pub fn prog_addsub(
    dst: u16,
    src_a: u16,
    src_b: u16,
    n: u32,
    op: AddSubOp,
) -> Result<Microprogram, Error> {
    assert!(n >= 1, "operand width must be at least 1");
    check_range(dst, n, RF_DEPTH as u32)?;
    check_range(src_a, n, RF_DEPTH as u32)?;
    check_range(src_b, n, RF_DEPTH as u32)?;
    for src in [src_a, src_b] {
        if dst != src && ranges_overlap(dst, n, src, n) {
            return Err(Error::Overlap);
        }
    }

    let encoder = op.encoder();
    let mut words = Vec::with_capacity(2 * n as usize);
    for j in 0..n as u16 {
        let (a_row, b_row) = (src_a + j, src_b + j);
        words.push(ControlWord {
            rd_addr_a: a_row,
            rd_addr_b: b_row,
            wr_addr: 0,
            wr_en: false,
            opmux: OpMuxConf::AOpB,
            encoder,
            op_latch_en: false,
            carry_seed_en: false,
            net_level: None,
            comment: format!("{} b{} fetch", op.as_str(), j),
        });
        words.push(ControlWord {
            rd_addr_a: a_row,
            rd_addr_b: b_row,
            wr_addr: dst + j,
            wr_en: true,
            opmux: OpMuxConf::AOpB,
            encoder,
            op_latch_en: false,
            carry_seed_en: j == 0,
            net_level: None,
            comment: format!("{} b{}", op.as_str(), j),
        });
    }

    let meta = ProgramMeta::AddSub { op, n, dst, src_a, src_b };
    Ok(Microprogram::from_words(words, meta))
}

/// Emits Booth's radix-2 multiplication: `dst[0..2n] = multiplicand *
/// multiplier`, signed, `declared_cycles = 2n(n+1)`.
///
/// Iteration `i` recodes multiplier bits `(y_i, y_{i-1})` into a per-PE op
/// (the recode word fills the fetch slot of bit 0; iteration 0 uses
/// `0-OP-B`, whose zeroed X supplies the implicit `y_{-1} = 0`), then adds,
/// subtracts or copies the sign-extended multiplicand into the `n+1`-bit
/// partial-product window at offset `i`. Window bits 0..n-1 land in the
/// product field; the window sign alternates between the two
/// [`SIGN_SCRATCH`] rows, except in the last iteration where it becomes the
/// product's top bit.
pub fn prog_mult_booth(
    dst: u16,
    multiplicand: u16,
    multiplier: u16,
    n: u32,
) -> Result<Microprogram, Error> {
    assert!(n >= 2, "Booth multiplication needs at least 2-bit operands");
    check_range(dst, 2 * n, MULT_ROW_LIMIT)?;
    check_range(multiplicand, n, MULT_ROW_LIMIT)?;
    check_range(multiplier, n, MULT_ROW_LIMIT)?;
    for (src, w) in [(multiplicand, n), (multiplier, n)] {
        if ranges_overlap(dst, 2 * n, src, w) {
            return Err(Error::Overlap);
        }
    }

    let sigma = |i: u32| SIGN_SCRATCH[(i % 2) as usize];
    let mut words = Vec::with_capacity((2 * n * (n + 1)) as usize);

    for i in 0..n {
        let opmux = if i == 0 { OpMuxConf::ZeroOpB } else { OpMuxConf::AOpB };

        // Recode word in the fetch slot of bit 0. X carries the previous
        // multiplier bit, Y the current one.
        let (recode_a, recode_b) = if i == 0 {
            (multiplier, multiplier)
        } else {
            (multiplier + (i - 1) as u16, multiplier + i as u16)
        };
        words.push(ControlWord {
            rd_addr_a: recode_a,
            rd_addr_b: recode_b,
            wr_addr: 0,
            wr_en: false,
            opmux,
            encoder: EncoderConf::BOOTH,
            op_latch_en: true,
            carry_seed_en: false,
            net_level: None,
            comment: format!("recode i{i}"),
        });

        for j in 0..=n {
            // X: the stored window (previous iteration's bits, sign bit in
            // the scratch row, repeated for the extension bit). Zeroed by
            // the OpMux in iteration 0; its rows then mirror Y's so that
            // hazard checks see only untouched rows.
            let x_row = if i == 0 {
                multiplicand + j.min(n - 1) as u16
            } else if j <= n - 2 {
                dst + (i + j) as u16
            } else {
                sigma(i - 1)
            };
            let y_row = multiplicand + j.min(n - 1) as u16;
            let wr_row = if j < n {
                dst + (i + j) as u16
            } else if i == n - 1 {
                dst + (2 * n - 1) as u16
            } else {
                sigma(i)
            };

            if j > 0 {
                words.push(ControlWord {
                    rd_addr_a: x_row,
                    rd_addr_b: y_row,
                    wr_addr: 0,
                    wr_en: false,
                    opmux,
                    encoder: EncoderConf::BOOTH,
                    op_latch_en: false,
                    carry_seed_en: false,
                    net_level: None,
                    comment: format!("mult i{i} b{j} fetch"),
                });
            }
            words.push(ControlWord {
                rd_addr_a: x_row,
                rd_addr_b: y_row,
                wr_addr: wr_row,
                wr_en: true,
                opmux,
                encoder: EncoderConf::BOOTH,
                op_latch_en: false,
                carry_seed_en: j == 0,
                net_level: None,
                comment: format!("mult i{i} b{j}"),
            });
        }
    }

    debug_assert_eq!(words.len() as u32, 2 * n * (n + 1));
    let meta = ProgramMeta::BoothMult { n, dst, multiplicand, multiplier };
    Ok(Microprogram::from_words(words, meta))
}

/// Emits the row-accumulation program: after execution PE 0 of block 0
/// holds the exact sum of all `q` per-PE operands, `n + log2(q)` bits wide,
/// at `[base, base + n + log2 q)`.
///
/// `declared_cycles = 15 + q/16 + 4n + (n+4) * log2(q/16)`. The schedule is
/// four widening OpMux folds at one cycle per bit (a fold needs a single
/// read, so the write uses the second port), then one network jump per
/// level streaming the full current width. Each pass ping-pongs between the
/// operand region and two scratch regions of `n + log2 q` rows directly
/// above it, so sign-extension repeat reads never race a write; the last
/// pass lands the result back at `base`.
pub fn prog_accumulate_row(base: u16, n: u32, q: u32) -> Result<Microprogram, Error> {
    assert!(n >= 2, "operand width must be at least 2");
    if q < 16 || !q.is_multiple_of(16) || !(q / 16).is_power_of_two() {
        return Err(Error::InvalidQ { q });
    }
    let jumps = (q / 16).trailing_zeros();
    let width = n + 4 + jumps; // result width: n + log2(q)
    check_range(base, 3 * width, RF_DEPTH as u32)?;

    let formula = (15 + q / 16 + 4 * n + (n + 4) * jumps) as usize;
    let scratch = [base + width as u16, base + 2 * width as u16];

    // Fold and jump passes: (opmux, net level, input width).
    let mut passes: Vec<(OpMuxConf, Option<u32>, u32)> = Vec::new();
    let folds = [OpMuxConf::AFold1, OpMuxConf::AFold2, OpMuxConf::AFold3, OpMuxConf::AFold4];
    for (k, &mux) in folds.iter().enumerate() {
        passes.push((mux, None, n + k as u32));
    }
    for level in 0..jumps {
        passes.push((OpMuxConf::AOpNet, Some(level), n + 4 + level));
    }

    let core_words: usize = passes.iter().map(|&(_, _, w)| w as usize + 1).sum();
    let dispatch_budget = formula - core_words;
    // The fixed setup allowance covers the widening overhead of the folds;
    // whatever remains of it plus the per-block dispatch slots pads the
    // schedule to the contract.
    let setup = (5usize).saturating_sub((jumps * (jumps + 1) / 2) as usize);
    let dispatch = dispatch_budget - setup;

    let mut words = Vec::with_capacity(formula);
    for _ in 0..setup {
        words.push(ControlWord::nop_with("setup"));
    }

    let mut src = base;
    for (p, &(mux, level, in_width)) in passes.iter().enumerate() {
        if p == 4 {
            for _ in 0..dispatch {
                words.push(ControlWord::nop_with("dispatch"));
            }
        }
        let dst = if p == passes.len() - 1 { base } else { scratch[p % 2] };
        let label = match level {
            None => format!("fold{}", p + 1),
            Some(l) => format!("jump{}", l + 1),
        };
        for j in 0..=in_width {
            let rd = src + j.min(in_width - 1) as u16;
            words.push(ControlWord {
                rd_addr_a: rd,
                rd_addr_b: rd,
                wr_addr: dst + j as u16,
                wr_en: true,
                opmux: mux,
                encoder: EncoderConf::ADD,
                op_latch_en: false,
                carry_seed_en: j == 0,
                net_level: level,
                comment: format!("{label} b{j}"),
            });
        }
        src = dst;
    }
    if passes.len() == 4 {
        // No jumps: dispatch slots close the schedule.
        for _ in 0..dispatch {
            words.push(ControlWord::nop_with("dispatch"));
        }
    }

    debug_assert_eq!(words.len(), formula);
    let meta = ProgramMeta::AccumulateRow { n, q, base };
    let prog = Microprogram::from_words(words, meta);
    // Widths below 3 make the fold passes shorter than the Full-Pipe
    // hazard distance; stalls keep those legal. At the widths the formula
    // targets this is a no-op.
    let prog = schedule_for(PipelineConfig::FullPipe, &prog)?;
    debug_assert!(n < 3 || prog.len() == formula);
    Ok(prog)
}

/// Reschedules a program for a pipeline configuration by inserting stall
/// cycles wherever a consuming word would read a row within the hazard
/// distance of the write it depends on.
///
/// The canonical builders emit Full-Pipe-legal schedules at the widths the
/// overlay targets, so this pass leaves them unchanged; under
/// `SingleCycle` (hazard distance 0) every program is returned as-is.
/// [`Error::UnschedulableHazard`] is reserved for dependencies stalling
/// cannot fix; pure read-after-write hazards never trigger it.
pub fn schedule_for(pipe: PipelineConfig, prog: &Microprogram) -> Result<Microprogram, Error> {
    let distance = pipe.hazard_distance();
    if distance == 0 {
        return Ok(prog.clone());
    }

    let mut last_write: Vec<Option<u64>> = alloc::vec![None; RF_DEPTH];
    let mut words = Vec::with_capacity(prog.len());
    for cw in prog.words() {
        if cw.is_consuming() {
            let pos = words.len() as u64;
            let mut stall = 0u64;
            for row in [cw.rd_addr_a, cw.rd_addr_b] {
                if let Some(w) = last_write[row as usize] {
                    let gap = pos - w;
                    if gap <= distance {
                        stall = stall.max(distance - gap + 1);
                    }
                }
            }
            for _ in 0..stall {
                words.push(ControlWord::nop_with("stall"));
            }
        }
        if cw.wr_en {
            last_write[cw.wr_addr as usize] = Some(words.len() as u64);
        }
        words.push(cw.clone());
    }

    Ok(Microprogram::from_words(words, prog.meta().clone()))
}
