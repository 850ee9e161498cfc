//! Bit-level semantics of one PE-block.
//!
//! A block is 16 bit-serial PEs sharing one BRAM configured as a 1024x16
//! register file: row `r` holds bit `r` of all 16 PE columns. Every cycle
//! the block reads up to two rows, routes them through the operand
//! multiplexer, recodes or reuses the per-PE op, runs the full
//! adder/subtractor and optionally writes one row back.

use alloc::vec;
use alloc::vec::Vec;

use crate::microprogram::ControlWord;
use crate::{BLOCK_WIDTH, RF_DEPTH};

/// Full adder/subtractor op-codes.
///
/// `Cpx`/`Cpy` select one operand unmodified; they support pooling-style
/// filters and the NOP steps of Booth's algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AluOp {
    /// SUM = X + Y, full adder.
    Add,
    /// SUM = X - Y, full adder with borrow logic (inverted Y, carry seeded 1).
    Sub,
    /// SUM = X.
    Cpx,
    /// SUM = Y.
    Cpy,
}

impl AluOp {
    /// All four op-codes, in encoding order.
    pub const ALL: [AluOp; 4] = [AluOp::Add, AluOp::Cpx, AluOp::Cpy, AluOp::Sub];

    pub fn as_str(self) -> &'static str {
        match self {
            AluOp::Add => "ADD",
            AluOp::Sub => "SUB",
            AluOp::Cpx => "CPX",
            AluOp::Cpy => "CPY",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "ADD" => Some(AluOp::Add),
            "SUB" => Some(AluOp::Sub),
            "CPX" => Some(AluOp::Cpx),
            "CPY" => Some(AluOp::Cpy),
            _ => None,
        }
    }
}

/// One step of the bit-serial ALU.
///
/// `Sub` adds the inverted Y bit; together with a carry seeded to 1 at word
/// start this computes X - Y in two's complement. `Cpx`/`Cpy` pass the carry
/// through unmodified.
pub fn alu_step(x: bool, y: bool, carry_in: bool, op: AluOp) -> (bool, bool) {
    match op {
        AluOp::Add => full_add(x, y, carry_in),
        AluOp::Sub => full_add(x, !y, carry_in),
        AluOp::Cpx => (x, carry_in),
        AluOp::Cpy => (y, carry_in),
    }
}

fn full_add(x: bool, y: bool, c: bool) -> (bool, bool) {
    let sum = x ^ y ^ c;
    let carry = (x & y) | (c & (x | y));
    (sum, carry)
}

/// Op-encoder configuration: a 3-bit code.
///
/// Codes `000`-`011` request a fixed op for all PEs. Codes `1xx` select
/// Booth mode, where each PE's op is recoded from the two adjacent
/// multiplier bits presented on (Y, X); the low two bits are ignored, so all
/// four `1xx` codes behave identically.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EncoderConf(u8);

impl EncoderConf {
    pub const ADD: EncoderConf = EncoderConf(0b000);
    pub const CPX: EncoderConf = EncoderConf(0b001);
    pub const CPY: EncoderConf = EncoderConf(0b010);
    pub const SUB: EncoderConf = EncoderConf(0b011);
    /// Booth radix-2 mode (canonical `100`; `101`-`111` are equivalent).
    pub const BOOTH: EncoderConf = EncoderConf(0b100);

    /// Builds a configuration from a raw 3-bit code.
    pub fn new(code: u8) -> Option<Self> {
        (code < 8).then_some(EncoderConf(code))
    }

    pub fn code(self) -> u8 {
        self.0
    }

    pub fn is_booth(self) -> bool {
        self.0 & 0b100 != 0
    }

    /// Direct-mode configuration for a fixed op.
    pub fn direct(op: AluOp) -> Self {
        match op {
            AluOp::Add => Self::ADD,
            AluOp::Cpx => Self::CPX,
            AluOp::Cpy => Self::CPY,
            AluOp::Sub => Self::SUB,
        }
    }
}

/// Decodes the encoder configuration and the per-PE (Y, X) data bits into an
/// ALU op.
///
/// Direct modes ignore the data bits. Booth mode recodes the multiplier bit
/// pair: Y carries the current bit, X the previous one; equal bits are a NOP
/// (copy of the partial product on X), `01` adds and `10` subtracts the
/// multiplicand. CPY is never produced in Booth mode.
pub fn encode_op(conf: EncoderConf, y_bit: bool, x_bit: bool) -> AluOp {
    if conf.is_booth() {
        match (y_bit, x_bit) {
            (false, false) | (true, true) => AluOp::Cpx,
            (false, true) => AluOp::Add,
            (true, false) => AluOp::Sub,
        }
    } else {
        match conf.0 {
            0b000 => AluOp::Add,
            0b001 => AluOp::Cpx,
            0b010 => AluOp::Cpy,
            _ => AluOp::Sub,
        }
    }
}

/// Operand-multiplexer configurations.
///
/// `A-FOLD-x` route the upper half/quarter/... of the A word onto the Y
/// inputs of the lower lanes so that a block reduces its 16 lanes without
/// copying operands between bitlines. `AFoldPair` is the adjacent-pair
/// pattern (lane 2i+1 onto lane 2i); it is not part of the standard
/// configuration table and no builder emits it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpMuxConf {
    /// X = A, Y = B: standard element-wise operations.
    AOpB,
    /// Y\[i\] = A\[i+8\] for i < 8, else 0.
    AFold1,
    /// Y\[i\] = A\[i+4\] for i < 4, else 0.
    AFold2,
    /// Y\[i\] = A\[i+2\] for i < 2, else 0.
    AFold3,
    /// Y\[0\] = A\[1\], else 0.
    AFold4,
    /// Y of the receiving lane comes from the network stream.
    AOpNet,
    /// X = 0, Y = B: first iteration of Booth multiplication.
    ZeroOpB,
    /// Y\[2i\] = A\[2i+1\], odd lanes 0. Optional adjacent-pair fold.
    AFoldPair,
}

impl OpMuxConf {
    /// The seven standard configurations of the operand multiplexer.
    pub const TABLE: [OpMuxConf; 7] = [
        OpMuxConf::AOpB,
        OpMuxConf::AFold1,
        OpMuxConf::AFold2,
        OpMuxConf::AFold3,
        OpMuxConf::AFold4,
        OpMuxConf::AOpNet,
        OpMuxConf::ZeroOpB,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            OpMuxConf::AOpB => "A-OP-B",
            OpMuxConf::AFold1 => "A-FOLD-1",
            OpMuxConf::AFold2 => "A-FOLD-2",
            OpMuxConf::AFold3 => "A-FOLD-3",
            OpMuxConf::AFold4 => "A-FOLD-4",
            OpMuxConf::AOpNet => "A-OP-NET",
            OpMuxConf::ZeroOpB => "0-OP-B",
            OpMuxConf::AFoldPair => "A-FOLD-P",
        }
    }
}

/// Lane that receives the network stream under `AOpNet`.
///
/// Intra-block folding leaves the block sum in PE 0, so the stream is
/// injected into lane 0's Y input.
pub const NET_LANE: usize = 0;

/// Routes the two register-file read words into the ALU operand words.
///
/// Words are lane-packed: bit `i` belongs to PE `i`. Returns `(x, y)`.
pub fn opmux_select(conf: OpMuxConf, a: u16, b: u16, net: bool) -> (u16, u16) {
    let x = match conf {
        OpMuxConf::ZeroOpB => 0,
        _ => a,
    };
    let y = match conf {
        OpMuxConf::AOpB | OpMuxConf::ZeroOpB => b,
        OpMuxConf::AFold1 => a >> 8,
        OpMuxConf::AFold2 => (a >> 4) & 0x000f,
        OpMuxConf::AFold3 => (a >> 2) & 0x0003,
        OpMuxConf::AFold4 => (a >> 1) & 0x0001,
        OpMuxConf::AOpNet => (net as u16) << NET_LANE,
        OpMuxConf::AFoldPair => (a >> 1) & 0x5555,
    };
    (x, y)
}

/// Architectural state of one PE-block.
///
/// 16 PEs share a 1024x16 register file; each PE also carries a carry
/// flip-flop and a latched ALU op (Booth recoding is data-dependent per PE,
/// while control words are shared SIMD-wide). `net_in`/`net_out` are the
/// single-bit network ports of the block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeBlockState {
    rf: Vec<u16>,
    carry: u16,
    latched_op: [AluOp; BLOCK_WIDTH],
    pub net_in: bool,
    pub net_out: bool,
}

impl Default for PeBlockState {
    fn default() -> Self {
        Self::new()
    }
}

impl PeBlockState {
    pub fn new() -> Self {
        PeBlockState {
            rf: vec![0; RF_DEPTH],
            carry: 0,
            latched_op: [AluOp::Cpx; BLOCK_WIDTH],
            net_in: false,
            net_out: false,
        }
    }

    /// Lane-packed contents of one register-file row.
    pub fn rf_row(&self, row: usize) -> u16 {
        self.rf[row]
    }

    pub fn set_rf_row(&mut self, row: usize, word: u16) {
        self.rf[row] = word;
    }

    /// One bit of one PE's bitline column.
    pub fn rf_bit(&self, row: usize, lane: usize) -> bool {
        debug_assert!(lane < BLOCK_WIDTH);
        (self.rf[row] >> lane) & 1 == 1
    }

    pub fn set_rf_bit(&mut self, row: usize, lane: usize, bit: bool) {
        debug_assert!(lane < BLOCK_WIDTH);
        let mask = 1u16 << lane;
        if bit {
            self.rf[row] |= mask;
        } else {
            self.rf[row] &= !mask;
        }
    }

    pub fn carry(&self) -> u16 {
        self.carry
    }

    pub fn latched_op(&self, lane: usize) -> AluOp {
        self.latched_op[lane]
    }
}

/// Advances one PE-block by one control word.
///
/// Reads the two addressed rows, routes them through the OpMux, resolves the
/// per-PE op (direct from the encoder configuration, freshly recoded when
/// `op_latch_en` is set, or the latched op in Booth mode), runs the ALU
/// lane-wise and commits writes/latches per the word's enables. The carry
/// flip-flops update only on write cycles; `carry_seed_en` overrides the
/// carry input with 1 for SUB lanes and 0 otherwise.
///
/// Addresses must be valid rows (the machine validates before dispatch);
/// read-after-write hazard distances are likewise enforced by the machine,
/// which knows the pipeline configuration and the write history.
pub fn block_cycle(state: &mut PeBlockState, cw: &ControlWord) {
    let a = state.rf[cw.rd_addr_a as usize];
    let b = state.rf[cw.rd_addr_b as usize];
    let (x_word, y_word) = opmux_select(cw.opmux, a, b, state.net_in);

    let mut sum_word = 0u16;
    let mut carry_word = 0u16;
    for lane in 0..BLOCK_WIDTH {
        let x = (x_word >> lane) & 1 == 1;
        let y = (y_word >> lane) & 1 == 1;

        let op = if cw.op_latch_en {
            let recoded = encode_op(cw.encoder, y, x);
            state.latched_op[lane] = recoded;
            recoded
        } else if cw.encoder.is_booth() {
            state.latched_op[lane]
        } else {
            encode_op(cw.encoder, y, x)
        };

        let carry_in = if cw.carry_seed_en {
            op == AluOp::Sub
        } else {
            (state.carry >> lane) & 1 == 1
        };

        let (sum, carry_out) = alu_step(x, y, carry_in, op);
        sum_word |= (sum as u16) << lane;
        carry_word |= (carry_out as u16) << lane;
    }

    if cw.wr_en {
        state.rf[cw.wr_addr as usize] = sum_word;
        state.carry = carry_word;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::microprogram::ControlWord;
    use proptest::prelude::*;

    /// Word-level reference: runs the scalar ALU over `width` bits, LSB
    /// first, with the carry seeded per op.
    fn word_alu(x: i64, y: i64, width: u32, op: AluOp) -> i64 {
        let mut carry = op == AluOp::Sub;
        let mut out = 0i64;
        for i in 0..width {
            let xb = (x >> i) & 1 == 1;
            let yb = (y >> i) & 1 == 1;
            let (s, c) = alu_step(xb, yb, carry, op);
            out |= (s as i64) << i;
            carry = c;
        }
        // sign-extend
        let shift = 64 - width;
        (out << shift) >> shift
    }

    #[test]
    fn full_adder_truth_table() {
        assert_eq!(alu_step(true, true, false, AluOp::Add), (false, true));
        for x in [false, true] {
            for y in [false, true] {
                for c in [false, true] {
                    let (s, co) = alu_step(x, y, c, AluOp::Add);
                    let total = x as u8 + y as u8 + c as u8;
                    assert_eq!(s, total & 1 == 1);
                    assert_eq!(co, total >= 2);

                    let (s, co) = alu_step(x, y, c, AluOp::Sub);
                    let total = x as u8 + !y as u8 + c as u8;
                    assert_eq!(s, total & 1 == 1);
                    assert_eq!(co, total >= 2);
                }
            }
        }
    }

    #[test]
    fn copy_ops_pass_carry_through() {
        assert_eq!(alu_step(true, false, false, AluOp::Cpx), (true, false));
        for x in [false, true] {
            for y in [false, true] {
                for c in [false, true] {
                    assert_eq!(alu_step(x, y, c, AluOp::Cpx), (x, c));
                    assert_eq!(alu_step(x, y, c, AluOp::Cpy), (y, c));
                }
            }
        }
    }

    #[test]
    fn word_level_sub_is_twos_complement() {
        // 5 - 3 over 4 bits, carry seeded to 1.
        assert_eq!(word_alu(5, 3, 4, AluOp::Sub), 2);
        // Exhaustive at 8 bits against host arithmetic.
        for a in -128i64..128 {
            for b in -128i64..128 {
                let sub = word_alu(a, b, 8, AluOp::Sub);
                assert_eq!(sub, ((a - b) << 56) >> 56, "{a} - {b}");
                let add = word_alu(a, b, 8, AluOp::Add);
                assert_eq!(add, ((a + b) << 56) >> 56, "{a} + {b}");
            }
        }
    }

    #[test]
    fn encoder_direct_modes_ignore_data_bits() {
        for (code, op) in [(0b000, AluOp::Add), (0b001, AluOp::Cpx), (0b010, AluOp::Cpy), (0b011, AluOp::Sub)] {
            let conf = EncoderConf::new(code).unwrap();
            for y in [false, true] {
                for x in [false, true] {
                    assert_eq!(encode_op(conf, y, x), op);
                }
            }
        }
    }

    #[test]
    fn encoder_booth_mode_matches_recode_table() {
        // All four 1xx codes are equivalent; CPY is unreachable.
        for code in 0b100..=0b111 {
            let conf = EncoderConf::new(code).unwrap();
            assert_eq!(encode_op(conf, false, false), AluOp::Cpx);
            assert_eq!(encode_op(conf, false, true), AluOp::Add);
            assert_eq!(encode_op(conf, true, false), AluOp::Sub);
            assert_eq!(encode_op(conf, true, true), AluOp::Cpx);
            for y in [false, true] {
                for x in [false, true] {
                    assert_ne!(encode_op(conf, y, x), AluOp::Cpy);
                }
            }
        }
    }

    #[test]
    fn alu_op_names_round_trip() {
        assert_eq!(AluOp::ALL.len(), 4);
        for op in AluOp::ALL {
            assert_eq!(AluOp::from_name(op.as_str()), Some(op));
        }
    }

    #[test]
    fn opmux_table_has_seven_configurations() {
        assert_eq!(OpMuxConf::TABLE.len(), 7);
    }

    #[test]
    fn opmux_fold1_routes_upper_half() {
        // Lane i of A holds a distinct bit pattern; check the fold map.
        let a: u16 = 0b1010_0110_0101_1001;
        let (x, y) = opmux_select(OpMuxConf::AFold1, a, 0, false);
        assert_eq!(x, a);
        for i in 0..8 {
            assert_eq!((y >> i) & 1, (a >> (i + 8)) & 1, "lane {i}");
        }
        assert_eq!(y >> 8, 0);
    }

    #[test]
    fn opmux_identity_and_zero() {
        let (x, y) = opmux_select(OpMuxConf::AOpB, 0x1234, 0x5678, true);
        assert_eq!((x, y), (0x1234, 0x5678));
        let (x, y) = opmux_select(OpMuxConf::ZeroOpB, 0xffff, 0x5678, true);
        assert_eq!((x, y), (0, 0x5678));
    }

    proptest! {
        /// Fold maps never mix lanes beyond the documented index maps.
        #[test]
        fn opmux_fold_maps(a: u16, b: u16, net: bool) {
            let cases = [
                (OpMuxConf::AFold2, 4usize, 4usize),
                (OpMuxConf::AFold3, 2, 2),
                (OpMuxConf::AFold4, 1, 1),
            ];
            for (conf, shift, live) in cases {
                let (x, y) = opmux_select(conf, a, b, net);
                prop_assert_eq!(x, a);
                for i in 0..16 {
                    let expect = if i < live { (a >> (i + shift)) & 1 } else { 0 };
                    prop_assert_eq!((y >> i) & 1, expect);
                }
            }
            let (_, y) = opmux_select(OpMuxConf::AOpNet, a, b, net);
            prop_assert_eq!(y, (net as u16) << NET_LANE);
        }
    }

    fn write_word(state: &mut PeBlockState, base: usize, lane: usize, value: i64, width: u32) {
        for i in 0..width as usize {
            state.set_rf_bit(base + i, lane, (value >> i) & 1 == 1);
        }
    }

    #[test]
    fn block_cycle_nop_leaves_state_unchanged() {
        let mut state = PeBlockState::new();
        state.set_rf_row(3, 0xbeef);
        let before = state.clone();
        block_cycle(&mut state, &ControlWord::nop());
        assert_eq!(state, before);
    }

    #[test]
    fn block_cycle_add_matches_scalar_alu_lane_wise() {
        let mut state = PeBlockState::new();
        state.set_rf_row(0, 0b1100_1010_0101_0011);
        state.set_rf_row(1, 0b0110_0110_1111_0001);
        let a = state.rf_row(0);
        let b = state.rf_row(1);

        let cw = ControlWord {
            rd_addr_a: 0,
            rd_addr_b: 1,
            wr_addr: 2,
            wr_en: true,
            opmux: OpMuxConf::AOpB,
            encoder: EncoderConf::ADD,
            op_latch_en: false,
            carry_seed_en: true,
            net_level: None,
            comment: alloc::string::String::new(),
        };
        block_cycle(&mut state, &cw);

        for lane in 0..BLOCK_WIDTH {
            let x = (a >> lane) & 1 == 1;
            let y = (b >> lane) & 1 == 1;
            let (sum, carry) = alu_step(x, y, false, AluOp::Add);
            assert_eq!(state.rf_bit(2, lane), sum, "lane {lane}");
            assert_eq!((state.carry() >> lane) & 1 == 1, carry, "lane {lane}");
        }
    }

    #[test]
    fn block_cycle_fold1_add_combines_lane_pairs() {
        let mut state = PeBlockState::new();
        // Distinct bits in lanes 0 and 8, nonzero carry seed path unused.
        write_word(&mut state, 0, 0, 1, 4);
        write_word(&mut state, 0, 8, 1, 4);
        let a0 = state.rf_bit(0, 0);
        let a8 = state.rf_bit(0, 8);

        let cw = ControlWord {
            rd_addr_a: 0,
            rd_addr_b: 0,
            wr_addr: 8,
            wr_en: true,
            opmux: OpMuxConf::AFold1,
            encoder: EncoderConf::ADD,
            op_latch_en: false,
            carry_seed_en: true,
            net_level: None,
            comment: alloc::string::String::new(),
        };
        block_cycle(&mut state, &cw);
        assert_eq!(state.rf_bit(8, 0), a0 ^ a8 ^ false);
    }
}
