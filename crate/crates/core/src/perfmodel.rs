//! Analytical latency, throughput, memory-efficiency and scalability models
//! for PiCaSO and the custom compute-in-BRAM designs it is compared with.
//!
//! All functions are pure; profiles and the device catalog are plain data,
//! so what-if studies can override any field.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::Error;

/// Architectures covered by the comparison suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArchId {
    /// SPAR-2 overlay benchmark (NEWS-network accumulation).
    Spar2,
    /// PiCaSO in the Full-Pipe configuration.
    PicasoF,
    /// Compute-capable BRAM.
    Ccb,
    /// CoMeFa optimized for delay.
    ComefaD,
    /// CoMeFa optimized for area.
    ComefaA,
    /// CoMeFa-A with the OpMux, network and pipeline retrofits.
    AMod,
    /// CoMeFa-D with the same retrofits.
    DMod,
}

impl ArchId {
    pub const ALL: [ArchId; 7] = [
        ArchId::PicasoF,
        ArchId::Spar2,
        ArchId::Ccb,
        ArchId::ComefaD,
        ArchId::ComefaA,
        ArchId::AMod,
        ArchId::DMod,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ArchId::Spar2 => "SPAR-2",
            ArchId::PicasoF => "PiCaSO-F",
            ArchId::Ccb => "CCB",
            ArchId::ComefaD => "CoMeFa-D",
            ArchId::ComefaA => "CoMeFa-A",
            ArchId::AMod => "A-Mod",
            ArchId::DMod => "D-Mod",
        }
    }

    pub fn parse(s: &str) -> Option<ArchId> {
        let norm: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect();
        match norm.to_ascii_lowercase().as_str() {
            "spar2" => Some(ArchId::Spar2),
            "picaso" | "picasof" => Some(ArchId::PicasoF),
            "ccb" => Some(ArchId::Ccb),
            "comefad" => Some(ArchId::ComefaD),
            "comefaa" => Some(ArchId::ComefaA),
            "amod" => Some(ArchId::AMod),
            "dmod" => Some(ArchId::DMod),
        _ => None,
        }
    }
}

/// Multiplication latency formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MultModel {
    /// `N^2 + 3N - 2`: one read-modify-write per bit on an extended clock
    /// (custom BRAM designs).
    SingleCyclePerBit,
    /// `2N^2 + 2N`: two cycles per bit against a synchronous BRAM
    /// (overlays).
    TwoCyclesPerBit,
}

/// Accumulation latency formula (`q` columns of `N`-bit operands).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AccumModel {
    /// `(2N + log2 q) * log2 q`: copy the shrinking operand set between
    /// bitlines each of the `log2 q` steps.
    CopyReduce,
    /// `15 + q/16 + 4N + (N+4) * log2(q/16)`: PiCaSO's OpMux folds plus
    /// binary-hopping network jumps. Reduces to `(N+4) log2 q` at `q = 16`.
    HopNetwork,
    /// `(N+2) * log2 q`: custom blocks retrofitted with the OpMux and
    /// network, which remove the copy steps.
    OpMuxFused,
    /// `(q - 1 + 2 log2 q) * N`: SPAR-2's NEWS-network copy scheme.
    NewsCopy,
}

/// Element-wise add cost in a multiply-accumulate stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EwAddModel {
    /// `2N`: fetch plus commit per bit (overlays).
    TwoCyclesPerBit,
    /// `2(N+1)`: per-bit read-modify-write pair including the carry-out
    /// bit (custom designs; the sources do not state this cost, so it is a
    /// model parameter).
    ExtendedRmw,
}

/// Booth radix-2 support level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoothSupport {
    No,
    /// Only in one-operand-outside-RAM mode.
    Partial,
    Full,
}

impl BoothSupport {
    pub fn as_str(self) -> &'static str {
        match self {
            BoothSupport::No => "No",
            BoothSupport::Partial => "Partial",
            BoothSupport::Full => "Yes",
        }
    }
}

/// Analytical description of one architecture.
#[derive(Debug, Clone, PartialEq)]
pub struct ArchProfile {
    pub id: ArchId,
    /// Clock-period overhead relative to the BRAM maximum (0.6 = 60%).
    pub clock_overhead: f64,
    /// Parallel MAC units per 36Kb BRAM (throughput accounting).
    pub macs_per_bram: u32,
    /// Bits of register file per PE.
    pub bitline_depth: u32,
    /// Scratch wordlines reserved per operand bit.
    pub reserved_wordlines_per_bit: u32,
    pub mult_model: MultModel,
    pub accum_model: AccumModel,
    pub ew_add_model: EwAddModel,
    pub booth: BoothSupport,
}

impl ArchProfile {
    /// Built-in profile for an architecture.
    ///
    /// SPAR-2's physical constants mirror PiCaSO's (same BRAM usage); the
    /// profile exists for cycle-formula comparisons, not for clock or
    /// memory modeling.
    pub fn builtin(id: ArchId) -> ArchProfile {
        use ArchId::*;
        let (clock_overhead, macs, depth, reserved) = match id {
            PicasoF | Spar2 => (0.0, 36, 1024, 4),
            Ccb => (0.60, 144, 256, 8),
            ComefaD => (0.25, 144, 256, 5),
            ComefaA => (1.50, 144, 256, 5),
            AMod => (1.50, 144, 256, 4),
            DMod => (0.25, 144, 256, 4),
        };
        let mult_model = match id {
            PicasoF | Spar2 => MultModel::TwoCyclesPerBit,
            _ => MultModel::SingleCyclePerBit,
        };
        let accum_model = match id {
            PicasoF => AccumModel::HopNetwork,
            Spar2 => AccumModel::NewsCopy,
            Ccb | ComefaD | ComefaA => AccumModel::CopyReduce,
            AMod | DMod => AccumModel::OpMuxFused,
        };
        let ew_add_model = match id {
            PicasoF | Spar2 => EwAddModel::TwoCyclesPerBit,
            _ => EwAddModel::ExtendedRmw,
        };
        let booth = match id {
            Ccb => BoothSupport::No,
            ComefaD | ComefaA => BoothSupport::Partial,
            _ => BoothSupport::Full,
        };
        ArchProfile {
            id,
            clock_overhead,
            macs_per_bram: macs,
            bitline_depth: depth,
            reserved_wordlines_per_bit: reserved,
            mult_model,
            accum_model,
            ew_add_model,
            booth,
        }
    }

    pub fn all_builtin() -> Vec<ArchProfile> {
        ArchId::ALL.iter().map(|&id| ArchProfile::builtin(id)).collect()
    }
}

/// FPGA device family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Virtex7,
    UltrascalePlus,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Virtex7 => "V7",
            Family::UltrascalePlus => "US+",
        }
    }
}

/// One FPGA device: BRAM capacity and the family's maximum BRAM clock.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceProfile {
    pub part: String,
    pub family: Family,
    /// 36Kb BRAM blocks.
    pub bram_count: u32,
    pub lut_bram_ratio: u32,
    pub base_bram_freq_mhz: f64,
    /// Short name used in reports and on the command line.
    pub id: String,
}

/// PEs instantiable per 36Kb BRAM: two 16-wide 18Kb halves.
///
/// Distinct from [`ArchProfile::macs_per_bram`], which follows the
/// comparison tables' 36 MACs (one per 1Kb bitline) for throughput; device
/// scalability uses the physically placed 32.
pub const PES_PER_BRAM: u32 = 32;

fn device(
    part: &str,
    family: Family,
    bram_count: u32,
    lut_bram_ratio: u32,
    base_bram_freq_mhz: f64,
    id: &str,
) -> DeviceProfile {
    DeviceProfile {
        part: String::from(part),
        family,
        bram_count,
        lut_bram_ratio,
        base_bram_freq_mhz,
        id: String::from(id),
    }
}

/// Built-in device catalog: the eight representative Virtex-7/Ultrascale+
/// parts of the scalability study plus the Alveo U55.
///
/// Maximum BRAM clocks come from the data sheets: 543.77 MHz for Virtex-7
/// (-2) and 737 MHz for Ultrascale+ (-2/-3) parts.
pub fn builtin_devices() -> Vec<DeviceProfile> {
    use Family::*;
    alloc::vec![
        device("xc7vx330tffg-2", Virtex7, 750, 272, 543.77, "V7-a"),
        device("xc7vx485tffg-2", Virtex7, 1030, 295, 543.77, "V7-b"),
        device("xc7v2000tfhg-2", Virtex7, 1292, 946, 543.77, "V7-c"),
        device("xc7vx1140tflg-2", Virtex7, 1880, 379, 543.77, "V7-d"),
        device("xcvu3p-ffvc-3", UltrascalePlus, 720, 547, 737.0, "US-a"),
        device("xcvu23p-vsva-3", UltrascalePlus, 2112, 488, 737.0, "US-b"),
        device("xcvu19p-fsvb-2", UltrascalePlus, 2160, 1892, 737.0, "US-c"),
        device("xcvu29p-figd-3", UltrascalePlus, 2688, 643, 737.0, "US-d"),
        device("xcu55c-fsvh-2", UltrascalePlus, 2016, 647, 737.0, "U55"),
    ]
}

fn log2_of(q: u32) -> Result<u32, Error> {
    if q >= 2 && q.is_power_of_two() {
        Ok(q.trailing_zeros())
    } else {
        Err(Error::InvalidQ { q })
    }
}

/// Multiplication latency in cycles for `n`-bit operands.
pub fn mult_latency(arch: &ArchProfile, n: u32) -> u64 {
    debug_assert!(n >= 2);
    let n = u64::from(n);
    match arch.mult_model {
        MultModel::SingleCyclePerBit => n * n + 3 * n - 2,
        MultModel::TwoCyclesPerBit => 2 * n * n + 2 * n,
    }
}

/// Accumulation latency in cycles for `q` columns of `n`-bit operands.
pub fn accum_latency(arch: &ArchProfile, q: u32, n: u32) -> Result<u64, Error> {
    let n64 = u64::from(n);
    match arch.accum_model {
        AccumModel::CopyReduce => {
            let lq = u64::from(log2_of(q)?);
            Ok((2 * n64 + lq) * lq)
        }
        AccumModel::OpMuxFused => {
            let lq = u64::from(log2_of(q)?);
            Ok((n64 + 2) * lq)
        }
        AccumModel::NewsCopy => {
            let lq = u64::from(log2_of(q)?);
            Ok((u64::from(q) - 1 + 2 * lq) * n64)
        }
        AccumModel::HopNetwork => {
            if q < 16 || !q.is_multiple_of(16) || !(q / 16).is_power_of_two() {
                return Err(Error::InvalidQ { q });
            }
            let jumps = u64::from((q / 16).trailing_zeros());
            Ok(15 + u64::from(q) / 16 + 4 * n64 + (n64 + 4) * jumps)
        }
    }
}

/// Element-wise add cost in cycles for `n`-bit operands.
pub fn ew_add_cycles(arch: &ArchProfile, n: u32) -> u64 {
    let n = u64::from(n);
    match arch.ew_add_model {
        EwAddModel::TwoCyclesPerBit => 2 * n,
        EwAddModel::ExtendedRmw => 2 * (n + 1),
    }
}

/// Achievable clock in Hz: the BRAM maximum divided by `1 + overhead`.
pub fn effective_frequency_hz(arch: &ArchProfile, dev: &DeviceProfile) -> f64 {
    dev.base_bram_freq_mhz * 1.0e6 / (1.0 + arch.clock_overhead)
}

/// Wall-clock MAC latency in seconds: 16 parallel multiplications followed
/// by the accumulation of the products (`q = 16`), at the architecture's
/// effective clock.
pub fn mac_latency_time(arch: &ArchProfile, dev: &DeviceProfile, n: u32) -> f64 {
    let cycles = mult_latency(arch, n) + accum_latency(arch, 16, n).expect("q=16 is valid");
    cycles as f64 / effective_frequency_hz(arch, dev)
}

/// Peak multiply-accumulate throughput in MACs per second.
///
/// Every MAC unit streams multiply-then-add; `booth_effective` halves the
/// multiplication term for architectures with full Booth support, since on
/// average half of the radix-2 steps are NOPs.
pub fn peak_throughput(
    arch: &ArchProfile,
    dev: &DeviceProfile,
    n: u32,
    booth_effective: bool,
) -> f64 {
    let mut mult = mult_latency(arch, n) as f64;
    if booth_effective && arch.booth == BoothSupport::Full {
        mult /= 2.0;
    }
    let cycles = mult + ew_add_cycles(arch, n) as f64;
    let units = f64::from(arch.macs_per_bram) * f64::from(dev.bram_count);
    units * effective_frequency_hz(arch, dev) / cycles
}

/// Fraction of BRAM bits available for model weights after reserving
/// scratch wordlines for `n`-bit arithmetic.
pub fn mem_efficiency(arch: &ArchProfile, n: u32) -> Result<f64, Error> {
    let reserved = arch.reserved_wordlines_per_bit * n;
    if reserved >= arch.bitline_depth {
        return Err(Error::ReservationExceedsDepth);
    }
    Ok(f64::from(arch.bitline_depth - reserved) / f64::from(arch.bitline_depth))
}

/// Maximum PE count when every BRAM of the device is used.
pub fn max_pes(dev: &DeviceProfile) -> u64 {
    u64::from(PES_PER_BRAM) * u64::from(dev.bram_count)
}
