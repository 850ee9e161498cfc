//! Error type shared by the simulator and the analytical models.

use core::fmt;

/// Errors raised by microprogram builders, the machine and the performance
/// models.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A register-file address range falls outside the 1024-row bitline.
    AddressOverflow { base: u32, width: u32 },
    /// Source and destination ranges overlap without being identical.
    Overlap,
    /// The column count is not 16 * 2^k.
    InvalidQ { q: u32 },
    /// A value does not fit the operand layout's width/signedness.
    ValueOverflow { lane: usize, value: i128 },
    /// A control word consumed a row sooner after its write than the
    /// pipeline allows.
    HazardViolation { cycle: u64, row: u16 },
    /// `schedule_for` could not satisfy a dependency by stalling.
    UnschedulableHazard { cycle: u64 },
    /// Reserved scratch wordlines meet or exceed the bitline depth.
    ReservationExceedsDepth,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::AddressOverflow { base, width } => {
                write!(f, "rf range [{base}, {}) exceeds bitline depth", base + width)
            }
            Error::Overlap => write!(f, "operand ranges overlap destination"),
            Error::InvalidQ { q } => write!(f, "q must be 16*2^k, got {q}"),
            Error::ValueOverflow { lane, value } => {
                write!(f, "value {value} in lane {lane} does not fit the operand layout")
            }
            Error::HazardViolation { cycle, row } => {
                write!(f, "cycle {cycle}: read of row {row} within hazard distance of its write")
            }
            Error::UnschedulableHazard { cycle } => {
                write!(f, "cycle {cycle}: dependency cannot be satisfied by stalling")
            }
            Error::ReservationExceedsDepth => {
                write!(f, "reserved wordlines meet or exceed the bitline depth")
            }
        }
    }
}

impl core::error::Error for Error {}
