//! Command-line front end for the PiCaSO simulator: workload execution with
//! host-oracle verification, comparison-table reports, microprogram
//! assembly dumps and JSON state snapshots.

use std::fmt;

pub mod catalog;
pub mod report;
pub mod snapshot;
pub mod workload;

pub use catalog::Catalog;
pub use report::{generate_report, OutFormat, ReportKind, ReportSpec};

/// Errors surfaced to the user, with process exit codes: usage and IO
/// problems exit 2, oracle mismatches exit 1.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Verification(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Usage(_) | CliError::Io(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "error: {m}"),
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
            CliError::Io(m) => write!(f, "io error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<picaso_core::Error> for CliError {
    fn from(e: picaso_core::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// Builds the assembly dump for one canonical operation with the default
/// operand layout (`a`/multiplicand at row 0, `b`/multiplier at row `n`,
/// destination at row `2n`; accumulation operates in place at row 0).
pub fn assemble_text(op: &str, n: u32, q: u32) -> Result<String, CliError> {
    use picaso_core::microprogram::{prog_accumulate_row, prog_addsub, prog_mult_booth, AddSubOp};

    if !(2..=32).contains(&n) {
        return Err(CliError::Usage(format!("n must be in 2..=32, got {n}")));
    }
    let prog = match op {
        "add" => prog_addsub((2 * n) as u16, 0, n as u16, n, AddSubOp::Add)?,
        "sub" => prog_addsub((2 * n) as u16, 0, n as u16, n, AddSubOp::Sub)?,
        "mult" => prog_mult_booth((2 * n) as u16, 0, n as u16, n)?,
        "accum" => prog_accumulate_row(0, n, q).map_err(|e| match e {
            picaso_core::Error::InvalidQ { q } => {
                CliError::Usage(format!("q must be 16*2^k, got {q}"))
            }
            other => other.into(),
        })?,
        other => {
            return Err(CliError::Usage(format!(
                "unknown op '{other}' (expected add, sub, mult or accum)"
            )))
        }
    };
    Ok(prog.assembly())
}
