use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use picaso_cli::report::{OutFormat, ReportKind, ReportSpec};
use picaso_cli::workload::{run_gemv, run_mac};
use picaso_cli::{assemble_text, snapshot, Catalog, CliError};
use picaso_core::perfmodel::ArchId;

/// Bit-serial PIM overlay simulator and performance model explorer.
#[derive(Parser)]
#[command(name = "picaso", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a workload on the simulator and verify it against host arithmetic
    Simulate(SimulateArgs),
    /// Emit a comparison table as CSV or JSON
    Report(ReportArgs),
    /// Dump a canonical microprogram as control-word assembly
    Assemble(AssembleArgs),
    /// Run a workload, then dump the array state as JSON
    DumpState(SimulateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Workload {
    /// q parallel multiplies, then row accumulation
    Mac,
    /// 16x4 matrix-vector product, one matrix row per PE lane
    Gemv,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(value_enum)]
    workload: Workload,
    /// Operand width in bits
    #[arg(long, default_value_t = 8)]
    n: u32,
    /// Columns to accumulate (16 * 2^k); ignored by gemv
    #[arg(long, default_value_t = 16)]
    q: u32,
    /// RNG seed for operand generation
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Write output to a file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Latency,
    Throughput,
    Memeff,
    Scalability,
    CycleFormulas,
}

impl KindArg {
    fn kind(self) -> ReportKind {
        match self {
            KindArg::Latency => ReportKind::Latency,
            KindArg::Throughput => ReportKind::Throughput,
            KindArg::Memeff => ReportKind::MemEff,
            KindArg::Scalability => ReportKind::Scalability,
            KindArg::CycleFormulas => ReportKind::CycleFormulas,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(value_enum)]
    kind: KindArg,
    /// Precisions (bits), comma separated
    #[arg(long, value_delimiter = ',', default_value = "4,8,16")]
    n: Vec<u32>,
    /// Columns accumulated in cycle-formula rows (16 * 2^k)
    #[arg(long, default_value_t = 16)]
    q: u32,
    /// Device id or part name from the catalog
    #[arg(long, default_value = "U55")]
    device: String,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Halve the multiplication term for full Booth-support architectures
    #[arg(long)]
    booth_effective: bool,
    /// Render efficiencies as percentages
    #[arg(long)]
    percent: bool,
    /// Restrict rows to one architecture
    #[arg(long)]
    arch: Option<String>,
    /// TOML catalog overriding or extending devices and profiles
    #[arg(long)]
    catalog: Option<PathBuf>,
    /// Write output to a file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AssembleArgs {
    /// Operation: add, sub, mult or accum
    op: String,
    /// Operand width in bits
    #[arg(long, default_value_t = 8)]
    n: u32,
    /// Columns for accum (16 * 2^k)
    #[arg(long, default_value_t = 16)]
    q: u32,
    /// Write output to a file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(args) => {
            let outcome = match args.workload {
                Workload::Mac => run_mac(args.n, args.q, args.seed)?,
                Workload::Gemv => run_gemv(args.n, args.seed)?,
            };
            emit(&outcome.transcript, args.out.as_ref())?;
            if outcome.matched {
                Ok(())
            } else {
                Err(CliError::Verification("simulator result differs from the host oracle".into()))
            }
        }
        Command::Report(args) => {
            let catalog = match &args.catalog {
                Some(path) => Catalog::load(path)?,
                None => Catalog::builtin(),
            };
            let arch = match &args.arch {
                Some(name) => Some(
                    ArchId::parse(name)
                        .ok_or_else(|| CliError::Usage(format!("unknown arch '{name}'")))?,
                ),
                None => None,
            };
            let spec = ReportSpec {
                kind: args.kind.kind(),
                precisions: args.n.clone(),
                q: args.q,
                device: args.device.clone(),
                format: match args.format {
                    FormatArg::Csv => OutFormat::Csv,
                    FormatArg::Json => OutFormat::Json,
                },
                booth_effective: args.booth_effective,
                percent: args.percent,
                arch,
            };
            let text = picaso_cli::generate_report(&spec, &catalog)?;
            emit(&text, args.out.as_ref())
        }
        Command::Assemble(args) => {
            let text = assemble_text(&args.op, args.n, args.q)?;
            emit(&text, args.out.as_ref())
        }
        Command::DumpState(args) => {
            let outcome = match args.workload {
                Workload::Mac => run_mac(args.n, args.q, args.seed)?,
                Workload::Gemv => run_gemv(args.n, args.seed)?,
            };
            let text = snapshot::snapshot_json(&outcome.array);
            emit(&text, args.out.as_ref())?;
            if outcome.matched {
                Ok(())
            } else {
                Err(CliError::Verification("simulator result differs from the host oracle".into()))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
