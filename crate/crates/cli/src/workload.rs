//! Demo workloads: multiply-accumulate across a block row and a small GEMV,
//! both run on the cycle-accurate simulator and verified against host
//! arithmetic.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use picaso_core::machine::{OperandLayout, PimArray};
use picaso_core::microprogram::{
    prog_accumulate_row, prog_addsub, prog_mult_booth, schedule_for, AddSubOp, ControlWord,
    Microprogram, PipelineConfig, ProgramMeta,
};
use picaso_core::datapath::{EncoderConf, OpMuxConf};
use picaso_core::perfmodel::{accum_latency, mult_latency, ArchId, ArchProfile};
use picaso_core::BLOCK_WIDTH;

use crate::CliError;

/// Result of a simulated workload: the printable transcript, the final
/// array (for state dumps) and the oracle verdict.
#[derive(Debug)]
pub struct SimOutcome {
    pub transcript: String,
    pub array: PimArray,
    pub matched: bool,
}

fn signed(base: u16, width: u32) -> OperandLayout {
    OperandLayout::new(base, width, true).expect("layout within the register file")
}

fn validate_n(n: u32) -> Result<(), CliError> {
    if (2..=32).contains(&n) {
        Ok(())
    } else {
        Err(CliError::Usage(format!("n must be in 2..=32, got {n}")))
    }
}

fn validate_q(q: u32) -> Result<(), CliError> {
    if q >= 16 && q.is_multiple_of(16) && (q / 16).is_power_of_two() {
        Ok(())
    } else {
        Err(CliError::Usage(format!("q must be 16*2^k, got {q}")))
    }
}

fn fmt_values(values: &[i128]) -> String {
    let items: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    format!("[{}]", items.join(", "))
}

fn random_operands(rng: &mut ChaCha8Rng, n: u32, count: usize) -> Vec<i128> {
    let hi = 1i64 << (n - 1);
    (0..count).map(|_| rng.random_range(-hi..hi) as i128).collect()
}

/// Runs `q` parallel multiplications followed by a row accumulation and
/// checks block 0 / PE 0 against the host dot product.
pub fn run_mac(n: u32, q: u32, seed: u64) -> Result<SimOutcome, CliError> {
    validate_n(n)?;
    validate_q(q)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = random_operands(&mut rng, n, q as usize);
    let b = random_operands(&mut rng, n, q as usize);
    run_mac_case(n, q, seed, &a, &b)
}

/// MAC with explicit operands (the seeded command wraps this).
pub fn run_mac_case(n: u32, q: u32, seed: u64, a: &[i128], b: &[i128]) -> Result<SimOutcome, CliError> {
    validate_n(n)?;
    validate_q(q)?;
    assert_eq!(a.len(), q as usize);
    assert_eq!(b.len(), q as usize);

    let cols = (q / 16) as usize;
    let mut array = PimArray::new(1, cols, PipelineConfig::FullPipe);
    let (a_row, b_row, prod_row) = (0u16, n as u16, (2 * n) as u16);
    for c in 0..cols {
        let sl = c * BLOCK_WIDTH..(c + 1) * BLOCK_WIDTH;
        array.load_corner_turned((0, c), &a[sl.clone()], signed(a_row, n))?;
        array.load_corner_turned((0, c), &b[sl], signed(b_row, n))?;
    }

    let mult = prog_mult_booth(prod_row, a_row, b_row, n)?;
    let mult_cycles = array.run(&mult)?;

    let mut transcript = format!("workload mac: n={n} q={q} seed={seed} pipe={}\n", array.pipe().as_str());
    let mut matched = true;
    for c in 0..cols {
        let sl = c * BLOCK_WIDTH..(c + 1) * BLOCK_WIDTH;
        let products: Vec<i128> = (0..BLOCK_WIDTH)
            .map(|lane| array.read_value((0, c), lane, signed(prod_row, 2 * n)))
            .collect::<Result<_, _>>()?;
        for (lane, &p) in products.iter().enumerate() {
            if p != a[c * BLOCK_WIDTH + lane] * b[c * BLOCK_WIDTH + lane] {
                matched = false;
            }
        }
        transcript.push_str(&format!("block {c} a:        {}\n", fmt_values(&a[sl.clone()])));
        transcript.push_str(&format!("block {c} b:        {}\n", fmt_values(&b[sl])));
        transcript.push_str(&format!("block {c} products: {}\n", fmt_values(&products)));
    }

    let accum = prog_accumulate_row(prod_row, 2 * n, q)?;
    let accum_cycles = array.run(&accum)?;

    let result_width = 2 * n + 4 + (q / 16).trailing_zeros();
    let result = array.read_value((0, 0), 0, signed(prod_row, result_width))?;
    let oracle: i128 = a.iter().zip(b).map(|(&x, &y)| x * y).sum();
    matched &= result == oracle;

    let picaso = ArchProfile::builtin(ArchId::PicasoF);
    let mult_formula = mult_latency(&picaso, n);
    let accum_formula_n = accum_latency(&picaso, q, n).expect("q validated");
    let accum_formula_2n = accum_latency(&picaso, q, 2 * n).expect("q validated");

    transcript.push_str(&format!("array result: {result}\n"));
    transcript.push_str(&format!("host oracle:  {oracle}\n"));
    transcript.push_str(&format!("verdict: {}\n", if matched { "MATCH" } else { "MISMATCH" }));
    transcript.push_str(&format!(
        "cycles: mult {mult_formula}, accum {accum_formula_n} (operand-width formulas); \
         simulated mult {mult_cycles}, accum {accum_cycles} over 2n-bit products (formula {accum_formula_2n})\n"
    ));

    Ok(SimOutcome { transcript, array, matched })
}

/// GEMV columns in the demo mapping: one matrix row per PE lane.
pub const GEMV_COLS: usize = 4;

/// Runs the GEMV demo: a 16 x 4 matrix (one row per PE lane) against a
/// 4-vector, as 4 multiply-then-add passes with weights resident.
pub fn run_gemv(n: u32, seed: u64) -> Result<SimOutcome, CliError> {
    validate_n(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights: Vec<Vec<i128>> = (0..GEMV_COLS)
        .map(|_| random_operands(&mut rng, n, BLOCK_WIDTH))
        .collect();
    let x = random_operands(&mut rng, n, GEMV_COLS);
    run_gemv_case(n, seed, &weights, &x)
}

/// GEMV with an explicit matrix (`weights[k][lane]`) and vector.
pub fn run_gemv_case(
    n: u32,
    seed: u64,
    weights: &[Vec<i128>],
    x: &[i128],
) -> Result<SimOutcome, CliError> {
    validate_n(n)?;
    assert_eq!(weights.len(), GEMV_COLS);
    assert_eq!(x.len(), GEMV_COLS);

    // Row layout: weight columns, then the broadcast x element, then the
    // product field (2n bits plus 2 sign-extension rows), then the
    // accumulator.
    let acc_width = 2 * n + 2;
    let x_row = (GEMV_COLS as u32 * n) as u16;
    let prod_row = x_row + n as u16;
    let acc_row = prod_row + acc_width as u16;

    let mut array = PimArray::new(1, 1, PipelineConfig::FullPipe);
    for (k, col) in weights.iter().enumerate() {
        array.load_corner_turned((0, 0), col, signed((k as u32 * n) as u16, n))?;
    }
    array.load_corner_turned((0, 0), &vec![0; BLOCK_WIDTH], signed(acc_row, acc_width))?;

    // Sign-extends the 2n-bit product into the two rows above it. The
    // extension reads the product's sign row right after the multiplier
    // writes it, so it is fused with the multiply and scheduled as one
    // program, letting the stall pass pad the junction.
    let sign_row = prod_row + (2 * n - 1) as u16;
    let ext_words: Vec<ControlWord> = (0..2)
        .map(|i| ControlWord {
            rd_addr_a: sign_row,
            rd_addr_b: sign_row,
            wr_addr: prod_row + (2 * n) as u16 + i,
            wr_en: true,
            opmux: OpMuxConf::AOpB,
            encoder: EncoderConf::CPX,
            op_latch_en: false,
            carry_seed_en: false,
            net_level: None,
            comment: format!("sign extend +{i}"),
        })
        .collect();

    let mut total_cycles = 0u64;
    for (k, &xk) in x.iter().enumerate() {
        array.load_corner_turned((0, 0), &vec![xk; BLOCK_WIDTH], signed(x_row, n))?;
        let mult = prog_mult_booth(prod_row, (k as u32 * n) as u16, x_row, n)?;
        let mut words = mult.words().to_vec();
        words.extend(ext_words.iter().cloned());
        let mult_ext = schedule_for(
            PipelineConfig::FullPipe,
            &Microprogram::from_words(words, ProgramMeta::Raw),
        )?;
        total_cycles += array.run(&mult_ext)?;
        let add = prog_addsub(acc_row, acc_row, prod_row, acc_width, AddSubOp::Add)?;
        total_cycles += array.run(&add)?;
    }

    let results: Vec<i128> = (0..BLOCK_WIDTH)
        .map(|lane| array.read_value((0, 0), lane, signed(acc_row, acc_width)))
        .collect::<Result<_, _>>()?;
    let oracle: Vec<i128> = (0..BLOCK_WIDTH)
        .map(|lane| (0..GEMV_COLS).map(|k| weights[k][lane] * x[k]).sum())
        .collect();
    let matched = results == oracle;

    let mut transcript = format!(
        "workload gemv: n={n} rows={BLOCK_WIDTH} cols={GEMV_COLS} seed={seed} pipe={}\n",
        array.pipe().as_str()
    );
    transcript.push_str(&format!("x:            {}\n", fmt_values(x)));
    transcript.push_str(&format!("lane results: {}\n", fmt_values(&results)));
    transcript.push_str(&format!("host oracle:  {}\n", fmt_values(&oracle)));
    transcript.push_str(&format!("verdict: {}\n", if matched { "MATCH" } else { "MISMATCH" }));
    transcript.push_str(&format!("cycles: total {total_cycles}\n"));

    Ok(SimOutcome { transcript, array, matched })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mac_demo_matches_and_reports_formula_cycles() {
        let out = run_mac(8, 16, 1).unwrap();
        assert!(out.matched);
        assert!(out.transcript.contains("verdict: MATCH"), "{}", out.transcript);
        assert!(out.transcript.contains("mult 144"), "{}", out.transcript);
        assert!(out.transcript.contains("accum 48"), "{}", out.transcript);
    }

    #[test]
    fn mac_demo_multi_block() {
        let out = run_mac(8, 64, 7).unwrap();
        assert!(out.matched);
        assert_eq!(out.array.cols(), 4);
    }

    #[test]
    fn mac_rejects_bad_q() {
        let err = run_mac(8, 24, 1).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("16*2^k"));
    }

    #[test]
    fn gemv_all_zero_matrix_yields_zero_vector() {
        let weights = vec![vec![0i128; BLOCK_WIDTH]; GEMV_COLS];
        let x = vec![7i128, -3, 5, 1];
        let out = run_gemv_case(8, 0, &weights, &x).unwrap();
        assert!(out.matched);
        assert!(out.transcript.contains("lane results: [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0]"));
    }

    #[test]
    fn gemv_random_matches_host() {
        for seed in [1u64, 2, 3] {
            let out = run_gemv(8, seed).unwrap();
            assert!(out.matched, "seed {seed}:\n{}", out.transcript);
        }
        let out = run_gemv(16, 5).unwrap();
        assert!(out.matched);
    }
}
