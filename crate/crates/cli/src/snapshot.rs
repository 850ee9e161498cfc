//! JSON state snapshot of a PIM array: block grid, register files as hex
//! rows, carry and op-latch bits. Used for golden tests and debugging.

use serde::Serialize;

use picaso_core::machine::PimArray;
use picaso_core::{BLOCK_WIDTH, RF_DEPTH};

#[derive(Serialize)]
struct Snapshot {
    rows: usize,
    cols: usize,
    pipe: &'static str,
    cycle: u64,
    blocks: Vec<BlockSnapshot>,
}

#[derive(Serialize)]
struct BlockSnapshot {
    row: usize,
    col: usize,
    carry: String,
    net_in: u8,
    net_out: u8,
    latched_op: Vec<&'static str>,
    rf: Vec<String>,
}

/// Serializes the full array state; output is byte-deterministic.
pub fn snapshot_json(array: &PimArray) -> String {
    let blocks = (0..array.rows())
        .flat_map(|r| (0..array.cols()).map(move |c| (r, c)))
        .map(|(r, c)| {
            let b = array.block(r, c);
            BlockSnapshot {
                row: r,
                col: c,
                carry: format!("0x{:04x}", b.carry()),
                net_in: b.net_in as u8,
                net_out: b.net_out as u8,
                latched_op: (0..BLOCK_WIDTH).map(|lane| b.latched_op(lane).as_str()).collect(),
                rf: (0..RF_DEPTH).map(|row| format!("0x{:04x}", b.rf_row(row))).collect(),
            }
        })
        .collect();
    let snap = Snapshot {
        rows: array.rows(),
        cols: array.cols(),
        pipe: array.pipe().as_str(),
        cycle: array.cycle_counter(),
        blocks,
    };
    let mut text = serde_json::to_string_pretty(&snap).expect("serializable");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use picaso_core::microprogram::PipelineConfig;

    #[test]
    fn snapshot_round_trips_as_json() {
        let array = PimArray::new(1, 2, PipelineConfig::FullPipe);
        let text = snapshot_json(&array);
        let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(doc["cols"], 2);
        assert_eq!(doc["blocks"].as_array().unwrap().len(), 2);
        assert_eq!(doc["blocks"][0]["rf"].as_array().unwrap().len(), RF_DEPTH);
        assert_eq!(doc["blocks"][0]["carry"], "0x0000");
    }
}
