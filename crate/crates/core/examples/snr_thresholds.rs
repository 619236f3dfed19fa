//! SNR switching thresholds for the five evaluation MCSs at two reliability
//! targets, and threshold-based MCS selection.
//!
//!     cargo run --example snr_thresholds

use urllc_core::mcs::{practical_blocklength, select_mcs};
use urllc_core::{McsCatalogue, Probability, Snr, SnrThresholdTable};

fn main() -> urllc_core::Result<()> {
    let k = 256;
    let catalogue = McsCatalogue::evaluation_subset();
    for eps in [1e-5, 1e-3] {
        let table = SnrThresholdTable::build(k, Probability::new(eps)?, &catalogue);
        println!("epsilon = {eps:e}");
        for row in table.rows() {
            let m = &row.mcs;
            let range = match (row.threshold.db(), table.upper_edge_db(m.index)) {
                (Some(lo), Some(hi)) if hi.is_finite() => format!("[{lo:.2}, {hi:.2}) dB"),
                (Some(lo), _) => format!("[{lo:.2}, inf) dB"),
                (None, _) => "infeasible".to_string(),
            };
            println!(
                "  MCS {:>2}  {:>3}-QAM  r_c = {:.5}  n = {:>4}  {range}",
                m.index,
                m.modulation_order,
                m.binary_code_rate,
                practical_blocklength(k, m)
            );
        }
        for db in [0.0, 8.0, 15.0, 25.0, 35.0] {
            let choice = select_mcs(Snr::from_db(db)?, &table).map(|m| m.index);
            println!("  at {db:>4} dB select {choice:?}");
        }
    }
    Ok(())
}
