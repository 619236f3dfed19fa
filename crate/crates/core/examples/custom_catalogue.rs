//! Loading an MCS table from CSV and adding a constellation fit by hand.
//!
//!     cargo run --example custom_catalogue

use urllc_core::fbl_rate::mqam_mutual_info;
use urllc_core::{McsCatalogue, ModulationFit, Probability, Snr, SnrThresholdTable};

const TABLE: &str = "index,modulation_order,binary_code_rate
0,4,0.1171875
3,4,0.3701171875
7,16,0.4785156250
14,64,0.6425781250
";

fn main() -> urllc_core::Result<()> {
    let catalogue = McsCatalogue::from_csv_str(TABLE)?;
    let table = SnrThresholdTable::build(64, Probability::new(1e-4)?, &catalogue);
    println!("64-bit messages at epsilon = 1e-4");
    for row in table.rows() {
        println!(
            "  MCS {:>2}: n = {:>4}, threshold {:?}",
            row.mcs.index,
            row.blocklength,
            row.threshold.db()
        );
    }
    println!("monotone thresholds: {}", table.is_monotone());

    // a two-term fit for 4-QAM, checked for weight normalisation on construction
    let fit = ModulationFit::new(4, vec![0.143281, 0.856719], vec![1.557531, 0.57239])?;
    println!(
        "I'(4-QAM, 3 dB) = {:.5} bit/symbol",
        mqam_mutual_info(Snr::from_db(3.0)?, &fit)
    );
    println!(
        "bad weights rejected: {}",
        ModulationFit::new(4, vec![0.5, 0.4], vec![1.0, 2.0]).is_err()
    );
    Ok(())
}
