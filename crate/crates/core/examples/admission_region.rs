//! Minimum bandwidth needed to meet a 1 ms / 1e-3 target, per MCS and for
//! the best MCS at each SNR.
//!
//!     cargo run --example admission_region

use urllc_core::qos::{admission_curve, min_bandwidth, QosConstraint};
use urllc_core::{McsCatalogue, Probability, Snr, TrafficSpec};

fn main() -> urllc_core::Result<()> {
    let traffic = TrafficSpec::new(256, 0.01)?;
    let qos = QosConstraint::new(1e-3, Probability::new(1e-3)?)?;
    let catalogue = McsCatalogue::evaluation_subset();

    let grid: Vec<Snr> = (-8..=30)
        .step_by(2)
        .map(|db| Snr::from_db(f64::from(db)))
        .collect::<Result<_, _>>()?;
    let curve = admission_curve(&traffic, &qos, &grid, &catalogue)?;

    print!("{:>7}", "snr_db");
    for m in catalogue.entries() {
        print!(" {:>10}", format!("mcs{}_khz", m.index));
    }
    println!(" {:>10} {:>4}", "best_khz", "mcs");
    for (snr, point) in grid.iter().zip(&curve) {
        print!("{:>7.1}", snr.db());
        for m in catalogue.entries() {
            match min_bandwidth(&traffic, &qos, *snr, m) {
                Some(w) => print!(" {:>10.1}", w / 1e3),
                None => print!(" {:>10}", "-"),
            }
        }
        match (point.bandwidth_hz, point.mcs_index) {
            (Some(w), Some(i)) => println!(" {:>10.1} {i:>4}", w / 1e3),
            _ => println!(" {:>10} {:>4}", "-", "-"),
        }
    }
    Ok(())
}
