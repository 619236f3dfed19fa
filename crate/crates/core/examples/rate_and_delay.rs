//! Adaptive transmission rate over 540 kHz and the resulting worst-case
//! delay for a 256-bit message every 10 ms.
//!
//!     cargo run --example rate_and_delay

use urllc_core::fbl_rate::throughput;
use urllc_core::qos::{adaptive_delay, adaptive_rate, delay_crossing_db};
use urllc_core::{McsCatalogue, Probability, Snr, SnrThresholdTable, TrafficSpec};

fn main() -> urllc_core::Result<()> {
    let bandwidth = 540e3;
    let traffic = TrafficSpec::new(256, 0.01)?;
    let table = SnrThresholdTable::build(
        traffic.k(),
        Probability::new(1e-3)?,
        &McsCatalogue::evaluation_subset(),
    );

    println!(
        "{:>7} {:>4} {:>12} {:>10}",
        "snr_db", "mcs", "rate_bps", "delay_ms"
    );
    for db in (-8..=30).step_by(2) {
        let snr = Snr::from_db(f64::from(db))?;
        let delay = adaptive_delay(&traffic, snr, bandwidth, &table);
        match adaptive_rate(traffic.k(), snr, &table) {
            Some((r, idx)) => {
                println!(
                    "{db:>7} {idx:>4} {:>12.0} {:>10.4}",
                    throughput(r, bandwidth),
                    delay.as_f64() * 1e3
                )
            }
            None => println!("{db:>7} {:>4} {:>12} {:>10}", "-", "-", "inf"),
        }
    }

    if let Some(db) = delay_crossing_db(&traffic, bandwidth, &table, 1e-3, -10.0, 30.0, 0.01) {
        println!("delay reaches 1 ms at {db:.3} dB");
    }
    Ok(())
}
