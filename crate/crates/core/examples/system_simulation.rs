//! 19-site, 57-sector drop simulation: users pick an MCS from the full
//! 256-QAM table and are compared against the theoretical admission curve.
//!
//!     cargo run --release --example system_simulation [scenario.toml]

use urllc_core::qos::QosConstraint;
use urllc_core::sim::{check_dominance, simulate, McsPolicy, ScenarioConfig};
use urllc_core::{McsCatalogue, Probability, TrafficSpec};

fn main() -> urllc_core::Result<()> {
    let config = match std::env::args().nth(1) {
        Some(path) => ScenarioConfig::from_path(path)?,
        None => ScenarioConfig::default(),
    };
    let traffic = TrafficSpec::new(256, 0.01)?;
    let qos = QosConstraint::new(1e-3, Probability::new(1e-3)?)?;
    let full = McsCatalogue::nr_pdsch_256qam();
    let theory = McsCatalogue::evaluation_subset();

    println!(
        "{} sites, {} sectors, ISD {:.0} m, {} users x {} drops",
        config.sites,
        config.total_sectors(),
        config.inter_site_distance_m(),
        config.users_per_drop(),
        config.drops
    );
    for policy in [McsPolicy::MinBandwidth, McsPolicy::HighestEfficiency] {
        let report = simulate(&config, &traffic, &qos, &full, policy)?;
        let dom = check_dominance(&report, &traffic, &qos, &theory);
        println!(
            "{policy:?}: coverage {:.1}%, {} users checked, {} below the curve, min ratio {:.4}",
            100.0 * report.coverage(),
            dom.checked,
            dom.violations,
            dom.min_ratio
        );
        let pts = &report.curve.points;
        for q in [0.05, 0.5, 0.95] {
            let p = &pts[((pts.len() - 1) as f64 * q) as usize];
            println!(
                "  SNR quantile {q}: {:.2} dB, MCS {}, {:.1} kHz",
                p.snr_db,
                p.mcs_index,
                p.bandwidth_hz / 1e3
            );
        }
    }
    Ok(())
}
