//! Shannon capacity, the Gaussian-codebook normal approximation and the
//! M-QAM rate at a few SNR points.
//!
//!     cargo run --example fbl_rates

use urllc_core::fbl_rate::{
    dispersion, mqam_mutual_info, rate_gaussian_coding, rate_mqam, shannon_capacity,
};
use urllc_core::{ChannelPoint, ModulationFit, Probability, Snr};

fn main() -> urllc_core::Result<()> {
    let eps = Probability::new(1e-5)?;
    let n = 200;
    println!("n = {n}, epsilon = {eps}");
    println!(
        "{:>7} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8}",
        "snr_db", "C", "V", "R_gauss", "4QAM", "16QAM", "256QAM"
    );
    for db in [-5.0, 0.0, 5.0, 10.0, 20.0, 30.0] {
        let snr = Snr::from_db(db)?;
        let point = ChannelPoint::new(snr, n, eps)?;
        let qam = |m| rate_mqam(&point, &ModulationFit::qam(m).unwrap());
        println!(
            "{db:>7.1} {:>8.4} {:>8.4} {:>8.4} {:>8.4} {:>8.4} {:>8.4}",
            shannon_capacity(snr),
            dispersion(snr),
            rate_gaussian_coding(&point),
            qam(4),
            qam(16),
            qam(256),
        );
    }

    // the fitted mutual information saturates at log2 M
    let fit = ModulationFit::qam(64).unwrap();
    for db in [10.0, 20.0, 40.0] {
        println!(
            "I'(64-QAM, {db} dB) = {:.5}",
            mqam_mutual_info(Snr::from_db(db)?, &fit)
        );
    }
    Ok(())
}
