//! Minimum coding length needed for a 256-bit message, per constellation.
//!
//!     cargo run --example coding_length

use urllc_core::mcs::{min_blocklength, DEFAULT_MAX_BLOCKLENGTH};
use urllc_core::{ModulationFit, Probability, Snr};

fn main() -> urllc_core::Result<()> {
    let k = 256;
    let eps = Probability::new(1e-5)?;
    let fits = ModulationFit::builtin();
    print!("{:>7}", "snr_db");
    for fit in &fits {
        print!(" {:>9}", format!("{}-QAM", fit.order()));
    }
    println!();
    for db in (-6..=30).step_by(4) {
        let snr = Snr::from_db(f64::from(db))?;
        print!("{db:>7}");
        for fit in &fits {
            match min_blocklength(k, snr, eps, fit, DEFAULT_MAX_BLOCKLENGTH) {
                Some(r) => print!(" {:>9}", r.n),
                None => print!(" {:>9}", "-"),
            }
        }
        println!();
    }

    let r = min_blocklength(
        k,
        Snr::from_db(30.0)?,
        eps,
        &ModulationFit::qam(256).unwrap(),
        DEFAULT_MAX_BLOCKLENGTH,
    )
    .expect("feasible at 30 dB");
    println!(
        "256-QAM at 30 dB: n = {} (real-valued bound {:.4})",
        r.n, r.real_bound
    );
    Ok(())
}
