//! `urllc` command line: every sweep is a pure function of its flags, and
//! writes CSV to stdout or to `--out`.
//!
//! Exit status: 0 on success, 1 on usage or input errors, 2 when `simulate`
//! finds a user below the theoretical admission curve.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::fbl_rate::{rate_mqam_raw, throughput, ModulationFit, Snr};
use crate::mcs::{
    min_blocklength, practical_blocklength, McsCatalogue, SnrThresholdTable,
    DEFAULT_MAX_BLOCKLENGTH, EVALUATION_SUBSET,
};
use crate::numerics::{q_inverse, Probability};
use crate::qos::{
    adaptive_delay, adaptive_rate, admission_curve_with_table, delay_crossing_db, QosConstraint,
    TrafficSpec,
};
use crate::sim::{check_dominance, simulate, McsPolicy, ScenarioConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DOMINANCE: i32 = 2;

pub const RATE_HEADER_PREFIX: &str = "snr_db";
pub const THRESHOLDS_HEADER: &str =
    "mcs_index,modulation_order,binary_code_rate,overall_code_rate,blocklength,lower_snr_db,upper_snr_db,feasible";
pub const NMIN_HEADER: &str = "kind,snr_db,modulation_order,n_min,real_bound,mcs_index";
pub const DELAY_HEADER: &str = "snr_db,mcs_index,delay_s";
pub const ADMISSION_HEADER: &str = "snr_db,mcs_index,bandwidth_hz";
pub const SIM_HEADER: &str = "snr_db,mcs_index,bandwidth_hz,feasible";

#[derive(Debug, Parser)]
#[command(
    name = "urllc",
    version,
    about = "Finite-blocklength MCS thresholds, delay bounds and admission regions for URLLC"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-MCS and adaptive transmission rate (bit/s) against SNR.
    Rate(RateArgs),
    /// Minimum coding length against SNR, with practical-length crossings.
    Nmin(NminArgs),
    /// SNR switching thresholds per MCS.
    Thresholds(ThresholdArgs),
    /// Worst-case delay against SNR under adaptive MCS.
    Delay(DelayArgs),
    /// Theoretical minimum bandwidth (admission curve) against SNR.
    Admission(AdmissionArgs),
    /// Multi-cell drop simulation checked against the admission curve.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Sweep {
    #[arg(long, default_value_t = -10.0, allow_negative_numbers = true)]
    pub snr_min_db: f64,
    #[arg(long, default_value_t = 30.0, allow_negative_numbers = true)]
    pub snr_max_db: f64,
    #[arg(long, default_value_t = 0.5)]
    pub snr_step_db: f64,
}

impl Sweep {
    pub fn grid(&self) -> Result<Vec<f64>> {
        let (lo, hi, step) = (self.snr_min_db, self.snr_max_db, self.snr_step_db);
        if !(lo.is_finite() && hi.is_finite() && step.is_finite()) || step <= 0.0 || hi < lo {
            return Err(Error::Domain(format!(
                "invalid SNR sweep [{lo}, {hi}] step {step}"
            )));
        }
        let count = ((hi - lo) / step + 1e-9).floor() as usize;
        Ok((0..=count).map(|i| lo + i as f64 * step).collect())
    }
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Information bits per message.
    #[arg(long, default_value_t = 256)]
    pub k_bits: u32,
    /// MCS catalogue CSV (`index,modulation_order,binary_code_rate`);
    /// defaults to the built-in 3GPP 256-QAM table.
    #[arg(long)]
    pub catalogue: Option<PathBuf>,
    /// Comma-separated MCS indices.
    #[arg(long, value_delimiter = ',', default_values_t = EVALUATION_SUBSET)]
    pub mcs: Vec<u32>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Common {
    fn catalogue(&self) -> Result<McsCatalogue> {
        if self.mcs.is_empty() {
            return Err(Error::Catalogue("no MCS selected".into()));
        }
        let base = match &self.catalogue {
            Some(path) => McsCatalogue::from_csv_path(path)?,
            None => McsCatalogue::nr_pdsch_256qam(),
        };
        // the built-in five rows carry the evaluation's five-decimal code rates
        if self.catalogue.is_none() && self.mcs == EVALUATION_SUBSET {
            return Ok(McsCatalogue::evaluation_subset());
        }
        base.subset(&self.mcs)
    }
}

#[derive(Debug, Clone, Args)]
pub struct RateArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub sweep: Sweep,
    #[arg(long, default_value_t = 1e-3)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 540e3)]
    pub bandwidth_hz: f64,
}

#[derive(Debug, Clone, Args)]
pub struct NminArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub sweep: Sweep,
    #[arg(long, default_value_t = 1e-5)]
    pub epsilon: f64,
    /// Restrict to one QAM order (4, 16, 64, 256); all four when absent.
    #[arg(long)]
    pub modulation_order: Option<u32>,
}

#[derive(Debug, Clone, Args)]
pub struct ThresholdArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 1e-5)]
    pub epsilon: f64,
}

#[derive(Debug, Clone, Args)]
pub struct DelayArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub sweep: Sweep,
    #[arg(long, default_value_t = 1e-3)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 540e3)]
    pub bandwidth_hz: f64,
    /// Message period.
    #[arg(long, default_value_t = 0.01)]
    pub tau_s: f64,
    /// Delay level whose SNR crossing is reported on stderr.
    #[arg(long, default_value_t = 1e-3)]
    pub d0_s: f64,
}

#[derive(Debug, Clone, Args)]
pub struct AdmissionArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub sweep: Sweep,
    #[arg(long, default_value_t = 1e-3)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub d0_s: f64,
    #[arg(long, default_value_t = 0.01)]
    pub tau_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    MinBandwidth,
    HighestEfficiency,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Scenario TOML; built-in defaults when absent.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value_t = 256)]
    pub k_bits: u32,
    #[arg(long, default_value_t = 0.01)]
    pub tau_s: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub d0_s: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub epsilon: f64,
    /// Overrides the config file's `rng_seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Catalogue the simulated users choose from (full 3GPP table by default).
    #[arg(long)]
    pub catalogue: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = PolicyArg::MinBandwidth)]
    pub policy: PolicyArg,
    /// Directory receiving `users.csv` and `curve.csv`.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

/// Formats with six significant digits; `inf` for unbounded values.
pub fn fmt6(x: f64) -> String {
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x == 0.0 {
        return "0.00000".into();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        // rounding can push the value into the next decade, e.g. 9.999996
        let digits = s
            .chars()
            .filter(char::is_ascii_digit)
            .skip_while(|&c| c == '0')
            .count();
        if digits > 6 && decimals > 0 {
            let d = decimals - 1;
            return format!("{x:.d$}");
        }
        s
    } else {
        format!("{x:.5e}")
    }
}

fn opt6(x: Option<f64>) -> String {
    x.map_or_else(|| "infeasible".to_string(), fmt6)
}

fn opt_index(x: Option<u32>) -> String {
    x.map_or_else(|| "infeasible".to_string(), |i| i.to_string())
}

fn probability(v: f64) -> Result<Probability> {
    Probability::new(v)
}

fn emit(out: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

pub fn cmd_rate(args: &RateArgs) -> Result<String> {
    let eps = probability(args.epsilon)?;
    if !(args.bandwidth_hz > 0.0) {
        return Err(Error::Domain("bandwidth must be positive".into()));
    }
    let cat = args.common.catalogue()?;
    let k = args.common.k_bits;
    let table = SnrThresholdTable::build(k, eps, &cat);
    let q_inv = q_inverse(eps);
    let mut s = String::from(RATE_HEADER_PREFIX);
    for m in cat.entries() {
        write!(s, ",mcs_{}", m.index).unwrap();
    }
    s.push_str(",adaptive,adaptive_mcs\n");
    for db in args.sweep.grid()? {
        let snr = Snr::from_db(db)?;
        s.push_str(&fmt6(db));
        for row in table.rows() {
            let feasible = matches!(row.threshold.db(), Some(t) if t <= db);
            let value = feasible.then(|| {
                let n = f64::from(row.blocklength);
                throughput(
                    rate_mqam_raw(snr.linear(), n, q_inv, row.mcs.fit()),
                    args.bandwidth_hz,
                )
            });
            write!(s, ",{}", opt6(value)).unwrap();
        }
        let adaptive = adaptive_rate(k, snr, &table);
        writeln!(
            s,
            ",{},{}",
            opt6(adaptive.map(|a| throughput(a.0, args.bandwidth_hz))),
            opt_index(adaptive.map(|a| a.1))
        )
        .unwrap();
    }
    Ok(s)
}

pub fn cmd_nmin(args: &NminArgs) -> Result<String> {
    let eps = probability(args.epsilon)?;
    let k = args.common.k_bits;
    let fits: Vec<ModulationFit> =
        match args.modulation_order {
            Some(m) => vec![ModulationFit::qam(m)
                .ok_or_else(|| Error::Domain(format!("no fit for {m}-QAM")))?],
            None => ModulationFit::builtin().to_vec(),
        };
    let cat = args.common.catalogue()?;
    let table = SnrThresholdTable::build(k, eps, &cat);
    let mut s = format!("{NMIN_HEADER}\n");
    for fit in &fits {
        for db in args.sweep.grid()? {
            let r = min_blocklength(k, Snr::from_db(db)?, eps, fit, DEFAULT_MAX_BLOCKLENGTH);
            writeln!(
                s,
                "curve,{},{},{},{},",
                fmt6(db),
                fit.order(),
                opt_index(r.map(|r| r.n)),
                opt6(r.map(|r| r.real_bound))
            )
            .unwrap();
        }
        // where the required length meets each MCS's practical length
        for row in table
            .rows()
            .iter()
            .filter(|r| r.mcs.modulation_order == fit.order())
        {
            writeln!(
                s,
                "crossing,{},{},{},{},{}",
                opt6(row.threshold.db()),
                fit.order(),
                row.blocklength,
                row.blocklength,
                row.mcs.index
            )
            .unwrap();
        }
    }
    Ok(s)
}

pub fn cmd_thresholds(args: &ThresholdArgs) -> Result<String> {
    let eps = probability(args.epsilon)?;
    let cat = args.common.catalogue()?;
    let table = SnrThresholdTable::build(args.common.k_bits, eps, &cat);
    let mut s = format!("{THRESHOLDS_HEADER}\n");
    for row in table.rows() {
        let m = &row.mcs;
        let upper = table.upper_edge_db(m.index);
        writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            m.index,
            m.modulation_order,
            fmt6(m.binary_code_rate),
            fmt6(m.overall_code_rate()),
            practical_blocklength(args.common.k_bits, m),
            opt6(row.threshold.db()),
            opt6(upper),
            row.threshold.is_feasible()
        )
        .unwrap();
    }
    Ok(s)
}

/// CSV plus the SNR at which the delay first drops to `d0` (if it does).
pub fn cmd_delay(args: &DelayArgs) -> Result<(String, Option<f64>)> {
    let eps = probability(args.epsilon)?;
    let traffic = TrafficSpec::new(args.common.k_bits, args.tau_s)?;
    if !(args.bandwidth_hz > 0.0) {
        return Err(Error::Domain("bandwidth must be positive".into()));
    }
    let cat = args.common.catalogue()?;
    let table = SnrThresholdTable::build(traffic.k(), eps, &cat);
    let mut s = format!("{DELAY_HEADER}\n");
    for db in args.sweep.grid()? {
        let snr = Snr::from_db(db)?;
        let mcs = adaptive_rate(traffic.k(), snr, &table).map(|a| a.1);
        let d = adaptive_delay(&traffic, snr, args.bandwidth_hz, &table);
        writeln!(s, "{},{},{}", fmt6(db), opt_index(mcs), fmt6(d.as_f64())).unwrap();
    }
    let crossing = delay_crossing_db(
        &traffic,
        args.bandwidth_hz,
        &table,
        args.d0_s,
        args.sweep.snr_min_db,
        args.sweep.snr_max_db,
        0.01,
    );
    Ok((s, crossing))
}

pub fn cmd_admission(args: &AdmissionArgs) -> Result<String> {
    let eps = probability(args.epsilon)?;
    let traffic = TrafficSpec::new(args.common.k_bits, args.tau_s)?;
    let qos = QosConstraint::new(args.d0_s, eps)?;
    let cat = args.common.catalogue()?;
    let table = SnrThresholdTable::build(traffic.k(), eps, &cat);
    let grid = args
        .sweep
        .grid()?
        .into_iter()
        .map(Snr::from_db)
        .collect::<Result<Vec<_>>>()?;
    let mut s = format!("{ADMISSION_HEADER}\n");
    for p in admission_curve_with_table(&traffic, &qos, &grid, &table) {
        writeln!(
            s,
            "{},{},{}",
            fmt6(p.snr_db),
            opt_index(p.mcs_index),
            opt6(p.bandwidth_hz)
        )
        .unwrap();
    }
    Ok(s)
}

/// Result of `simulate`: the two CSV bodies and the dominance summary line.
pub struct SimulateOutput {
    pub users_csv: String,
    pub curve_csv: String,
    pub summary: String,
    pub violations: usize,
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<SimulateOutput> {
    let mut config = match &args.config {
        Some(path) => ScenarioConfig::from_path(path)?,
        None => ScenarioConfig::default(),
    };
    if let Some(seed) = args.seed {
        config.rng_seed = seed;
    }
    let eps = probability(args.epsilon)?;
    let traffic = TrafficSpec::new(args.k_bits, args.tau_s)?;
    let qos = QosConstraint::new(args.d0_s, eps)?;
    let catalogue = match &args.catalogue {
        Some(path) => McsCatalogue::from_csv_path(path)?,
        None => McsCatalogue::nr_pdsch_256qam(),
    };
    let policy = match args.policy {
        PolicyArg::MinBandwidth => McsPolicy::MinBandwidth,
        PolicyArg::HighestEfficiency => McsPolicy::HighestEfficiency,
    };
    let report = simulate(&config, &traffic, &qos, &catalogue, policy)?;
    let dominance = check_dominance(&report, &traffic, &qos, &McsCatalogue::evaluation_subset());

    let mut users_csv = format!("{SIM_HEADER}\n");
    for u in &report.users {
        writeln!(
            users_csv,
            "{},{},{},{}",
            fmt6(u.snr_db),
            opt_index(u.selected_mcs),
            opt6(u.required_bandwidth_hz),
            u.is_feasible()
        )
        .unwrap();
    }
    let mut curve_csv = format!("{SIM_HEADER}\n");
    for p in &report.curve.points {
        writeln!(
            curve_csv,
            "{},{},{},true",
            fmt6(p.snr_db),
            p.mcs_index,
            fmt6(p.bandwidth_hz)
        )
        .unwrap();
    }
    let summary = format!(
        "users={} feasible={} coverage={} checked={} violations={} theory_infeasible={} min_ratio={}",
        report.users.len(),
        report.feasible_count(),
        fmt6(report.coverage()),
        dominance.checked,
        dominance.violations,
        dominance.theory_infeasible,
        fmt6(dominance.min_ratio)
    );
    Ok(SimulateOutput {
        users_csv,
        curve_csv,
        summary,
        violations: dominance.violations,
    })
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Rate(a) => emit(&a.common.out, &cmd_rate(a)?, stdout)?,
        Command::Nmin(a) => emit(&a.common.out, &cmd_nmin(a)?, stdout)?,
        Command::Thresholds(a) => emit(&a.common.out, &cmd_thresholds(a)?, stdout)?,
        Command::Delay(a) => {
            let (csv, crossing) = cmd_delay(a)?;
            emit(&a.common.out, &csv, stdout)?;
            match crossing {
                Some(db) => writeln!(
                    stderr,
                    "delay drops to {} s at {} dB",
                    fmt6(a.d0_s),
                    fmt6(db)
                )?,
                None => writeln!(
                    stderr,
                    "delay stays above {} s over the sweep",
                    fmt6(a.d0_s)
                )?,
            }
        }
        Command::Admission(a) => emit(&a.common.out, &cmd_admission(a)?, stdout)?,
        Command::Simulate(a) => {
            let out = cmd_simulate(a)?;
            std::fs::create_dir_all(&a.out)?;
            std::fs::write(a.out.join("users.csv"), &out.users_csv)?;
            std::fs::write(a.out.join("curve.csv"), &out.curve_csv)?;
            writeln!(stdout, "{}", out.summary)?;
            if out.violations > 0 {
                return Ok(EXIT_DOMINANCE);
            }
        }
    }
    Ok(EXIT_OK)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
            } else {
                let _ = stdout.write_all(text.as_bytes());
            }
            return code;
        }
    };
    match dispatch(&cli, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(fmt6(540000.0), "540000");
        assert_eq!(fmt6(0.4741), "0.474100");
        assert_eq!(fmt6(-6.27814), "-6.27814");
        assert_eq!(fmt6(1e-3), "0.00100000");
        assert_eq!(fmt6(1234567.0), "1.23457e6");
        assert_eq!(fmt6(9.9999996), "10.0000");
        assert_eq!(fmt6(f64::INFINITY), "inf");
        assert_eq!(fmt6(0.0), "0.00000");
    }

    #[test]
    fn sweep_grid_is_inclusive() {
        let s = Sweep {
            snr_min_db: -1.0,
            snr_max_db: 1.0,
            snr_step_db: 0.5,
        };
        assert_eq!(s.grid().unwrap(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        let bad = Sweep {
            snr_min_db: 1.0,
            snr_max_db: 0.0,
            snr_step_db: 0.5,
        };
        assert!(bad.grid().is_err());
        let zero = Sweep {
            snr_min_db: 0.0,
            snr_max_db: 1.0,
            snr_step_db: 0.0,
        };
        assert!(zero.grid().is_err());
    }
}
