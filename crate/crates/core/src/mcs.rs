//! 5G NR MCS catalogue and the solvers built on it: practical codeword
//! length, minimum blocklength for a payload, SNR switching thresholds and
//! threshold-based MCS selection.

use std::f64::consts::LN_2;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::fbl_rate::{dispersion_linear, rate_mqam_raw, ModulationFit, Snr};
use crate::numerics::{find_root_increasing, q_inverse, Probability};

/// One row of an MCS table.
#[derive(Debug, Clone, PartialEq)]
pub struct McsConfig {
    /// MCS index as used by 3GPP TS 38.214.
    pub index: u32,
    pub modulation_order: u32,
    pub binary_code_rate: f64,
    fit: ModulationFit,
}

impl McsConfig {
    pub fn new(index: u32, modulation_order: u32, binary_code_rate: f64) -> Result<Self> {
        if !(binary_code_rate > 0.0 && binary_code_rate < 1.0) {
            return Err(Error::Catalogue(format!(
                "MCS {index}: binary code rate must lie in (0, 1), got {binary_code_rate}"
            )));
        }
        let fit = ModulationFit::qam(modulation_order).ok_or_else(|| {
            Error::Catalogue(format!(
                "MCS {index}: no mutual-information fit for modulation order {modulation_order}"
            ))
        })?;
        Ok(Self {
            index,
            modulation_order,
            binary_code_rate,
            fit,
        })
    }

    /// Information bits per coded symbol, `r_c = binary_code_rate · log2(M)`.
    pub fn overall_code_rate(&self) -> f64 {
        self.binary_code_rate * f64::from(self.modulation_order).log2()
    }

    pub fn fit(&self) -> &ModulationFit {
        &self.fit
    }
}

/// MCS rows ordered by strictly increasing spectral efficiency.
#[derive(Debug, Clone, PartialEq)]
pub struct McsCatalogue {
    entries: Vec<McsConfig>,
}

/// Indices of the five-row evaluation subset.
pub const EVALUATION_SUBSET: [u32; 5] = [0, 5, 11, 20, 27];

const NR_256QAM_CSV: &str = include_str!("../data/nr_pdsch_mcs_256qam.csv");

#[derive(Debug, Deserialize)]
struct CsvRow {
    index: u32,
    modulation_order: u32,
    binary_code_rate: f64,
}

impl McsCatalogue {
    pub fn new(entries: Vec<McsConfig>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Catalogue("catalogue is empty".into()));
        }
        for pair in entries.windows(2) {
            if pair[1].overall_code_rate() <= pair[0].overall_code_rate() {
                return Err(Error::Catalogue(format!(
                    "MCS {} does not have higher efficiency than MCS {}",
                    pair[1].index, pair[0].index
                )));
            }
        }
        Ok(Self { entries })
    }

    /// The five MCS rows with markedly different efficiency (indices 0, 5, 11,
    /// 20, 27 of the 256-QAM PDSCH table), with code rates to five decimals.
    pub fn evaluation_subset() -> Self {
        let rows = [
            (0, 4, 0.11719),
            (5, 16, 0.36914),
            (11, 64, 0.45508),
            (20, 256, 0.66650),
            (27, 256, 0.92578),
        ];
        let entries = rows
            .iter()
            .map(|&(i, m, r)| McsConfig::new(i, m, r).expect("built-in row"))
            .collect();
        Self::new(entries).expect("built-in catalogue")
    }

    /// TS 38.214 Table 5.1.3.1-2 (PDSCH, 256-QAM), rows 0..=27. Rows 28..=31
    /// are reserved for retransmissions and carry no code rate.
    pub fn nr_pdsch_256qam() -> Self {
        Self::from_csv_str(NR_256QAM_CSV).expect("embedded MCS table")
    }

    /// Parses `index,modulation_order,binary_code_rate` CSV.
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let headers = reader
            .headers()
            .map_err(|e| Error::Catalogue(e.to_string()))?
            .clone();
        let expected = ["index", "modulation_order", "binary_code_rate"];
        if headers.iter().ne(expected.iter().copied()) {
            return Err(Error::Catalogue(format!(
                "expected header `{}`, got `{}`",
                expected.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut entries = Vec::new();
        for row in reader.deserialize::<CsvRow>() {
            let row = row.map_err(|e| Error::Catalogue(e.to_string()))?;
            entries.push(McsConfig::new(
                row.index,
                row.modulation_order,
                row.binary_code_rate,
            )?);
        }
        Self::new(entries)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_csv_str(&std::fs::read_to_string(path)?)
    }

    pub fn entries(&self) -> &[McsConfig] {
        &self.entries
    }

    pub fn get(&self, index: u32) -> Option<&McsConfig> {
        self.entries.iter().find(|m| m.index == index)
    }

    /// Restricts the catalogue to the given indices (order is taken from the
    /// catalogue, not from `indices`).
    pub fn subset(&self, indices: &[u32]) -> Result<Self> {
        for i in indices {
            if self.get(*i).is_none() {
                return Err(Error::Catalogue(format!("MCS {i} is not in the catalogue")));
            }
        }
        Self::new(
            self.entries
                .iter()
                .filter(|m| indices.contains(&m.index))
                .cloned()
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Codeword length `n̂` implied by carrying `k` bits at the MCS's overall
/// code rate, rounded up.
pub fn practical_blocklength(k: u32, mcs: &McsConfig) -> u32 {
    let exact = f64::from(k) / mcs.overall_code_rate();
    // Absorb representation error so exact quotients are not bumped up.
    let n = (exact - exact * 1e-12).ceil();
    (n as u32).max(1)
}

/// Default search cap for [`min_blocklength`].
pub const DEFAULT_MAX_BLOCKLENGTH: u32 = 1_000_000;

/// Result of a minimum-blocklength search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinBlocklength {
    /// Smallest integer `n` with `n·R(n) ≥ k`.
    pub n: u32,
    /// Real-valued solution of `x·R(x) = k` in `(n − 1, n]`.
    pub real_bound: f64,
}

/// Smallest blocklength that carries `k` bits at `(snr, epsilon)` with the
/// given constellation, or `None` if no `n ≤ max_blocklength` does.
///
/// `n·R(n)` is not monotone for small `n`, so the search splits `[1, max]`
/// at the stationary points of `x·R(x)` (roots of a quadratic in `√x`) and
/// bisects within each monotone run, in ascending order.
pub fn min_blocklength(
    k: u32,
    snr: Snr,
    epsilon: Probability,
    fit: &ModulationFit,
    max_blocklength: u32,
) -> Option<MinBlocklength> {
    let k = f64::from(k);
    if max_blocklength == 0 || k > f64::from(max_blocklength) * fit.bits_per_symbol() {
        return None;
    }
    let p = snr.linear();
    let q_inv = q_inverse(epsilon);
    let surplus = |x: f64| x * rate_mqam_raw(p, x, q_inv, fit) - k;

    // d/dx [x·R(x)]·x = I·s² − c·s + 1/ln2 with s = √x.
    let mi = fit.mutual_info_linear(p);
    let c = 0.5 * dispersion_linear(p).sqrt() * q_inv;
    let mut breaks: Vec<f64> = stationary_points(mi, c, 1.0 / LN_2)
        .into_iter()
        .map(|s| s * s)
        .filter(|&x| x > 1.0 && x < f64::from(max_blocklength))
        .collect();
    breaks.sort_by(f64::total_cmp);

    let mut start = 1u32;
    let mut ends: Vec<u32> = breaks.iter().map(|&x| x.floor() as u32).collect();
    ends.push(max_blocklength);
    for end in ends {
        if end < start {
            continue;
        }
        let (g_lo, g_hi) = (surplus(f64::from(start)), surplus(f64::from(end)));
        let found = if g_lo >= 0.0 {
            Some(start)
        } else if g_hi >= 0.0 {
            // increasing run: first integer with non-negative surplus
            let (mut lo, mut hi) = (start, end);
            while hi - lo > 1 {
                let mid = lo + (hi - lo) / 2;
                if surplus(f64::from(mid)) >= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            Some(hi)
        } else {
            None
        };
        if let Some(n) = found {
            let real_bound = if n == 1 {
                1.0
            } else {
                find_root_increasing(surplus, f64::from(n - 1), f64::from(n), 1e-10)
                    .unwrap_or(f64::from(n))
            };
            return Some(MinBlocklength { n, real_bound });
        }
        start = end + 1;
    }
    None
}

/// Positive roots of `a·s² − c·s + d = 0` (with `d > 0`).
fn stationary_points(a: f64, c: f64, d: f64) -> Vec<f64> {
    if c <= 0.0 {
        return Vec::new();
    }
    if a <= 0.0 {
        return vec![d / c];
    }
    let disc = c * c - 4.0 * a * d;
    if disc <= 0.0 {
        return Vec::new();
    }
    let root = disc.sqrt();
    vec![(c - root) / (2.0 * a), (c + root) / (2.0 * a)]
}

/// Search window for SNR thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdSearch {
    pub floor_db: f64,
    pub ceiling_db: f64,
    /// Coarse scan step used to bracket the first crossing.
    pub step_db: f64,
    /// Final bracket width.
    pub tol_db: f64,
}

impl Default for ThresholdSearch {
    fn default() -> Self {
        Self {
            floor_db: -50.0,
            ceiling_db: 50.0,
            step_db: 0.1,
            tol_db: 1e-6,
        }
    }
}

/// Lowest SNR at which an MCS carries `k` bits in its practical blocklength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SnrThreshold {
    /// Feasible from this SNR upward. `f64::NEG_INFINITY` means the MCS
    /// already works at the bottom of the search window.
    From(f64),
    /// Not achievable anywhere up to the search ceiling.
    Infeasible,
}

impl SnrThreshold {
    pub fn db(self) -> Option<f64> {
        match self {
            Self::From(db) => Some(db),
            Self::Infeasible => None,
        }
    }

    pub fn is_feasible(self) -> bool {
        matches!(self, Self::From(_))
    }
}

/// Threshold with the default search window (ceiling 50 dB).
pub fn snr_threshold(k: u32, mcs: &McsConfig, epsilon: Probability) -> SnrThreshold {
    snr_threshold_with(k, mcs, epsilon, &ThresholdSearch::default())
}

/// Smallest SNR (dB) with `n̂·R(n̂, P, ε, M) ≥ k`.
///
/// The rate is not monotone in `P` over the whole window, so the first
/// crossing is bracketed by a coarse scan from the floor upward and then
/// bisected.
pub fn snr_threshold_with(
    k: u32,
    mcs: &McsConfig,
    epsilon: Probability,
    search: &ThresholdSearch,
) -> SnrThreshold {
    let n = f64::from(practical_blocklength(k, mcs));
    let q_inv = q_inverse(epsilon);
    let k = f64::from(k);
    let fit = mcs.fit();
    let surplus = |db: f64| n * rate_mqam_raw(10f64.powf(db / 10.0), n, q_inv, fit) - k;

    if surplus(search.floor_db) >= 0.0 {
        return SnrThreshold::From(f64::NEG_INFINITY);
    }
    let steps = ((search.ceiling_db - search.floor_db) / search.step_db).ceil() as usize;
    let mut prev = search.floor_db;
    for i in 1..=steps {
        let db = (search.floor_db + i as f64 * search.step_db).min(search.ceiling_db);
        if surplus(db) >= 0.0 {
            let root = find_root_increasing(surplus, prev, db, search.tol_db)
                .expect("bracket has a sign change");
            // report the upper end so the threshold itself is feasible
            let mut thr = root;
            while surplus(thr) < 0.0 {
                thr += search.tol_db;
            }
            return SnrThreshold::From(thr);
        }
        prev = db;
    }
    SnrThreshold::Infeasible
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdRow {
    pub mcs: McsConfig,
    pub blocklength: u32,
    pub threshold: SnrThreshold,
}

/// Per-MCS switching thresholds for one `(k, ε)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SnrThresholdTable {
    pub k: u32,
    pub epsilon: Probability,
    rows: Vec<ThresholdRow>,
}

impl SnrThresholdTable {
    pub fn build(k: u32, epsilon: Probability, catalogue: &McsCatalogue) -> Self {
        Self::build_with(k, epsilon, catalogue, &ThresholdSearch::default())
    }

    pub fn build_with(
        k: u32,
        epsilon: Probability,
        catalogue: &McsCatalogue,
        search: &ThresholdSearch,
    ) -> Self {
        let rows = catalogue
            .entries()
            .iter()
            .map(|mcs| ThresholdRow {
                mcs: mcs.clone(),
                blocklength: practical_blocklength(k, mcs),
                threshold: snr_threshold_with(k, mcs, epsilon, search),
            })
            .collect();
        Self { k, epsilon, rows }
    }

    pub fn rows(&self) -> &[ThresholdRow] {
        &self.rows
    }

    pub fn row(&self, index: u32) -> Option<&ThresholdRow> {
        self.rows.iter().find(|r| r.mcs.index == index)
    }

    /// True when thresholds strictly increase with efficiency among feasible
    /// rows, which makes the table a set of contiguous SNR intervals.
    pub fn is_monotone(&self) -> bool {
        let feasible: Vec<f64> = self.rows.iter().filter_map(|r| r.threshold.db()).collect();
        feasible.windows(2).all(|w| w[1] > w[0])
    }

    /// Upper edge of a row's interval: the next feasible row's threshold.
    pub fn upper_edge_db(&self, index: u32) -> Option<f64> {
        let pos = self.rows.iter().position(|r| r.mcs.index == index)?;
        self.rows[pos].threshold.db()?;
        Some(
            self.rows[pos + 1..]
                .iter()
                .find_map(|r| r.threshold.db())
                .unwrap_or(f64::INFINITY),
        )
    }
}

/// Highest-efficiency feasible MCS whose threshold is at or below `snr`.
/// Intervals are half-open, so an SNR exactly on a threshold takes the
/// higher MCS.
pub fn select_mcs(snr: Snr, thresholds: &SnrThresholdTable) -> Option<&McsConfig> {
    let db = snr.db();
    thresholds
        .rows
        .iter()
        .rev()
        .find(|r| matches!(r.threshold, SnrThreshold::From(t) if t <= db))
        .map(|r| &r.mcs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fbl_rate::{rate_mqam, ChannelPoint};

    fn eps(v: f64) -> Probability {
        Probability::new(v).unwrap()
    }

    #[test]
    fn subset_rows_and_rates() {
        let cat = McsCatalogue::evaluation_subset();
        let idx: Vec<u32> = cat.entries().iter().map(|m| m.index).collect();
        assert_eq!(idx, EVALUATION_SUBSET);
        let expected_rc = [0.2344, 1.4766, 2.7305, 5.3320, 7.4063];
        for (m, rc) in cat.entries().iter().zip(expected_rc) {
            assert!((m.overall_code_rate() - rc).abs() < 1e-4, "MCS {}", m.index);
        }
    }

    #[test]
    fn full_table_contains_subset() {
        let full = McsCatalogue::nr_pdsch_256qam();
        assert_eq!(full.len(), 28);
        for m in McsCatalogue::evaluation_subset().entries() {
            let row = full.get(m.index).unwrap();
            assert_eq!(row.modulation_order, m.modulation_order);
            assert!((row.binary_code_rate - m.binary_code_rate).abs() < 5e-6);
        }
    }

    #[test]
    fn catalogue_rejects_bad_input() {
        assert!(McsConfig::new(0, 4, 1.0).is_err());
        assert!(McsConfig::new(0, 8, 0.5).is_err());
        let a = McsConfig::new(1, 16, 0.5).unwrap();
        let b = McsConfig::new(2, 4, 0.5).unwrap();
        assert!(McsCatalogue::new(vec![a, b]).is_err());
        assert!(McsCatalogue::new(vec![]).is_err());
        assert!(McsCatalogue::from_csv_str("idx,m,r\n0,4,0.1\n").is_err());
        assert!(
            McsCatalogue::from_csv_str("index,modulation_order,binary_code_rate\n0,4,abc\n")
                .is_err()
        );
        assert!(McsCatalogue::evaluation_subset().subset(&[3]).is_err());
    }

    #[test]
    fn practical_blocklength_rounds_up() {
        let cat = McsCatalogue::evaluation_subset();
        let n: Vec<u32> = cat
            .entries()
            .iter()
            .map(|m| practical_blocklength(256, m))
            .collect();
        assert_eq!(n, [1093, 174, 94, 49, 35]);
        // an exact quotient stays put
        let half = McsConfig::new(9, 4, 0.5).unwrap();
        assert_eq!(practical_blocklength(256, &half), 256);
    }

    #[test]
    fn min_blocklength_high_snr_anchor() {
        let fit = ModulationFit::qam(256).unwrap();
        let r = min_blocklength(
            256,
            Snr::from_db(30.0).unwrap(),
            eps(1e-5),
            &fit,
            DEFAULT_MAX_BLOCKLENGTH,
        )
        .unwrap();
        assert_eq!(r.n, 36);
        assert!((r.real_bound - 35.98).abs() < 0.01, "{}", r.real_bound);
    }

    #[test]
    fn min_blocklength_small_payload() {
        let fit = ModulationFit::qam(256).unwrap();
        let s = Snr::from_db(60.0).unwrap();
        let r = min_blocklength(8, s, eps(1e-3), &fit, DEFAULT_MAX_BLOCKLENGTH).unwrap();
        let p = ChannelPoint::new(s, r.n, eps(1e-3)).unwrap();
        assert!(r.n >= 1 && f64::from(r.n) * rate_mqam(&p, &fit) >= 8.0);
    }

    #[test]
    fn min_blocklength_low_snr_qpsk() {
        let fit = ModulationFit::qam(4).unwrap();
        let r = min_blocklength(
            256,
            Snr::from_db(-5.751).unwrap(),
            eps(1e-5),
            &fit,
            DEFAULT_MAX_BLOCKLENGTH,
        )
        .unwrap();
        assert!(r.n.abs_diff(1093) <= 1, "{}", r.n);
    }

    #[test]
    fn min_blocklength_infeasible_against_ceiling() {
        let fit = ModulationFit::qam(4).unwrap();
        assert!(min_blocklength(256, Snr::from_db(40.0).unwrap(), eps(1e-3), &fit, 100).is_none());
        assert!(
            min_blocklength(256, Snr::from_db(-40.0).unwrap(), eps(1e-5), &fit, 10_000).is_none()
        );
    }

    #[test]
    fn thresholds_match_reference_table() {
        let cat = McsCatalogue::evaluation_subset();
        let cases = [
            (
                1e-5,
                [Some(-5.751), Some(4.589), Some(10.07), Some(19.12), None],
            ),
            (
                1e-3,
                [
                    Some(-6.275),
                    Some(4.011),
                    Some(9.42),
                    Some(18.34),
                    Some(27.37),
                ],
            ),
        ];
        for (e, expected) in cases {
            for (m, want) in cat.entries().iter().zip(expected) {
                let got = snr_threshold(256, m, eps(e)).db();
                match (got, want) {
                    (Some(g), Some(w)) => {
                        assert!((g - w).abs() < 0.05, "ε={e} MCS {}: {g} vs {w}", m.index)
                    }
                    (None, None) => {}
                    _ => panic!("ε={e} MCS {}: {got:?} vs {want:?}", m.index),
                }
            }
        }
    }

    #[test]
    fn threshold_brackets_feasibility() {
        let cat = McsCatalogue::evaluation_subset();
        for e in [1e-3, 1e-5] {
            for m in cat.entries() {
                let Some(t) = snr_threshold(256, m, eps(e)).db() else {
                    continue;
                };
                let n = practical_blocklength(256, m);
                let bits = |db: f64| {
                    let p = ChannelPoint::new(Snr::from_db(db).unwrap(), n, eps(e)).unwrap();
                    f64::from(n) * rate_mqam(&p, m.fit())
                };
                assert!(bits(t) >= 256.0);
                assert!(bits(t + 0.01) >= 256.0);
                assert!(bits(t - 0.01) < 256.0);
            }
        }
    }

    #[test]
    fn degenerate_half_epsilon_completes() {
        let table = SnrThresholdTable::build(256, eps(0.5), &McsCatalogue::evaluation_subset());
        assert!(table.rows().iter().all(|r| r.threshold.is_feasible()));
    }

    #[test]
    fn select_mcs_examples() {
        let cat = McsCatalogue::evaluation_subset();
        let t5 = SnrThresholdTable::build(256, eps(1e-5), &cat);
        let t3 = SnrThresholdTable::build(256, eps(1e-3), &cat);
        let pick = |db: f64, t: &SnrThresholdTable| {
            select_mcs(Snr::from_db(db).unwrap(), t).map(|m| m.index)
        };
        assert_eq!(pick(12.0, &t5), Some(11));
        assert_eq!(pick(-10.0, &t5), None);
        assert_eq!(pick(-10.0, &t3), None);
        assert_eq!(pick(4.589, &t5), Some(5));
        assert_eq!(pick(30.0, &t3), Some(27));
        assert_eq!(pick(30.0, &t5), Some(20));
        let exact = t5.row(5).unwrap().threshold.db().unwrap();
        assert_eq!(
            select_mcs(Snr::from_db(exact).unwrap(), &t5).map(|m| m.index),
            Some(5)
        );
        assert!(t5.is_monotone() && t3.is_monotone());
        assert_eq!(t5.upper_edge_db(20), Some(f64::INFINITY));
        assert_eq!(t5.upper_edge_db(27), None);
    }
}
