//! Noise-limited multi-cell drop simulator.
//!
//! Sites sit on a hexagonal lattice (1, 7, 19, ... sites) with inter-site
//! distance `√3·R`, where `R` is the hexagon circumradius. Each site is split
//! into equal azimuth sectors and every sector receives the same number of
//! users, placed uniformly inside its wedge of the site's hexagon. A user is
//! served by the sector with the highest received power; SNR follows a
//! log-distance pathloss with no shadowing, fading or interference.
//!
//! For every user the simulator picks an MCS from a catalogue under the
//! `(d₀, ε₀)` constraint and records the bandwidth it needs. Drops use
//! independent ChaCha streams derived from one seed, run in parallel, and are
//! merged in drop order, so results do not depend on thread scheduling.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::fbl_rate::Snr;
use crate::mcs::{McsCatalogue, SnrThresholdTable};
use crate::qos::{
    adaptive_min_bandwidth, min_bandwidth_given_threshold, QosConstraint, TrafficSpec,
};

/// Log-distance pathloss `intercept_db + slope_db_per_decade·log10(d / 1 km)`.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathlossModel {
    /// Loss at 1 km.
    pub intercept_db: f64,
    pub slope_db_per_decade: f64,
    /// Distances below this are clamped.
    pub min_distance_m: f64,
}

impl Default for PathlossModel {
    fn default() -> Self {
        Self {
            intercept_db: 128.1,
            slope_db_per_decade: 37.6,
            min_distance_m: 10.0,
        }
    }
}

impl PathlossModel {
    pub fn loss_db(&self, distance_m: f64) -> f64 {
        let d = distance_m.max(self.min_distance_m);
        self.intercept_db + self.slope_db_per_decade * (d / 1000.0).log10()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AntennaPattern {
    /// Same gain in every direction; sector chosen by azimuth.
    #[default]
    Omni,
    /// `−min(12(θ/θ3dB)², A_max)` with θ3dB = 70° and A_max = 20 dB.
    Parabolic,
}

const BEAMWIDTH_3DB_DEG: f64 = 70.0;
const MAX_ATTENUATION_DB: f64 = 20.0;

/// Scenario parameters. Every field has a default, so a config file only
/// needs the keys it changes.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub sites: u32,
    pub sectors_per_site: u32,
    pub cell_radius_m: f64,
    pub users_per_sector: u32,
    /// Transmit power over the reference bandwidth.
    pub tx_power_dbm: f64,
    pub noise_figure_db: f64,
    pub noise_psd_dbm_hz: f64,
    /// Bandwidth over which SNR is defined.
    pub reference_bandwidth_hz: f64,
    pub pathloss: PathlossModel,
    pub antenna: AntennaPattern,
    pub rng_seed: u64,
    pub drops: u32,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            sites: 19,
            sectors_per_site: 3,
            cell_radius_m: 500.0,
            users_per_sector: 10,
            tx_power_dbm: 0.0,
            noise_figure_db: 9.0,
            noise_psd_dbm_hz: -174.0,
            reference_bandwidth_hz: 540e3,
            pathloss: PathlossModel::default(),
            antenna: AntennaPattern::Omni,
            rng_seed: 1,
            drops: 10,
        }
    }
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if hex_rings(self.sites).is_none() {
            return Err(Error::Config(format!(
                "sites must fill whole hexagonal rings (1, 7, 19, 37, ...), got {}",
                self.sites
            )));
        }
        if self.sectors_per_site == 0 || self.users_per_sector == 0 || self.drops == 0 {
            return Err(Error::Config(
                "sector, user and drop counts must be at least 1".into(),
            ));
        }
        if !(self.cell_radius_m.is_finite() && self.cell_radius_m > 0.0) {
            return Err(Error::Config(format!(
                "cell radius must be positive, got {}",
                self.cell_radius_m
            )));
        }
        if !(self.reference_bandwidth_hz > 0.0) || !(self.pathloss.min_distance_m > 0.0) {
            return Err(Error::Config(
                "reference bandwidth and minimum distance must be positive".into(),
            ));
        }
        let finite = [
            self.tx_power_dbm,
            self.noise_figure_db,
            self.noise_psd_dbm_hz,
            self.pathloss.intercept_db,
            self.pathloss.slope_db_per_decade,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config(
                "power, noise and pathloss parameters must be finite".into(),
            ));
        }
        Ok(())
    }

    pub fn inter_site_distance_m(&self) -> f64 {
        3f64.sqrt() * self.cell_radius_m
    }

    pub fn total_sectors(&self) -> u32 {
        self.sites * self.sectors_per_site
    }

    pub fn users_per_drop(&self) -> u32 {
        self.total_sectors() * self.users_per_sector
    }

    /// Thermal noise plus noise figure over the reference bandwidth.
    pub fn noise_dbm(&self) -> f64 {
        self.noise_psd_dbm_hz + 10.0 * self.reference_bandwidth_hz.log10() + self.noise_figure_db
    }

    /// Site coordinates, centre first, ring by ring.
    pub fn site_positions(&self) -> Vec<Point> {
        let rings = hex_rings(self.sites).unwrap_or(0);
        let d = self.inter_site_distance_m();
        // axial coordinates on a lattice whose neighbours lie at 0°, 60°, ...
        let mut sites = vec![Point { x: 0.0, y: 0.0 }];
        for ring in 1..=rings as i32 {
            let dirs = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)];
            let (mut q, mut r) = (ring * dirs[4].0, ring * dirs[4].1);
            for dir in dirs {
                for _ in 0..ring {
                    let x = d * (f64::from(q) + 0.5 * f64::from(r));
                    let y = d * (3f64.sqrt() / 2.0 * f64::from(r));
                    sites.push(Point { x, y });
                    q += dir.0;
                    r += dir.1;
                }
            }
        }
        sites
    }

    fn boresight_deg(&self, sector: u32) -> f64 {
        30.0 + 360.0 * f64::from(sector) / f64::from(self.sectors_per_site)
    }
}

/// Number of rings around the centre site, if `sites` fills whole rings.
fn hex_rings(sites: u32) -> Option<u32> {
    (0..64).find(|&r| 1 + 3 * r * (r + 1) == sites)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Pointy-top hexagon of circumradius `r` centred at `c`.
fn in_hexagon(p: Point, c: Point, r: f64) -> bool {
    let (dx, dy) = ((p.x - c.x).abs(), (p.y - c.y).abs());
    dx <= 3f64.sqrt() / 2.0 * r && dy + dx / 3f64.sqrt() <= r
}

/// True when `p` lies inside the union of the deployment's hexagons.
pub fn in_deployment_area(p: Point, config: &ScenarioConfig) -> bool {
    config
        .site_positions()
        .iter()
        .any(|&c| in_hexagon(p, c, config.cell_radius_m * (1.0 + 1e-12)))
}

/// Angle difference folded into [-180, 180).
fn wrap_deg(a: f64) -> f64 {
    (a + 180.0).rem_euclid(360.0) - 180.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserPlacement {
    pub position: Point,
    /// Global sector id `site · sectors_per_site + sector`.
    pub serving_sector: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub serving_sector: u32,
    pub snr_db: f64,
}

/// Serving sector and SNR for a user at `position`.
pub fn link_snr(position: Point, config: &ScenarioConfig) -> LinkBudget {
    link_snr_with_sites(position, config, &config.site_positions())
}

fn link_snr_with_sites(position: Point, config: &ScenarioConfig, sites: &[Point]) -> LinkBudget {
    let noise = config.noise_dbm();
    let mut best = LinkBudget {
        serving_sector: 0,
        snr_db: f64::NEG_INFINITY,
    };
    let mut best_offset = f64::INFINITY;
    for (s, &site) in sites.iter().enumerate() {
        let loss = config.pathloss.loss_db(position.dist(site));
        let azimuth = (position.y - site.y)
            .atan2(position.x - site.x)
            .to_degrees();
        for sector in 0..config.sectors_per_site {
            let offset = wrap_deg(azimuth - config.boresight_deg(sector)).abs();
            let gain = match config.antenna {
                AntennaPattern::Omni => 0.0,
                AntennaPattern::Parabolic => {
                    -(12.0 * (offset / BEAMWIDTH_3DB_DEG).powi(2)).min(MAX_ATTENUATION_DB)
                }
            };
            let snr = config.tx_power_dbm + gain - loss - noise;
            // omni sectors of one site tie on power; break by boresight offset
            if snr > best.snr_db || (snr == best.snr_db && offset < best_offset) {
                best = LinkBudget {
                    serving_sector: s as u32 * config.sectors_per_site + sector,
                    snr_db: snr,
                };
                best_offset = offset;
            }
        }
    }
    best
}

fn drop_rng(config: &ScenarioConfig, drop: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    rng.set_stream(u64::from(drop));
    rng
}

/// User positions for drop 0.
pub fn deploy(config: &ScenarioConfig) -> Vec<UserPlacement> {
    deploy_drop(config, 0)
}

/// User positions for one drop: `users_per_sector` uniform points in each
/// sector's wedge of its site's hexagon.
pub fn deploy_drop(config: &ScenarioConfig, drop: u32) -> Vec<UserPlacement> {
    let sites = config.site_positions();
    let mut rng = drop_rng(config, drop);
    let r = config.cell_radius_m;
    let half_width = 3f64.sqrt() / 2.0 * r;
    let half_wedge = 180.0 / f64::from(config.sectors_per_site);
    let mut users = Vec::with_capacity(config.users_per_drop() as usize);
    for &site in &sites {
        for sector in 0..config.sectors_per_site {
            let boresight = config.boresight_deg(sector);
            let mut placed = 0;
            while placed < config.users_per_sector {
                let p = Point {
                    x: site.x + rng.random_range(-half_width..half_width),
                    y: site.y + rng.random_range(-r..r),
                };
                if !in_hexagon(p, site, r) {
                    continue;
                }
                let azimuth = (p.y - site.y).atan2(p.x - site.x).to_degrees();
                let offset = wrap_deg(azimuth - boresight);
                if !(-half_wedge..half_wedge).contains(&offset) {
                    continue;
                }
                let link = link_snr_with_sites(p, config, &sites);
                users.push(UserPlacement {
                    position: p,
                    serving_sector: link.serving_sector,
                });
                placed += 1;
            }
        }
    }
    users
}

/// How each user picks its MCS.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum McsPolicy {
    /// The feasible row that needs the least bandwidth.
    #[default]
    MinBandwidth,
    /// The highest-efficiency row whose SNR threshold is met, as a
    /// threshold-driven link adaptation loop would choose.
    HighestEfficiency,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserSample {
    pub drop: u32,
    pub position: Point,
    pub serving_sector: u32,
    pub snr_db: f64,
    pub selected_mcs: Option<u32>,
    /// Hz; `None` when no catalogue row is feasible.
    pub required_bandwidth_hz: Option<f64>,
}

impl UserSample {
    pub fn is_feasible(&self) -> bool {
        self.required_bandwidth_hz.is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub snr_db: f64,
    pub mcs_index: u32,
    pub bandwidth_hz: f64,
}

/// Feasible users' `(SNR, bandwidth)` pairs sorted by SNR, unbinned.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EmpiricalCurve {
    pub points: Vec<CurvePoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationReport {
    pub users: Vec<UserSample>,
    pub curve: EmpiricalCurve,
}

impl SimulationReport {
    pub fn feasible_count(&self) -> usize {
        self.users.iter().filter(|u| u.is_feasible()).count()
    }

    /// Fraction of users for which some MCS meets the constraint.
    pub fn coverage(&self) -> f64 {
        if self.users.is_empty() {
            return 0.0;
        }
        self.feasible_count() as f64 / self.users.len() as f64
    }
}

/// Runs every drop and collects per-user records plus the empirical curve.
pub fn simulate(
    config: &ScenarioConfig,
    traffic: &TrafficSpec,
    qos: &QosConstraint,
    catalogue: &McsCatalogue,
    policy: McsPolicy,
) -> Result<SimulationReport> {
    config.validate()?;
    let table = SnrThresholdTable::build(traffic.k(), qos.epsilon0, catalogue);
    let per_drop: Vec<Vec<UserSample>> = (0..config.drops)
        .into_par_iter()
        .map(|drop| {
            deploy_drop(config, drop)
                .into_iter()
                .map(|u| {
                    let snr_db = link_snr(u.position, config).snr_db;
                    let choice = select_for_user(traffic, qos, snr_db, &table, policy);
                    UserSample {
                        drop,
                        position: u.position,
                        serving_sector: u.serving_sector,
                        snr_db,
                        selected_mcs: choice.map(|c| c.1),
                        required_bandwidth_hz: choice.map(|c| c.0),
                    }
                })
                .collect()
        })
        .collect();
    let users: Vec<UserSample> = per_drop.into_iter().flatten().collect();

    let mut points: Vec<CurvePoint> = users
        .iter()
        .filter_map(|u| {
            Some(CurvePoint {
                snr_db: u.snr_db,
                mcs_index: u.selected_mcs?,
                bandwidth_hz: u.required_bandwidth_hz?,
            })
        })
        .collect();
    points.sort_by(|a, b| {
        a.snr_db
            .total_cmp(&b.snr_db)
            .then(a.bandwidth_hz.total_cmp(&b.bandwidth_hz))
    });
    Ok(SimulationReport {
        users,
        curve: EmpiricalCurve { points },
    })
}

fn select_for_user(
    traffic: &TrafficSpec,
    qos: &QosConstraint,
    snr_db: f64,
    table: &SnrThresholdTable,
    policy: McsPolicy,
) -> Option<(f64, u32)> {
    let snr = Snr::from_db(snr_db).ok()?;
    match policy {
        McsPolicy::MinBandwidth => adaptive_min_bandwidth(traffic, qos, snr, table),
        McsPolicy::HighestEfficiency => {
            let mcs = crate::mcs::select_mcs(snr, table)?;
            let row = table.row(mcs.index)?;
            min_bandwidth_given_threshold(traffic, qos, snr, mcs, row.threshold)
                .map(|w| (w, mcs.index))
        }
    }
}

/// Outcome of comparing simulated users against the theoretical curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DominanceSummary {
    pub checked: usize,
    pub violations: usize,
    /// Feasible users for which the theoretical curve itself is infeasible.
    pub theory_infeasible: usize,
    /// Smallest `simulated / theoretical` bandwidth ratio seen.
    pub min_ratio: f64,
}

impl DominanceSummary {
    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

/// Relative slack allowed when comparing a user against the curve.
pub const DOMINANCE_TOLERANCE: f64 = 1e-9;

/// Checks `required_bandwidth ≥ theoretical(snr)` for every feasible user,
/// where the theoretical curve is built from `theory_catalogue`.
pub fn check_dominance(
    report: &SimulationReport,
    traffic: &TrafficSpec,
    qos: &QosConstraint,
    theory_catalogue: &McsCatalogue,
) -> DominanceSummary {
    let table = SnrThresholdTable::build(traffic.k(), qos.epsilon0, theory_catalogue);
    let mut summary = DominanceSummary {
        checked: 0,
        violations: 0,
        theory_infeasible: 0,
        min_ratio: f64::INFINITY,
    };
    for u in &report.users {
        let Some(sim_bw) = u.required_bandwidth_hz else {
            continue;
        };
        summary.checked += 1;
        let snr = Snr::from_db(u.snr_db).expect("finite SNR");
        match adaptive_min_bandwidth(traffic, qos, snr, &table) {
            Some((theory, _)) => {
                summary.min_ratio = summary.min_ratio.min(sim_bw / theory);
                if sim_bw < theory * (1.0 - DOMINANCE_TOLERANCE) {
                    summary.violations += 1;
                }
            }
            // The bound is silent where theory is infeasible; counted, not a violation.
            None => summary.theory_infeasible += 1,
        }
    }
    summary
}

/// Deterministic sample of `count` points in a circle, used by tests to
/// probe isotropy.
#[cfg(test)]
fn ring_points(center: Point, radius: f64, count: usize) -> Vec<Point> {
    (0..count)
        .map(|i| {
            let a = std::f64::consts::TAU * i as f64 / count as f64;
            Point {
                x: center.x + radius * a.cos(),
                y: center.y + radius * a.sin(),
            }
        })
        .collect()
}
