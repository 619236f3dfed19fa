//! Deterministic network-calculus delay bound for periodic traffic over a
//! constant-rate channel, and the minimum bandwidth (admission region) that
//! meets a `(d₀, ε₀)` constraint.
//!
//! Only token-bucket arrival curves `α(t) = r·t + b` and rate service curves
//! `β(t) = R·t` are represented; for that pair the horizontal deviation has
//! the closed form `b / R` whenever `r ≤ R`.

use crate::error::{Error, Result};
use crate::fbl_rate::{rate_mqam_raw, Snr};
use crate::mcs::{
    practical_blocklength, snr_threshold, McsCatalogue, McsConfig, SnrThreshold, SnrThresholdTable,
};
use crate::numerics::{find_root_increasing, q_inverse, Probability};

/// Periodic source emitting `k` bits every `tau` seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrafficSpec {
    k: u32,
    tau: f64,
}

impl TrafficSpec {
    pub fn new(k: u32, tau: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::Domain(
                "message length must be at least one bit".into(),
            ));
        }
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::Domain(format!("period must be positive, got {tau}")));
        }
        Ok(Self { k, tau })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// `α(t) = (k/τ)·t + k`.
    pub fn arrival_curve(&self) -> ArrivalCurve {
        ArrivalCurve {
            rate: f64::from(self.k) / self.tau,
            burst: f64::from(self.k),
        }
    }
}

/// Token-bucket arrival curve: sustained `rate` (bits/s) plus `burst` (bits).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrivalCurve {
    pub rate: f64,
    pub burst: f64,
}

impl ArrivalCurve {
    pub fn new(rate: f64, burst: f64) -> Result<Self> {
        if !(rate >= 0.0 && burst >= 0.0 && rate.is_finite() && burst.is_finite()) {
            return Err(Error::Domain(format!(
                "arrival curve needs rate, burst ≥ 0, got ({rate}, {burst})"
            )));
        }
        Ok(Self { rate, burst })
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.rate * t + self.burst
    }
}

/// Rate service curve `β(t) = rate·t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ServiceCurve {
    pub rate: f64,
}

impl ServiceCurve {
    pub fn new(rate: f64) -> Result<Self> {
        if !(rate >= 0.0 && rate.is_finite()) {
            return Err(Error::Domain(format!(
                "service rate must be ≥ 0, got {rate}"
            )));
        }
        Ok(Self { rate })
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.rate * t
    }
}

/// An arrival/service pair for which a delay bound is computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePair {
    pub arrival: ArrivalCurve,
    pub service: ServiceCurve,
}

impl CurvePair {
    pub fn delay(&self) -> DelayBound {
        horizontal_deviation(&self.arrival, &self.service)
    }
}

/// Worst-case delay, possibly unbounded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DelayBound {
    Bounded(f64),
    Unbounded,
}

impl DelayBound {
    pub fn seconds(self) -> Option<f64> {
        match self {
            Self::Bounded(d) => Some(d),
            Self::Unbounded => None,
        }
    }

    /// Seconds, with `Unbounded` mapped to `+∞`.
    pub fn as_f64(self) -> f64 {
        self.seconds().unwrap_or(f64::INFINITY)
    }
}

/// Delay and reliability requirement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QosConstraint {
    d0: f64,
    pub epsilon0: Probability,
}

impl QosConstraint {
    pub fn new(d0: f64, epsilon0: Probability) -> Result<Self> {
        if !(d0.is_finite() && d0 > 0.0) {
            return Err(Error::Domain(format!(
                "delay budget must be positive, got {d0}"
            )));
        }
        Ok(Self { d0, epsilon0 })
    }

    pub fn d0(&self) -> f64 {
        self.d0
    }
}

/// Maximum horizontal distance between a token-bucket arrival curve and a
/// rate service curve.
pub fn horizontal_deviation(alpha: &ArrivalCurve, beta: &ServiceCurve) -> DelayBound {
    if alpha.rate == 0.0 && alpha.burst == 0.0 {
        return DelayBound::Bounded(0.0);
    }
    if beta.rate == 0.0 || alpha.rate > beta.rate {
        return DelayBound::Unbounded;
    }
    DelayBound::Bounded(alpha.burst / beta.rate)
}

/// Delay of periodic traffic served at `r2` bits/s: `k / r2` provided the
/// stability condition `k/τ ≤ r2` holds.
pub fn delay_bound(traffic: &TrafficSpec, r2: f64) -> DelayBound {
    let k = f64::from(traffic.k);
    if r2 > 0.0 && k / traffic.tau <= r2 {
        DelayBound::Bounded(k / r2)
    } else {
        DelayBound::Unbounded
    }
}

/// Minimum bandwidth (Hz) for one MCS, or `None` when infeasible.
pub fn min_bandwidth(
    traffic: &TrafficSpec,
    qos: &QosConstraint,
    snr: Snr,
    mcs: &McsConfig,
) -> Option<f64> {
    let threshold = snr_threshold(traffic.k, mcs, qos.epsilon0);
    min_bandwidth_given_threshold(traffic, qos, snr, mcs, threshold)
}

/// [`min_bandwidth`] with the MCS's SNR threshold supplied by the caller.
pub fn min_bandwidth_given_threshold(
    traffic: &TrafficSpec,
    qos: &QosConstraint,
    snr: Snr,
    mcs: &McsConfig,
    threshold: SnrThreshold,
) -> Option<f64> {
    match threshold {
        SnrThreshold::From(t) if snr.db() >= t => {}
        _ => return None,
    }
    let n = f64::from(practical_blocklength(traffic.k, mcs));
    let rate = rate_mqam_raw(snr.linear(), n, q_inverse(qos.epsilon0), mcs.fit());
    bandwidth_for_rate(traffic, qos, rate)
}

/// `max(k/(d₀·R), k/(τ·R))`: the delay requirement and the stability floor.
pub fn bandwidth_for_rate(
    traffic: &TrafficSpec,
    qos: &QosConstraint,
    rate_per_symbol: f64,
) -> Option<f64> {
    if !(rate_per_symbol > 0.0) {
        return None;
    }
    let k = f64::from(traffic.k);
    let for_delay = k / (qos.d0 * rate_per_symbol);
    let for_stability = k / (traffic.tau * rate_per_symbol);
    Some(for_delay.max(for_stability))
}

/// One point of the admission curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmissionPoint {
    pub snr_db: f64,
    /// Minimum bandwidth in Hz; `None` when no MCS is feasible.
    pub bandwidth_hz: Option<f64>,
    pub mcs_index: Option<u32>,
}

/// Pointwise minimum of [`min_bandwidth`] over the feasible rows of a
/// threshold table, with the arg-min MCS. Ties keep the lower-efficiency row.
pub fn adaptive_min_bandwidth(
    traffic: &TrafficSpec,
    qos: &QosConstraint,
    snr: Snr,
    thresholds: &SnrThresholdTable,
) -> Option<(f64, u32)> {
    let mut best: Option<(f64, u32)> = None;
    for row in thresholds.rows() {
        if let Some(w) = min_bandwidth_given_threshold(traffic, qos, snr, &row.mcs, row.threshold) {
            if best.is_none_or(|(bw, _)| w < bw) {
                best = Some((w, row.mcs.index));
            }
        }
    }
    best
}

/// Theoretical admission curve over an ascending SNR grid.
pub fn admission_curve(
    traffic: &TrafficSpec,
    qos: &QosConstraint,
    snr_grid: &[Snr],
    catalogue: &McsCatalogue,
) -> Result<Vec<AdmissionPoint>> {
    if snr_grid.is_empty() {
        return Err(Error::Domain("SNR grid is empty".into()));
    }
    if snr_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("SNR grid must be strictly ascending".into()));
    }
    let table = SnrThresholdTable::build(traffic.k, qos.epsilon0, catalogue);
    Ok(admission_curve_with_table(traffic, qos, snr_grid, &table))
}

pub fn admission_curve_with_table(
    traffic: &TrafficSpec,
    qos: &QosConstraint,
    snr_grid: &[Snr],
    table: &SnrThresholdTable,
) -> Vec<AdmissionPoint> {
    snr_grid
        .iter()
        .map(|&snr| {
            let best = adaptive_min_bandwidth(traffic, qos, snr, table);
            AdmissionPoint {
                snr_db: snr.db(),
                bandwidth_hz: best.map(|b| b.0),
                mcs_index: best.map(|b| b.1),
            }
        })
        .collect()
}

/// Per-symbol rate under threshold-based adaptive MCS selection, with the
/// selected MCS index.
pub fn adaptive_rate(k: u32, snr: Snr, table: &SnrThresholdTable) -> Option<(f64, u32)> {
    let mcs = crate::mcs::select_mcs(snr, table)?;
    let n = f64::from(practical_blocklength(k, mcs));
    Some((
        rate_mqam_raw(snr.linear(), n, q_inverse(table.epsilon), mcs.fit()),
        mcs.index,
    ))
}

/// Delay bound under adaptive MCS selection with a fixed bandwidth.
pub fn adaptive_delay(
    traffic: &TrafficSpec,
    snr: Snr,
    bandwidth_hz: f64,
    table: &SnrThresholdTable,
) -> DelayBound {
    match adaptive_rate(traffic.k, snr, table) {
        Some((rate, _)) => delay_bound(traffic, bandwidth_hz * rate),
        None => DelayBound::Unbounded,
    }
}

/// Lowest SNR (dB) in `[lo_db, hi_db]` at which the adaptive delay drops to
/// `target` seconds or below. Scans with `step_db` and bisects the first
/// bracket to `1e-6` dB.
pub fn delay_crossing_db(
    traffic: &TrafficSpec,
    bandwidth_hz: f64,
    table: &SnrThresholdTable,
    target: f64,
    lo_db: f64,
    hi_db: f64,
    step_db: f64,
) -> Option<f64> {
    let excess = |db: f64| {
        let snr = Snr::from_db(db).expect("finite dB");
        // clamp unbounded so bisection sees a sign rather than ∞
        adaptive_delay(traffic, snr, bandwidth_hz, table)
            .as_f64()
            .min(1e6)
            - target
    };
    let steps = ((hi_db - lo_db) / step_db).ceil() as usize;
    let mut prev = lo_db;
    if excess(prev) <= 0.0 {
        return Some(prev);
    }
    for i in 1..=steps {
        let db = (lo_db + i as f64 * step_db).min(hi_db);
        if excess(db) <= 0.0 {
            return find_root_increasing(|x| -excess(x), prev, db, 1e-6).ok();
        }
        prev = db;
    }
    None
}
