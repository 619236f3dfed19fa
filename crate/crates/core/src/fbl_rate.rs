//! Achievable-rate formulas for a complex AWGN channel.
//!
//! Per-symbol rates come in two flavours. [`rate_gaussian_coding`] assumes
//! Gaussian codebooks; [`rate_mqam`] replaces the capacity term with a
//! multi-exponential fit of the M-QAM constellation-constrained mutual
//! information. Both subtract the normal-approximation penalty
//! `sqrt(V(P)/n)·Q⁻¹(ε)` and add `log2(n)/n`.
//!
//! Non-positive rates are returned unchanged so that root finders can see
//! infeasibility; callers decide what "feasible" means.
//!
//! Numerical notes, checked over `P ∈ [1e-4, 1e4]`:
//!
//! * the fitted mutual information never exceeds `log2(1+P)` for any of the
//!   four built-in fits (largest excess is about `-1.5e-6`, or `-1.5e-5` for
//!   256-QAM, both near `P → 0`);
//! * [`rate_mqam`] is *not* monotone in `P` over that whole range: the
//!   dispersion penalty dominates at very low SNR, and once the fit saturates
//!   the slowly growing `V(P)` makes the rate drift down again (from about
//!   11 dB for 4-QAM to about 35 dB for 256-QAM);
//! * the normal approximation is evaluated as written for every `n ≥ 1`,
//!   although its accuracy for tiny blocklengths is not established.

use std::f64::consts::LN_2;
use std::fmt;

use crate::error::{Error, Result};
use crate::numerics::{q_inverse, Probability};

/// Signal-to-noise ratio, stored as a linear power ratio.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Snr(f64);

impl Snr {
    pub fn from_linear(linear: f64) -> Result<Self> {
        if linear.is_finite() && linear > 0.0 {
            Ok(Self(linear))
        } else {
            Err(Error::Domain(format!(
                "linear SNR must be positive and finite, got {linear}"
            )))
        }
    }

    pub fn from_db(db: f64) -> Result<Self> {
        if !db.is_finite() {
            return Err(Error::Domain(format!("SNR in dB must be finite, got {db}")));
        }
        Self::from_linear(10f64.powf(db / 10.0))
    }

    pub fn linear(self) -> f64 {
        self.0
    }

    pub fn db(self) -> f64 {
        10.0 * self.0.log10()
    }
}

impl fmt::Display for Snr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.3} dB", self.db())
    }
}

/// Multi-exponential fit `I'(P, M) = log2(M)·(1 − Σ a_j·exp(−b_j·P))`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModulationFit {
    order: u32,
    a: Vec<f64>,
    b: Vec<f64>,
}

const QAM256_A: [f64; 4] = [0.228768, 0.229083, 0.118223, 0.423927];
const QAM256_B: [f64; 4] = [0.183242, 0.038011, 0.994472, 0.006911];
const QAM64_A: [f64; 4] = [0.198324, 0.512831, 0.209086, 0.079759];
const QAM64_B: [f64; 4] = [0.408618, 0.027517, 0.120616, 1.467118];
const QAM16_A: [f64; 3] = [0.658747, 0.117219, 0.224034];
const QAM16_B: [f64; 3] = [0.115521, 1.467927, 0.482023];
const QAM4_A: [f64; 2] = [0.143281, 0.856719];
const QAM4_B: [f64; 2] = [1.557531, 0.57239];

/// Allowed deviation of `Σ a_j` from one.
pub const COEFFICIENT_SUM_TOLERANCE: f64 = 1e-5;

impl ModulationFit {
    /// Validates a user-supplied fit.
    pub fn new(order: u32, a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if order < 2 || !order.is_power_of_two() {
            return Err(Error::Domain(format!(
                "modulation order must be a power of two ≥ 2, got {order}"
            )));
        }
        if a.is_empty() || a.len() != b.len() {
            return Err(Error::Domain(format!(
                "fit needs matching non-empty coefficient lists, got {} and {}",
                a.len(),
                b.len()
            )));
        }
        if a.iter().chain(&b).any(|&c| !(c.is_finite() && c > 0.0)) {
            return Err(Error::Domain("fit coefficients must be positive".into()));
        }
        let sum: f64 = a.iter().sum();
        if (sum - 1.0).abs() > COEFFICIENT_SUM_TOLERANCE {
            return Err(Error::Domain(format!(
                "fit weights must sum to 1, got {sum}"
            )));
        }
        Ok(Self { order, a, b })
    }

    /// Built-in fit for square QAM of order 4, 16, 64 or 256.
    pub fn qam(order: u32) -> Option<Self> {
        let (a, b): (&[f64], &[f64]) = match order {
            4 => (&QAM4_A, &QAM4_B),
            16 => (&QAM16_A, &QAM16_B),
            64 => (&QAM64_A, &QAM64_B),
            256 => (&QAM256_A, &QAM256_B),
            _ => return None,
        };
        Some(Self {
            order,
            a: a.to_vec(),
            b: b.to_vec(),
        })
    }

    /// All four built-in fits, ascending by order.
    pub fn builtin() -> [Self; 4] {
        [4, 16, 64, 256].map(|m| Self::qam(m).expect("built-in order"))
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn term_count(&self) -> usize {
        self.a.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.a
    }

    pub fn decay_rates(&self) -> &[f64] {
        &self.b
    }

    pub fn bits_per_symbol(&self) -> f64 {
        f64::from(self.order).log2()
    }

    pub(crate) fn mutual_info_linear(&self, p: f64) -> f64 {
        let residual: f64 = self
            .a
            .iter()
            .zip(&self.b)
            .map(|(a, b)| a * (-b * p).exp())
            .sum();
        // The 256-QAM weights sum to 1.000001, which would dip below zero at P → 0.
        (self.bits_per_symbol() * (1.0 - residual)).max(0.0)
    }
}

/// An operating point: SNR, blocklength in channel uses and target error rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelPoint {
    pub snr: Snr,
    blocklength: f64,
    pub epsilon: Probability,
}

impl ChannelPoint {
    pub fn new(snr: Snr, blocklength: u32, epsilon: Probability) -> Result<Self> {
        if blocklength == 0 {
            return Err(Error::Domain("blocklength must be at least 1".into()));
        }
        Ok(Self {
            snr,
            blocklength: f64::from(blocklength),
            epsilon,
        })
    }

    /// Real-valued blocklength, used when solving for `n` continuously.
    pub fn with_real_blocklength(snr: Snr, blocklength: f64, epsilon: Probability) -> Result<Self> {
        if !(blocklength.is_finite() && blocklength >= 1.0) {
            return Err(Error::Domain(format!(
                "blocklength must be ≥ 1, got {blocklength}"
            )));
        }
        Ok(Self {
            snr,
            blocklength,
            epsilon,
        })
    }

    pub fn blocklength(&self) -> f64 {
        self.blocklength
    }
}

/// `C(P) = log2(1 + P)` in bits per complex symbol.
pub fn shannon_capacity(snr: Snr) -> f64 {
    snr.linear().ln_1p() / LN_2
}

/// Channel dispersion `V(P) = P(P+2) / ((P+1)² ln²2)`.
pub fn dispersion(snr: Snr) -> f64 {
    dispersion_linear(snr.linear())
}

#[inline]
pub(crate) fn dispersion_linear(p: f64) -> f64 {
    let q = p + 1.0;
    p * (p + 2.0) / (q * q * LN_2 * LN_2)
}

/// Fitted M-QAM mutual information `I'(P, M)`.
pub fn mqam_mutual_info(snr: Snr, fit: &ModulationFit) -> f64 {
    fit.mutual_info_linear(snr.linear())
}

/// `sqrt(V/n)·Q⁻¹(ε) − log2(n)/n`, the amount subtracted from the
/// infinite-blocklength rate.
#[inline]
fn finite_length_penalty(p: f64, n: f64, q_inv: f64) -> f64 {
    (dispersion_linear(p) / n).sqrt() * q_inv - n.log2() / n
}

/// Normal-approximation rate with Gaussian coding.
pub fn rate_gaussian_coding(point: &ChannelPoint) -> f64 {
    let p = point.snr.linear();
    shannon_capacity(point.snr)
        - finite_length_penalty(p, point.blocklength, q_inverse(point.epsilon))
}

/// Normal-approximation rate with an M-QAM constellation.
pub fn rate_mqam(point: &ChannelPoint, fit: &ModulationFit) -> f64 {
    rate_mqam_raw(
        point.snr.linear(),
        point.blocklength,
        q_inverse(point.epsilon),
        fit,
    )
}

/// [`rate_mqam`] on raw values with `Q⁻¹(ε)` precomputed, for inner loops.
#[inline]
pub(crate) fn rate_mqam_raw(p: f64, n: f64, q_inv: f64, fit: &ModulationFit) -> f64 {
    fit.mutual_info_linear(p) - finite_length_penalty(p, n, q_inv)
}

/// Bits per second carried at `rate_per_symbol` over `bandwidth` Hz,
/// assuming one complex symbol per Hz per second.
pub fn throughput(rate_per_symbol: f64, bandwidth: f64) -> f64 {
    debug_assert!(bandwidth > 0.0, "bandwidth must be positive");
    bandwidth * rate_per_symbol
}
