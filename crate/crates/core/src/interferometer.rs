//! Single-photon Mach-Zehnder interferometer.
//!
//! Outcome `+1` is a click at D(+) only, `-1` a click at D(-) only. The
//! phase is `Φ = ωτ` with `τ = |l - s|/c` the delay of the long arm.

use core::f64::consts::PI;

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};
use thiserror::Error;

use crate::quadrature::IntegrationError;
use crate::spectra::{coherence_time, integrate_over_spectrum, Spectrum};

/// Default ratio that stands in for "much greater than".
pub const DEFAULT_RATIO_THRESHOLD: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub const BOTH: [Outcome; 2] = [Outcome::Plus, Outcome::Minus];

    pub fn value(self) -> f64 {
        match self {
            Outcome::Plus => 1.0,
            Outcome::Minus => -1.0,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Outcome::Plus => 0,
            Outcome::Minus => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum ConfigError {
    #[error("path delay must be finite and non-negative, got {0}")]
    Delay(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferometerConfig {
    path_delay: f64,
    source: Spectrum,
}

impl InterferometerConfig {
    pub fn new(path_delay: f64, source: Spectrum) -> Result<Self, ConfigError> {
        if !(path_delay >= 0.0) || !path_delay.is_finite() {
            return Err(ConfigError::Delay(path_delay));
        }
        Ok(InterferometerConfig { path_delay, source })
    }

    pub fn path_delay(&self) -> f64 {
        self.path_delay
    }

    pub fn source(&self) -> &Spectrum {
        &self.source
    }

    /// Phase at the center frequency, `ω₀τ`.
    pub fn center_phase(&self) -> f64 {
        self.source.center() * self.path_delay
    }
}

/// Probabilities of the four detector-click patterns of one run.
///
/// Fields are not clamped or renormalized: distributions built from
/// non-unitary beam splitters keep their excess or missing probability so
/// that it can be reported.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionDistribution {
    /// D(+) clicks alone, the `(1,0)` pattern.
    pub p_plus: f64,
    /// D(-) clicks alone, the `(0,1)` pattern.
    pub p_minus: f64,
    /// Both detectors click, `(1,1)`.
    pub p_double: f64,
    /// Neither clicks, `(0,0)`.
    pub p_null: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum DistributionError {
    #[error("probability {value} for {category} is outside [0, 1]")]
    OutOfRange { category: &'static str, value: f64 },
    #[error("probabilities sum to {total}, not 1")]
    Total { total: f64 },
}

impl DetectionDistribution {
    /// One count per photon: `(1,1)` and `(0,0)` are impossible.
    pub fn one_count(p_plus: f64, p_minus: f64) -> Self {
        DetectionDistribution { p_plus, p_minus, p_double: 0.0, p_null: 0.0 }
    }

    pub fn total(&self) -> f64 {
        self.p_plus + self.p_minus + self.p_double + self.p_null
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.p_plus, self.p_minus, self.p_double, self.p_null]
    }

    /// True when no run yields two counts or none.
    pub fn conserves_counts(&self) -> bool {
        self.p_double == 0.0 && self.p_null == 0.0
    }

    pub fn validate(&self, tol: f64) -> Result<(), DistributionError> {
        for (category, value) in CATEGORIES.iter().zip(self.as_array()) {
            if !(value >= -tol && value <= 1.0 + tol) {
                return Err(DistributionError::OutOfRange { category, value });
            }
        }
        let total = self.total();
        if (total - 1.0).abs() > tol {
            return Err(DistributionError::Total { total });
        }
        Ok(())
    }
}

const CATEGORIES: [&str; 4] = ["plus", "minus", "double", "null"];

/// `P(a|Φ) = ½(1 + a cos Φ)`.
pub fn probability_monochromatic(a: Outcome, phi: f64) -> f64 {
    0.5 * (1.0 + a.value() * libm::cos(phi))
}

/// Phase in `[0, π]` at which `P(+1|Φ) = r`.
pub fn phase_for_probability(r: f64) -> Option<f64> {
    (0.0..=1.0).contains(&r).then(|| libm::acos(2.0 * r - 1.0))
}

pub fn quantum_distribution(phi: f64) -> DetectionDistribution {
    DetectionDistribution::one_count(
        probability_monochromatic(Outcome::Plus, phi),
        probability_monochromatic(Outcome::Minus, phi),
    )
}

/// `K ∫ ½(1 + a cos ωτ) δ(ω) dω` over the source spectrum.
pub fn probability_wavepacket(a: Outcome, cfg: &InterferometerConfig, tol: f64) -> Result<f64, IntegrationError> {
    let tau = cfg.path_delay;
    let sign = a.value();
    integrate_over_spectrum(&cfg.source, |w| 0.5 * (1.0 + sign * libm::cos(w * tau)), tol)
}

pub fn wavepacket_distribution(
    cfg: &InterferometerConfig,
    tol: f64,
) -> Result<DetectionDistribution, IntegrationError> {
    let p = probability_wavepacket(Outcome::Plus, cfg, tol)?;
    let m = probability_wavepacket(Outcome::Minus, cfg, tol)?;
    Ok(DetectionDistribution::one_count(p, m))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `τ_c/τ` at or above the threshold.
    Interfering,
    /// `τ_c/τ ≤ 1`.
    ParticleLike,
    Intermediate,
}

/// Classifies by the ratio of coherence time to path delay. A zero delay is
/// interfering.
///
/// # Panics
///
/// If `ratio_threshold <= 1`.
pub fn classify_interference(cfg: &InterferometerConfig, ratio_threshold: f64) -> Regime {
    assert!(ratio_threshold > 1.0, "ratio threshold must exceed 1");
    if cfg.path_delay == 0.0 {
        return Regime::Interfering;
    }
    classify_ratio(coherence_time(&cfg.source).seconds() / cfg.path_delay, ratio_threshold)
}

pub(crate) fn classify_ratio(ratio: f64, threshold: f64) -> Regime {
    if ratio >= threshold {
        Regime::Interfering
    } else if ratio <= 1.0 {
        Regime::ParticleLike
    } else {
        Regime::Intermediate
    }
}

/// Both detectors decide independently, each clicking with its own
/// single-path probability. Double and null counts then occur.
pub fn local_detection_distribution(phi: f64) -> DetectionDistribution {
    let p = probability_monochromatic(Outcome::Plus, phi);
    let m = probability_monochromatic(Outcome::Minus, phi);
    DetectionDistribution {
        p_plus: p * (1.0 - m),
        p_minus: m * (1.0 - p),
        p_double: p * m,
        p_null: (1.0 - p) * (1.0 - m),
    }
}

/// Per-category event tallies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct EventCounts {
    pub plus: u64,
    pub minus: u64,
    pub double: u64,
    pub null: u64,
}

impl EventCounts {
    pub fn total(&self) -> u64 {
        self.plus + self.minus + self.double + self.null
    }

    pub fn as_array(&self) -> [u64; 4] {
        [self.plus, self.minus, self.double, self.null]
    }
}

/// Draws `n` independent runs from `dist` with stream 0 of `seed`.
pub fn sample_events(dist: &DetectionDistribution, n: u64, seed: u64) -> Result<EventCounts, DistributionError> {
    sample_events_stream(dist, n, seed, 0)
}

/// Draws `n` runs from ChaCha20 seeded with `seed` on stream `stream`.
///
/// Parallel scans give each task its own stream index so no generator is
/// shared. A category with zero probability is never drawn.
pub fn sample_events_stream(
    dist: &DetectionDistribution,
    n: u64,
    seed: u64,
    stream: u64,
) -> Result<EventCounts, DistributionError> {
    dist.validate(1e-9)?;
    let probs = dist.as_array();
    let mut cumulative = [0.0; 4];
    let mut acc = 0.0;
    for (c, p) in cumulative.iter_mut().zip(probs) {
        acc += p.max(0.0);
        *c = acc;
    }
    // Rounding can leave the last edge below 1; those draws go to the last
    // category that can actually occur.
    let fallback = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);

    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut counts = [0u64; 4];
    for _ in 0..n {
        let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        let mut lower = 0.0;
        let mut slot = fallback;
        for (i, &upper) in cumulative.iter().enumerate() {
            if u >= lower && u < upper {
                slot = i;
                break;
            }
            lower = upper;
        }
        counts[slot] += 1;
    }
    Ok(EventCounts { plus: counts[0], minus: counts[1], double: counts[2], null: counts[3] })
}

/// `f(Φ) = 2P(+1|Φ) - 1`, the oscillating part of the detection probability.
pub fn fringe(phi: f64) -> f64 {
    2.0 * probability_monochromatic(Outcome::Plus, phi) - 1.0
}

/// Reduces a phase to `[0, 2π)`.
pub fn wrap_phase(phi: f64) -> f64 {
    let r = libm::fmod(phi, 2.0 * PI);
    if r < 0.0 {
        r + 2.0 * PI
    } else {
        r
    }
}
