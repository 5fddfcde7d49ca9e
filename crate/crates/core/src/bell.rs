//! Correlation models and the chained Bell quantity
//!
//! ```text
//! I(N, Θ) = P(a=b | Φ(l₀, l₂ₙ₋₁)) + Σᵢ P(a≠b | Φ(lᵢ, lᵢ₊₁))
//! ```
//!
//! over `2N` settings, Alice holding the even-indexed ones and Bob the odd.
//! Settings are phases. With the two-photon phase `Φ = φ_A + φ_B`, setting
//! `k` is `kΘ/2N` for Alice and `-kΘ/2N` for Bob, so every adjacent pair has
//! `|Φ| = Θ/2N` and the closing pair has `|Φ| = (2N-1)Θ/2N`.
//!
//! Every deterministic local assignment gives `I ≥ 1`; `I < 1` is nonlocal.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::PI;

use thiserror::Error;

use crate::entangle::{ideal_joint_distribution, JointDistribution};
use crate::interferometer::Outcome;
use crate::sum::pairwise;

/// Largest `N` accepted by [`lhv_minimum_i`]; `2^(2N)` strategies.
pub const LHV_MAX_N: usize = 12;

/// Tolerance used to validate model distributions and to classify `I`.
pub const DISTRIBUTION_TOLERANCE: f64 = 1e-9;
pub const CLASSIFICATION_TOLERANCE: f64 = 1e-12;

/// A rule mapping Alice's and Bob's setting phases to a joint distribution.
pub trait CorrelationModel {
    fn name(&self) -> &str;
    fn joint(&self, alice: f64, bob: f64) -> JointDistribution;
}

impl<M: CorrelationModel + ?Sized> CorrelationModel for &M {
    fn name(&self) -> &str {
        (**self).name()
    }
    fn joint(&self, alice: f64, bob: f64) -> JointDistribution {
        (**self).joint(alice, bob)
    }
}

/// Entangled-pair correlations `P(a=b|Φ) = ½(1 + V cos Φ)` with uniform marginals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantumModel {
    pub visibility: f64,
}

impl QuantumModel {
    pub fn maximal() -> Self {
        QuantumModel { visibility: 1.0 }
    }
}

impl CorrelationModel for QuantumModel {
    fn name(&self) -> &str {
        "quantum"
    }
    fn joint(&self, alice: f64, bob: f64) -> JointDistribution {
        ideal_joint_distribution(alice + bob, self.visibility)
    }
}

/// Nonlocal box: outcomes agree when `cos Φ > 0`, disagree when `cos Φ < 0`,
/// and are uncorrelated on the boundary. Marginals are uniform everywhere.
///
/// At `Θ = π` every adjacent chained pair (`|Φ| ≤ π/4`) agrees and the
/// closing pair (`|Φ| ≥ 3π/4`) disagrees, so `I(N, π) = 0` for every `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PrBox;

pub fn pr_box_model() -> PrBox {
    PrBox
}

impl CorrelationModel for PrBox {
    fn name(&self) -> &str {
        "pr_box"
    }
    fn joint(&self, alice: f64, bob: f64) -> JointDistribution {
        let c = libm::cos(alice + bob);
        let concordance = if c > 1e-12 {
            1.0
        } else if c < -1e-12 {
            0.0
        } else {
            0.5
        };
        JointDistribution::from_concordance(concordance, 1.0 - concordance)
    }
}

/// Nonlocal correlations suppressed, local marginals kept: the joint
/// distribution is the product of the uniform quantum marginals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SuppressedNonlocality;

pub fn suppressed_nonlocality_model() -> SuppressedNonlocality {
    SuppressedNonlocality
}

impl CorrelationModel for SuppressedNonlocality {
    fn name(&self) -> &str {
        "suppressed"
    }
    fn joint(&self, alice: f64, bob: f64) -> JointDistribution {
        let q = ideal_joint_distribution(alice + bob, 1.0);
        let (a, b) = (q.marginal_a(), q.marginal_b());
        JointDistribution::new([[a * b, a * (1.0 - b)], [(1.0 - a) * b, (1.0 - a) * (1.0 - b)]])
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BellError {
    #[error("chained inequality needs N >= 2, got {0}")]
    TooFewSettings(usize),
    #[error("exhaustive search is limited to N <= {max}, got {n}")]
    EnumerationBound { n: usize, max: usize },
    #[error("model '{model}' returned an invalid distribution for settings ({alice}, {bob}): {reason}")]
    InvalidDistribution { model: String, alice: f64, bob: f64, reason: crate::entangle::JointError },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainedConfig {
    n: usize,
    theta: f64,
}

impl ChainedConfig {
    pub fn new(n: usize, theta: f64) -> Result<Self, BellError> {
        if n < 2 {
            return Err(BellError::TooFewSettings(n));
        }
        Ok(ChainedConfig { n, theta })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `Θ/2N`, the magnitude of every adjacent pair phase.
    pub fn step(&self) -> f64 {
        self.theta / (2 * self.n) as f64
    }

    /// Phase of setting `l_k`, `k < 2N`.
    pub fn setting(&self, k: usize) -> f64 {
        let phase = k as f64 * self.step();
        if k.is_multiple_of(2) {
            phase
        } else {
            -phase
        }
    }

    /// `(alice, bob)` phases for the pair `(l_k, l_{k+1})`.
    fn adjacent(&self, k: usize) -> (f64, f64) {
        let (x, y) = (self.setting(k), self.setting(k + 1));
        if k.is_multiple_of(2) {
            (x, y)
        } else {
            (y, x)
        }
    }

    /// `(alice, bob)` phases for the closing pair `(l_0, l_{2N-1})`.
    fn closing(&self) -> (f64, f64) {
        (self.setting(0), self.setting(2 * self.n - 1))
    }

    /// All `2N` `(alice, bob)` setting pairs, closing pair first.
    pub fn pairs(&self) -> Vec<(f64, f64)> {
        core::iter::once(self.closing()).chain((0..2 * self.n - 1).map(|k| self.adjacent(k))).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    /// `I ≥ 1`.
    LocalCompatible,
    /// `0 < I < 1`.
    BoundedNonlocal,
    /// `I = 0`.
    MaximalNonlocal,
}

pub fn classify(i_value: f64) -> Classification {
    if i_value.abs() <= CLASSIFICATION_TOLERANCE {
        Classification::MaximalNonlocal
    } else if i_value >= 1.0 - CLASSIFICATION_TOLERANCE {
        Classification::LocalCompatible
    } else {
        Classification::BoundedNonlocal
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainedResult {
    pub i_value: f64,
    /// Closing concordance first, then the `2N - 1` adjacent discordances in
    /// setting order.
    pub contributions: Vec<f64>,
    pub classification: Classification,
}

fn checked_joint<M: CorrelationModel + ?Sized>(
    model: &M,
    (alice, bob): (f64, f64),
) -> Result<JointDistribution, BellError> {
    let d = model.joint(alice, bob);
    d.validate(DISTRIBUTION_TOLERANCE).map_err(|reason| BellError::InvalidDistribution {
        model: model.name().to_string(),
        alice,
        bob,
        reason,
    })?;
    Ok(d)
}

/// Evaluates `I(N, Θ)` for `model`.
pub fn chained_i<M: CorrelationModel + ?Sized>(model: &M, cfg: &ChainedConfig) -> Result<ChainedResult, BellError> {
    let mut contributions = Vec::with_capacity(2 * cfg.n);
    contributions.push(checked_joint(model, cfg.closing())?.concordance());
    for k in 0..2 * cfg.n - 1 {
        contributions.push(checked_joint(model, cfg.adjacent(k))?.discordance());
    }
    let i_value = pairwise(&contributions);
    Ok(ChainedResult { i_value, contributions, classification: classify(i_value) })
}

/// `½(1 + cos((2N-1)Θ/2N)) + (2N-1)·½(1 - cos(Θ/2N))` for maximal
/// entanglement.
pub fn quantum_i_closed_form(n: usize, theta: f64) -> Result<f64, BellError> {
    if n < 2 {
        return Err(BellError::TooFewSettings(n));
    }
    let two_n = (2 * n) as f64;
    let step = theta / two_n;
    let closing = 0.5 * (1.0 + libm::cos((two_n - 1.0) * step));
    let s = libm::sin(0.5 * step);
    Ok(closing + (two_n - 1.0) * s * s)
}

/// Best deterministic local strategy: outcome per setting, `l_0` first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LhvOptimum {
    pub min_i: u32,
    pub strategy: Vec<Outcome>,
}

/// `I` for one deterministic assignment of outcomes to the `2N` settings.
/// Probabilities are 0 or 1, so `I` counts disagreements along the chain
/// plus agreement on the closing pair.
pub fn deterministic_i(strategy: &[Outcome]) -> Result<u32, BellError> {
    let len = strategy.len();
    if len < 4 || !len.is_multiple_of(2) {
        return Err(BellError::TooFewSettings(len / 2));
    }
    let closing = u32::from(strategy[0] == strategy[len - 1]);
    let flips = strategy.windows(2).filter(|w| w[0] != w[1]).count() as u32;
    Ok(closing + flips)
}

/// Exhaustive minimum of `I` over all `2^(2N)` deterministic local strategies.
///
/// Deterministic outcomes do not depend on the phase, so `Θ` does not change
/// the minimum. Ties resolve to the lexicographically smallest strategy with
/// `+1 < -1`.
pub fn lhv_minimum_i(n: usize, _theta: f64) -> Result<LhvOptimum, BellError> {
    if n < 2 {
        return Err(BellError::TooFewSettings(n));
    }
    if n > LHV_MAX_N {
        return Err(BellError::EnumerationBound { n, max: LHV_MAX_N });
    }
    let bits = 2 * n as u32;
    let chain_mask: u32 = (1u32 << (bits - 1)) - 1;
    let mut best = (u32::MAX, 0u32);
    // Bit (bits-1-k) holds setting k, set for -1; counting upward walks the
    // strategies in lexicographic order.
    for s in 0u32..(1u32 << bits) {
        let first = (s >> (bits - 1)) & 1;
        let last = s & 1;
        let closing = u32::from(first == last);
        let flips = ((s ^ (s >> 1)) & chain_mask).count_ones();
        let value = closing + flips;
        if value < best.0 {
            best = (value, s);
        }
    }
    let strategy =
        (0..bits).map(|k| if (best.1 >> (bits - 1 - k)) & 1 == 1 { Outcome::Minus } else { Outcome::Plus }).collect();
    Ok(LhvOptimum { min_i: best.0, strategy })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundednessReport {
    pub n_max: usize,
    pub all_positive: bool,
    pub strictly_decreasing: bool,
    /// `P(a=b | (2N-1)π/2N) > P(a=b | π) = 0` for every `N`.
    pub closing_concordance_positive: bool,
    /// First `N` at which any of the three checks failed.
    pub first_failure: Option<usize>,
    pub i_at_n_max: f64,
}

/// Checks the quantum `I(N, π)` for `2 ≤ N ≤ n_max`: positive, strictly
/// decreasing, and never reaching the `I = 0` required for maximal
/// nonlocality.
pub fn boundedness_check(n_max: usize) -> Result<BoundednessReport, BellError> {
    if n_max < 2 {
        return Err(BellError::TooFewSettings(n_max));
    }
    let mut report = BoundednessReport {
        n_max,
        all_positive: true,
        strictly_decreasing: true,
        closing_concordance_positive: true,
        first_failure: None,
        i_at_n_max: 0.0,
    };
    let mut previous = f64::INFINITY;
    for n in 2..=n_max {
        let value = quantum_i_closed_form(n, PI)?;
        let closing_phase = (2 * n - 1) as f64 * PI / (2 * n) as f64;
        let closing = ideal_joint_distribution(closing_phase, 1.0).concordance();
        let mut failed = false;
        if !(value > 0.0) {
            report.all_positive = false;
            failed = true;
        }
        if !(value < previous) {
            report.strictly_decreasing = false;
            failed = true;
        }
        if !(closing > 0.0) {
            report.closing_concordance_positive = false;
            failed = true;
        }
        if failed && report.first_failure.is_none() {
            report.first_failure = Some(n);
        }
        previous = value;
        report.i_at_n_max = value;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::SQRT_2;

    #[test]
    fn settings_follow_equipartition() {
        let cfg = ChainedConfig::new(3, PI).unwrap();
        let step = PI / 6.0;
        for k in 0..5 {
            let (a, b) = cfg.adjacent(k);
            assert!(((a + b).abs() - step).abs() < 1e-15, "pair {k}");
        }
        let (a, b) = cfg.closing();
        assert!(((a + b).abs() - 5.0 * step).abs() < 1e-15);
        assert!(ChainedConfig::new(1, PI).is_err());
    }

    #[test]
    fn quantum_chsh_point() {
        let r = chained_i(&QuantumModel::maximal(), &ChainedConfig::new(2, PI).unwrap()).unwrap();
        assert!((r.i_value - (2.0 - SQRT_2)).abs() < 1e-12);
        assert_eq!(r.contributions.len(), 4);
        assert_eq!(r.classification, Classification::BoundedNonlocal);
        assert!((quantum_i_closed_form(2, PI).unwrap() - (2.0 - SQRT_2)).abs() < 1e-12);
    }

    #[test]
    fn theta_zero_is_exactly_one() {
        for n in [2, 5, 100] {
            let r = chained_i(&QuantumModel::maximal(), &ChainedConfig::new(n, 0.0).unwrap()).unwrap();
            assert_eq!(r.i_value, 1.0);
            assert_eq!(r.classification, Classification::LocalCompatible);
        }
    }

    #[test]
    fn pr_box_is_maximally_nonlocal() {
        for n in 2..10 {
            let r = chained_i(&pr_box_model(), &ChainedConfig::new(n, PI).unwrap()).unwrap();
            assert_eq!(r.i_value, 0.0);
            assert_eq!(r.classification, Classification::MaximalNonlocal);
        }
    }

    #[test]
    fn suppressed_model_is_independent() {
        let d = suppressed_nonlocality_model().joint(0.3, 1.1);
        for row in d.p {
            for p in row {
                assert!((p - 0.25).abs() < 1e-15);
            }
        }
        let r = chained_i(&suppressed_nonlocality_model(), &ChainedConfig::new(2, PI).unwrap()).unwrap();
        assert!((r.i_value - 2.0).abs() < 1e-12);
        assert_eq!(r.classification, Classification::LocalCompatible);
    }

    #[test]
    fn closed_form_values() {
        let i3 = quantum_i_closed_form(3, PI).unwrap();
        assert!((i3 - 3.0 * (1.0 - libm::cos(PI / 6.0))).abs() < 1e-12);
        assert!((i3 - 0.40192).abs() < 1e-5);
        let big = quantum_i_closed_form(1_000_000, PI).unwrap();
        let taylor = PI * PI / 8e6;
        assert!((big - taylor).abs() / taylor < 0.01);
        assert!(quantum_i_closed_form(1, PI).is_err());
    }

    #[test]
    fn lhv_bound_is_one() {
        for n in 2..=8 {
            let opt = lhv_minimum_i(n, PI).unwrap();
            assert_eq!(opt.min_i, 1, "N = {n}");
            assert_eq!(deterministic_i(&opt.strategy).unwrap(), 1);
            assert!(opt.strategy.iter().all(|&o| o == Outcome::Plus));
        }
        assert!(matches!(lhv_minimum_i(13, PI), Err(BellError::EnumerationBound { .. })));
    }

    #[test]
    fn all_equal_strategy_scores_closing_term_only() {
        let s = [Outcome::Minus; 4];
        assert_eq!(deterministic_i(&s).unwrap(), 1);
        let s = [Outcome::Plus, Outcome::Minus, Outcome::Plus, Outcome::Minus];
        assert_eq!(deterministic_i(&s).unwrap(), 3);
    }

    #[test]
    fn boundedness() {
        let r = boundedness_check(1024).unwrap();
        assert!(r.all_positive && r.strictly_decreasing && r.closing_concordance_positive);
        assert_eq!(r.first_failure, None);
        assert!((1024.0 * r.i_at_n_max - PI * PI / 8.0).abs() < 1e-5);
    }

    #[test]
    fn invalid_model_is_rejected() {
        struct Broken;
        impl CorrelationModel for Broken {
            fn name(&self) -> &str {
                "broken"
            }
            fn joint(&self, _: f64, _: f64) -> JointDistribution {
                JointDistribution::new([[0.5, 0.5], [0.5, 0.5]])
            }
        }
        let err = chained_i(&Broken, &ChainedConfig::new(2, PI).unwrap()).unwrap_err();
        assert!(matches!(err, BellError::InvalidDistribution { ref model, .. } if model == "broken"));
    }
}
