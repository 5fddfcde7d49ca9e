//! Two-photon Franson arrangement.
//!
//! A pump photon of frequency `ω` splits into `ω_A = ω/2 + ω_ph` and
//! `ω_B = ω/2 - ω_ph`. Each photon crosses an unbalanced interferometer with
//! delay `τ_A` or `τ_B`, giving four two-photon paths `(l_A,l_B)`,
//! `(s_A,s_B)`, `(l_A,s_B)` and `(s_A,l_B)`, and six path pairs whose
//! interference terms make up the joint outcome distribution.

use core::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::bell::CorrelationModel;
use crate::interferometer::{classify_ratio, Regime};
use crate::measurement::MeasurementMatrix;
use crate::quadrature::IntegrationError;
use crate::spectra::{coherence_factor, coherence_time, Spectrum};

/// `p[a][b]` with index 0 for outcome `+1` and 1 for `-1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointDistribution {
    pub p: [[f64; 2]; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum JointError {
    #[error("entry p[{a}][{b}] = {value} is outside [0, 1]")]
    OutOfRange { a: usize, b: usize, value: f64 },
    #[error("entries sum to {0}, not 1")]
    Total(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

impl JointDistribution {
    pub fn new(p: [[f64; 2]; 2]) -> Self {
        JointDistribution { p }
    }

    /// Splits concordance and discordance evenly between the two outcomes.
    pub fn from_concordance(concordance: f64, discordance: f64) -> Self {
        let (c, d) = (0.5 * concordance, 0.5 * discordance);
        JointDistribution { p: [[c, d], [d, c]] }
    }

    /// `P(a = b)`.
    pub fn concordance(&self) -> f64 {
        self.p[0][0] + self.p[1][1]
    }

    /// `P(a ≠ b)`.
    pub fn discordance(&self) -> f64 {
        self.p[0][1] + self.p[1][0]
    }

    pub fn total(&self) -> f64 {
        self.p[0][0] + self.p[0][1] + self.p[1][0] + self.p[1][1]
    }

    /// Alice's probability of `+1`.
    pub fn marginal_a(&self) -> f64 {
        self.p[0][0] + self.p[0][1]
    }

    /// Bob's probability of `+1`.
    pub fn marginal_b(&self) -> f64 {
        self.p[0][0] + self.p[1][0]
    }

    pub fn validate(&self, tol: f64) -> Result<(), JointError> {
        for a in 0..2 {
            for b in 0..2 {
                let value = self.p[a][b];
                if !(value >= -tol && value <= 1.0 + tol) {
                    return Err(JointError::OutOfRange { a, b, value });
                }
            }
        }
        let total = self.total();
        if !((total - 1.0).abs() <= tol) {
            return Err(JointError::Total(total));
        }
        Ok(())
    }
}

/// Probability of `+1` on one side, summed over the other side's outcomes.
pub fn marginal(dist: &JointDistribution, side: Side) -> f64 {
    match side {
        Side::A => dist.marginal_a(),
        Side::B => dist.marginal_b(),
    }
}

/// `P(a=b|Φ) = ½(1 + V cos Φ)`, `P(a≠b|Φ) = ½(1 - V cos Φ)`, each split
/// evenly over the two outcomes so both marginals are ½.
pub fn ideal_joint_distribution(phi: f64, visibility: f64) -> JointDistribution {
    let x = visibility * libm::cos(phi);
    let concordance = 0.5 * (1.0 + x);
    let discordance = if x >= 0.0 {
        // Small discordances near Φ = 0 keep full relative precision.
        let s = libm::sin(0.5 * phi);
        0.5 * (1.0 - visibility) + visibility * s * s
    } else {
        0.5 * (1.0 - x)
    };
    JointDistribution::from_concordance(concordance, discordance)
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum FransonError {
    #[error("interferometer delays must be finite and non-negative, got ({tau_a}, {tau_b})")]
    Delay { tau_a: f64, tau_b: f64 },
    #[error("coincidence window must be finite and non-negative, got {0}")]
    Window(f64),
    #[error(
        "photon offset {offset} reaches half the pump frequency {pump}; a down-converted frequency would be negative"
    )]
    NegativeFrequency { pump: f64, offset: f64 },
    #[error(transparent)]
    Integration(#[from] IntegrationError),
}

/// `(ω_A, ω_B)` with `ω_A + ω_B = ω` exactly.
pub fn split_frequency(pump: f64, offset: f64) -> Result<(f64, f64), FransonError> {
    if !(offset.abs() < 0.5 * pump) {
        return Err(FransonError::NegativeFrequency { pump, offset });
    }
    // The larger half is formed first; the smaller one is then an exact
    // difference.
    Ok(if offset >= 0.0 {
        let a = 0.5 * pump + offset;
        (a, pump - a)
    } else {
        let b = 0.5 * pump - offset;
        (pump - b, b)
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FransonConfig {
    pump: Spectrum,
    photon_offset: Spectrum,
    tau_a: f64,
    tau_b: f64,
    coincidence_window: Option<f64>,
}

impl FransonConfig {
    /// `coincidence_window` is the largest accepted arrival-time difference
    /// between the two detections; `None` keeps every event.
    pub fn new(
        pump: Spectrum,
        photon_offset: Spectrum,
        tau_a: f64,
        tau_b: f64,
        coincidence_window: Option<f64>,
    ) -> Result<Self, FransonError> {
        let ok = |t: f64| t >= 0.0 && t.is_finite();
        if !ok(tau_a) || !ok(tau_b) {
            return Err(FransonError::Delay { tau_a, tau_b });
        }
        if let Some(w) = coincidence_window {
            if !ok(w) {
                return Err(FransonError::Window(w));
            }
        }
        // Every frequency pair in the two supports must split to positive
        // photon frequencies.
        let (pump_low, _) = pump.support();
        let (_, offset_high) = photon_offset.support();
        split_frequency(pump_low, offset_high)?;
        Ok(FransonConfig { pump, photon_offset, tau_a, tau_b, coincidence_window })
    }

    pub fn pump(&self) -> &Spectrum {
        &self.pump
    }

    pub fn photon_offset(&self) -> &Spectrum {
        &self.photon_offset
    }

    pub fn tau_a(&self) -> f64 {
        self.tau_a
    }

    pub fn tau_b(&self) -> f64 {
        self.tau_b
    }

    pub fn coincidence_window(&self) -> Option<f64> {
        self.coincidence_window
    }
}

/// Down-converted frequencies at the spectral centers.
pub fn downconverted_frequencies(cfg: &FransonConfig) -> (f64, f64) {
    split_frequency(cfg.pump.center(), cfg.photon_offset.center()).expect("validated when the configuration was built")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arm {
    Long,
    Short,
}

/// One of the four two-photon paths, Alice's arm first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Path {
    pub alice: Arm,
    pub bob: Arm,
}

impl Path {
    pub const LL: Path = Path { alice: Arm::Long, bob: Arm::Long };
    pub const SS: Path = Path { alice: Arm::Short, bob: Arm::Short };
    pub const LS: Path = Path { alice: Arm::Long, bob: Arm::Short };
    pub const SL: Path = Path { alice: Arm::Short, bob: Arm::Long };
    pub const ALL: [Path; 4] = [Path::LL, Path::SS, Path::LS, Path::SL];

    /// Extra delays `(t_A, t_B)` picked up on this path.
    fn delays(self, tau_a: f64, tau_b: f64) -> (f64, f64) {
        let t = |arm: Arm, tau: f64| if arm == Arm::Long { tau } else { 0.0 };
        (t(self.alice, tau_a), t(self.bob, tau_b))
    }
}

/// The six pairs of two-photon paths. The first path of each pair carries
/// at least as many long arms as the second.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathPair {
    /// `(l_A,l_B)` with `(s_A,s_B)`: the entangling pair.
    LlSs,
    /// `(l_A,l_B)` with `(l_A,s_B)`.
    LlLs,
    /// `(l_A,l_B)` with `(s_A,l_B)`.
    LlSl,
    /// `(l_A,s_B)` with `(s_A,s_B)`.
    LsSs,
    /// `(s_A,l_B)` with `(s_A,s_B)`.
    SlSs,
    /// `(l_A,s_B)` with `(s_A,l_B)`.
    LsSl,
}

impl PathPair {
    pub const ALL: [PathPair; 6] =
        [PathPair::LlSs, PathPair::LlLs, PathPair::LlSl, PathPair::LsSs, PathPair::SlSs, PathPair::LsSl];

    pub fn paths(self) -> (Path, Path) {
        match self {
            PathPair::LlSs => (Path::LL, Path::SS),
            PathPair::LlLs => (Path::LL, Path::LS),
            PathPair::LlSl => (Path::LL, Path::SL),
            PathPair::LsSs => (Path::LS, Path::SS),
            PathPair::SlSs => (Path::SL, Path::SS),
            PathPair::LsSl => (Path::LS, Path::SL),
        }
    }
}

/// Delay differences `(ΔA, ΔB)` between the two paths of a pair.
fn pair_delays(first: Path, second: Path, tau_a: f64, tau_b: f64) -> (f64, f64) {
    let (a1, b1) = first.delays(tau_a, tau_b);
    let (a2, b2) = second.delays(tau_a, tau_b);
    (a1 - a2, b1 - b2)
}

/// Phase difference `ω_A ΔA + ω_B ΔB` between the two paths of `pair` at
/// the spectral centers. For `LlSs` this is
/// `(ω/2)(τ_A + τ_B) + ω_ph(τ_A - τ_B)`.
pub fn path_pair_phase(cfg: &FransonConfig, pair: PathPair) -> f64 {
    let (wa, wb) = downconverted_frequencies(cfg);
    let (first, second) = pair.paths();
    let (da, db) = pair_delays(first, second, cfg.tau_a, cfg.tau_b);
    let mut phase = 0.0;
    if da != 0.0 {
        phase += wa * da;
    }
    if db != 0.0 {
        phase += wb * db;
    }
    phase
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    /// `τ_c ≫ τ`: the pump cannot tell the long-long from the short-short
    /// emission time.
    PumpCoherence,
    /// `τ ≫ τ_c^ph`: mixed long/short paths arrive at distinguishable times.
    PathSeparation,
    /// `τ_c^ph ≫ |τ_A - τ_B|`: the two interferometers are matched.
    PathAlignment,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionReport {
    pub satisfied: bool,
    /// `τ_c / τ` with `τ = max(τ_A, τ_B)`.
    pub pump_ratio: f64,
    /// `τ / τ_c^ph`.
    pub separation_ratio: f64,
    /// `τ_c^ph / |τ_A - τ_B|`, infinite for equal delays.
    pub alignment_ratio: f64,
    /// First condition below the threshold.
    pub failing: Option<Condition>,
}

impl ConditionReport {
    pub fn ratio(&self, condition: Condition) -> f64 {
        match condition {
            Condition::PumpCoherence => self.pump_ratio,
            Condition::PathSeparation => self.separation_ratio,
            Condition::PathAlignment => self.alignment_ratio,
        }
    }

    pub fn regime(&self, condition: Condition, threshold: f64) -> Regime {
        classify_ratio(self.ratio(condition), threshold)
    }
}

/// # Panics
///
/// If `ratio_threshold <= 1`.
pub fn check_entanglement_conditions(cfg: &FransonConfig, ratio_threshold: f64) -> ConditionReport {
    assert!(ratio_threshold > 1.0, "ratio threshold must exceed 1");
    let tau = cfg.tau_a.max(cfg.tau_b);
    let tc = coherence_time(&cfg.pump).seconds();
    let tc_ph = coherence_time(&cfg.photon_offset).seconds();
    let mismatch = (cfg.tau_a - cfg.tau_b).abs();
    let pump_ratio = if tau == 0.0 { f64::INFINITY } else { tc / tau };
    let separation_ratio = tau / tc_ph;
    let alignment_ratio = if mismatch == 0.0 { f64::INFINITY } else { tc_ph / mismatch };
    let failing = [
        (Condition::PumpCoherence, pump_ratio),
        (Condition::PathSeparation, separation_ratio),
        (Condition::PathAlignment, alignment_ratio),
    ]
    .into_iter()
    .find(|&(_, r)| !(r >= ratio_threshold))
    .map(|(c, _)| c);
    ConditionReport { satisfied: failing.is_none(), pump_ratio, separation_ratio, alignment_ratio, failing }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalResult {
    /// Joint distribution over the accepted events, renormalized.
    pub distribution: JointDistribution,
    /// Fringe contrast of `P(a=b)` under a phase shift on Alice's long arm.
    pub visibility: f64,
    /// `Φ` of the entangling pair at the spectral centers.
    pub phase: f64,
    /// Paths whose arrival-time difference falls inside the window.
    pub kept: [bool; 4],
    /// Fraction of all detection pairs accepted by the window.
    pub acceptance: f64,
}

/// Spectrally averaged `E[exp(i(θ_x - θ_y))]` for one path pair.
fn averaged_pair_phase(
    cfg: &FransonConfig,
    first: Path,
    second: Path,
    tol: f64,
) -> Result<Complex64, IntegrationError> {
    let (da, db) = pair_delays(first, second, cfg.tau_a, cfg.tau_b);
    // ω_A ΔA + ω_B ΔB = ω (ΔA + ΔB)/2 + ω_ph (ΔA - ΔB), pump and offset
    // independent.
    let pump = coherence_factor(&cfg.pump, 0.5 * (da + db), tol)?;
    let offset = coherence_factor(&cfg.photon_offset, da - db, tol)?;
    Ok(pump * offset)
}

/// Amplitude weight of `path` for outcomes `(a, b)` at 50:50 splitters: `½`
/// per short arm, `±½` per long arm with the sign of the outcome.
fn path_weight(path: Path, a: usize, b: usize) -> f64 {
    let arm = |arm: Arm, outcome: usize| match (arm, outcome) {
        (Arm::Short, _) | (Arm::Long, 0) => 0.5,
        (Arm::Long, _) => -0.5,
    };
    arm(path.alice, a) * arm(path.bob, b)
}

fn joint_with_shift(kept: &[bool; 4], factors: &[[Complex64; 4]; 4], shift: f64) -> [[f64; 2]; 2] {
    let mut p = [[0.0; 2]; 2];
    for (a, row) in p.iter_mut().enumerate() {
        for (b, cell) in row.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (i, x) in Path::ALL.iter().enumerate() {
                if !kept[i] {
                    continue;
                }
                let wx = path_weight(*x, a, b);
                acc += wx * wx;
                for (j, y) in Path::ALL.iter().enumerate().skip(i + 1) {
                    if !kept[j] {
                        continue;
                    }
                    let wy = path_weight(*y, a, b);
                    let lx = f64::from(u8::from(x.alice == Arm::Long));
                    let ly = f64::from(u8::from(y.alice == Arm::Long));
                    let rot = Complex64::new(libm::cos(shift * (lx - ly)), libm::sin(shift * (lx - ly)));
                    acc += 2.0 * wx * wy * (factors[i][j] * rot).re;
                }
            }
            *cell = acc;
        }
    }
    p
}

/// Joint distribution of the four-path model with spectral averaging and
/// coincidence post-selection.
///
/// Each pair of accepted paths contributes its interference term weighted by
/// the characteristic functions of the pump and offset spectra. Paths whose
/// arrival-time difference `|t_A - t_B|` exceeds the coincidence window are
/// discarded and the remaining events renormalized. With a window between
/// `|τ_A - τ_B|` and `min(τ_A, τ_B)` only `(l_A,l_B)` and `(s_A,s_B)`
/// survive.
pub fn physical_joint_distribution(cfg: &FransonConfig, tol: f64) -> Result<PhysicalResult, FransonError> {
    let mut kept = [true; 4];
    if let Some(w) = cfg.coincidence_window {
        for (k, path) in kept.iter_mut().zip(Path::ALL) {
            let (ta, tb) = path.delays(cfg.tau_a, cfg.tau_b);
            *k = (ta - tb).abs() <= w;
        }
    }

    let mut factors = [[Complex64::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in i + 1..4 {
            if kept[i] && kept[j] {
                factors[i][j] = averaged_pair_phase(cfg, Path::ALL[i], Path::ALL[j], tol)?;
            }
        }
    }

    let normalize = |p: [[f64; 2]; 2]| {
        let total: f64 = p.iter().flatten().sum();
        let mut q = p;
        for v in q.iter_mut().flatten() {
            *v /= total;
        }
        (JointDistribution::new(q), total)
    };

    let (distribution, acceptance) = normalize(joint_with_shift(&kept, &factors, 0.0));

    // P(a=b) under an Alice shift δ is c₀ + Re(Z e^{iδ}); three shifts fix
    // c₀ and Z.
    let c0 = distribution.concordance();
    let c_half = normalize(joint_with_shift(&kept, &factors, 0.5 * PI)).0.concordance();
    let c_pi = normalize(joint_with_shift(&kept, &factors, PI)).0.concordance();
    let mean = 0.5 * (c0 + c_pi);
    let z = Complex64::new(0.5 * (c0 - c_pi), mean - c_half);
    let visibility = z.norm() / mean;

    Ok(PhysicalResult { distribution, visibility, phase: path_pair_phase(cfg, PathPair::LlSs), kept, acceptance })
}

/// Two entangled photons in `(|l_A l_B⟩ e^{i(φ_A+φ_B)} + |s_A s_B⟩)/√2`
/// measured by Alice's and Bob's output splitters.
///
/// Probabilities are not renormalized, so a non-unitary splitter on either
/// side shows up in the totals and marginals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntangledPairModel {
    pub alice: MeasurementMatrix,
    pub bob: MeasurementMatrix,
}

impl CorrelationModel for EntangledPairModel {
    fn name(&self) -> &str {
        "entangled_pair"
    }

    fn joint(&self, alice: f64, bob: f64) -> JointDistribution {
        let phase = Complex64::new(libm::cos(alice + bob), libm::sin(alice + bob));
        let r = core::f64::consts::FRAC_1_SQRT_2;
        let mut p = [[0.0; 2]; 2];
        for (a, row) in p.iter_mut().enumerate() {
            for (b, cell) in row.iter_mut().enumerate() {
                let amp = (self.alice.a[0][a] * self.bob.a[0][b] * phase + self.alice.a[1][a] * self.bob.a[1][b]) * r;
                *cell = amp.norm_sqr();
            }
        }
        JointDistribution::new(p)
    }
}

/// Largest change of either party's marginal under a change of the remote
/// setting, over all grid points.
pub fn no_signaling_residual<M: CorrelationModel + ?Sized>(model: &M, phi_a_grid: &[f64], phi_b_grid: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for &pa in phi_a_grid {
        let (lo, hi) = phi_b_grid.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &pb| {
            let m = model.joint(pa, pb).marginal_a();
            (lo.min(m), hi.max(m))
        });
        if hi >= lo {
            worst = worst.max(hi - lo);
        }
    }
    for &pb in phi_b_grid {
        let (lo, hi) = phi_a_grid.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &pa| {
            let m = model.joint(pa, pb).marginal_b();
            (lo.min(m), hi.max(m))
        });
        if hi >= lo {
            worst = worst.max(hi - lo);
        }
    }
    worst
}
