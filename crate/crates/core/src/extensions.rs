//! Biased-marginal extensions of quantum correlations and the chained bound
//! that rules them out.
//!
//! If Alice's outcome, conditioned on some additional variable, is biased
//! away from uniform by a statistical distance `D`, no-signaling forces
//! `D ≤ 3 I(N)/2` for every `N`. Quantum correlations drive `I(N, π)` to
//! zero, so any `D > 0` is contradicted at a finite `N`.

use core::f64::consts::PI;

use thiserror::Error;

use crate::bell::{chained_i, quantum_i_closed_form, BellError, ChainedConfig, CorrelationModel, QuantumModel};
use crate::entangle::{ideal_joint_distribution, JointDistribution};

/// Total variation distance `½ Σ |p_i - q_i|` between two-outcome
/// distributions.
pub fn statistical_distance(p: [f64; 2], q: [f64; 2]) -> f64 {
    0.5 * ((p[0] - q[0]).abs() + (p[1] - q[1]).abs())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceReport {
    pub d: f64,
    /// `3 I(N)/2`.
    pub bound: f64,
    pub i_value: f64,
    pub violated: bool,
}

/// Compares a supplied distance with `3 I(N, Θ)/2` evaluated on `model`.
pub fn colbeck_renner_bound<M: CorrelationModel + ?Sized>(
    n: usize,
    theta: f64,
    model: &M,
    d: f64,
) -> Result<DistanceReport, BellError> {
    let result = chained_i(model, &ChainedConfig::new(n, theta)?)?;
    let bound = 1.5 * result.i_value;
    Ok(DistanceReport { d, bound, i_value: result.i_value, violated: d > bound })
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExtensionError {
    #[error("statistical distance must lie in (0, 1], got {0}")]
    Distance(f64),
    #[error("bias must lie in (0, 1/2], got {0}")]
    Bias(f64),
    #[error("no N <= {n_cap} satisfies 3 I(N)/2 < {d}; 3 I({n_cap})/2 = {bound_at_cap}")]
    NotFound { d: f64, n_cap: usize, bound_at_cap: f64 },
    #[error(transparent)]
    Bell(#[from] BellError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Falsification {
    pub n: usize,
    /// Quantum `I(N, Θ)` at the returned `N`.
    pub i_at_n: f64,
    /// Quantum `I(N - 1, Θ)`, absent for `N = 2`.
    pub i_before: Option<f64>,
}

impl Falsification {
    pub fn bound(&self) -> f64 {
        1.5 * self.i_at_n
    }

    pub fn bound_before(&self) -> Option<f64> {
        self.i_before.map(|i| 1.5 * i)
    }
}

/// Smallest `N` in `2..=n_cap` with `3 I(N, Θ)/2 < D` for the maximally
/// entangled quantum model.
pub fn find_falsifying_n(d: f64, theta: f64, n_cap: usize) -> Result<Falsification, ExtensionError> {
    if !(d > 0.0 && d <= 1.0) {
        return Err(ExtensionError::Distance(d));
    }
    let mut previous = None;
    let mut last = f64::NAN;
    for n in 2..=n_cap.max(2) {
        let i = quantum_i_closed_form(n, theta)?;
        if 1.5 * i < d {
            return Ok(Falsification { n, i_at_n: i, i_before: previous });
        }
        previous = Some(i);
        last = i;
    }
    Err(ExtensionError::NotFound { d, n_cap, bound_at_cap: 1.5 * last })
}

/// Equal-weight mixture of two subensembles in which Alice's probability of
/// `+1` is `½ + bias` and `½ - bias`. Bob's marginal stays `½` and the
/// concordance `P(a=b|Φ)` is the quantum one in each subensemble, so the
/// mixture reproduces the ideal distribution exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasedMarginalModel {
    bias: f64,
}

impl BiasedMarginalModel {
    pub fn new(bias: f64) -> Result<Self, ExtensionError> {
        if !(0.0..=0.5).contains(&bias) {
            return Err(ExtensionError::Bias(bias));
        }
        Ok(BiasedMarginalModel { bias })
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    /// Joint entries of subensemble `k` (0 biased up, 1 biased down). They
    /// go negative wherever `P(a=b)` or `P(a≠b)` falls below the bias.
    pub fn subensemble(&self, k: usize, alice: f64, bob: f64) -> JointDistribution {
        let s = if k == 0 { self.bias } else { -self.bias };
        let c = QuantumModel::maximal().joint(alice, bob).concordance();
        JointDistribution::new([[0.5 * (c + s), 0.5 * (1.0 + s - c)], [0.5 * (1.0 - c - s), 0.5 * (c - s)]])
    }

    /// Alice's `(P(+1), P(-1))` in subensemble `k`.
    pub fn subensemble_marginal(&self, k: usize) -> [f64; 2] {
        let s = if k == 0 { self.bias } else { -self.bias };
        [0.5 + s, 0.5 - s]
    }

    /// Distance of each subensemble marginal from uniform.
    pub fn distance(&self) -> f64 {
        statistical_distance(self.subensemble_marginal(0), [0.5, 0.5])
    }
}

impl CorrelationModel for BiasedMarginalModel {
    fn name(&self) -> &str {
        "biased_marginal"
    }

    fn joint(&self, alice: f64, bob: f64) -> JointDistribution {
        ideal_joint_distribution(alice + bob, 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeggettReport {
    pub bias: f64,
    pub d: f64,
    pub witness: Falsification,
    /// `3 I(N)/2` at the witness; below `d`.
    pub bound: f64,
    /// Most negative subensemble entry over the chained settings at the
    /// witness `N`.
    pub min_subensemble_probability: f64,
    pub contradiction: bool,
}

/// Builds the biased model, finds the chain length at which the bound fails
/// and evaluates its subensembles on that chain.
pub fn leggett_inconsistency_demo(bias: f64, n_cap: usize) -> Result<LeggettReport, ExtensionError> {
    if !(bias > 0.0) {
        return Err(ExtensionError::Bias(bias));
    }
    let model = BiasedMarginalModel::new(bias)?;
    let d = model.distance();
    let witness = find_falsifying_n(d, PI, n_cap)?;
    let report = colbeck_renner_bound(witness.n, PI, &model, d)?;

    let cfg = ChainedConfig::new(witness.n, PI)?;
    let mut min_p = f64::INFINITY;
    for (alice, bob) in cfg.pairs() {
        for sub in 0..2 {
            for p in model.subensemble(sub, alice, bob).p.iter().flatten() {
                min_p = min_p.min(*p);
            }
        }
    }

    Ok(LeggettReport {
        bias,
        d,
        witness,
        bound: report.bound,
        min_subensemble_probability: min_p,
        contradiction: report.violated,
    })
}
