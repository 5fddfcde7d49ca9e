//! Adaptive Gauss-Legendre quadrature.
//!
//! A fixed 32-point rule is applied per panel. A panel is accepted when the
//! rule on the whole panel agrees with the sum over its two halves to within
//! the panel's share of the absolute tolerance; otherwise both halves are
//! refined. Panels are processed depth-first from the left and their
//! contributions are reduced with pairwise summation, so the result is a
//! deterministic function of the integrand and the interval.

use alloc::vec::Vec;
use thiserror::Error;

use crate::sum::pairwise;

/// Points per panel.
pub const ORDER: usize = 32;

/// Default cap on integrand evaluations.
pub const DEFAULT_NODE_BUDGET: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum IntegrationError {
    #[error("quadrature did not converge within {budget} evaluations (estimate {estimate:e}, error estimate {error_estimate:e})")]
    BudgetExhausted { budget: usize, estimate: f64, error_estimate: f64 },
    #[error("invalid integration request: tolerance {tol:e} on [{a}, {b}]")]
    InvalidRequest { a: f64, b: f64, tol: f64 },
    #[error("integrand returned a non-finite value at {at}")]
    NonFinite { at: f64 },
}

/// Converged integral with its accumulated error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// Positive half of the symmetric Gauss-Legendre rule.
struct Rule {
    nodes: [f64; ORDER / 2],
    weights: [f64; ORDER / 2],
}

impl Rule {
    fn legendre() -> Self {
        let n = ORDER;
        let mut nodes = [0.0; ORDER / 2];
        let mut weights = [0.0; ORDER / 2];
        for i in 0..n / 2 {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = libm::cos(core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5));
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        Rule { nodes, weights }
    }

    fn apply<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64) -> Result<f64, IntegrationError> {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(self.weights.iter()) {
            let lo = mid - half * x;
            let hi = mid + half * x;
            let (flo, fhi) = (f(lo), f(hi));
            if !flo.is_finite() {
                return Err(IntegrationError::NonFinite { at: lo });
            }
            if !fhi.is_finite() {
                return Err(IntegrationError::NonFinite { at: hi });
            }
            acc += w * (flo + fhi);
        }
        Ok(acc * half)
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol` with the default
/// node budget.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<Estimate, IntegrationError> {
    integrate_with_budget(f, a, b, tol, DEFAULT_NODE_BUDGET)
}

pub fn integrate_with_budget<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    budget: usize,
) -> Result<Estimate, IntegrationError> {
    if !(tol > 0.0) || !a.is_finite() || !b.is_finite() || b < a {
        return Err(IntegrationError::InvalidRequest { a, b, tol });
    }
    if a == b {
        return Ok(Estimate { value: 0.0, error: 0.0, evaluations: 0 });
    }

    let rule = Rule::legendre();
    let span = b - a;
    let min_width = span * 1e-14;

    let mut evaluations = 0usize;
    let mut accepted: Vec<f64> = Vec::new();
    let mut errors: Vec<f64> = Vec::new();

    // Two starting panels so a single symmetric cancellation cannot fake
    // convergence on the whole interval.
    let mid = 0.5 * (a + b);
    let mut stack: Vec<(f64, f64, f64)> = Vec::new();
    let right = rule.apply(&f, mid, b)?;
    let left = rule.apply(&f, a, mid)?;
    evaluations += 2 * ORDER;
    stack.push((mid, b, right));
    stack.push((a, mid, left));

    while let Some((lo, hi, whole)) = stack.pop() {
        let m = 0.5 * (lo + hi);
        let l = rule.apply(&f, lo, m)?;
        let r = rule.apply(&f, m, hi)?;
        evaluations += 2 * ORDER;
        let refined = l + r;
        let err = (refined - whole).abs();
        let local_tol = tol * (hi - lo) / span;
        if err <= local_tol || (hi - lo) <= min_width {
            accepted.push(refined);
            errors.push(err);
            continue;
        }
        if evaluations >= budget {
            let pending: Vec<f64> = stack.iter().map(|p| p.2).collect();
            let estimate = pairwise(&accepted) + refined + pairwise(&pending);
            let error_estimate = pairwise(&errors) + err;
            return Err(IntegrationError::BudgetExhausted { budget, estimate, error_estimate });
        }
        stack.push((m, hi, r));
        stack.push((lo, m, l));
    }

    Ok(Estimate { value: pairwise(&accepted), error: pairwise(&errors), evaluations })
}
