//! Beam-splitter measurement matrices.
//!
//! Entry `a[i][j]` is the amplitude for input path `i` (0 = long, 1 = short)
//! to leave through port `j` (0 = D(+), 1 = D(-)). With this indexing the
//! total detection probability is
//!
//! ```text
//! P(+1) + P(-1) = |L|²‖row₀‖² + |S|²‖row₁‖² + 2 Re(L S* (a₁₁a₂₁* + a₁₂a₂₂*))
//! ```
//!
//! so one count per photon at every phase requires the two path rows to be
//! orthogonal, and to be unit vectors.

use core::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use thiserror::Error;

use crate::interferometer::DetectionDistribution;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementMatrix {
    pub a: [[Complex64; 2]; 2],
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn phase(theta: f64) -> Complex64 {
    c(libm::cos(theta), libm::sin(theta))
}

impl MeasurementMatrix {
    pub fn new(a11: Complex64, a12: Complex64, a21: Complex64, a22: Complex64) -> Self {
        MeasurementMatrix { a: [[a11, a12], [a21, a22]] }
    }

    pub fn identity() -> Self {
        Self::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0))
    }

    /// Lossless 50:50 splitter with a `π/2` reflection phase.
    pub fn symmetric_splitter() -> Self {
        let r = FRAC_1_SQRT_2;
        Self::new(c(r, 0.0), c(0.0, r), c(0.0, r), c(r, 0.0))
    }

    pub fn hadamard() -> Self {
        let r = FRAC_1_SQRT_2;
        Self::new(c(r, 0.0), c(r, 0.0), c(r, 0.0), c(-r, 0.0))
    }

    /// Splitter whose D(-) port sees the two paths a quarter period off the
    /// unitary value, giving `P(+1|Φ) = ½(1 + cos Φ)` and
    /// `P(-1|Φ) = ½(1 + sin Φ)` for balanced paths.
    pub fn pi_quarter_counterexample() -> Self {
        let r = FRAC_1_SQRT_2;
        Self::new(c(r, 0.0), c(r, 0.0), c(r, 0.0), phase(PI / 2.0) * r)
    }

    /// `a₁₁a₂₁* + a₁₂a₂₂*`, the inner product of the two path rows.
    pub fn cross_term(&self) -> Complex64 {
        let [[a11, a12], [a21, a22]] = self.a;
        a11 * a21.conj() + a12 * a22.conj()
    }

    /// Squared norms of the long-path and short-path rows.
    pub fn row_norms(&self) -> [f64; 2] {
        [self.a[0][0].norm_sqr() + self.a[0][1].norm_sqr(), self.a[1][0].norm_sqr() + self.a[1][1].norm_sqr()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum AmplitudeError {
    #[error("path amplitudes have total weight {0}, expected 1")]
    NotNormalized(f64),
}

/// Amplitudes of the long and short paths arriving at the output splitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathAmplitudes {
    long: Complex64,
    short: Complex64,
}

impl PathAmplitudes {
    pub fn new(long: Complex64, short: Complex64) -> Result<Self, AmplitudeError> {
        let w = long.norm_sqr() + short.norm_sqr();
        if (w - 1.0).abs() > 1e-12 {
            return Err(AmplitudeError::NotNormalized(w));
        }
        Ok(PathAmplitudes { long, short })
    }

    /// `L = S = 1/√2`.
    pub fn balanced() -> Self {
        PathAmplitudes { long: c(FRAC_1_SQRT_2, 0.0), short: c(FRAC_1_SQRT_2, 0.0) }
    }

    pub fn long(&self) -> Complex64 {
        self.long
    }

    pub fn short(&self) -> Complex64 {
        self.short
    }
}

/// `|a₁₁a₂₁* + a₁₂a₂₂*|`; zero exactly when the path rows are orthogonal.
pub fn unitarity_residual(m: &MeasurementMatrix) -> f64 {
    m.cross_term().norm()
}

/// Detection probabilities with the interferometer phase on the long path.
///
/// Probabilities are reported as computed. A non-unitary matrix shows up as
/// a total different from 1.
pub fn outcome_distribution(m: &MeasurementMatrix, amps: &PathAmplitudes, phi: f64) -> DetectionDistribution {
    let l = amps.long * phase(phi);
    let s = amps.short;
    let plus = m.a[0][0] * l + m.a[1][0] * s;
    let minus = m.a[0][1] * l + m.a[1][1] * s;
    DetectionDistribution::one_count(plus.norm_sqr(), minus.norm_sqr())
}

/// `2 Re(L S* e^{iΦ} (a₁₁a₂₁* + a₁₂a₂₂*))`, the part of the total detection
/// probability that oscillates with the phase.
pub fn interference_excess(m: &MeasurementMatrix, amps: &PathAmplitudes, phi: f64) -> f64 {
    2.0 * (amps.long * phase(phi) * amps.short.conj() * m.cross_term()).re
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidityReport {
    pub valid: bool,
    /// Orthogonality residual of the path rows.
    pub orthogonality: f64,
    /// `|‖row‖² - 1|` for the long and short path.
    pub norm_deviation: [f64; 2],
}

pub fn is_valid_quantum_measurement(m: &MeasurementMatrix, tol: f64) -> ValidityReport {
    let orthogonality = unitarity_residual(m);
    let [n0, n1] = m.row_norms();
    let norm_deviation = [(n0 - 1.0).abs(), (n1 - 1.0).abs()];
    ValidityReport {
        valid: orthogonality <= tol && norm_deviation[0] <= tol && norm_deviation[1] <= tol,
        orthogonality,
        norm_deviation,
    }
}
