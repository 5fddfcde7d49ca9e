//! Spectral densities, coherence times and integration over a spectrum.

use core::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use thiserror::Error;

use crate::quadrature::{self, IntegrationError};

/// Absolute tolerance used when callers have no better choice.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Gaussian spectra are truncated at this many standard deviations.
pub const GAUSSIAN_TRUNCATION_SIGMAS: f64 = 5.0;

/// Physical constants used for energy-time products.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    /// Planck constant (J s).
    pub h: f64,
    /// Reduced Planck constant (J s).
    pub hbar: f64,
    /// Speed of light (m/s).
    pub c: f64,
}

impl Constants {
    /// CODATA 2018 exact values.
    pub const CODATA: Constants =
        Constants { h: 6.626_070_15e-34, hbar: 6.626_070_15e-34 / (2.0 * PI), c: 299_792_458.0 };

    /// Natural units with `ħ = c = 1`, so `h = 2π`.
    pub const NATURAL: Constants = Constants { h: 2.0 * PI, hbar: 1.0, c: 1.0 };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    /// Flat density over `[center - Δω/2, center + Δω/2]`.
    Rectangular,
    /// Gaussian with full width at half maximum `Δω`, truncated at ±5σ and
    /// renormalized over the truncated support.
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum SpectrumError {
    #[error("bandwidth must be positive and finite, got {0}")]
    Bandwidth(f64),
    #[error("center {center} does not keep the support [{low}, {high}] at positive frequencies")]
    NegativeSupport { center: f64, low: f64, high: f64 },
}

/// Normalized spectral density `K δ(ω)` over angular frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spectrum {
    shape: Shape,
    center: f64,
    bandwidth: f64,
}

impl Spectrum {
    pub fn new(shape: Shape, center: f64, bandwidth: f64) -> Result<Self, SpectrumError> {
        if !(bandwidth > 0.0) || !bandwidth.is_finite() {
            return Err(SpectrumError::Bandwidth(bandwidth));
        }
        let s = Spectrum { shape, center, bandwidth };
        let (low, high) = s.support();
        if !center.is_finite() || !(low > 0.0) {
            return Err(SpectrumError::NegativeSupport { center, low, high });
        }
        Ok(s)
    }

    pub fn rectangular(center: f64, bandwidth: f64) -> Result<Self, SpectrumError> {
        Self::new(Shape::Rectangular, center, bandwidth)
    }

    pub fn gaussian(center: f64, bandwidth: f64) -> Result<Self, SpectrumError> {
        Self::new(Shape::Gaussian, center, bandwidth)
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    /// Standard deviation of the gaussian shape; for rectangular spectra the
    /// standard deviation of the flat density.
    pub fn sigma(&self) -> f64 {
        match self.shape {
            Shape::Rectangular => self.bandwidth / libm::sqrt(12.0),
            Shape::Gaussian => self.bandwidth / (2.0 * libm::sqrt(2.0 * core::f64::consts::LN_2)),
        }
    }

    /// Half-width of the support around the center.
    pub fn half_support(&self) -> f64 {
        match self.shape {
            Shape::Rectangular => 0.5 * self.bandwidth,
            Shape::Gaussian => GAUSSIAN_TRUNCATION_SIGMAS * self.sigma(),
        }
    }

    pub fn support(&self) -> (f64, f64) {
        let h = self.half_support();
        (self.center - h, self.center + h)
    }

    /// The normalization factor `K`.
    pub fn normalization(&self) -> f64 {
        match self.shape {
            Shape::Rectangular => 1.0 / self.bandwidth,
            Shape::Gaussian => {
                let sigma = self.sigma();
                let mass = libm::erf(GAUSSIAN_TRUNCATION_SIGMAS / SQRT_2);
                1.0 / (sigma * libm::sqrt(2.0 * PI) * mass)
            }
        }
    }

    /// Density at the offset `u = ω - center`.
    fn density_at_offset(&self, u: f64, k: f64) -> f64 {
        if u.abs() > self.half_support() {
            return 0.0;
        }
        match self.shape {
            Shape::Rectangular => k,
            Shape::Gaussian => {
                let z = u / self.sigma();
                k * libm::exp(-0.5 * z * z)
            }
        }
    }

    /// Normalized density `K δ(ω)`; zero outside the support.
    pub fn density(&self, omega: f64) -> f64 {
        self.density_at_offset(omega - self.center, self.normalization())
    }
}

/// Emission-time uncertainty `τ_c = 2π/Δω`, in seconds when `Δω` is in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct CoherenceTime(f64);

impl CoherenceTime {
    /// Returns `None` unless `tau_c` is strictly positive and finite.
    pub fn new(tau_c: f64) -> Option<Self> {
        (tau_c > 0.0 && tau_c.is_finite()).then_some(CoherenceTime(tau_c))
    }

    pub fn seconds(self) -> f64 {
        self.0
    }
}

pub fn coherence_time(s: &Spectrum) -> CoherenceTime {
    CoherenceTime(2.0 * PI / s.bandwidth())
}

/// `τ_c ΔE` with `τ_c = 2π/Δω` and `ΔE = ħΔω`, in CODATA units. Equals `h`.
pub fn heisenberg_product(s: &Spectrum) -> f64 {
    heisenberg_product_with(s, coherence_time(s), &Constants::CODATA)
}

/// `τ_c ħ Δω` for an explicit emission window, which may exceed `2π/Δω`.
pub fn heisenberg_product_with(s: &Spectrum, tau_c: CoherenceTime, constants: &Constants) -> f64 {
    tau_c.seconds() * constants.hbar * s.bandwidth()
}

/// `∫ f(ω) K δ(ω) dω` over the support of `s`, to absolute tolerance `tol`.
pub fn integrate_over_spectrum<F: Fn(f64) -> f64>(s: &Spectrum, f: F, tol: f64) -> Result<f64, IntegrationError> {
    let k = s.normalization();
    let h = s.half_support();
    let center = s.center;
    quadrature::integrate(|u| f(center + u) * s.density_at_offset(u, k), -h, h, tol).map(|e| e.value)
}

/// Characteristic function `E[exp(iωx)]` of the spectrum.
///
/// The carrier `exp(iω₀x)` is factored out and only the envelope over the
/// offset `ω - ω₀` is integrated, so large `ω₀x` does not cost quadrature
/// nodes. `tol` bounds the error of each of the two envelope integrals.
pub fn coherence_factor(s: &Spectrum, x: f64, tol: f64) -> Result<Complex64, IntegrationError> {
    let k = s.normalization();
    let h = s.half_support();
    let re = quadrature::integrate(|u| libm::cos(u * x) * s.density_at_offset(u, k), -h, h, tol)?.value;
    let im = quadrature::integrate(|u| libm::sin(u * x) * s.density_at_offset(u, k), -h, h, tol)?.value;
    let carrier = Complex64::new(libm::cos(s.center * x), libm::sin(s.center * x));
    Ok(carrier * Complex64::new(re, im))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sinc(x: f64) -> f64 {
        if x == 0.0 {
            1.0
        } else {
            libm::sin(x) / x
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(Spectrum::rectangular(10.0, 0.0), Err(SpectrumError::Bandwidth(_))));
        assert!(matches!(Spectrum::rectangular(10.0, -1.0), Err(SpectrumError::Bandwidth(_))));
        assert!(matches!(Spectrum::rectangular(1.0, 2.0), Err(SpectrumError::NegativeSupport { .. })));
        // Gaussian support is ±5σ ≈ ±2.12 Δω.
        assert!(Spectrum::gaussian(1.5, 1.0).is_err());
        assert!(Spectrum::gaussian(2.2, 1.0).is_ok());
    }

    #[test]
    fn coherence_time_examples() {
        let ghz = Spectrum::rectangular(2.0 * PI * 1e15, 2.0 * PI * 1e9).unwrap();
        assert!((coherence_time(&ghz).seconds() - 1e-9).abs() < 1e-24);
        let s = Spectrum::rectangular(100.0, 2.0 * PI).unwrap();
        assert_eq!(coherence_time(&s).seconds(), 1.0);
        let s = Spectrum::rectangular(100.0, 4.0 * PI).unwrap();
        assert_eq!(coherence_time(&s).seconds(), 0.5);
    }

    #[test]
    fn heisenberg_equality_and_scaling() {
        let s = Spectrum::rectangular(2.0 * PI * 1e15, 2.0 * PI * 1e9).unwrap();
        let ratio = heisenberg_product(&s) / Constants::CODATA.h;
        assert!((ratio - 1.0).abs() < 1e-12, "{ratio}");

        let doubled = CoherenceTime::new(2.0 * coherence_time(&s).seconds()).unwrap();
        let ratio = heisenberg_product_with(&s, doubled, &Constants::CODATA) / Constants::CODATA.h;
        assert!((ratio - 2.0).abs() < 1e-12);

        let natural = heisenberg_product_with(&s, coherence_time(&s), &Constants::NATURAL);
        assert!((natural - Constants::NATURAL.h).abs() < 1e-12);
    }

    #[test]
    fn normalization_both_shapes() {
        for s in [
            Spectrum::rectangular(50.0, 3.0).unwrap(),
            Spectrum::gaussian(50.0, 3.0).unwrap(),
            Spectrum::gaussian(1e6, 1e3).unwrap(),
        ] {
            let total = integrate_over_spectrum(&s, |_| 1.0, 1e-12).unwrap();
            assert!((total - 1.0).abs() < 1e-10, "{s:?}: {total}");
        }
    }

    #[test]
    fn cosine_matches_sinc() {
        let (w0, dw, tau) = (40.0, 2.0, 1.3);
        let s = Spectrum::rectangular(w0, dw).unwrap();
        let got = integrate_over_spectrum(&s, |w| libm::cos(w * tau), 1e-12).unwrap();
        let want = libm::cos(w0 * tau) * sinc(dw * tau / 2.0);
        assert!((got - want).abs() < 1e-10);
    }

    #[test]
    fn destructive_condition_vanishes() {
        let tau = 0.7;
        let s = Spectrum::rectangular(33.0, 2.0 * PI / tau).unwrap();
        let got = integrate_over_spectrum(&s, |w| libm::cos(w * tau), 1e-12).unwrap();
        assert!(got.abs() < 1e-10, "{got}");
    }

    #[test]
    fn coherence_factor_rectangular_is_sinc() {
        let s = Spectrum::rectangular(1e5, 6.0).unwrap();
        for x in [0.0, 0.1, 0.5, 1.0, 2.0] {
            let z = coherence_factor(&s, x, 1e-12).unwrap();
            let env = sinc(3.0 * x);
            assert!((z.norm() - env.abs()).abs() < 1e-10);
            let want = Complex64::new(libm::cos(1e5 * x), libm::sin(1e5 * x)) * env;
            assert!((z - want).norm() < 1e-10);
        }
    }

    #[test]
    fn gaussian_coherence_decays() {
        // Untruncated gaussian: |E[e^{iux}]| = exp(-σ²x²/2).
        let s = Spectrum::gaussian(1e4, 10.0).unwrap();
        let sigma = s.sigma();
        for x in [0.0, 0.05, 0.1, 0.2] {
            let z = coherence_factor(&s, x, 1e-12).unwrap();
            let want = libm::exp(-0.5 * sigma * sigma * x * x);
            assert!((z.norm() - want).abs() < 1e-5, "{x}: {} vs {want}", z.norm());
        }
    }
}
