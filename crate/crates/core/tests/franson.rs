use std::f64::consts::PI;

use nonlocal_core::entangle::{
    check_entanglement_conditions, ideal_joint_distribution, physical_joint_distribution, FransonConfig,
};
use nonlocal_core::Spectrum;

const TOL: f64 = 1e-10;

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

/// Rectangular spectra with the given coherence times; delays `τ` and
/// `τ - dt`. The pump center makes `ωτ` a multiple of `2π`.
fn config(tc: f64, tc_ph: f64, tau: f64, dt: f64, window: Option<f64>) -> FransonConfig {
    let offset_center = 2.0 * PI * 1e4;
    let tau_b = tau - dt;
    // Φ = (ω/2)(τ_A + τ_B) + ω_ph(τ_A - τ_B); pick ω so that Φ ≡ 0.
    let k = (1e6 * (tau + tau_b) / 2.0).round();
    let omega = 2.0 * (2.0 * PI * k - offset_center * dt) / (tau + tau_b);
    let pump = Spectrum::rectangular(omega, 2.0 * PI / tc).unwrap();
    let offset = Spectrum::rectangular(offset_center, 2.0 * PI / tc_ph).unwrap();
    FransonConfig::new(pump, offset, tau, tau_b, window).unwrap()
}

fn wrapped(phi: f64) -> f64 {
    let r = phi.rem_euclid(2.0 * PI);
    r.min(2.0 * PI - r)
}

#[test]
fn matched_interferometers_reach_full_visibility() {
    let cfg = config(2e3, 5e-4, 1.0, 5e-7, Some(0.5));
    assert!(check_entanglement_conditions(&cfg, 1e3).satisfied);
    let r = physical_joint_distribution(&cfg, TOL).unwrap();
    assert!(wrapped(r.phase) < 1e-6, "phase {}", r.phase);
    assert!(r.distribution.concordance() >= 0.99);
    assert!(r.visibility >= 0.98);
    assert_eq!(r.kept, [true, true, false, false]);
}

#[test]
fn visibility_matches_sinc_product() {
    for (tc, tc_ph, dt) in [(1e3, 1e-3, 1e-4), (20.0, 1e-2, 3e-3), (5.0, 1e-2, 0.0)] {
        let cfg = config(tc, tc_ph, 1.0, dt, Some(0.5));
        let r = physical_joint_distribution(&cfg, TOL).unwrap();
        let dw = 2.0 * PI / tc;
        let dw_ph = 2.0 * PI / tc_ph;
        let want = (sinc(dw * (2.0 - dt) / 4.0) * sinc(dw_ph * dt / 2.0)).abs();
        assert!((r.visibility - want).abs() < 1e-8, "{} vs {want}", r.visibility);
    }
}

#[test]
fn mismatched_delays_wash_out() {
    // Δω_ph (τ_A - τ_B) = 2π.
    let cfg = config(1e3, 1e-3, 1.0, 1e-3, Some(0.5));
    let r = physical_joint_distribution(&cfg, TOL).unwrap();
    assert!(r.visibility <= 0.1, "{}", r.visibility);
    assert!((r.distribution.concordance() - 0.5).abs() < 1e-8);
}

#[test]
fn narrow_pump_broad_offset_matches_ideal() {
    for phase_shift in [0.0, 0.7, PI / 2.0, 2.5] {
        let mut cfg = config(1e4, 1e-4, 1.0, 0.0, Some(0.5));
        // Shift the pump center to move Φ.
        let pump = Spectrum::rectangular(cfg.pump().center() + phase_shift, cfg.pump().bandwidth()).unwrap();
        cfg = FransonConfig::new(pump, *cfg.photon_offset(), 1.0, 1.0, Some(0.5)).unwrap();
        let r = physical_joint_distribution(&cfg, TOL).unwrap();
        let ideal = ideal_joint_distribution(r.phase, 1.0);
        for (x, y) in r.distribution.p.iter().flatten().zip(ideal.p.iter().flatten()) {
            assert!((x - y).abs() < 0.01 * 0.25, "{x} vs {y}");
        }
    }
}

#[test]
fn without_post_selection_visibility_is_halved() {
    let cfg = config(1e3, 1e-3, 1.0, 1e-6, None);
    let r = physical_joint_distribution(&cfg, TOL).unwrap();
    assert!(r.visibility <= 0.5 + 1e-12);
    assert!(r.visibility > 0.49);
    assert_eq!(r.kept, [true; 4]);
}

#[test]
fn post_selected_marginals_are_half() {
    for dt in [0.0, 1e-5, 1e-3, 7e-3] {
        let cfg = config(50.0, 1e-2, 1.0, dt, Some(0.5));
        let r = physical_joint_distribution(&cfg, TOL).unwrap();
        assert!((r.distribution.marginal_a() - 0.5).abs() < 1e-9);
        assert!((r.distribution.marginal_b() - 0.5).abs() < 1e-9);
    }
}

#[test]
fn visibility_falls_with_each_coherence_ratio() {
    let ratios = [1e3, 1e2, 10.0, 1.0];
    // Pump coherence τ_c/τ.
    let mut last = f64::INFINITY;
    for r in ratios {
        let v = physical_joint_distribution(&config(r, 1e-3, 1.0, 1e-6, Some(0.5)), TOL).unwrap().visibility;
        assert!(v <= last + 1e-12, "pump ratio {r}: {v} > {last}");
        last = v;
    }
    // Alignment τ_c^ph/|Δτ|.
    let mut last = f64::INFINITY;
    for r in ratios {
        let v = physical_joint_distribution(&config(1e3, 1e-3, 1.0, 1e-3 / r, Some(0.5)), TOL).unwrap().visibility;
        assert!(v <= last + 1e-12, "alignment ratio {r}: {v} > {last}");
        last = v;
    }
    // Separation τ/τ_c^ph.
    let mut last = f64::INFINITY;
    for r in ratios {
        let v = physical_joint_distribution(&config(1e3, 1.0 / r, 1.0, 0.0, Some(0.5)), TOL).unwrap().visibility;
        assert!(v <= last + 1e-12, "separation ratio {r}: {v} > {last}");
        last = v;
    }
}
