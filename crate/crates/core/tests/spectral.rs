//! Response coefficients against independent oracles: closed forms for a
//! resonant Lorentzian and brute-force composite Simpson quadrature.

use std::f64::consts::PI;

use azd_otto::{accumulated_rate, markovian_rate, response_coefficient, spectral_density, QuadratureConfig, SpectralModel};
use proptest::prelude::*;

fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + h * k as f64);
    }
    sum * h / 3.0
}

fn sinc(x: f64, t: f64) -> f64 {
    if x == 0.0 {
        t
    } else {
        (x * t).sin() / x
    }
}

fn lorentz(nu: f64, gamma0: f64, width: f64, center: f64, beta: f64) -> f64 {
    let a = nu.abs();
    let g = gamma0 * width * width / ((a - center).powi(2) + width * width);
    if nu >= 0.0 {
        g
    } else {
        (-beta * a).exp() * g
    }
}

/// Brute-force R on `[-center - span, center + span]`, covering both peaks.
fn simpson_response(gamma0: f64, width: f64, center: f64, beta: f64, omega: f64, t: f64, span: f64) -> f64 {
    let f = |nu: f64| lorentz(nu, gamma0, width, center, beta) * sinc(nu - omega, t);
    simpson(f, -center - span, center + span, 4_000_000)
}

#[test]
fn resonant_lorentzian_closed_form() {
    // delta = 0: R(omega, t) = gamma0 pi (1 - e^{-width t}) from the positive
    // branch, plus the mirror branch at -omega, which to first order in
    // width/omega contributes gamma0 pi width e^{-width t} e^{-beta omega}
    // sin(2 omega t) / (2 omega).
    let (gamma0, width, omega, beta) = (1.0, 0.4, 1000.0, 1e-4);
    let m = SpectralModel::lorentzian(gamma0, width, 0.0, beta, omega).unwrap();
    let q = QuadratureConfig::default();
    for &t in &[0.05, 0.3, 1.0, 2.5, 7.0, 30.0] {
        let r = response_coefficient(&m, omega, t, &q).unwrap();
        let positive = gamma0 * PI * (1.0 - (-width * t).exp());
        let mirror = gamma0 * PI * width * (-width * t).exp() * (-beta * omega).exp() * (2.0 * omega * t).sin()
            / (2.0 * omega);
        // Tail truncation of the quadrature domain and the O((width/omega)^2)
        // remainder of the mirror expansion are both below 1e-5 here.
        assert!((r - positive - mirror).abs() < 1e-5, "t = {t}: {r} vs {}", positive + mirror);
    }
}

#[test]
fn resonant_accumulated_rate_closed_form() {
    // J(T) = 2 gamma0 pi (T - (1 - e^{-width T}) / width) up to O(width / omega^2).
    let (gamma0, width, omega) = (1.0, 0.4, 1000.0);
    let m = SpectralModel::lorentzian(gamma0, width, 0.0, 1e-4, omega).unwrap();
    let q = QuadratureConfig::default();
    for &t in &[0.1, 0.5, 1.5, 4.0, 12.0] {
        let j = accumulated_rate(&m, omega, t, &q).unwrap();
        let exact = 2.0 * gamma0 * PI * (t - (1.0 - (-width * t).exp()) / width);
        assert!((j - exact).abs() < 1e-5 * exact.max(1.0), "T = {t}: {j} vs {exact}");
    }
}

#[test]
fn detuned_response_matches_brute_force() {
    let q = QuadratureConfig::default();
    for &(omega, beta, t) in &[(100.0, 0.0005, 0.5), (100.0, 0.0005, 2.0), (80.0, 0.01, 1.3), (100.0, 0.0005, 9.0)] {
        let m = SpectralModel::lorentzian(1.0, 0.4, 2.0, beta, omega).unwrap();
        let center = omega + 2.0;
        let adaptive = response_coefficient(&m, omega, t, &q).unwrap();
        let brute = simpson_response(1.0, 0.4, center, beta, omega, t, 400.0);
        let neg = response_coefficient(&m, -omega, t, &q).unwrap();
        let brute_neg = simpson_response(1.0, 0.4, center, beta, -omega, t, 400.0);
        // The brute-force domain ends 400 beyond each peak; the Lorentzian
        // tail past it carries G-mass width^2 / 400 = 4e-4 per side and is
        // further suppressed by the oscillating kernel, leaving < 1e-5.
        assert!((adaptive - brute).abs() < 1e-5, "+omega, t = {t}: {adaptive} vs {brute}");
        assert!((neg - brute_neg).abs() < 1e-5, "-omega, t = {t}: {neg} vs {brute_neg}");
    }
}

#[test]
fn super_ohmic_response_matches_brute_force() {
    let q = QuadratureConfig::default();
    let (omega, beta, nb, d, s) = (100.0, 0.0005, 0.5, 0.1, 3.0);
    let m = SpectralModel::super_ohmic(1.0, nb, d, s, beta, omega).unwrap();
    let edge = omega - d;
    for &t in &[0.5, 2.0, 15.0] {
        let adaptive = response_coefficient(&m, omega, t, &q).unwrap();
        let f = |nu: f64| spectral_density(&m, nu).unwrap() * sinc(nu - omega, t);
        let brute = simpson(f, edge, edge + 60.0, 400_000) + simpson(f, -edge - 60.0, -edge, 400_000);
        assert!((adaptive - brute).abs() < 1e-7, "t = {t}: {adaptive} vs {brute}");
    }
}

#[test]
fn order_exchange_identity() {
    // J(T) = 2 * integral_0^T R(t) dt, with the time integral done by Simpson.
    let q = QuadratureConfig::default();
    let models = [
        SpectralModel::lorentzian(1.0, 0.4, 2.0, 0.0005, 100.0).unwrap(),
        SpectralModel::super_ohmic(1.0, 0.5, 0.1, 3.0, 0.01, 80.0).unwrap(),
    ];
    for m in &models {
        for &omega in &[m.omega_ref, -m.omega_ref] {
            let t_end = 2.0;
            // R carries a small component oscillating at 2 omega from the mirror
            // branch, so the time grid resolves that period.
            let integral = simpson(|t| response_coefficient(m, omega, t, &q).unwrap(), 0.0, t_end, 8000);
            let j = accumulated_rate(m, omega, t_end, &q).unwrap();
            // Each R(t) truncates its Lorentzian tails on a t-dependent window,
            // which bounds the agreement at the 1e-7 level.
            assert!((j - 2.0 * integral).abs() < 1e-6 * j.abs().max(1.0), "{j} vs {}", 2.0 * integral);
        }
    }
}

#[test]
fn continuous_across_resonance() {
    let q = QuadratureConfig::default();
    let m = SpectralModel::lorentzian(1.0, 0.4, 0.0, 0.0005, 100.0).unwrap();
    for &t in &[0.5, 5.0] {
        let at = response_coefficient(&m, 100.0, t, &q).unwrap();
        let below = response_coefficient(&m, 100.0 - 1e-9, t, &q).unwrap();
        let above = response_coefficient(&m, 100.0 + 1e-9, t, &q).unwrap();
        assert!((at - below).abs() < 1e-8 && (at - above).abs() < 1e-8);
    }
}

#[test]
fn markov_limit_at_long_times() {
    let q = QuadratureConfig::default();
    let m = SpectralModel::lorentzian(1.0, 0.4, 2.0, 0.0005, 100.0).unwrap();
    let r = response_coefficient(&m, 100.0, 60.0, &q).unwrap();
    let markov = markovian_rate(&m, 100.0).unwrap();
    assert!((markov - 0.120830).abs() < 1e-6);
    assert!((r - markov).abs() / markov < 1e-2);
}

#[test]
fn domain_doubling_sensitivity() {
    // Doubling the truncation window moves the Lorentzian result by the
    // weight of the cut 1/x^2 tail; measured at about 1e-4 relative for the
    // default factor of 40 and shrinking quadratically with the factor.
    let m = SpectralModel::lorentzian(1.0, 0.4, 2.0, 0.0005, 100.0).unwrap();
    let base = QuadratureConfig::default();
    let doubled = QuadratureConfig {
        window_halfwidth_factor: 2.0 * base.window_halfwidth_factor,
        ..base
    };
    for &t in &[0.5, 2.0, 10.0] {
        let a = response_coefficient(&m, 100.0, t, &base).unwrap();
        let b = response_coefficient(&m, 100.0, t, &doubled).unwrap();
        let scale = markovian_rate(&m, 102.0).unwrap();
        assert!((a - b).abs() / scale < 5e-4, "t = {t}: {a} vs {b}");
    }

    // The super-Ohmic spectrum decays exponentially and is insensitive.
    let so = SpectralModel::super_ohmic(1.0, 0.5, 0.1, 3.0, 0.0005, 100.0).unwrap();
    let a = response_coefficient(&so, 100.0, 1.0, &base).unwrap();
    let b = response_coefficient(&so, 100.0, 1.0, &doubled).unwrap();
    assert!((a - b).abs() < 1e-8 * a.abs().max(1.0));
}

#[test]
fn quadrature_failure_is_reported() {
    let m = SpectralModel::lorentzian(1.0, 0.4, 2.0, 0.0005, 100.0).unwrap();
    let q = QuadratureConfig {
        rel_tol: 1e-15,
        abs_tol: 1e-300,
        max_subdivisions: 1,
        ..QuadratureConfig::default()
    };
    let err = response_coefficient(&m, 100.0, 2.0, &q).unwrap_err();
    assert_eq!(err.kind(), azd_otto::ErrorKind::Quadrature);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kms_detailed_balance(
        nu in 0.01f64..300.0,
        beta in 1e-4f64..0.05,
        width in 0.05f64..2.0,
        detuning in -5.0f64..5.0,
        lorentzian in any::<bool>(),
    ) {
        let m = if lorentzian {
            SpectralModel::lorentzian(1.0, width, detuning, beta, 100.0).unwrap()
        } else {
            SpectralModel::super_ohmic(1.0, width, detuning, 3.0, beta, 100.0).unwrap()
        };
        let pos = spectral_density(&m, nu).unwrap();
        let neg = spectral_density(&m, -nu).unwrap();
        prop_assert!(pos >= 0.0 && neg >= 0.0);
        prop_assert!((neg - (-beta * nu).exp() * pos).abs() <= 1e-15 * pos.max(1e-300));
    }

    #[test]
    fn accumulated_rate_is_nonnegative_and_starts_at_zero(
        t in 0.0f64..20.0,
        omega in prop_oneof![Just(100.0f64), Just(-100.0f64)],
        detuning in -3.0f64..3.0,
    ) {
        let m = SpectralModel::lorentzian(1.0, 0.4, detuning, 0.0005, 100.0).unwrap();
        let q = QuadratureConfig::default();
        prop_assert!(accumulated_rate(&m, omega, t, &q).unwrap() >= 0.0);
        prop_assert_eq!(accumulated_rate(&m, omega, 0.0, &q).unwrap(), 0.0);
        prop_assert_eq!(response_coefficient(&m, omega, 0.0, &q).unwrap(), 0.0);
    }
}
