//! Derived quantities checked against routes written independently of the library internals.

use std::f64::consts::{PI, SQRT_2};

use isosho_core::{estimation, measures, numerics, states, DeformationParameter, OscillatorState, PhaseSpaceGrid};

fn lam(v: f64) -> DeformationParameter {
    DeformationParameter::new(v).unwrap()
}

// Ground state written out directly: π^{-1/4} e^{-x²/2} √(1+c) / (1 + c I(x)), c = √2 λ.
fn phi0(l: f64, x: f64) -> f64 {
    let c = SQRT_2 * l;
    let i = 0.5 * numerics::erfc(-x);
    PI.powf(-0.25) * (-0.5 * x * x).exp() * (1.0 + c).sqrt() / (1.0 + c * i)
}

fn trapezoid(f: impl Fn(f64) -> f64) -> f64 {
    let h = 1.0 / 128.0;
    (-1536..=1536).map(|k| f(k as f64 * h)).sum::<f64>() * h
}

#[test]
fn ground_qfi_from_numerical_parameter_derivative() {
    for l in [0.3, 3.0, 30.0] {
        let d = 1e-4 * (1.0 + l);
        let h = 4.0 * trapezoid(|x| ((phi0(l + d, x) - phi0(l - d, x)) / (2.0 * d)).powi(2));
        let closed = estimation::qfi_closed_form(lam(l));
        assert!((h - closed).abs() / closed < 1e-6, "lambda {l}: {h} vs {closed}");
    }
}

#[test]
fn ground_position_moments_from_direct_integration() {
    for l in [0.5, 20.0, 400.0] {
        let m = measures::quadrature_moments(&OscillatorState::ground(lam(l))).unwrap();
        let mean = trapezoid(|x| x * phi0(l, x).powi(2));
        let var = trapezoid(|x| x * x * phi0(l, x).powi(2)) - mean * mean;
        assert!((m.var_x() - var).abs() < 1e-9, "lambda {l}: {} vs {var}", m.var_x());
    }
}

#[test]
fn thermal_entropy_and_purity_from_bose_sums() {
    for t in [0.25_f64, 0.33, 0.5, 2.0] {
        let q = (-1.0 / t).exp();
        let p: Vec<f64> = (0..2000).map(|k| (1.0 - q) * q.powi(k)).collect();
        let s: f64 = p.iter().filter(|&&v| v > 0.0).map(|v| -v * v.ln()).sum();
        let purity: f64 = p.iter().map(|v| v * v).sum();
        assert!((states::thermal_entropy(t).unwrap() - s).abs() < 1e-10);
        assert!((states::thermal_purity(t).unwrap() - purity).abs() < 1e-12);
    }
}

#[test]
fn harmonic_thermal_state_is_gaussian_with_bose_statistics() {
    let t: f64 = 0.5;
    let nbar = 1.0 / ((1.0 / t).exp() - 1.0);
    let st = OscillatorState::thermal(lam(0.0), t).unwrap();
    let f = measures::fano_factor(&st).unwrap();
    assert!((f.mean - nbar).abs() < 1e-9);
    assert!((f.value - (1.0 + nbar)).abs() < 1e-8);
    let m = measures::quadrature_moments(&st).unwrap();
    assert!((m.var_x() - (nbar + 0.5)).abs() < 1e-9);
    assert!(measures::nong_delta(&st).unwrap().value.abs() < 1e-8);
    assert!(measures::wigner_negativity_auto(&st).unwrap().value < 1e-8);
}

#[test]
fn harmonic_thermal_wigner_is_the_bose_gaussian() {
    let t: f64 = 0.33;
    let nbar = 1.0 / ((1.0 / t).exp() - 1.0);
    let st = OscillatorState::thermal(lam(0.0), t).unwrap();
    let grid = PhaseSpaceGrid::new((-6.0, 6.0), (-6.0, 6.0), 121, 121).unwrap();
    let w = measures::wigner(&st, &grid).unwrap();
    let s2 = nbar + 0.5;
    for (i, j) in [(60, 60), (70, 55), (80, 90)] {
        let (x, p) = (grid.x(i), grid.p(j));
        let exact = (-(x * x + p * p) / (2.0 * s2)).exp() / (2.0 * PI * s2);
        assert!((w.values[(i, j)] - exact).abs() < 1e-9, "({x}, {p})");
    }
}

#[test]
fn cramer_rao_bound_is_inverse_of_total_information() {
    let l = lam(10.0);
    let h = estimation::qfi_pure(l).unwrap().value;
    let v = estimation::qcrb_variance(l, 100, None).unwrap();
    assert!((v * 100.0 * h - 1.0).abs() < 1e-12);
}
