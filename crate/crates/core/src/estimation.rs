//! Quantum and classical Fisher information for the deformation parameter λ.

use std::f64::consts::SQRT_2;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::Profile;
use crate::states::OscillatorState;
use crate::susy::{self, DeformationParameter, LevelTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FisherMethod {
    ClosedForm,
    PureOverlap,
    MixedSum,
    ClassicalPosition,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FisherMetadata {
    /// Eigenstates carried in the sum.
    pub levels: usize,
    pub grid_points: usize,
    /// Same quantity with twice as many levels.
    pub doubled_levels_value: Option<f64>,
    /// Same quantity with finite-difference λ-derivatives (Richardson, steps h and h/2).
    pub finite_difference_value: Option<f64>,
    /// Either cross-check disagreed beyond the profile's tolerance.
    pub flagged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FisherResult {
    pub value: f64,
    pub method: FisherMethod,
    pub metadata: FisherMetadata,
}

/// H(λ) = (2/3) / (1 + √2 λ)² for the ground state.
pub fn qfi_closed_form(lam: DeformationParameter) -> f64 {
    let d = 1.0 + SQRT_2 * lam.value();
    2.0 / 3.0 / (d * d)
}

/// QFI of the ground state, 4[⟨∂φ₀|∂φ₀⟩ + ⟨∂φ₀|φ₀⟩²] with the analytic ∂_λφ₀.
/// The second term vanishes for a normalized real state.
pub fn qfi_pure(lam: DeformationParameter) -> Result<FisherResult> {
    qfi(&OscillatorState::ground(lam))
}

fn pure_overlap(table: &LevelTable) -> f64 {
    let v = table.values(0);
    let d = table.lambda_derivative(0);
    let dd = table.integrate_product(d, d, |_| 1.0);
    let dv = table.integrate_product(d, v, |_| 1.0);
    4.0 * (dd + dv * dv)
}

/// 2 Σ_{n≠m} (p_n − p_m)²/(p_n + p_m) ⟨φ_m|∂φ_n⟩², with the m beyond the carried levels
/// (where p_m is negligible) folded in through ‖∂φ_n‖² − Σ_m ⟨φ_m|∂φ_n⟩².
///
/// `derivs[n]` is ∂_λφ_n on the table's nodes.
fn mixed_sum(table: &LevelTable, derivs: &[&[f64]], pops: &[f64]) -> f64 {
    let k = pops.len();
    let o = DMatrix::from_fn(k, k, |m, n| table.integrate_product(table.values(m), derivs[n], |_| 1.0));
    let mut inner = 0.0;
    for n in 0..k {
        for m in n + 1..k {
            let w = (pops[n] - pops[m]).powi(2) / (pops[n] + pops[m]);
            // ⟨φ_n|∂φ_m⟩ = −⟨φ_m|∂φ_n⟩ for real, orthonormal φ
            inner += w * (o[(m, n)].powi(2) + o[(n, m)].powi(2));
        }
    }
    let mut outer = 0.0;
    for n in 0..k {
        let norm = table.integrate_product(derivs[n], derivs[n], |_| 1.0);
        let inside: f64 = (0..k).map(|m| o[(m, n)].powi(2)).sum();
        outer += pops[n] * (norm - inside).max(0.0);
    }
    2.0 * inner + 4.0 * outer
}

fn analytic_derivs(table: &LevelTable) -> Vec<&[f64]> {
    (0..table.levels()).map(|k| table.lambda_derivative(k)).collect()
}

/// ∂_λφ_n on `base`'s nodes from tables at λ ± h, λ ± h/2 (one Richardson step).
fn finite_difference_derivs(base: &LevelTable) -> Result<Vec<Vec<f64>>> {
    let lam = base.lambda();
    let h = susy::lambda_step(lam);
    let (lo, hi) = susy::fd_parameters(lam, h)?;
    let levels = base.levels();
    let build = |l| LevelTable::new(l, levels, base.rule().clone());
    let (m2, m1, p1, p2) = (build(lo[0])?, build(lo[1])?, build(hi[0])?, build(hi[1])?);
    Ok((0..levels)
        .map(|k| {
            (0..base.nodes().len())
                .map(|i| {
                    let d_h = (p2.values(k)[i] - m2.values(k)[i]) / (2.0 * h);
                    let d_half = (p1.values(k)[i] - m1.values(k)[i]) / h;
                    (4.0 * d_half - d_h) / 3.0
                })
                .collect()
        })
        .collect())
}

fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// QFI for λ of a ground or Gibbs state.
///
/// The populations of the Gibbs state do not depend on λ, so the classical term of the
/// QFI is zero and only the eigenvector term remains. For thermal states the result is
/// re-evaluated with twice the levels and with finite-difference derivatives; a relative
/// disagreement above the profile's `derivative_check_tol` sets `metadata.flagged`.
pub fn qfi(state: &OscillatorState) -> Result<FisherResult> {
    let table = state.table()?;
    let grid_points = table.nodes().len();
    if state.is_pure() {
        let value = pure_overlap(table);
        let metadata = FisherMetadata { levels: 1, grid_points, ..Default::default() };
        return Ok(FisherResult { value, method: FisherMethod::PureOverlap, metadata });
    }
    let pops = state.populations();
    let value = mixed_sum(table, &analytic_derivs(table), pops);

    let profile = state.profile();
    let tol = profile.derivative_check_tol;
    let fd = finite_difference_derivs(table)?;
    let fd_refs: Vec<&[f64]> = fd.iter().map(Vec::as_slice).collect();
    let fd_value = mixed_sum(table, &fd_refs, pops);

    let doubled_levels = (2 * pops.len()).min(crate::numerics::HERMITE_MAX_ORDER);
    let t = state.temperature().unwrap_or_default();
    let bigger = OscillatorState::thermal_with_cut(state.lambda(), t, doubled_levels - 1, *profile)?;
    let big_table = bigger.table()?;
    let doubled = mixed_sum(big_table, &analytic_derivs(big_table), bigger.populations());

    let flagged = relative_gap(value, fd_value) > tol || relative_gap(value, doubled) > tol;
    if flagged {
        log::warn!(
            "thermal QFI at lambda={}, T={t}: {value} vs fd {fd_value} vs doubled {doubled}",
            state.lambda().value()
        );
    }
    let metadata = FisherMetadata {
        levels: pops.len(),
        grid_points,
        doubled_levels_value: Some(doubled),
        finite_difference_value: Some(fd_value),
        flagged,
    };
    Ok(FisherResult { value, method: FisherMethod::MixedSum, metadata })
}

/// Thermal QFI H(λ; T), keeping at least `n_cut + 1` levels.
pub fn qfi_thermal(lam: DeformationParameter, t: f64, n_cut: usize) -> Result<FisherResult> {
    qfi(&OscillatorState::thermal_with_cut(lam, t, n_cut, Profile::default())?)
}

/// F = ∫ (∂_λ p(x|λ))² / p(x|λ) dx for p(x|λ) = ρ(x, x), with the integrand dropped where
/// p < 1e-300.
pub fn classical_fi(state: &OscillatorState) -> Result<FisherResult> {
    let table = state.table()?;
    let n = table.nodes().len();
    let mut p = vec![0.0; n];
    let mut dp = vec![0.0; n];
    for (k, &pk) in state.populations().iter().enumerate() {
        let v = table.values(k);
        let d = table.lambda_derivative(k);
        for i in 0..n {
            p[i] += pk * v[i] * v[i];
            dp[i] += 2.0 * pk * v[i] * d[i];
        }
    }
    let integrand: Vec<f64> = (0..n).map(|i| if p[i] < 1e-300 { 0.0 } else { dp[i] * dp[i] / p[i] }).collect();
    let value = table.rule().apply_samples(&integrand);
    let metadata = FisherMetadata { levels: state.levels(), grid_points: n, ..Default::default() };
    Ok(FisherResult { value, method: FisherMethod::ClassicalPosition, metadata })
}

/// Position-measurement Fisher information for the ground state (`t = None`) or a Gibbs state.
pub fn classical_fi_position(lam: DeformationParameter, t: Option<f64>) -> Result<FisherResult> {
    classical_fi(&OscillatorState::new(lam, t, Profile::default())?)
}

/// Quantum Cramér–Rao bound 1/(M H) for `m` repetitions.
pub fn qcrb_variance(lam: DeformationParameter, m: u64, t: Option<f64>) -> Result<f64> {
    if m == 0 {
        return Err(Error::domain("qcrb_variance", "need at least one repetition"));
    }
    let h = match t {
        None => qfi_pure(lam)?.value,
        Some(t) => qfi(&OscillatorState::thermal(lam, t)?)?.value,
    };
    if h <= 0.0 {
        return Err(Error::InfiniteBound { information: h });
    }
    Ok(1.0 / (m as f64 * h))
}
