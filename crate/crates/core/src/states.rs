//! Ground and Gibbs states of the deformed oscillators and their Fock/position
//! representations.

use std::sync::OnceLock;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{self, QuadratureRule};
use crate::profile::Profile;
use crate::susy::{self, DeformationParameter, LevelTable};

/// Gibbs populations p_k = e^{−k/T}/Z, k = 0 … n_cut, with Z = e^{1/T}/(e^{1/T} − 1).
///
/// The weights are *not* renormalized after truncation; `tail` is the exact missing mass
/// Σ_{k>n_cut} p_k = e^{−(n_cut+1)/T}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GibbsWeights {
    pub probabilities: Vec<f64>,
    pub partition: f64,
    pub temperature: f64,
    pub tail: f64,
}

impl GibbsWeights {
    pub fn n_cut(&self) -> usize {
        self.probabilities.len() - 1
    }
}

fn check_temperature(op: &'static str, t: f64) -> Result<()> {
    if t.is_finite() && t > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(op, format!("temperature {t} must be finite and positive")))
    }
}

/// Gibbs weights at temperature `t`, raising `n_cut` until the tail mass is below 1e-12.
pub fn gibbs_weights(t: f64, n_cut: usize) -> Result<GibbsWeights> {
    gibbs_weights_with_tail(t, n_cut, Profile::default().gibbs_tail)
}

pub fn gibbs_weights_with_tail(t: f64, n_cut: usize, tail_target: f64) -> Result<GibbsWeights> {
    check_temperature("gibbs_weights", t)?;
    let beta = 1.0 / t;
    let one_minus_q = -(-beta).exp_m1();
    let tail_after = |n: usize| (-(n as f64 + 1.0) * beta).exp();
    let mut cut = n_cut;
    while tail_after(cut) >= tail_target {
        cut += 1;
        if cut >= numerics::HERMITE_MAX_ORDER {
            return Err(Error::no_convergence(
                "gibbs_weights",
                format!("T = {t} needs more than {} levels", numerics::HERMITE_MAX_ORDER),
            ));
        }
    }
    let probabilities = (0..=cut).map(|k| (-(k as f64) * beta).exp() * one_minus_q).collect();
    Ok(GibbsWeights { probabilities, partition: 1.0 / one_minus_q, temperature: t, tail: tail_after(cut) })
}

/// −Σ p_k ln p_k over the stored weights.
pub fn entropy_of_weights(w: &GibbsWeights) -> f64 {
    -w.probabilities.iter().filter(|&&p| p > 0.0).map(|&p| p * p.ln()).sum::<f64>()
}

/// Von Neumann entropy of the Gibbs state, S = ln Z + ⟨E⟩/T with ⟨E⟩ = 1/(e^{1/T} − 1).
pub fn thermal_entropy(t: f64) -> Result<f64> {
    check_temperature("thermal_entropy", t)?;
    let beta = 1.0 / t;
    let ln_z = -(-(-beta).exp_m1()).ln();
    let mean_energy = 1.0 / beta.exp_m1();
    Ok(ln_z + mean_energy * beta)
}

/// Σ p_k² = (1 − q)/(1 + q), q = e^{−1/T}.
pub fn thermal_purity(t: f64) -> Result<f64> {
    check_temperature("thermal_purity", t)?;
    let q = (-1.0 / t).exp();
    Ok((1.0 - q) / (1.0 + q))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StateKind {
    Ground,
    Thermal { temperature: f64 },
}

/// Ground state |φ₀⟩⟨φ₀| or Gibbs mixture Σ p_k |φ_k⟩⟨φ_k| at deformation λ.
///
/// Sampled wavefunctions and the Fock overlap matrix are built on first use and cached;
/// the state itself never changes after construction.
#[derive(Debug, Clone)]
pub struct OscillatorState {
    lambda: DeformationParameter,
    kind: StateKind,
    weights: Option<GibbsWeights>,
    profile: Profile,
    table: OnceLock<Result<LevelTable>>,
    fock: OnceLock<Result<FockOverlapMatrix>>,
}

impl OscillatorState {
    pub fn ground(lambda: DeformationParameter) -> Self {
        Self::ground_with(lambda, Profile::default())
    }

    pub fn ground_with(lambda: DeformationParameter, profile: Profile) -> Self {
        OscillatorState {
            lambda,
            kind: StateKind::Ground,
            weights: None,
            profile,
            table: OnceLock::new(),
            fock: OnceLock::new(),
        }
    }

    pub fn thermal(lambda: DeformationParameter, temperature: f64) -> Result<Self> {
        Self::thermal_with(lambda, temperature, Profile::default())
    }

    pub fn thermal_with(lambda: DeformationParameter, temperature: f64, profile: Profile) -> Result<Self> {
        Self::thermal_with_cut(lambda, temperature, 0, profile)
    }

    /// Gibbs state keeping at least levels 0 … `n_cut` (raised further to meet the tail bound).
    pub fn thermal_with_cut(
        lambda: DeformationParameter,
        temperature: f64,
        n_cut: usize,
        profile: Profile,
    ) -> Result<Self> {
        let weights = gibbs_weights_with_tail(temperature, n_cut, profile.gibbs_tail)?;
        Ok(OscillatorState {
            lambda,
            kind: StateKind::Thermal { temperature },
            weights: Some(weights),
            profile,
            table: OnceLock::new(),
            fock: OnceLock::new(),
        })
    }

    /// `None` temperature means the ground state.
    pub fn new(lambda: DeformationParameter, temperature: Option<f64>, profile: Profile) -> Result<Self> {
        match temperature {
            None => Ok(Self::ground_with(lambda, profile)),
            Some(t) => Self::thermal_with(lambda, t, profile),
        }
    }

    /// Same kind and temperature at a different λ.
    pub fn at_lambda(&self, lambda: DeformationParameter) -> Self {
        OscillatorState {
            lambda,
            kind: self.kind,
            weights: self.weights.clone(),
            profile: self.profile,
            table: OnceLock::new(),
            fock: OnceLock::new(),
        }
    }

    pub fn lambda(&self) -> DeformationParameter {
        self.lambda
    }

    pub fn kind(&self) -> StateKind {
        self.kind
    }

    pub fn temperature(&self) -> Option<f64> {
        match self.kind {
            StateKind::Ground => None,
            StateKind::Thermal { temperature } => Some(temperature),
        }
    }

    pub fn is_pure(&self) -> bool {
        self.kind == StateKind::Ground
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn gibbs(&self) -> Option<&GibbsWeights> {
        self.weights.as_ref()
    }

    /// Eigenvalues of ρ in the φ_k basis (a single 1 for the ground state).
    pub fn populations(&self) -> &[f64] {
        match &self.weights {
            Some(w) => &w.probabilities,
            None => &[1.0],
        }
    }

    /// Number of eigenstates carried, n_cut + 1.
    pub fn levels(&self) -> usize {
        self.populations().len()
    }

    /// Sampled φ_k, ∂ₓφ_k, ∂_λφ_k for every carried level.
    pub fn table(&self) -> Result<&LevelTable> {
        let t = self.table.get_or_init(|| {
            LevelTable::on_line(self.lambda, self.levels(), self.profile.position_step, self.profile.tail_margin)
        });
        t.as_ref().map_err(Clone::clone)
    }

    /// ⟨m|φ_n⟩ for every carried level, with the Fock cut raised adaptively.
    pub fn fock_matrix(&self) -> Result<&FockOverlapMatrix> {
        let f = self.fock.get_or_init(|| {
            let table = self.table()?;
            fock_overlap_from_table(table, 32, self.profile.fock_deficit, self.profile.fock_cap)
        });
        f.as_ref().map_err(Clone::clone)
    }

    /// Position density ρ(x, x) on the table nodes.
    pub fn position_density(&self) -> Result<Vec<f64>> {
        let table = self.table()?;
        let mut rho = vec![0.0; table.nodes().len()];
        for (k, &p) in self.populations().iter().enumerate() {
            for (r, v) in rho.iter_mut().zip(table.values(k)) {
                *r += p * v * v;
            }
        }
        Ok(rho)
    }
}

/// c[m][n] = ⟨m|φₙ(λ)⟩ for m ≤ m_cut, n ≤ n_cut.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOverlapMatrix {
    pub entries: DMatrix<f64>,
    pub m_cut: usize,
    pub n_cut: usize,
    pub lambda: DeformationParameter,
    /// 1 − Σ_m c[m][n]² per column.
    pub column_deficits: Vec<f64>,
    pub converged: bool,
}

impl FockOverlapMatrix {
    pub fn get(&self, m: usize, n: usize) -> f64 {
        self.entries[(m, n)]
    }

    pub fn max_deficit(&self) -> f64 {
        self.column_deficits.iter().fold(0.0_f64, |a, d| a.max(d.abs()))
    }
}

fn fock_overlap_at_cut(table: &LevelTable, m_cut: usize) -> FockOverlapMatrix {
    let nodes = table.nodes();
    let w = table.rule().weights();
    let n_levels = table.levels();
    let mut entries = DMatrix::zeros(m_cut + 1, n_levels);
    let mut psi = Vec::with_capacity(m_cut + 1);
    for (i, &x) in nodes.iter().enumerate() {
        numerics::hermite_functions_into(m_cut, x, &mut psi);
        for n in 0..n_levels {
            let a = w[i] * table.values(n)[i];
            if a == 0.0 {
                continue;
            }
            for (m, p) in psi.iter().enumerate() {
                entries[(m, n)] += a * p;
            }
        }
    }
    let column_deficits: Vec<f64> = (0..n_levels).map(|n| 1.0 - entries.column(n).norm_squared()).collect();
    FockOverlapMatrix { entries, m_cut, n_cut: n_levels - 1, lambda: table.lambda(), column_deficits, converged: false }
}

fn fock_overlap_from_table(table: &LevelTable, m_start: usize, deficit: f64, cap: usize) -> Result<FockOverlapMatrix> {
    let cap = cap.min(numerics::HERMITE_MAX_ORDER);
    let mut m_cut = m_start.max(table.levels()).min(cap);
    loop {
        let mut mat = fock_overlap_at_cut(table, m_cut);
        if mat.max_deficit() < deficit {
            mat.converged = true;
            return Ok(mat);
        }
        if m_cut >= cap {
            log::warn!(
                "Fock cut reached cap {cap} at lambda={} with deficit {:e}",
                table.lambda().value(),
                mat.max_deficit()
            );
            return Ok(mat);
        }
        m_cut = (2 * m_cut).min(cap);
    }
}

/// Fock overlap matrix for levels 0 … n_cut, starting from `m_cut` and doubling it until
/// every column's norm deficit is below 1e-8 (cap 400; `converged` false if the cap is hit).
pub fn fock_overlap_matrix(lambda: DeformationParameter, m_cut: usize, n_cut: usize) -> Result<FockOverlapMatrix> {
    let profile = Profile::default();
    let table = LevelTable::on_line(lambda, n_cut + 1, profile.position_step, profile.tail_margin)?;
    fock_overlap_from_table(&table, m_cut.max(1), profile.fock_deficit, profile.fock_cap)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhotonDistribution {
    pub probabilities: Vec<f64>,
    /// False when the Fock cut hit its cap before the columns converged.
    pub converged: bool,
}

impl PhotonDistribution {
    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    /// (⟨n̂⟩, ⟨n̂²⟩)
    pub fn moments(&self) -> (f64, f64) {
        self.probabilities.iter().enumerate().fold((0.0, 0.0), |(m1, m2), (n, &p)| {
            let nf = n as f64;
            (m1 + nf * p, m2 + nf * nf * p)
        })
    }
}

/// Roundoff allowance below zero for probabilities.
pub const NEGATIVE_PROBABILITY_CLIP: f64 = -1e-12;

pub(crate) fn clip_probabilities(values: &mut [f64]) -> Result<()> {
    for (index, v) in values.iter_mut().enumerate() {
        if *v < NEGATIVE_PROBABILITY_CLIP {
            return Err(Error::NegativeProbability { index, value: *v });
        }
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    Ok(())
}

/// p(n) = Σ_k p_k |⟨n|φ_k⟩|².
pub fn photon_distribution(state: &OscillatorState) -> Result<PhotonDistribution> {
    let fock = state.fock_matrix()?;
    let pops = state.populations();
    let mut probabilities: Vec<f64> =
        (0..=fock.m_cut).map(|m| pops.iter().enumerate().map(|(k, &pk)| pk * fock.get(m, k).powi(2)).sum()).collect();
    clip_probabilities(&mut probabilities)?;
    Ok(PhotonDistribution { probabilities, converged: fock.converged })
}

/// Density matrix in position representation on a quadrature grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionKernel {
    pub grid: Vec<f64>,
    pub weights: Vec<f64>,
    pub values: DMatrix<f64>,
}

impl PositionKernel {
    /// ∫ ρ(x, x) dx
    pub fn trace(&self) -> f64 {
        (0..self.grid.len()).map(|i| self.weights[i] * self.values[(i, i)]).sum()
    }

    /// ∫∫ ρ(x, x′)² dx dx′
    pub fn purity(&self) -> f64 {
        let n = self.grid.len();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += self.weights[i] * self.weights[j] * self.values[(i, j)].powi(2);
            }
        }
        s
    }

    /// Largest eigenvalue of the weighted kernel √w ρ √w.
    pub fn largest_eigenvalue(&self) -> f64 {
        let n = self.grid.len();
        let sw: Vec<f64> = self.weights.iter().map(|w| w.sqrt()).collect();
        let m = DMatrix::from_fn(n, n, |i, j| sw[i] * self.values[(i, j)] * sw[j]);
        m.symmetric_eigenvalues().iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
    }
}

/// ρ(x, x′) = Σ_k p_k φ_k(x) φ_k(x′) on the nodes of `grid`.
pub fn position_kernel(state: &OscillatorState, grid: &QuadratureRule) -> Result<PositionKernel> {
    let table = LevelTable::new(state.lambda(), state.levels(), grid.clone())?;
    let pops = state.populations();
    let n = grid.len();
    let mut values = DMatrix::zeros(n, n);
    for (k, &p) in pops.iter().enumerate() {
        let v = table.values(k);
        for i in 0..n {
            let a = p * v[i];
            for j in i..n {
                values[(i, j)] += a * v[j];
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            values[(i, j)] = values[(j, i)];
        }
    }
    Ok(PositionKernel { grid: grid.nodes().to_vec(), weights: grid.weights().to_vec(), values })
}

/// Tr ρ²: exactly 1 for the ground state, Σ p_k² for a Gibbs state.
pub fn purity(state: &OscillatorState) -> f64 {
    state.populations().iter().map(|p| p * p).sum()
}

/// Sampled wavefunction for level `k` of a state (convenience for figure output).
pub fn level_values(state: &OscillatorState, k: usize, xs: &[f64]) -> Result<Vec<f64>> {
    xs.iter().map(|&x| susy::wavefunction(k, state.lambda(), x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lam(v: f64) -> DeformationParameter {
        DeformationParameter::new(v).unwrap()
    }

    #[test]
    fn gibbs_basic() {
        let w = gibbs_weights(0.01, 0).unwrap();
        assert!((w.probabilities[0] - 1.0).abs() < 1e-10);
        let w = gibbs_weights(0.5, 0).unwrap();
        assert!((w.partition - 1.156_518).abs() < 1e-6);
        let e2 = 2f64.exp();
        assert!((w.partition - e2 / (e2 - 1.0)).abs() < 1e-14);
        let s: f64 = w.probabilities.iter().sum();
        assert!((s - 1.0).abs() < 1e-10);
        assert!((1.0 - s - w.tail).abs() < 1e-15);
        assert!(w.tail < 1e-12);
        assert!(w.probabilities.windows(2).all(|p| p[1] < p[0]));
        assert!(gibbs_weights(0.0, 3).is_err());
        assert!(gibbs_weights(-1.0, 3).is_err());
    }

    #[test]
    fn gibbs_respects_requested_cut() {
        let w = gibbs_weights(0.25, 40).unwrap();
        assert_eq!(w.n_cut(), 40);
    }

    #[test]
    fn entropy_closed_form_vs_sum() {
        for &t in &[0.05, 0.25, 0.33, 0.5, 1.0, 3.0] {
            let w = gibbs_weights(t, 200).unwrap();
            assert!((thermal_entropy(t).unwrap() - entropy_of_weights(&w)).abs() < 1e-10, "T={t}");
        }
        assert!(thermal_entropy(1e-3).unwrap().abs() < 1e-12);
        let mut prev = 0.0;
        for i in 1..100 {
            let s = thermal_entropy(0.02 * i as f64).unwrap();
            assert!(s > prev);
            prev = s;
        }
    }

    #[test]
    fn purity_closed_form() {
        for &t in &[0.1, 0.25, 0.5, 2.0] {
            let st = OscillatorState::thermal(lam(3.0), t).unwrap();
            assert!((purity(&st) - thermal_purity(t).unwrap()).abs() < 1e-12);
        }
        assert_eq!(purity(&OscillatorState::ground(lam(5.0))), 1.0);
        let a = purity(&OscillatorState::thermal(lam(0.0), 0.25).unwrap());
        let b = purity(&OscillatorState::thermal(lam(700.0), 0.25).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn fock_identity_at_zero() {
        let f = fock_overlap_matrix(lam(0.0), 10, 6).unwrap();
        assert!(f.converged);
        for m in 0..=f.m_cut {
            for n in 0..=6 {
                let want = if m == n { 1.0 } else { 0.0 };
                assert!((f.get(m, n) - want).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn fock_columns_normalized() {
        let f = fock_overlap_matrix(lam(50.0), 16, 4).unwrap();
        assert!(f.converged);
        assert!(f.m_cut > 16);
        for n in 0..=4 {
            assert!((f.entries.column(n).norm_squared() - 1.0).abs() < 1e-8);
        }
        assert!(f.entries.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn photon_distributions() {
        let vac = photon_distribution(&OscillatorState::ground(lam(0.0))).unwrap();
        assert!((vac.probabilities[0] - 1.0).abs() < 1e-12);
        assert!(vac.probabilities[1..].iter().all(|p| p.abs() < 1e-12));

        let t = 0.4;
        let th = photon_distribution(&OscillatorState::thermal(lam(0.0), t).unwrap()).unwrap();
        for (n, p) in th.probabilities.iter().enumerate() {
            let want = (1.0 - (-1.0 / t).exp()) * (-(n as f64) / t).exp();
            assert!((p - want).abs() < 1e-8, "n={n}");
        }

        let big = photon_distribution(&OscillatorState::ground(lam(500.0))).unwrap();
        assert!(big.converged);
        assert!((big.total() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn kernel_properties() {
        let grid = QuadratureRule::trapezoid(9.0, 0.06).unwrap();
        let ground = OscillatorState::ground(lam(10.0));
        let k = position_kernel(&ground, &grid).unwrap();
        assert!((k.trace() - 1.0).abs() < 1e-6);
        assert!((k.purity() - 1.0).abs() < 1e-6);
        assert!((k.largest_eigenvalue() - 1.0).abs() < 1e-6);
        assert!((k.values.clone() - k.values.transpose()).amax() < 1e-12);
        assert!((0..k.grid.len()).all(|i| k.values[(i, i)] >= 0.0));

        let th = OscillatorState::thermal(lam(10.0), 0.5).unwrap();
        let kt = position_kernel(&th, &QuadratureRule::trapezoid(12.0, 0.06).unwrap()).unwrap();
        assert!((kt.trace() - 1.0).abs() < 1e-6);
        assert!((kt.purity() - purity(&th)).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn gibbs_tail_accounted(t in 0.02f64..3.0) {
            let w = gibbs_weights(t, 0).unwrap();
            let s: f64 = w.probabilities.iter().sum();
            prop_assert!((s + w.tail - 1.0).abs() < 1e-12);
            prop_assert!(w.tail < 1e-12);
        }
    }
}
