//! Non-Gaussianity and non-classicality functionals: quadrature moments, relative-entropy
//! non-Gaussianity, Fano factor, Wigner function and negativity, quadrature coherence scale.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{PhaseSpaceGrid, QuadratureRule, RuleKind};
use crate::states::{self, OscillatorState};
use crate::susy::{self, LevelTable};

/// First and second quadrature moments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSet {
    pub mean_x: f64,
    pub mean_p: f64,
    /// ⟨X²⟩
    pub xx: f64,
    /// ⟨P²⟩
    pub pp: f64,
    /// ½⟨XP + PX⟩
    pub xp_sym: f64,
}

impl MomentSet {
    pub fn var_x(&self) -> f64 {
        self.xx - self.mean_x * self.mean_x
    }

    pub fn var_p(&self) -> f64 {
        self.pp - self.mean_p * self.mean_p
    }

    pub fn uncertainty_product(&self) -> f64 {
        (self.var_x() * self.var_p()).sqrt()
    }

    pub fn covariance(&self) -> CovarianceMatrix {
        let c = self.xp_sym - self.mean_x * self.mean_p;
        CovarianceMatrix { sigma: [[self.var_x(), c], [c, self.var_p()]] }
    }
}

/// σ = [[Var X, Cov], [Cov, Var P]]; the vacuum has σ = ½·1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovarianceMatrix {
    pub sigma: [[f64; 2]; 2],
}

impl CovarianceMatrix {
    pub fn determinant(&self) -> f64 {
        self.sigma[0][0] * self.sigma[1][1] - self.sigma[0][1] * self.sigma[1][0]
    }

    /// det σ ≥ ¼ − 1e-9 and positive diagonal.
    pub fn satisfies_uncertainty(&self) -> bool {
        self.sigma[0][0] > 0.0 && self.sigma[1][1] > 0.0 && self.determinant() >= 0.25 - 1e-9
    }
}

/// Quadrature moments of a ground or Gibbs state.
///
/// ⟨P²⟩ = ∫ φ′² uses the analytic x-derivative. Real eigenfunctions give ⟨P⟩ = 0 and
/// ⟨XP + PX⟩ = 0 identically.
pub fn quadrature_moments(state: &OscillatorState) -> Result<MomentSet> {
    let table = state.table()?;
    let mut m = MomentSet { mean_x: 0.0, mean_p: 0.0, xx: 0.0, pp: 0.0, xp_sym: 0.0 };
    for (k, &p) in state.populations().iter().enumerate() {
        let v = table.values(k);
        let d = table.x_derivative(k);
        m.mean_x += p * table.integrate_product(v, v, |x| x);
        m.xx += p * table.integrate_product(v, v, |x| x * x);
        m.pp += p * table.integrate_product(d, d, |_| 1.0);
    }
    Ok(m)
}

/// ⟨P²⟩ from the virial-type identity ⟨P²⟩ = 2(⟨E⟩ − ⟨V̂⟩), independent of φ′.
pub fn momentum_second_moment_from_energy(state: &OscillatorState) -> Result<f64> {
    let table = state.table()?;
    let lam = state.lambda();
    Ok(state
        .populations()
        .iter()
        .enumerate()
        .map(|(k, &p)| {
            let v = table.values(k);
            p * 2.0 * (k as f64 - table.integrate_product(v, v, |x| susy::isospectral_potential(lam, x)))
        })
        .sum())
}

/// Entropy of a Gaussian state with symplectic eigenvalue t:
/// h(t) = (t + ½) ln(t + ½) − (t − ½) ln(t − ½), h(½) = 0.
pub fn entropy_h(t: f64) -> Result<f64> {
    const SLACK: f64 = 1e-12;
    if !t.is_finite() || t < 0.5 - SLACK {
        return Err(Error::domain("entropy_h", format!("argument {t} is below 1/2")));
    }
    let t = t.max(0.5);
    let a = t + 0.5;
    let b = t - 0.5;
    let tail = if b > 0.0 { b * b.ln() } else { 0.0 };
    Ok(a * a.ln() - tail)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonGaussianity {
    /// δ, never negative.
    pub value: f64,
    /// h(√det σ) − S before clipping.
    pub raw: f64,
    pub clipped: bool,
}

/// Largest negative δ attributed to roundoff and clipped to zero.
pub const NONG_CLIP: f64 = -1e-8;

/// δ[ρ] = h(√det σ) − S(ρ), with S = 0 for the ground state and −Σ p_k ln p_k otherwise.
pub fn nong_delta(state: &OscillatorState) -> Result<NonGaussianity> {
    let sigma = quadrature_moments(state)?.covariance();
    let h = entropy_h(sigma.determinant().sqrt())?;
    let s = state.gibbs().map(states::entropy_of_weights).unwrap_or(0.0);
    let raw = h - s;
    if raw < NONG_CLIP {
        return Err(Error::no_convergence("nong_delta", format!("delta = {raw:e} is negative beyond roundoff")));
    }
    let clipped = raw < 0.0;
    Ok(NonGaussianity { value: raw.max(0.0), raw, clipped })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FanoFactor {
    pub value: f64,
    pub mean: f64,
    pub variance: f64,
    /// False when the Fock cut hit its cap.
    pub converged: bool,
}

/// Below this mean photon number the Fano factor is reported as undefined.
pub const FANO_MEAN_FLOOR: f64 = 1e-10;

fn fano_from_moments(mean: f64, second: f64, converged: bool) -> Result<FanoFactor> {
    if mean < FANO_MEAN_FLOOR {
        return Err(Error::UndefinedFano { mean });
    }
    let variance = second - mean * mean;
    Ok(FanoFactor { value: variance / mean, mean, variance, converged })
}

/// (⟨n̂²⟩ − ⟨n̂⟩²)/⟨n̂⟩ from the Fock-basis photon distribution.
pub fn fano_factor(state: &OscillatorState) -> Result<FanoFactor> {
    let dist = states::photon_distribution(state)?;
    let (m1, m2) = dist.moments();
    fano_from_moments(m1, m2, dist.converged)
}

/// (⟨n̂⟩, ⟨n̂²⟩) without the Fock basis: n̂ φ_k = (k − ΔV) φ_k with ΔV = V̂ − V.
pub fn photon_moments_position(state: &OscillatorState) -> Result<(f64, f64)> {
    let table = state.table()?;
    let lam = state.lambda();
    let mut m1 = 0.0;
    let mut m2 = 0.0;
    for (k, &p) in state.populations().iter().enumerate() {
        let v = table.values(k);
        let kf = k as f64;
        m1 += p * table.integrate_product(v, v, |x| kf - susy::potential_shift(lam, x));
        m2 += p * table.integrate_product(v, v, |x| (kf - susy::potential_shift(lam, x)).powi(2));
    }
    Ok((m1, m2))
}

/// Fano factor of the photon distribution restricted to n ≤ `n_max` and renormalized.
///
/// A diagnostic only: small Fock bases shift the sub-Poissonian threshold substantially.
pub fn fano_factor_truncated(state: &OscillatorState, n_max: usize) -> Result<FanoFactor> {
    let dist = states::photon_distribution(state)?;
    let kept = &dist.probabilities[..=n_max.min(dist.probabilities.len() - 1)];
    let total: f64 = kept.iter().sum();
    let (m1, m2) = kept.iter().enumerate().fold((0.0, 0.0), |(a, b), (n, &p)| {
        let nf = n as f64;
        (a + nf * p / total, b + nf * nf * p / total)
    });
    fano_from_moments(m1, m2, dist.converged)
}

/// W(x, p) sampled on a phase-space grid; `values[(i, j)]` is at (x_i, p_j).
#[derive(Debug, Clone, PartialEq)]
pub struct WignerField {
    pub grid: PhaseSpaceGrid,
    pub values: DMatrix<f64>,
}

impl WignerField {
    fn weighted_sum(&self, f: impl Fn(f64) -> f64) -> f64 {
        let mut s = 0.0;
        for i in 0..self.grid.nx {
            for j in 0..self.grid.np {
                s += self.grid.weight(i, j) * f(self.values[(i, j)]);
            }
        }
        s
    }

    /// ∫∫ W
    pub fn integral(&self) -> f64 {
        self.weighted_sum(|w| w)
    }

    /// ∫∫ |W|
    pub fn abs_integral(&self) -> f64 {
        self.weighted_sum(f64::abs)
    }

    /// 2 ∫∫ max(−W, 0), which equals ∫∫|W| − 1 for a normalized W.
    pub fn negative_volume(&self) -> f64 {
        2.0 * self.weighted_sum(|w| (-w).max(0.0))
    }

    /// ∫ W(x_i, p) dp
    pub fn x_marginal(&self, i: usize) -> f64 {
        let g = &self.grid;
        (0..g.np)
            .map(|j| {
                let wp = if j == 0 || j + 1 == g.np { 0.5 } else { 1.0 };
                wp * self.values[(i, j)]
            })
            .sum::<f64>()
            * g.dp()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.amax()
    }
}

/// W(x, p) = (1/π) ∫ ρ(x+y, x−y) cos(2py) dy.
///
/// The kernel is sampled on the x-lattice of `grid` extended over the state's support, so
/// x ± y stay on the lattice and the y-integral is a trapezoid sum with the grid's x-step.
pub fn wigner(state: &OscillatorState, grid: &PhaseSpaceGrid) -> Result<WignerField> {
    let dx = grid.dx();
    let levels = state.levels();
    let reach = susy::support_half_width(levels - 1, state.profile().tail_margin);
    let j_lo = (((-reach - grid.x_min) / dx).floor() as i64).min(0);
    let j_hi = (((reach - grid.x_min) / dx).ceil() as i64).max(grid.nx as i64 - 1);
    let nodes: Vec<f64> = (j_lo..=j_hi).map(|j| grid.x_min + j as f64 * dx).collect();
    let n_nodes = nodes.len();
    let rule = QuadratureRule::new(nodes, vec![dx; n_nodes], RuleKind::Trapezoid)?;
    let table = LevelTable::new(state.lambda(), levels, rule)?;
    let pops = state.populations();
    let offset = (-j_lo) as usize;

    let d_max = n_nodes / 2 + 1;
    let cosines: Vec<Vec<f64>> = (0..grid.np)
        .map(|j| {
            let w = 2.0 * grid.p(j) * dx;
            (0..d_max).map(|d| (w * d as f64).cos()).collect()
        })
        .collect();

    let rows: Vec<Vec<f64>> = (0..grid.nx)
        .into_par_iter()
        .map(|i| {
            let t = offset + i;
            let span = t.min(n_nodes - 1 - t);
            let mut r: Vec<f64> = (0..=span)
                .map(|d| {
                    pops.iter()
                        .enumerate()
                        .map(|(k, &pk)| {
                            let v = table.values(k);
                            pk * v[t + d] * v[t - d]
                        })
                        .sum()
                })
                .collect();
            let peak = r.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
            while r.len() > 1 && r.last().is_some_and(|v| v.abs() <= 1e-18 * peak) {
                r.pop();
            }
            cosines
                .iter()
                .map(|cos| {
                    let tail: f64 = r.iter().zip(cos).skip(1).map(|(a, c)| a * c).sum();
                    dx / PI * (r[0] + 2.0 * tail)
                })
                .collect()
        })
        .collect();

    let values = DMatrix::from_fn(grid.nx, grid.np, |i, j| rows[i][j]);
    Ok(WignerField { grid: *grid, values })
}

/// Momentum density Σ_k p_k |φ̃_k(p)|² from the sampled position wavefunctions.
fn momentum_density(table: &LevelTable, pops: &[f64], p: f64) -> f64 {
    let nodes = table.nodes();
    let w = table.rule().weights();
    let (s, c): (Vec<f64>, Vec<f64>) = nodes.iter().map(|&x| (p * x).sin_cos()).unzip();
    pops.iter()
        .enumerate()
        .map(|(k, &pk)| {
            let v = table.values(k);
            let mut re = 0.0;
            let mut im = 0.0;
            for i in 0..nodes.len() {
                re += w[i] * v[i] * c[i];
                im += w[i] * v[i] * s[i];
            }
            pk * (re * re + im * im)
        })
        .sum::<f64>()
        / (2.0 * PI)
}

const DENSITY_FLOOR: f64 = 1e-13;
const MOMENTUM_SCAN_STEP: f64 = 0.25;

/// Phase-space window covering the state: x from the support of ρ(x, x), p from a scan of
/// the momentum density, both padded and aligned to the profile's Wigner spacing.
pub fn default_wigner_grid(state: &OscillatorState) -> Result<PhaseSpaceGrid> {
    let h = state.profile().wigner_spacing;
    let table = state.table()?;
    let density = state.position_density()?;
    let peak = density.iter().fold(0.0_f64, |a, &b| a.max(b));
    let nodes = table.nodes();
    let inside: Vec<usize> = (0..nodes.len()).filter(|&i| density[i] > DENSITY_FLOOR * peak).collect();
    let (lo, hi) = match (inside.first(), inside.last()) {
        (Some(&a), Some(&b)) => (nodes[a] - 0.5, nodes[b] + 0.5),
        _ => return Err(Error::no_convergence("default_wigner_grid", "empty position support")),
    };
    let x_min = (lo / h).floor() * h;
    let nx = ((hi - x_min) / h).ceil() as usize + 1;

    // the y-sum aliases once 2 p h approaches π on the finest refinement
    let finest = h / 2f64.powi(state.profile().wigner_max_refinements as i32);
    let p_cap = 0.45 * PI / finest;
    let pops = state.populations();
    let p0 = momentum_density(table, pops, 0.0);
    let mut p = 0.0;
    let mut quiet = 0;
    while quiet < 2 && p < p_cap {
        p += MOMENTUM_SCAN_STEP;
        if momentum_density(table, pops, p) < DENSITY_FLOOR * p0 {
            quiet += 1;
        } else {
            quiet = 0;
        }
    }
    if p >= p_cap {
        log::warn!("momentum support of lambda={} reaches the aliasing cap {p_cap:.1}", state.lambda().value());
    }
    let p_half = ((p.min(p_cap) + 0.5) / h).ceil() * h;
    let np = (2.0 * p_half / h).round() as usize + 1;
    PhaseSpaceGrid::new((x_min, x_min + (nx - 1) as f64 * h), (-p_half, p_half), nx, np)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WignerNegativity {
    /// ν = ∫∫|W| − 1, evaluated as twice the negative volume.
    pub value: f64,
    /// ∫∫ W on the finest grid used.
    pub normalization: f64,
    pub refinements: usize,
    /// |Δν| between the last two grids fell below the profile tolerance.
    pub converged: bool,
    pub grid: PhaseSpaceGrid,
}

/// ν on `grid`, halving the spacing (up to the profile's limit) until ν moves by less than
/// the refinement tolerance.
pub fn wigner_negativity(state: &OscillatorState, grid: &PhaseSpaceGrid) -> Result<WignerNegativity> {
    let profile = state.profile();
    let mut g = *grid;
    let w = wigner(state, &g)?;
    let mut nu = w.negative_volume();
    let mut norm = w.integral();
    let mut converged = false;
    let mut refinements = 0;
    while refinements < profile.wigner_max_refinements {
        g = g.refined();
        refinements += 1;
        let w = wigner(state, &g)?;
        let next = w.negative_volume();
        let delta = (next - nu).abs();
        nu = next;
        norm = w.integral();
        if delta < profile.wigner_refine_tol {
            converged = true;
            break;
        }
    }
    if profile.wigner_max_refinements == 0 {
        converged = (norm - 1.0).abs() < profile.wigner_refine_tol;
    }
    Ok(WignerNegativity { value: nu, normalization: norm, refinements, converged, grid: g })
}

/// ν on [`default_wigner_grid`].
pub fn wigner_negativity_auto(state: &OscillatorState) -> Result<WignerNegativity> {
    wigner_negativity(state, &default_wigner_grid(state)?)
}

/// Quadrature coherence scale C (not squared) by two routes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherenceScale {
    /// Pure: √(Var X + Var P); thermal: √(𝒫² (Var X + Var P)).
    pub reduced: f64,
    /// √(½(C_X² + C_P²)) with C_A² = Tr([ρ, A][A, ρ]) / 𝒫.
    pub kernel: f64,
}

/// C_A² = (2/𝒫)[Σ p_k² (A²)_kk − Σ_jk p_j p_k |A_jk|²] in the eigenbasis of ρ.
fn coherence_component(pops: &[f64], purity: f64, diag_sq: &[f64], offdiag: &DMatrix<f64>) -> f64 {
    let mut a = 0.0;
    let mut b = 0.0;
    for (k, &pk) in pops.iter().enumerate() {
        a += pk * pk * diag_sq[k];
        for (j, &pj) in pops.iter().enumerate() {
            b += pj * pk * offdiag[(j, k)].powi(2);
        }
    }
    2.0 * (a - b) / purity
}

/// Quadrature coherence scale by the closed reductions and by the commutator definition.
pub fn qcs(state: &OscillatorState) -> Result<CoherenceScale> {
    let m = quadrature_moments(state)?;
    let noise = m.var_x() + m.var_p();
    let purity = states::purity(state);
    let reduced = if state.is_pure() { noise.sqrt() } else { (purity * purity * noise).sqrt() };

    let table = state.table()?;
    let pops = state.populations();
    let k = pops.len();
    let x_mat = DMatrix::from_fn(k, k, |a, b| table.integrate_product(table.values(a), table.values(b), |x| x));
    let p_mat = DMatrix::from_fn(k, k, |a, b| table.integrate_product(table.values(a), table.x_derivative(b), |_| 1.0));
    let x2: Vec<f64> = (0..k).map(|a| table.integrate_product(table.values(a), table.values(a), |x| x * x)).collect();
    let p2: Vec<f64> =
        (0..k).map(|a| table.integrate_product(table.x_derivative(a), table.x_derivative(a), |_| 1.0)).collect();
    let cx = coherence_component(pops, purity, &x2, &x_mat);
    let cp = coherence_component(pops, purity, &p2, &p_mat);
    Ok(CoherenceScale { reduced, kernel: (0.5 * (cx + cp)).sqrt() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::Profile;
    use crate::susy::DeformationParameter;

    fn lam(v: f64) -> DeformationParameter {
        DeformationParameter::new(v).unwrap()
    }

    #[test]
    fn vacuum_moments() {
        let m = quadrature_moments(&OscillatorState::ground(lam(0.0))).unwrap();
        assert!(m.mean_x.abs() < 1e-14);
        assert!((m.var_x() - 0.5).abs() < 1e-12);
        assert!((m.var_p() - 0.5).abs() < 1e-12);
        assert_eq!(m.covariance().sigma[0][1], 0.0);
    }

    #[test]
    fn ground_squeezed_but_not_minimum_uncertainty() {
        for &l in &[0.1, 1.0, 10.0, 100.0, 1000.0] {
            let st = OscillatorState::ground(lam(l));
            let m = quadrature_moments(&st).unwrap();
            assert!(m.var_x() < 0.5, "lambda={l}");
            assert!(m.var_x() * m.var_p() > 0.25, "lambda={l}");
            let alt = momentum_second_moment_from_energy(&st).unwrap();
            assert!((alt - m.pp).abs() < 1e-9 * m.pp.max(1.0), "lambda={l}: {alt} vs {}", m.pp);
        }
    }

    #[test]
    fn h_function() {
        assert_eq!(entropy_h(0.5).unwrap(), 0.0);
        assert!((entropy_h(1.5).unwrap() - 2.0 * 2f64.ln()).abs() < 1e-14);
        assert!(entropy_h(0.4).is_err());
        assert!(entropy_h(f64::NAN).is_err());
        let mut prev = 0.0;
        for i in 1..200 {
            let v = entropy_h(0.5 + 0.01 * i as f64).unwrap();
            assert!(v > prev);
            prev = v;
        }
        // thermal SHO state: h(n̄ + ½) is its von Neumann entropy
        let t: f64 = 0.7;
        let nbar = 1.0 / (1.0 / t).exp_m1();
        assert!((entropy_h(nbar + 0.5).unwrap() - states::thermal_entropy(t).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn gaussian_states_have_zero_delta() {
        let g = nong_delta(&OscillatorState::ground(lam(0.0))).unwrap();
        assert!(g.value.abs() < 1e-12);
        for &t in &[0.25, 0.33, 0.5] {
            let d = nong_delta(&OscillatorState::thermal(lam(0.0), t).unwrap()).unwrap();
            assert!(d.value < 1e-9, "T={t}: {d:?}");
        }
        assert!(nong_delta(&OscillatorState::ground(lam(5.0))).unwrap().value > 0.01);
    }

    #[test]
    fn fano_vacuum_and_thermal_sho() {
        match fano_factor(&OscillatorState::ground(lam(0.0))) {
            Err(Error::UndefinedFano { .. }) => {}
            other => panic!("expected undefined Fano, got {other:?}"),
        }
        for &t in &[0.25, 0.5, 1.0] {
            let f = fano_factor(&OscillatorState::thermal(lam(0.0), t).unwrap()).unwrap();
            let nbar = 1.0 / (1.0 / t).exp_m1();
            assert!((f.value - (1.0 + nbar)).abs() < 1e-6, "T={t}");
        }
    }

    #[test]
    fn photon_moments_two_routes() {
        for st in [
            OscillatorState::ground(lam(3.0)),
            OscillatorState::ground(lam(300.0)),
            OscillatorState::thermal(lam(40.0), 0.33).unwrap(),
        ] {
            let (a1, a2) = states::photon_distribution(&st).unwrap().moments();
            let (b1, b2) = photon_moments_position(&st).unwrap();
            assert!((a1 - b1).abs() < 1e-6 * a1.max(1.0));
            assert!((a2 - b2).abs() < 1e-5 * a2.max(1.0), "{a2} vs {b2}");
        }
    }

    #[test]
    fn vacuum_wigner_is_gaussian() {
        let st = OscillatorState::ground(lam(0.0));
        let grid = PhaseSpaceGrid::square(6.0, 0.05).unwrap();
        let w = wigner(&st, &grid).unwrap();
        for i in (0..grid.nx).step_by(7) {
            for j in (0..grid.np).step_by(5) {
                let (x, p) = (grid.x(i), grid.p(j));
                let want = (-x * x - p * p).exp() / PI;
                assert!((w.values[(i, j)] - want).abs() < 1e-8);
            }
        }
        assert!((w.integral() - 1.0).abs() < 1e-5);
        assert!(w.negative_volume() < 1e-12);
    }

    #[test]
    fn wigner_origin_parity_formula() {
        let st = OscillatorState::ground(lam(20.0));
        let grid = PhaseSpaceGrid::new((-6.0, 6.0), (-6.0, 6.0), 241, 241).unwrap();
        let w = wigner(&st, &grid).unwrap();
        let rule = QuadratureRule::trapezoid(12.0, 1.0 / 128.0).unwrap();
        let want =
            rule.apply(|y| susy::ground_wavefunction(st.lambda(), y) * susy::ground_wavefunction(st.lambda(), -y)) / PI;
        assert!((w.values[(120, 120)] - want).abs() < 1e-9);
    }

    #[test]
    fn wigner_bounds_and_marginals() {
        let st = OscillatorState::thermal(lam(30.0), 0.33).unwrap();
        let grid = default_wigner_grid(&st).unwrap();
        let w = wigner(&st, &grid).unwrap();
        assert!(w.max_abs() <= 1.0 / PI + 1e-9);
        assert!((w.integral() - 1.0).abs() < 1e-5);
        for i in (0..grid.nx).step_by(11) {
            let x = grid.x(i);
            let rho: f64 = st
                .populations()
                .iter()
                .enumerate()
                .map(|(k, p)| p * susy::wavefunction(k, st.lambda(), x).unwrap().powi(2))
                .sum();
            assert!((w.x_marginal(i) - rho).abs() < 1e-5, "x={x}");
        }
    }

    #[test]
    fn negativity_behaviour() {
        let profile = Profile::fast();
        let zero = wigner_negativity_auto(&OscillatorState::ground_with(lam(0.0), profile)).unwrap();
        assert!(zero.value < 1e-5);
        let g = wigner_negativity_auto(&OscillatorState::ground_with(lam(10.0), profile)).unwrap().value;
        assert!(g > 0.01);
        let warm = OscillatorState::thermal_with(lam(10.0), 0.5, profile).unwrap();
        assert!(wigner_negativity_auto(&warm).unwrap().value < g);
    }

    #[test]
    fn qcs_routes() {
        let vac = qcs(&OscillatorState::ground(lam(0.0))).unwrap();
        assert!((vac.reduced - 1.0).abs() < 1e-12);
        assert!((vac.kernel - 1.0).abs() < 1e-12);
        let pure = qcs(&OscillatorState::ground(lam(50.0))).unwrap();
        assert!((pure.reduced - pure.kernel).abs() < 1e-10);
        assert!(pure.reduced > 1.0);
    }

    #[test]
    fn qcs_position_part_matches_kernel_quadrature() {
        let st = OscillatorState::thermal(lam(5.0), 0.5).unwrap();
        let rule = QuadratureRule::trapezoid(11.0, 0.05).unwrap();
        let k = states::position_kernel(&st, &rule).unwrap();
        let mut direct = 0.0;
        for i in 0..k.grid.len() {
            for j in 0..k.grid.len() {
                direct += k.weights[i] * k.weights[j] * (k.grid[i] - k.grid[j]).powi(2) * k.values[(i, j)].powi(2);
            }
        }
        direct /= states::purity(&st);

        let table = st.table().unwrap();
        let pops = st.populations();
        let n = pops.len();
        let x_mat = DMatrix::from_fn(n, n, |a, b| table.integrate_product(table.values(a), table.values(b), |x| x));
        let x2: Vec<f64> =
            (0..n).map(|a| table.integrate_product(table.values(a), table.values(a), |x| x * x)).collect();
        let via_ops = coherence_component(pops, states::purity(&st), &x2, &x_mat);
        assert!((direct - via_ops).abs() < 1e-6 * via_ops, "{direct} vs {via_ops}");
    }
}
