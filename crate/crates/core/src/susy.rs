//! Darboux deformation of the shifted harmonic oscillator.
//!
//! With c = √2 λ and I(x) = ½(1 + erf x), the deformed ground state is
//! φ₀ = ψ₀ √(1+c) / (1 + c I) and the excited states are
//! φₙ = ψₙ + g ψ_{n−1} / √(2n) with g(x) = c ψ₀(x)² / (1 + c I(x)).
//! The deformed potential is V̂ = ½(x² − 1) + 2 x g + g², and every φₙ has energy n.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{self, QuadratureRule};

/// Lower end (exclusive) of the admissible deformation range, −1/√2.
pub const LAMBDA_MIN: f64 = -FRAC_1_SQRT_2;

const INV_SQRT_PI: f64 = 0.564_189_583_547_756_3;
/// Above this, the ground-state prefactor is assembled from logarithms.
const LOG_FORM_ABOVE: f64 = 1e4;

/// The deformation parameter λ of the isospectral family; always > −1/√2.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct DeformationParameter(f64);

impl DeformationParameter {
    pub fn new(lambda: f64) -> Result<Self> {
        if lambda.is_finite() && lambda > LAMBDA_MIN {
            Ok(DeformationParameter(lambda))
        } else {
            Err(Error::domain("DeformationParameter", format!("lambda = {lambda} must be finite and > -1/sqrt(2)")))
        }
    }

    pub const fn harmonic() -> Self {
        DeformationParameter(0.0)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// √2 λ, the combination that appears everywhere.
    fn c(self) -> f64 {
        SQRT_2 * self.0
    }
}

impl TryFrom<f64> for DeformationParameter {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        DeformationParameter::new(v)
    }
}

impl From<DeformationParameter> for f64 {
    fn from(l: DeformationParameter) -> f64 {
        l.0
    }
}

/// A wavefunction value together with where it was taken.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WavefunctionSample {
    pub x: f64,
    pub value: f64,
    pub n: usize,
    pub lambda: DeformationParameter,
}

impl WavefunctionSample {
    pub fn at(n: usize, lambda: DeformationParameter, x: f64) -> Result<Self> {
        Ok(WavefunctionSample { x, value: wavefunction(n, lambda, x)?, n, lambda })
    }
}

/// Normalized eigenfunction ψₙ of the shifted oscillator.
pub fn sho_wavefunction(n: usize, x: f64) -> Result<f64> {
    numerics::hermite_function(n, x)
}

/// I(x) = ∫_{−∞}^{x} ψ₀² = ½(1 + erf x), evaluated through erfc so that the left tail
/// keeps full relative precision.
pub fn cumulative_i(x: f64) -> f64 {
    0.5 * numerics::erfc(-x)
}

/// Superpotential of the oscillator seed, W = −(1/√2) d/dx ln ψ₀ = x/√2.
pub fn superpotential(x: f64) -> f64 {
    x * FRAC_1_SQRT_2
}

/// ψ₀(x)² = e^{−x²}/√π
fn ground_density_sho(x: f64) -> f64 {
    (-x * x).exp() * INV_SQRT_PI
}

/// 1 + c I(x); strictly positive on the admissible range.
fn denominator(lam: DeformationParameter, x: f64) -> f64 {
    1.0 + lam.c() * cumulative_i(x)
}

/// g(x) = c ψ₀² / (1 + c I), the logarithmic derivative of (1/(√2λ) + I).
pub fn anharmonic_term(lam: DeformationParameter, x: f64) -> f64 {
    let c = lam.c();
    if c == 0.0 {
        return 0.0;
    }
    c * ground_density_sho(x) / denominator(lam, x)
}

/// Deformed potential V̂(λ; x), written out term by term as in the closed form
/// ½(−1 + x² + 4λ² e^{−2x²} / (π D²) + √(2/π) · 4λ x e^{−x²} / D), D = 1 + √2 λ I(x).
pub fn isospectral_potential(lam: DeformationParameter, x: f64) -> f64 {
    let l = lam.value();
    let d = denominator(lam, x);
    let e1 = (-x * x).exp();
    let quad = 4.0 * l * l * e1 * e1 / (PI * d * d);
    let lin = (2.0 / PI).sqrt() * 4.0 * l * e1 * x / d;
    0.5 * (-1.0 + x * x + quad + lin)
}

/// V̂ − V = 2 x g + g², the part of the potential added by the deformation.
pub fn potential_shift(lam: DeformationParameter, x: f64) -> f64 {
    let g = anharmonic_term(lam, x);
    2.0 * x * g + g * g
}

/// √(1+c) / (1 + c I(x)).
fn ground_prefactor(lam: DeformationParameter, x: f64) -> f64 {
    let c = lam.c();
    if lam.value() > LOG_FORM_ABOVE {
        (0.5 * c.ln_1p() - (c * cumulative_i(x)).ln_1p()).exp()
    } else {
        (1.0 + c).sqrt() / denominator(lam, x)
    }
}

/// Normalized ground state φ₀(x; λ) = π^{−1/4} e^{−x²/2} √(1+√2λ) / (1 + √2 λ I(x)).
pub fn ground_wavefunction(lam: DeformationParameter, x: f64) -> f64 {
    numerics::PI_POW_M_QUARTER * (-0.5 * x * x).exp() * ground_prefactor(lam, x)
}

fn excited_from_hermite(n: usize, lam: DeformationParameter, x: f64, psi: &[f64]) -> f64 {
    psi[n] + anharmonic_term(lam, x) * psi[n - 1] / (2.0 * n as f64).sqrt()
}

/// Excited eigenstate φₙ(x; λ), n ≥ 1, energy n.
///
/// Algebraically identical to the Hermite-polynomial closed form
/// 2^{−m/2−1} e^{−3x²/2} [√π e^{x²}(2λI + √2) H_{m+1} + 2λ H_m] / (π^{3/4} D √((m+1)!)), m = n − 1,
/// but evaluated through normalized Hermite functions so that large n stays finite.
/// The closed form has unit norm; [`LevelTable`] re-checks that on its grid.
pub fn excited_wavefunction(n: usize, lam: DeformationParameter, x: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("excited_wavefunction", "level must be at least 1"));
    }
    let psi = numerics::hermite_functions(n, x)?;
    Ok(excited_from_hermite(n, lam, x, &psi))
}

/// φₙ(x; λ) for any level.
pub fn wavefunction(n: usize, lam: DeformationParameter, x: f64) -> Result<f64> {
    if n == 0 {
        Ok(ground_wavefunction(lam, x))
    } else {
        excited_wavefunction(n, lam, x)
    }
}

/// ∂φₙ/∂x, from g′ = −2xg − g² and the ladder relation for ψₙ′.
pub fn wavefunction_x_derivative(n: usize, lam: DeformationParameter, x: f64) -> Result<f64> {
    let psi = numerics::hermite_functions(n + 1, x)?;
    let g = anharmonic_term(lam, x);
    Ok(x_derivative_from_hermite(n, lam, x, g, &psi))
}

fn hermite_function_derivative(k: usize, psi: &[f64]) -> f64 {
    let kf = k as f64;
    let down = if k > 0 { kf.sqrt() * psi[k - 1] } else { 0.0 };
    (down - (kf + 1.0).sqrt() * psi[k + 1]) * FRAC_1_SQRT_2
}

fn x_derivative_from_hermite(n: usize, lam: DeformationParameter, x: f64, g: f64, psi: &[f64]) -> f64 {
    if n == 0 {
        return -(x + g) * ground_wavefunction(lam, x);
    }
    let dg = -2.0 * x * g - g * g;
    let d_psi_n = hermite_function_derivative(n, psi);
    let d_psi_m = hermite_function_derivative(n - 1, psi);
    d_psi_n + (dg * psi[n - 1] + g * d_psi_m) / (2.0 * n as f64).sqrt()
}

fn lambda_derivative_from_hermite(n: usize, lam: DeformationParameter, x: f64, psi: &[f64]) -> f64 {
    let c = lam.c();
    let i = cumulative_i(x);
    let d = 1.0 + c * i;
    if n == 0 {
        let phi = ground_wavefunction(lam, x);
        phi * (FRAC_1_SQRT_2 / (1.0 + c) - SQRT_2 * i / d)
    } else {
        ground_density_sho(x) * psi[n - 1] / (d * d * (n as f64).sqrt())
    }
}

/// ∂φₙ(x; λ)/∂λ in closed form.
///
/// n = 0: φ₀ [(1/√2)/(1+√2λ) − √2 I/(1 + √2λ I)].
/// n ≥ 1: only g depends on λ, and ∂g/∂λ = √2 ψ₀² / (1 + √2λ I)², giving
/// ψ₀² ψ_{n−1} / ((1 + √2λ I)² √n).
pub fn wavefunction_lambda_derivative(n: usize, lam: DeformationParameter, x: f64) -> Result<f64> {
    let psi = numerics::hermite_functions(n, x)?;
    Ok(lambda_derivative_from_hermite(n, lam, x, &psi))
}

/// Step used by the finite-difference λ-derivative: max(1e-4, 1e-4 λ).
pub fn lambda_step(lam: DeformationParameter) -> f64 {
    (1e-4_f64).max(1e-4 * lam.value())
}

/// Central difference in λ with one Richardson step (steps h and h/2).
/// Independent of the closed-form derivative; used to cross-validate it.
pub fn wavefunction_lambda_derivative_fd(n: usize, lam: DeformationParameter, x: f64) -> Result<f64> {
    let h = lambda_step(lam);
    let (lo, hi) = fd_parameters(lam, h)?;
    let [m2, m1, p1, p2] = [lo[0], lo[1], hi[0], hi[1]];
    let f = |l| wavefunction(n, l, x);
    let d_h = (f(p2)? - f(m2)?) / (2.0 * h);
    let d_half = (f(p1)? - f(m1)?) / h;
    Ok((4.0 * d_half - d_h) / 3.0)
}

/// λ − h, λ − h/2 and λ + h/2, λ + h for the Richardson stencil.
pub(crate) fn fd_parameters(
    lam: DeformationParameter,
    h: f64,
) -> Result<([DeformationParameter; 2], [DeformationParameter; 2])> {
    let l = lam.value();
    let low = DeformationParameter::new(l - h).map_err(|_| {
        Error::domain("wavefunction_lambda_derivative_fd", format!("stencil at lambda = {l} crosses -1/sqrt(2)"))
    })?;
    Ok((
        [low, DeformationParameter::new(l - 0.5 * h)?],
        [DeformationParameter::new(l + 0.5 * h)?, DeformationParameter::new(l + h)?],
    ))
}

/// Half-width beyond which level n is numerically zero: margin + √(2n).
pub fn support_half_width(n: usize, margin: f64) -> f64 {
    margin + (2.0 * n as f64).sqrt()
}

/// ‖(−½∂ₓ² + V̂ − n) φₙ‖₂, with ∂ₓ² from a five-point stencil on the pointwise closed form
/// and V̂ evaluated in its literal form.
pub fn hamiltonian_residual(n: usize, lam: DeformationParameter) -> Result<f64> {
    const H: f64 = 1e-2;
    let rule = QuadratureRule::trapezoid(support_half_width(n, 10.0).ceil(), 1.0 / 32.0)?;
    let f = |x: f64| wavefunction(n, lam, x);
    let mut acc = Vec::with_capacity(rule.len());
    for &x in rule.nodes() {
        let [a, b, c, d, e] = [f(x - 2.0 * H)?, f(x - H)?, f(x)?, f(x + H)?, f(x + 2.0 * H)?];
        let second = (-a + 16.0 * b - 30.0 * c + 16.0 * d - e) / (12.0 * H * H);
        let r = -0.5 * second + (isospectral_potential(lam, x) - n as f64) * c;
        acc.push(r * r);
    }
    Ok(rule.apply_samples(&acc).sqrt())
}

/// Rayleigh quotient ⟨φₙ|Ĥ(λ)|φₙ⟩ / ⟨φₙ|φₙ⟩ = ∫ (½ φₙ′² + V̂ φₙ²) / ∫ φₙ².
pub fn energy_expectation(n: usize, lam: DeformationParameter) -> Result<f64> {
    let rule = QuadratureRule::trapezoid(support_half_width(n, 12.0).ceil(), 1.0 / 64.0)?;
    let mut num = Vec::with_capacity(rule.len());
    let mut den = Vec::with_capacity(rule.len());
    for &x in rule.nodes() {
        let v = wavefunction(n, lam, x)?;
        let d = wavefunction_x_derivative(n, lam, x)?;
        num.push(0.5 * d * d + isospectral_potential(lam, x) * v * v);
        den.push(v * v);
    }
    Ok(rule.apply_samples(&num) / rule.apply_samples(&den))
}

/// φₖ, ∂ₓφₖ and ∂_λφₖ for k = 0 … levels−1 sampled on the nodes of a rule,
/// with an explicit normalization pass.
#[derive(Debug, Clone)]
pub struct LevelTable {
    lambda: DeformationParameter,
    rule: QuadratureRule,
    values: Vec<Vec<f64>>,
    dx: Vec<Vec<f64>>,
    dlam: Vec<Vec<f64>>,
    pre_norms: Vec<f64>,
}

impl LevelTable {
    pub fn new(lambda: DeformationParameter, levels: usize, rule: QuadratureRule) -> Result<Self> {
        if levels == 0 {
            return Err(Error::domain("LevelTable::new", "need at least one level"));
        }
        if levels > numerics::HERMITE_MAX_ORDER {
            return Err(Error::DepthExceeded { requested: levels, limit: numerics::HERMITE_MAX_ORDER });
        }
        let npts = rule.len();
        let mut values = vec![vec![0.0; npts]; levels];
        let mut dx = vec![vec![0.0; npts]; levels];
        let mut dlam = vec![vec![0.0; npts]; levels];
        let mut psi = Vec::with_capacity(levels + 1);
        for (i, &x) in rule.nodes().iter().enumerate() {
            numerics::hermite_functions_into(levels, x, &mut psi);
            let g = anharmonic_term(lambda, x);
            for k in 0..levels {
                values[k][i] = if k == 0 {
                    ground_wavefunction(lambda, x)
                } else {
                    psi[k] + g * psi[k - 1] / (2.0 * k as f64).sqrt()
                };
                dx[k][i] = x_derivative_from_hermite(k, lambda, x, g, &psi);
                dlam[k][i] = lambda_derivative_from_hermite(k, lambda, x, &psi);
            }
        }
        let mut pre_norms = Vec::with_capacity(levels);
        for k in 0..levels {
            let norm = rule.apply_samples(&values[k].iter().map(|v| v * v).collect::<Vec<_>>()).sqrt();
            log::debug!("lambda={} level {k}: closed-form norm {norm:.15}", lambda.value());
            if !(norm > 0.0 && norm.is_finite()) {
                return Err(Error::no_convergence("LevelTable::new", format!("level {k} has norm {norm}")));
            }
            for arr in [&mut values[k], &mut dx[k], &mut dlam[k]] {
                arr.iter_mut().for_each(|v| *v /= norm);
            }
            pre_norms.push(norm);
        }
        Ok(LevelTable { lambda, rule, values, dx, dlam, pre_norms })
    }

    /// Trapezoid table sized for `levels` with the given step and tail margin.
    pub fn on_line(lambda: DeformationParameter, levels: usize, step: f64, margin: f64) -> Result<Self> {
        let half = support_half_width(levels.saturating_sub(1), margin);
        let half = (half / step).ceil() * step;
        LevelTable::new(lambda, levels, QuadratureRule::trapezoid(half, step)?)
    }

    pub fn lambda(&self) -> DeformationParameter {
        self.lambda
    }

    pub fn levels(&self) -> usize {
        self.values.len()
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    pub fn nodes(&self) -> &[f64] {
        self.rule.nodes()
    }

    pub fn values(&self, k: usize) -> &[f64] {
        &self.values[k]
    }

    pub fn x_derivative(&self, k: usize) -> &[f64] {
        &self.dx[k]
    }

    pub fn lambda_derivative(&self, k: usize) -> &[f64] {
        &self.dlam[k]
    }

    /// Norms of the closed forms before the normalization pass.
    pub fn pre_norms(&self) -> &[f64] {
        &self.pre_norms
    }

    /// ∫ a(x) b(x) w(x) dx on the table's rule.
    pub fn integrate_product(&self, a: &[f64], b: &[f64], weight: impl Fn(f64) -> f64) -> f64 {
        let w = self.rule.weights();
        self.rule.nodes().iter().enumerate().map(|(i, &x)| w[i] * a[i] * b[i] * weight(x)).sum()
    }

    /// ⟨φⱼ|φₖ⟩
    pub fn overlap(&self, j: usize, k: usize) -> f64 {
        self.integrate_product(&self.values[j], &self.values[k], |_| 1.0)
    }
}
