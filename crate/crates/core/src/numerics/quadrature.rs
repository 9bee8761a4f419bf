//! Quadrature rules and error-controlled integration in one and two dimensions.

use serde::{Deserialize, Serialize};

use super::special::PI_POW_M_QUARTER;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleKind {
    /// Weight e^{-x²} is folded into the weights.
    GaussHermite,
    /// Leaf panels of an adaptive Gauss–Kronrod subdivision.
    CompositeAdaptive,
    /// Uniform trapezoid on a truncated line; spectrally accurate for
    /// analytic integrands with Gaussian decay.
    Trapezoid,
}

/// A fixed set of abscissas and positive weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    kind: RuleKind,
}

impl QuadratureRule {
    pub fn new(nodes: Vec<f64>, weights: Vec<f64>, kind: RuleKind) -> Result<Self> {
        if nodes.len() != weights.len() || nodes.is_empty() {
            return Err(Error::domain("QuadratureRule::new", "node/weight length mismatch"));
        }
        if nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::domain("QuadratureRule::new", "nodes must be strictly increasing"));
        }
        if weights.iter().any(|w| w.is_nan() || *w <= 0.0) {
            return Err(Error::domain("QuadratureRule::new", "weights must be positive"));
        }
        Ok(QuadratureRule { nodes, weights, kind })
    }

    /// Uniform trapezoid nodes `x_i = -half_width + i·step` covering `[-half_width, half_width]`.
    ///
    /// All weights equal `step`: the integrands this is meant for vanish at the ends to
    /// machine precision, so the end-point halving is immaterial.
    pub fn trapezoid(half_width: f64, step: f64) -> Result<Self> {
        if !(half_width > 0.0 && step > 0.0 && step < half_width) {
            return Err(Error::domain("QuadratureRule::trapezoid", "need 0 < step < half_width"));
        }
        let n = (2.0 * half_width / step).round() as usize;
        let nodes: Vec<f64> = (0..=n).map(|i| -half_width + i as f64 * step).collect();
        let weights = vec![step; nodes.len()];
        Ok(QuadratureRule { nodes, weights, kind: RuleKind::Trapezoid })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn kind(&self) -> RuleKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Σ wᵢ f(xᵢ).
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// Σ wᵢ vᵢ for samples already taken on the nodes.
    pub fn apply_samples(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.weights.len());
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }

    /// Every other node of a trapezoid rule, i.e. the same rule at twice the step.
    /// Used as the coarse partner in refinement error estimates.
    pub fn coarsened(&self) -> Option<Self> {
        if self.kind != RuleKind::Trapezoid || self.nodes.len() < 5 {
            return None;
        }
        let nodes: Vec<f64> = self.nodes.iter().copied().step_by(2).collect();
        let step = 2.0 * self.weights[0];
        let weights = vec![step; nodes.len()];
        Some(QuadratureRule { nodes, weights, kind: RuleKind::Trapezoid })
    }
}

/// Gauss–Hermite rule of order `n` for ∫ e^{-x²} f(x) dx.
///
/// Nodes start from the eigenvalues of the Jacobi matrix and are polished by Newton
/// iteration on the orthonormal Hermite recurrence, which also yields the weights.
pub fn gauss_hermite(n: usize) -> Result<QuadratureRule> {
    const MAX_ITER: usize = 50;
    if n == 0 {
        return Err(Error::domain("gauss_hermite", "order must be at least 1"));
    }
    if n > super::HERMITE_MAX_ORDER {
        return Err(Error::DepthExceeded { requested: n, limit: super::HERMITE_MAX_ORDER });
    }
    let nf = n as f64;
    let jacobi =
        nalgebra::DMatrix::from_fn(
            n,
            n,
            |i, j| {
                if i + 1 == j || j + 1 == i {
                    (i.max(j) as f64 / 2.0).sqrt()
                } else {
                    0.0
                }
            },
        );
    let mut guesses: Vec<f64> = jacobi.symmetric_eigenvalues().iter().copied().collect();
    guesses.sort_by(f64::total_cmp);

    let mut x = Vec::with_capacity(n);
    let mut w = Vec::with_capacity(n);
    for (i, &z0) in guesses.iter().enumerate() {
        let mut z = z0;
        let mut pp = 0.0;
        let mut converged = false;
        for _ in 0..MAX_ITER {
            let mut p1 = PI_POW_M_QUARTER;
            let mut p2 = 0.0;
            for j in 0..n {
                let jf = j as f64;
                let p3 = p2;
                p2 = p1;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let step = p1 / pp;
            z -= step;
            if step.abs() <= 1e-14 * z.abs().max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::no_convergence("gauss_hermite", format!("root {i} of order {n}")));
        }
        x.push(z);
        w.push(2.0 / (pp * pp));
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    // enforce exact symmetry
    for i in 0..n / 2 {
        let a = 0.5 * (x[n - 1 - i] - x[i]);
        let b = 0.5 * (w[i] + w[n - 1 - i]);
        x[i] = -a;
        x[n - 1 - i] = a;
        w[i] = b;
        w[n - 1 - i] = b;
    }
    QuadratureRule::new(x, w, RuleKind::GaussHermite)
}

/// Error-control settings for adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Tolerance {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        if !(abs_tol > 0.0 && rel_tol > 0.0 && max_subdivisions >= 1) {
            return Err(Error::domain(
                "Tolerance::new",
                "abs_tol and rel_tol must be positive, max_subdivisions at least 1",
            ));
        }
        Ok(Tolerance { abs_tol, rel_tol, max_subdivisions })
    }

    /// Two-dimensional default (abs 1e-7), refinement capped at six doublings.
    pub fn default_2d() -> Self {
        Tolerance { abs_tol: 1e-7, rel_tol: 1e-7, max_subdivisions: 6 }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { abs_tol: 1e-10, rel_tol: 1e-8, max_subdivisions: 2000 }
    }
}

/// Integration domain, possibly unbounded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Finite(f64, f64),
    /// (-∞, b]
    Below(f64),
    /// [a, ∞)
    Above(f64),
    Real,
}

/// How an unbounded domain was brought to a finite one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntegrationMethod {
    GaussKronrod,
    /// x = t/(1−t²) on (−1, 1), or x = a ± t/(1−t) on [0, 1) for half-lines.
    RationalMap,
    Trapezoid2d,
}

/// Outcome of an integration; `converged == false` means the error target was not met
/// within the subdivision budget and `value` must not be trusted blindly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
    pub converged: bool,
    pub method: IntegrationMethod,
}

impl Integral {
    /// Converts a flagged result into an error.
    pub fn into_result(self, op: &'static str) -> Result<f64> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(Error::no_convergence(op, format!("value {:e} with error estimate {:e}", self.value, self.error)))
        }
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gauss_kronrod15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    let value = kronrod * h;
    let error = ((kronrod - gauss) * h).abs();
    Panel { a, b, value, error }
}

fn adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, initial: usize, tol: Tolerance) -> (Integral, Vec<Panel>) {
    let mut panels: Vec<Panel> = (0..initial)
        .map(|i| {
            let lo = a + (b - a) * i as f64 / initial as f64;
            let hi = a + (b - a) * (i + 1) as f64 / initial as f64;
            gauss_kronrod15(f, lo, hi)
        })
        .collect();
    let mut evaluations = 15 * initial;
    let mut subdivisions = 0;
    loop {
        let value: f64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        let finite = value.is_finite() && error.is_finite();
        if finite && error <= tol.target(value) {
            let res = Integral { value, error, evaluations, converged: true, method: IntegrationMethod::GaussKronrod };
            return (res, panels);
        }
        if !finite || subdivisions >= tol.max_subdivisions {
            let res = Integral { value, error, evaluations, converged: false, method: IntegrationMethod::GaussKronrod };
            return (res, panels);
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .expect("non-empty panel list");
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            // interval exhausted at floating-point resolution
            let res = Integral { value, error, evaluations, converged: false, method: IntegrationMethod::GaussKronrod };
            panels.push(p);
            return (res, panels);
        }
        panels.push(gauss_kronrod15(f, p.a, mid));
        panels.push(gauss_kronrod15(f, mid, p.b));
        evaluations += 30;
        subdivisions += 1;
    }
}

/// Adaptive Gauss–Kronrod (7/15) integration with global bisection of the worst panel.
///
/// Unbounded domains are mapped onto finite ones with a rational change of variable;
/// the integrand is never evaluated at the mapped end points.
pub fn integrate(f: impl Fn(f64) -> f64, domain: Domain, tol: Tolerance) -> Integral {
    match domain {
        Domain::Finite(a, b) => {
            if a == b {
                return Integral {
                    value: 0.0,
                    error: 0.0,
                    evaluations: 0,
                    converged: true,
                    method: IntegrationMethod::GaussKronrod,
                };
            }
            let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
            let (mut res, _) = adaptive(&f, lo, hi, 1, tol);
            res.value *= sign;
            res
        }
        Domain::Real => {
            let g = |t: f64| {
                let d = 1.0 - t * t;
                let x = t / d;
                f(x) * (1.0 + t * t) / (d * d)
            };
            let (mut res, _) = adaptive(&g, -1.0, 1.0, 16, tol);
            res.method = IntegrationMethod::RationalMap;
            res
        }
        Domain::Above(a) => {
            let g = |t: f64| {
                let d = 1.0 - t;
                f(a + t / d) / (d * d)
            };
            let (mut res, _) = adaptive(&g, 0.0, 1.0, 8, tol);
            res.method = IntegrationMethod::RationalMap;
            res
        }
        Domain::Below(b) => {
            let g = |t: f64| {
                let d = 1.0 - t;
                f(b - t / d) / (d * d)
            };
            let (mut res, _) = adaptive(&g, 0.0, 1.0, 8, tol);
            res.method = IntegrationMethod::RationalMap;
            res
        }
    }
}

/// Builds a composite rule from the leaf panels of an adaptive run on `[a, b]`,
/// so that many integrands sharing the same difficult region can reuse the nodes.
pub fn composite_rule(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: Tolerance) -> Result<QuadratureRule> {
    if a.is_nan() || b.is_nan() || a >= b {
        return Err(Error::domain("composite_rule", "need a < b"));
    }
    let (res, mut panels) = adaptive(&f, a, b, 8, tol);
    if !res.converged {
        return Err(Error::no_convergence("composite_rule", format!("error {:e}", res.error)));
    }
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let mut nodes = Vec::with_capacity(15 * panels.len());
    let mut weights = Vec::with_capacity(15 * panels.len());
    for p in &panels {
        let c = 0.5 * (p.a + p.b);
        let h = 0.5 * (p.b - p.a);
        for j in 0..7 {
            nodes.push(c - h * XGK[j]);
            weights.push(h * WGK[j]);
        }
        nodes.push(c);
        weights.push(h * WGK[7]);
        for j in (0..7).rev() {
            nodes.push(c + h * XGK[j]);
            weights.push(h * WGK[j]);
        }
    }
    QuadratureRule::new(nodes, weights, RuleKind::CompositeAdaptive)
}

/// Rectangular (x, p) grid with inclusive extents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpaceGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub nx: usize,
    pub np: usize,
}

impl PhaseSpaceGrid {
    pub fn new(x: (f64, f64), p: (f64, f64), nx: usize, np: usize) -> Result<Self> {
        let ok = x.0.is_finite() && x.1.is_finite() && p.0.is_finite() && p.1.is_finite();
        if !ok || x.0 >= x.1 || p.0 >= p.1 || nx < 2 || np < 2 {
            return Err(Error::domain(
                "PhaseSpaceGrid::new",
                "extents must be finite and ordered, at least 2 points per axis",
            ));
        }
        Ok(PhaseSpaceGrid { x_min: x.0, x_max: x.1, p_min: p.0, p_max: p.1, nx, np })
    }

    /// Square grid `[-half, half]²` with a target spacing.
    pub fn square(half: f64, spacing: f64) -> Result<Self> {
        let n = (2.0 * half / spacing).round() as usize + 1;
        Self::new((-half, half), (-half, half), n, n)
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    pub fn dp(&self) -> f64 {
        (self.p_max - self.p_min) / (self.np - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    pub fn p(&self, j: usize) -> f64 {
        self.p_min + j as f64 * self.dp()
    }

    /// Same extents, spacing halved in both directions.
    pub fn refined(&self) -> Self {
        PhaseSpaceGrid { nx: 2 * self.nx - 1, np: 2 * self.np - 1, ..*self }
    }

    /// Trapezoid weight of node `(i, j)`.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        let wx = if i == 0 || i + 1 == self.nx { 0.5 } else { 1.0 };
        let wp = if j == 0 || j + 1 == self.np { 0.5 } else { 1.0 };
        wx * wp * self.dx() * self.dp()
    }
}

fn trapezoid2d(f: &dyn Fn(f64, f64) -> f64, grid: &PhaseSpaceGrid) -> f64 {
    let mut total = 0.0;
    for i in 0..grid.nx {
        let x = grid.x(i);
        let mut row = 0.0;
        for j in 0..grid.np {
            let wp = if j == 0 || j + 1 == grid.np { 0.5 } else { 1.0 };
            row += wp * f(x, grid.p(j));
        }
        let wx = if i == 0 || i + 1 == grid.nx { 0.5 } else { 1.0 };
        total += wx * row;
    }
    total * grid.dx() * grid.dp()
}

/// 2D trapezoid over `grid`, doubling the resolution until two successive levels agree
/// within `tol` or `tol.max_subdivisions` doublings have been spent.
pub fn integrate2d(f: impl Fn(f64, f64) -> f64, grid: &PhaseSpaceGrid, tol: Tolerance) -> Integral {
    let mut g = *grid;
    let mut prev = trapezoid2d(&f, &g);
    let mut evaluations = g.nx * g.np;
    for _ in 0..tol.max_subdivisions {
        g = g.refined();
        let next = trapezoid2d(&f, &g);
        evaluations += g.nx * g.np;
        let error = (next - prev).abs();
        if error <= tol.target(next) {
            return Integral {
                value: next,
                error,
                evaluations,
                converged: true,
                method: IntegrationMethod::Trapezoid2d,
            };
        }
        prev = next;
    }
    Integral { value: prev, error: f64::NAN, evaluations, converged: false, method: IntegrationMethod::Trapezoid2d }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn gauss_hermite_weight_sum_and_ordering() {
        for n in [1usize, 2, 5, 20, 64, 150, 300] {
            let rule = gauss_hermite(n).unwrap();
            assert_eq!(rule.len(), n);
            let s: f64 = rule.weights().iter().sum();
            assert!((s - PI.sqrt()).abs() < 1e-12, "n={n}: {s}");
            assert!(rule.nodes().windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn gauss_hermite_exact_for_polynomials() {
        // ∫ e^{-x²} x^{2j} = Γ(j+½)
        fn moment(k: usize) -> f64 {
            if k % 2 == 1 {
                return 0.0;
            }
            let j = k / 2;
            (0..j).fold(PI.sqrt(), |acc, i| acc * (i as f64 + 0.5))
        }
        for n in [3usize, 8, 16, 30] {
            let rule = gauss_hermite(n).unwrap();
            for k in 0..2 * n {
                let got = rule.apply(|x| x.powi(k as i32));
                let want = moment(k);
                let scale = want.abs().max(rule.apply(|x| x.abs().powi(k as i32)));
                assert!((got - want).abs() <= 1e-10 * scale, "n={n} k={k}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn integrate_gaussian_and_constant() {
        let r = integrate(|x| (-x * x).exp(), Domain::Real, Tolerance::default());
        assert!(r.converged);
        assert!((r.value - PI.sqrt()).abs() < 1e-10);
        assert_eq!(r.method, IntegrationMethod::RationalMap);

        let one = integrate(|_| 1.0, Domain::Finite(0.0, 1.0), Tolerance::default());
        assert!((one.value - 1.0).abs() < 1e-15);

        let half = integrate(|x| (-x).exp(), Domain::Above(0.0), Tolerance::default());
        assert!((half.value - 1.0).abs() < 1e-10);
        let below = integrate(|x| x.exp(), Domain::Below(1.0), Tolerance::default());
        assert!((below.value - 1f64.exp()).abs() < 1e-9);

        let rev = integrate(|x| x, Domain::Finite(1.0, 0.0), Tolerance::default());
        assert!((rev.value + 0.5).abs() < 1e-15);
    }

    #[test]
    fn integrate_flags_non_convergence() {
        let tol = Tolerance::new(1e-14, 1e-14, 3).unwrap();
        let r = integrate(|x: f64| x.abs().sqrt().recip(), Domain::Finite(-1.0, 1.0), tol);
        assert!(!r.converged);
        assert!(r.into_result("test").is_err());
    }

    #[test]
    fn tolerance_validation() {
        assert!(Tolerance::new(0.0, 1e-8, 10).is_err());
        assert!(Tolerance::new(1e-8, -1.0, 10).is_err());
        assert!(Tolerance::new(1e-8, 1e-8, 0).is_err());
    }

    #[test]
    fn composite_rule_reuses_nodes() {
        let rule = composite_rule(|x| (-(x - 0.3) * (x - 0.3) * 50.0).exp(), -5.0, 5.0, Tolerance::default()).unwrap();
        assert_eq!(rule.kind(), RuleKind::CompositeAdaptive);
        let v = rule.apply(|x| (-(x - 0.3) * (x - 0.3) * 50.0).exp());
        assert!((v - (PI / 50.0).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn trapezoid_rule_and_coarsening() {
        let rule = QuadratureRule::trapezoid(10.0, 0.05).unwrap();
        let v = rule.apply(|x| (-x * x).exp());
        assert!((v - PI.sqrt()).abs() < 1e-14);
        let coarse = rule.coarsened().unwrap();
        assert_eq!(coarse.len(), rule.len() / 2 + 1);
        assert!((coarse.apply(|x| (-x * x).exp()) - PI.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn integrate2d_cases() {
        let grid = PhaseSpaceGrid::square(8.0, 0.25).unwrap();
        let g = integrate2d(|x, p| (-x * x - p * p).exp() / PI, &grid, Tolerance::default_2d());
        assert!(g.converged);
        assert!((g.value - 1.0).abs() < 1e-6);
        let z = integrate2d(|_, _| 0.0, &grid, Tolerance::default_2d());
        assert_eq!(z.value, 0.0);
    }

    #[test]
    fn grid_validation() {
        assert!(PhaseSpaceGrid::new((1.0, 0.0), (0.0, 1.0), 3, 3).is_err());
        assert!(PhaseSpaceGrid::new((0.0, f64::INFINITY), (0.0, 1.0), 3, 3).is_err());
        assert!(PhaseSpaceGrid::new((0.0, 1.0), (0.0, 1.0), 1, 3).is_err());
        let g = PhaseSpaceGrid::new((0.0, 1.0), (-1.0, 1.0), 11, 5).unwrap();
        assert!((g.dx() - 0.1).abs() < 1e-15 && (g.dp() - 0.5).abs() < 1e-15);
        let r = g.refined();
        assert_eq!((r.nx, r.np), (21, 9));
    }

    proptest! {
        #[test]
        fn integrate_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, s in 0.2f64..3.0) {
            let tol = Tolerance::default();
            let f = |x: f64| (-x * x).exp() * x.cos();
            let g = |x: f64| (-s * x * x).exp() * (1.0 + x * x);
            let lhs = integrate(|x| a * f(x) + b * g(x), Domain::Real, tol);
            let rf = integrate(f, Domain::Real, tol);
            let rg = integrate(g, Domain::Real, tol);
            let rhs = a * rf.value + b * rg.value;
            let budget = lhs.error + a.abs() * rf.error + b.abs() * rg.error + 1e-12;
            prop_assert!((lhs.value - rhs).abs() <= budget);
        }
    }
}
