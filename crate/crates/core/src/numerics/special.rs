//! Hermite polynomials, normalized Hermite functions and the error function.

use crate::error::{Error, Result};

/// Deepest Hermite recurrence the library will run.
pub const HERMITE_MAX_ORDER: usize = 400;

/// π^{-1/4}
pub const PI_POW_M_QUARTER: f64 = 0.751_125_544_464_942_5;

/// Physicists' Hermite polynomial Hₙ(x) by the three-term recurrence.
///
/// Raw values overflow quickly for large `n` and `|x|`; wavefunction code should go
/// through [`hermite_functions`], which carries the Gaussian factor inside the recurrence.
pub fn hermite(n: usize, x: f64) -> Result<f64> {
    if n > HERMITE_MAX_ORDER {
        return Err(Error::DepthExceeded { requested: n, limit: HERMITE_MAX_ORDER });
    }
    let mut h_prev = 1.0;
    if n == 0 {
        return Ok(h_prev);
    }
    let mut h = 2.0 * x;
    for k in 1..n {
        let next = 2.0 * x * h - 2.0 * k as f64 * h_prev;
        h_prev = h;
        h = next;
    }
    Ok(h)
}

/// Normalized Hermite functions ψ₀(x) … ψ_{n_max}(x) of the oscillator,
/// ψₙ(x) = e^{-x²/2} Hₙ(x) / (π^{1/4} √(2ⁿ n!)).
///
/// The recurrence runs on the polynomial part with a running logarithmic scale so that
/// neither overflow of Hₙ nor underflow of e^{-x²/2} happens before the two are combined.
pub fn hermite_functions(n_max: usize, x: f64) -> Result<Vec<f64>> {
    if n_max > HERMITE_MAX_ORDER {
        return Err(Error::DepthExceeded { requested: n_max, limit: HERMITE_MAX_ORDER });
    }
    let mut out = Vec::with_capacity(n_max + 1);
    hermite_functions_into(n_max, x, &mut out);
    Ok(out)
}

pub(crate) fn hermite_functions_into(n_max: usize, x: f64, out: &mut Vec<f64>) {
    const RESCALE_ABOVE: f64 = 1e150;
    out.clear();
    let ln_prefactor = -0.5 * x * x;
    let mut ln_scale = 0.0_f64;
    let emit = |v: f64, ln_scale: f64| {
        if v == 0.0 {
            0.0
        } else {
            PI_POW_M_QUARTER * v * (ln_prefactor + ln_scale).exp()
        }
    };

    // unnormalized-by-Gaussian orthonormal recurrence:
    // u_{k+1} = √(2/(k+1)) x u_k − √(k/(k+1)) u_{k-1}
    let mut u_prev = 0.0;
    let mut u = 1.0;
    out.push(emit(u, ln_scale));
    for k in 0..n_max {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * u - (kf / (kf + 1.0)).sqrt() * u_prev;
        u_prev = u;
        u = next;
        if u.abs() > RESCALE_ABOVE {
            u /= RESCALE_ABOVE;
            u_prev /= RESCALE_ABOVE;
            ln_scale += RESCALE_ABOVE.ln();
        }
        out.push(emit(u, ln_scale));
    }
}

/// Single normalized Hermite function ψₙ(x).
pub fn hermite_function(n: usize, x: f64) -> Result<f64> {
    Ok(*hermite_functions(n, x)?.last().expect("at least psi_0"))
}

/// Error function, accurate to a few ulp on the whole real line.
#[inline]
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// Complementary error function 1 − erf(x), without cancellation for large x.
#[inline]
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Maclaurin series 2/√π Σ (−1)ᵏ x^{2k+1} / (k! (2k+1)), summed to machine precision.
    fn erf_series(x: f64) -> f64 {
        let mut term = x;
        let mut sum = x;
        let mut k = 0.0;
        loop {
            k += 1.0;
            term *= -x * x / k;
            let contrib = term / (2.0 * k + 1.0);
            sum += contrib;
            if contrib.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        sum * 2.0 / std::f64::consts::PI.sqrt()
    }

    #[test]
    fn hermite_low_orders() {
        assert_eq!(hermite(0, 3.7).unwrap(), 1.0);
        assert_eq!(hermite(1, 2.0).unwrap(), 4.0);
        assert_eq!(hermite(3, 1.0).unwrap(), -4.0);
        assert_eq!(hermite(4, 0.5).unwrap(), 16.0 * 0.0625 - 48.0 * 0.25 + 12.0);
    }

    #[test]
    fn hermite_guard() {
        assert!(hermite(HERMITE_MAX_ORDER, 0.1).is_ok());
        assert_eq!(hermite(HERMITE_MAX_ORDER + 1, 0.1), Err(Error::DepthExceeded { requested: 401, limit: 400 }));
        assert!(hermite_functions(401, 0.0).is_err());
    }

    #[test]
    fn hermite_functions_match_raw_polynomials() {
        let mut fact = 1.0;
        for n in 0..=15usize {
            if n > 0 {
                fact *= n as f64;
            }
            for &x in &[-3.1, -0.4, 0.0, 1.7, 4.2] {
                let raw = (-0.5_f64 * x * x).exp() * hermite(n, x).unwrap()
                    / (std::f64::consts::PI.powf(0.25) * (2f64.powi(n as i32) * fact).sqrt());
                let scaled = hermite_function(n, x).unwrap();
                assert!((raw - scaled).abs() < 1e-12 * (1.0 + raw.abs()), "n={n} x={x}");
            }
        }
    }

    #[test]
    fn hermite_functions_survive_large_order_and_argument() {
        // beyond the reach of the raw polynomial (H_400(30) overflows f64)
        assert!(!hermite(400, 30.0).unwrap().is_finite());
        let v = hermite_functions(400, 30.0).unwrap();
        assert!(v.iter().all(|p| p.is_finite()));
        // oscillatory region value stays O(1)
        assert!(v[400].abs() < 1.0);
        // Far in the forbidden region everything is tiny but finite.
        let far = hermite_functions(10, 40.0).unwrap();
        assert!(far.iter().all(|p| p.is_finite() && p.abs() < 1e-300));
    }

    #[test]
    fn erf_values() {
        assert_eq!(erf(0.0), 0.0);
        assert!((erf(10.0) - 1.0).abs() < 1e-12);
        assert!((erf(-10.0) + 1.0).abs() < 1e-12);
        assert!((erf(1.0) - 0.842_700_792_949_715).abs() < 1e-14);
        for &x in &[0.05, 0.3, 0.9, 1.0, 1.5, 2.2, 3.0] {
            let oracle = erf_series(x);
            assert!((erf(x) - oracle).abs() < 1e-13, "x={x}: {} vs {}", erf(x), oracle);
        }
    }

    #[test]
    fn erf_is_odd_and_complement_is_consistent() {
        for i in 0..400 {
            let x = -6.0 + 0.03 * i as f64;
            assert_eq!(erf(-x), -erf(x));
            assert!((erf(x) + erfc(x) - 1.0).abs() < 2e-16);
        }
        // erfc keeps relative accuracy deep in the tail
        let tail = erfc(8.0);
        assert!(tail > 0.0 && (tail / 1.122_429_717_298_292_7e-29 - 1.0).abs() < 1e-12);
    }
}
