//! Numerical resolution profiles.
//!
//! A profile bundles every discretization knob used by the state and measure code. The
//! `ISOSHO_PROFILE` environment variable (`strict`, `default`, `fast`) selects one for the
//! command-line tool.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::numerics::Tolerance;

pub const PROFILE_ENV: &str = "ISOSHO_PROFILE";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub name: ProfileName,
    /// Trapezoid step for all position-space integrals.
    pub position_step: f64,
    /// Wavefunctions are treated as zero beyond `tail_margin + √(2n)`.
    pub tail_margin: f64,
    /// Thermal sums stop once the Gibbs tail mass drops below this.
    pub gibbs_tail: f64,
    /// Fock columns must reach this norm deficit.
    pub fock_deficit: f64,
    pub fock_cap: usize,
    /// Initial phase-space spacing for Wigner grids.
    pub wigner_spacing: f64,
    /// Stop refining when ν changes by less than this.
    pub wigner_refine_tol: f64,
    pub wigner_max_refinements: usize,
    /// Relative discrepancy that flags a thermal QFI point.
    pub derivative_check_tol: f64,
    pub tolerance: Tolerance,
    pub tolerance_2d: Tolerance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileName {
    Strict,
    Default,
    Fast,
}

impl Profile {
    pub fn strict() -> Self {
        Profile {
            name: ProfileName::Strict,
            position_step: 1.0 / 128.0,
            wigner_spacing: 0.03,
            wigner_max_refinements: 2,
            tolerance: Tolerance { abs_tol: 1e-12, rel_tol: 1e-10, max_subdivisions: 4000 },
            ..Profile::default()
        }
    }

    pub fn fast() -> Self {
        Profile {
            name: ProfileName::Fast,
            position_step: 1.0 / 32.0,
            wigner_spacing: 0.06,
            wigner_max_refinements: 0,
            ..Profile::default()
        }
    }

    pub fn from_name(name: ProfileName) -> Self {
        match name {
            ProfileName::Strict => Profile::strict(),
            ProfileName::Default => Profile::default(),
            ProfileName::Fast => Profile::fast(),
        }
    }

    /// Reads `ISOSHO_PROFILE`; unset means default.
    pub fn from_env() -> Result<Self, Error> {
        match std::env::var(PROFILE_ENV) {
            Ok(v) if !v.trim().is_empty() => Ok(Profile::from_name(v.parse()?)),
            _ => Ok(Profile::default()),
        }
    }
}

impl Default for Profile {
    fn default() -> Self {
        Profile {
            name: ProfileName::Default,
            position_step: 1.0 / 64.0,
            tail_margin: 12.0,
            gibbs_tail: 1e-12,
            fock_deficit: 1e-8,
            fock_cap: 400,
            wigner_spacing: 0.04,
            wigner_refine_tol: 1e-4,
            wigner_max_refinements: 1,
            derivative_check_tol: 1e-3,
            tolerance: Tolerance::default(),
            tolerance_2d: Tolerance::default_2d(),
        }
    }
}

impl FromStr for ProfileName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim().to_ascii_lowercase().as_str() {
            "strict" => Ok(ProfileName::Strict),
            "default" => Ok(ProfileName::Default),
            "fast" => Ok(ProfileName::Fast),
            other => Err(Error::Config(format!("unknown tolerance profile '{other}' (strict|default|fast)"))),
        }
    }
}

impl std::fmt::Display for ProfileName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ProfileName::Strict => "strict",
            ProfileName::Default => "default",
            ProfileName::Fast => "fast",
        };
        f.write_str(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for n in [ProfileName::Strict, ProfileName::Default, ProfileName::Fast] {
            assert_eq!(n.to_string().parse::<ProfileName>().unwrap(), n);
            assert_eq!(Profile::from_name(n).name, n);
        }
        assert!("medium".parse::<ProfileName>().is_err());
    }

    #[test]
    fn strict_is_finer_than_fast() {
        assert!(Profile::strict().position_step < Profile::fast().position_step);
        assert!(Profile::strict().wigner_spacing < Profile::fast().wigner_spacing);
    }
}
