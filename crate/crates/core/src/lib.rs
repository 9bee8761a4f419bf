//! Oscillators isospectral to the shifted harmonic oscillator.
//!
//! The Darboux/SUSY construction deforms V(x) = ½(x² − 1) into a one-parameter family
//! V̂(λ; x) with exactly the same spectrum Eₙ = n. This crate builds the eigenfunctions of
//! that family, their ground and Gibbs states, and evaluates
//!
//! * relative-entropy non-Gaussianity,
//! * quadrature squeezing, photon statistics (Fano factor), Wigner negativity and the
//!   quadrature coherence scale,
//! * quantum and classical (position) Fisher information for λ.
//!
//! Units are ħ = m = ω = k_B = 1 throughout.
//!
//! ```
//! use isosho_core::{estimation, DeformationParameter};
//!
//! let lam = DeformationParameter::new(1.0).unwrap();
//! let h = estimation::qfi_pure(lam).unwrap();
//! assert!((h.value - estimation::qfi_closed_form(lam)).abs() < 1e-9);
//! ```

pub mod error;
pub mod estimation;
pub mod figures;
pub mod measures;
pub mod numerics;
pub mod profile;
pub mod states;
pub mod susy;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
pub use numerics::{PhaseSpaceGrid, QuadratureRule, Tolerance};
pub use profile::Profile;
pub use states::{GibbsWeights, OscillatorState};
pub use susy::DeformationParameter;
pub use sweep::{MeasureReport, SweepConfig};
