//! Special functions and the quadrature engine.
//!
//! Everything here is pure; rules are immutable once built and can be shared between
//! threads freely.

mod quadrature;
mod special;

pub use quadrature::{
    composite_rule, gauss_hermite, integrate, integrate2d, Domain, Integral, IntegrationMethod, PhaseSpaceGrid,
    QuadratureRule, RuleKind, Tolerance,
};
pub use special::{erf, erfc, hermite, hermite_function, hermite_functions, HERMITE_MAX_ORDER, PI_POW_M_QUARTER};

pub(crate) use special::hermite_functions_into;
