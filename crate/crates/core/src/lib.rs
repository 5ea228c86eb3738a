//! Band functions of the de Gennes operator `-∂²_t + (t − ξ)²` on the
//! half-line with a Neumann condition at 0, and the holomorphic extension of
//! the lowest band to a strip `|Im ξ| < ε` built from Riesz projections.
//!
//! * [`operator`]: operator families (de Gennes, the Airy comparison operator
//!   `-∂² + 2τ`, Montgomery operators) and two discretizations.
//! * [`spectrum`]: eigenpairs, band tables, the minimum Θ₀ and the ξ → ±∞
//!   asymptotics.
//! * [`holomorphic`]: resolvent estimates, contour projections and the
//!   extension `F(ξ)` over a strip.
//! * [`verify`]: the verification suite behind `degennes check`.

pub mod config;
pub mod error;
pub mod holomorphic;
pub mod linalg;
pub mod operator;
pub mod quadrature;
pub mod spectrum;
pub mod verify;

pub use config::Tolerances;
pub use error::{Error, Result};
pub use holomorphic::{
    contour_for, estimate_r0, extend_mu, resolvent_difference, resolvent_norm, riesz_projection, strip_sweep,
    weighted_resolvent_norm, ContourSpec, ExtensionMethod, ExtensionResult, RieszProjection, SweepConfig,
    SweepResult,
};
pub use num_complex::Complex64;
pub use operator::{
    assemble, dilation_check, real_part_form_min, AssembledOperator, Discretization, Family, OperatorSpec, Scheme,
    StandardForm, Truncation,
};
pub use spectrum::{
    asymptotics_minus, asymptotics_plus, band_table, eigs, find_theta0, ground_energy, BandTable, SpectrumResult,
    Theta0,
};
