//! The one-defect Hadamard walk: exact finite-time evolution, the weak limit
//! `C delta_0 + w(x) f_K(x; 1/sqrt(2)) dx` of `X_t / t`, and an independent
//! residue-based reconstruction of its continuous part.

pub mod convergence;
pub mod error;
pub mod exec;
pub mod limit;
pub mod paths;
pub mod quadrature;
pub mod spectral;
pub mod walk;

pub use error::{Error, Result};
pub use exec::Execution;
pub use limit::{
    ac_density, atom_mass, konno_density, konno_half, weight, weight_coefficients, Fixture,
    InitialStateAngles, LimitMeasure, WeightCoefficients,
};
pub use quadrature::{QuadratureResult, SUPPORT_BOUND};
pub use spectral::{density_via_k_integration, residue_factors, Branch, ResidueFactors};
pub use walk::{
    distribution, evolve, evolve_capped, rescaled_distribution, time_averaged, AmplitudeField,
    Distribution, Spinor, Walk, WalkParams,
};
