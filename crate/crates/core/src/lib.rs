//! Spectral solver and verification suite for the stationary
//! pseudo-relativistic Hartree equation on the unit box with Dirichlet
//! conditions:
//!
//! ```text
//! sqrt(-Delta + m^2) u - omega u - lambda <G, u^2> u - f(x, u) = 0
//! ```
//!
//! Fields live in the Dirichlet sine eigenbasis, where the operator is
//! diagonal and the Hartree potential `<G, u^2>` is a one-line Poisson
//! solve. The solver finds one strictly positive and one strictly negative
//! mountain-pass critical point of the sign-constrained energies J+ / J- by
//! path deformation with Sobolev-gradient descent plus a Newton finish, and
//! works for superlinear reactions that need not satisfy the
//! Ambrosetti-Rabinowitz condition (the Cerami-type compactness quantities
//! are monitored along the run instead). A property suite validates the
//! trace inequality, the nonlocal convolution bound, embedding constants,
//! gradient consistency, and the harmonic-extension correspondence.

pub mod domain;
mod dst;
pub mod energy;
pub mod error;
pub mod extension;
pub mod greens;
pub mod io;
pub mod nonlin;
pub mod sampling;
pub mod solver;
pub mod verify;

pub use domain::{Dimension, DomainSpec, Mass, OperatorParams, SpectralField};
pub use energy::{EnergyContext, EnergyBreakdown, LocalMinCertificate, RayScan, SignMode};
pub use error::{Error, Result};
pub use extension::{evaluate_extension, extension_residual, solitary_wave, ExtensionResidual};
pub use greens::{green_potential, green_potential_dealiased, hartree_quartic, hartree_trilinear, PotentialField};
pub use nonlin::{
    check_ar, check_growth, check_quasimonotone, check_small_s, check_superquadratic,
    run_hypotheses, ArVerdict, HypothesisBundle, HypothesisReport, NonlinearitySpec, Verdict,
};
pub use solver::{
    cerami_monitor, find_endpoint, mountain_pass, mountain_pass_with_seed, refine_and_compare,
    solve_both_signs, BothSigns, CeramiDiagnostics, DriftReport, PathState, SolveConfig,
    SolveReport,
};
pub use verify::{run_verify, FaultInjection, VerifyOptions, VerifyReport};
