//! One-axis-twisting (OAT) dynamics of two-mode bosonic qubits, the many-body
//! Bell correlator `|<J+^N>/N!|^2`, Bell-correlation and entanglement depth
//! certification, and an exact two-component Bose-Hubbard lattice model used
//! to cross-check the OAT picture.
//!
//! Conventions used throughout:
//!
//! * Dicke states are stored by slot `k = n + N/2`, where `n` is the `J_z`
//!   eigenvalue, so slot 0 holds `|-N/2>` and slot `N` holds `|+N/2>`.
//! * Rotations are `R(theta) = exp(-i theta J_y)` applied as `|psi> -> R|psi>`.
//!   With this convention the `+x` coherent spin state is mapped by
//!   `R(pi/2)` onto `|-N/2>`.
//! * OAT time is the dimensionless `tau = chi t`, evolution `exp(-i tau J_z^2)`.

pub mod analytic;
pub mod bell;
pub mod dicke;
mod error;
pub mod lattice;
pub mod precise;
pub mod special;
pub mod tolerance;
pub mod wigner;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use analytic::{
    gaussian_correlator, revival_coeffs, revival_correlator, shorttime_depth_estimate,
    tau_crit_approx, tau_s, RevivalSpec,
};
pub use bell::{
    bell_correlator_oat, bell_depth, bell_ln_correlator_oat, correlator_from_jplus,
    entanglement_depth, extreme_coeffs_exact, lhv_max_bruteforce, tau_crit_exact, BellReport,
    ExtremePair,
};
pub use dicke::{make_css, DickeState, SpinSummary};
pub use tolerance::Tolerances;
pub use wigner::{wigner_d, WignerMatrix};
