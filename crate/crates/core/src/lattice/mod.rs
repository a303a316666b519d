//! Exact two-component Bose-Hubbard chain.
//!
//! The Hilbert space is the fixed-`N` Fock space over `2M` modes
//! `(a_1..a_M, b_1..b_M)`. Time evolution uses short-time Lanczos steps; the
//! collective spin is `J_+ = sum_j a_j^+ b_j`, `J_z = (N_a - N_b)/2`, so the
//! Dicke label of a state with `N_a` atoms in `a` is `n = N_a - N/2`.

mod basis;
mod checkpoint;
mod compare;
mod krylov;
mod operators;
mod params;
mod sparse;
mod system;

pub use basis::{build_basis, build_basis_with_cap, FockBasis, DEFAULT_DIMENSION_CAP};
pub use checkpoint::{Checkpoint, CHECKPOINT_FORMAT, CHECKPOINT_VERSION};
pub use compare::{first_crossing, CrossModelReport, CrossModelSample};
pub use krylov::{evolve_krylov, lanczos_ground_state, KrylovConfig, Propagator};
pub use operators::{build_hamiltonian, CollectiveSpin, SpinYOperator};
pub use params::{
    effective_chi, hopping_from_depth, interaction_from_depth, lattice_params, BHParams,
    Boundary, Couplings, REFERENCE_UAB_RATIO,
};
pub use sparse::{CsrMatrix, LinearOperator};
pub use system::{LatticeState, LatticeSystem};
