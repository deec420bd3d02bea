//! Coupled-channel square wells on `(-1, 1)` with purely imaginary,
//! antisymmetric couplings `-i A sign(x)`, pseudo-Hermitian under a cyclic
//! channel rotation combined with spatial reflection.
//!
//! * [`parity`]: the rotations `r_(K,L)` and pseudo-parities `P r_(K,L)`.
//! * [`constraints`]: coupling patterns compatible with a given rotation.
//! * [`spectrum`]: effective charges, secular roots and bound states.
//! * [`oracle`]: finite-difference check of all of the above.
//! * [`export`]: CSV/JSON serialization of spectra.

pub mod constraints;
pub mod error;
pub mod export;
pub mod linalg;
pub mod oracle;
pub mod parity;
pub mod spectrum;

pub use constraints::{
    assemble, entry_permutation, pattern_dimension, permuted_view, solve_pattern,
    solve_unconstrained, verify_constraint, CouplingMatrix, CouplingPattern, EntryPermutation,
    PatternRecord,
};
pub use error::{Error, Result};
pub use oracle::{
    biorthogonal_basis, build_metric, compare_spectra, discretize, eigensolve, lowest_eigenvalues,
    pseudo_hermiticity_residual, BiorthogonalPair, DiscretizedHamiltonian, MetricTheta,
};
pub use parity::{make_parity, GeneralizedParity, Permutation, PseudoParity};
pub use spectrum::{
    bound_state, critical_coupling, critical_scaling, effective_charges, evaluate_wavefunction, secular_residual,
    shifted_charges, solve_roots, spectrum, spectrum_for_pattern, BoundState, EffectiveCharge,
    SecularRoot, Spectrum,
};
