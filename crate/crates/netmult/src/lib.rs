//! Network multipliers for homogeneous coupled-cell networks with asymmetric
//! inputs.
//!
//! Given such a network, the linear admissible maps — the linear maps
//! respecting the network structure — form a family whose spectrum can be
//! computed without ever assembling the full matrix. This crate builds the
//! monoid generated by the network's input maps, splits the associated
//! algebra of admissible maps into its radical and a direct sum of simple
//! matrix blocks, and emits the resulting *network multipliers*: small
//! matrices, linear in the response coefficients, whose eigenvalues (with
//! integer multiplicities obtained from self-loop counts) make up the
//! spectrum of every admissible map for every constructible network of the
//! monoid. A verification harness checks the reduction against a dense
//! eigensolver on randomized coefficient draws.

// dense index arithmetic over several arrays at once reads better as loops
#![allow(clippy::needless_range_loop)]

pub mod admissible;
pub mod cli;
pub mod error;
pub mod exact;
pub mod io;
pub mod multiplier;
pub mod network;
pub mod seeding;
pub mod spectral;
#[cfg(test)]
pub(crate) mod testutil;

pub use admissible::{
    build_admissible, check_equivariance, generator_operators, sigma_product, symmetry_operators,
    trace_functional, AdmissibleMatrix, Coefficients,
};
pub use error::{Error, Result};
pub use multiplier::{
    algebra_structure, characters, evaluate, multipliers, radical, realize_block,
    wedderburn_blocks, AdmissibleAlgebra, MultiplierSet, RadicalSplit, SimpleBlock,
};
pub use network::{
    circulant_network, completion, disjoint_union, enumerate_balanced_partitions,
    fundamental_network, input_network, is_balanced, is_constructible, is_fibration,
    monoid_closure, quotient, Completion, Fibration, InputMap, Monoid, Network, Partition,
};
pub use spectral::{
    circulant_multipliers, dense_spectrum, match_spectra, multiplicities, predicted_spectrum,
    verify_network, MultiplicityVector, SpectralReport, VerifyOutcome,
};
