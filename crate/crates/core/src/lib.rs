//! Exact-arithmetic toolkit for inhomogeneous XXX spin chains with
//! arbitrary finite-dimensional site spins: monodromy matrices, the
//! exchange (RTT) relation, higher-spin R-matrices from their Gauss
//! decomposition, the basis change that diagonalizes D(u), the
//! factorizing F-matrices that realize it, and the separated-variable
//! operators living in that basis.
//!
//! Everything is computed over arbitrary-precision rationals and every
//! claimed identity is checked as literal equality of matrices or of
//! polynomial coefficients; there are no tolerances anywhere.

// index-based loops are the clearest form for the dense kernels here
#![allow(clippy::needless_range_loop)]

pub mod chain;
pub mod dump;
pub mod error;
pub mod fba;
pub mod perm;
pub mod poly;
pub mod products;
pub mod report;
pub mod rmatrix;
pub mod sampling;
pub mod scalar;
pub mod spin;
pub mod tensor;
pub mod twist;

pub use chain::{check_rtt, monodromy, quantum_determinant, ChainSpec, Monodromy};
pub use error::{Error, Result};
pub use fba::{
    check_separated_algebra, reconstruct_bc, separated_operators, spectrum, SeparatedOperators,
    SpectrumLattice,
};
pub use perm::SitePermutation;
pub use poly::{OperatorPolynomial, ScalarPoly};
pub use report::{CheckResult, CheckStatus, Discrepancy};
pub use rmatrix::{fundamental_r, generalized_r, higher_spin_r, RMatrix};
pub use scalar::Rat;
pub use spin::{l_operator, spin_matrices, SiteSpec, SpinTriple};
pub use tensor::{
    permute_tensor_factors, tensor_embed, TensorOperator, TensorShape,
};
pub use twist::{
    check_cocycle, check_conjugation, check_factorization, f_matrix, partial_f_left,
    partial_f_right, q_factor_left, q_factor_right, tilde_ops, FMatrix, TildeOps,
};
