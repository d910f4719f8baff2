// SPDX-License-Identifier: Apache-2.0

//! Pauli propagation with symmetry merging.
//!
//! An observable is expanded in Pauli strings and pushed backwards through
//! a circuit of Pauli rotations (the Heisenberg picture). When every layer
//! and the initial state are invariant under a group of qubit permutations,
//! strings in the same orbit contribute equally to the final expectation,
//! so only one representative per orbit needs to be stored; its coefficient
//! is the sum over the orbit.
//!
//! The coefficient type is generic ([`Scalar`], implemented for `f32` and
//! `f64`); the aliases below fix it to one of the two.

pub mod error;
pub mod models;
pub mod oracle;
pub mod pauli;
pub mod permutation;
pub mod propagation;
pub mod random;
pub mod scalar;
pub mod symmetry;

pub use error::{Error, Result};
pub use pauli::{Pauli, PauliString, Phase, PhasedPauli};
pub use permutation::Permutation;
pub use propagation::{MergePolicy, PropagationTrace};
pub use scalar::Scalar;
pub use symmetry::{GroupKind, OrbitReport, SymmetryGroup};

pub type PauliSum64 = propagation::PauliSum<f64>;
pub type PauliSum32 = propagation::PauliSum<f32>;
pub type Circuit64 = propagation::Circuit<f64>;
pub type Circuit32 = propagation::Circuit<f32>;
pub type PauliRotationGate64 = propagation::PauliRotationGate<f64>;
pub type NoiseLayer64 = propagation::NoiseLayer<f64>;
pub type PropagationConfig64 = propagation::PropagationConfig<f64>;
pub type PropagationConfig32 = propagation::PropagationConfig<f32>;
pub type ProductState64 = models::ProductState<f64>;
pub type ProductState32 = models::ProductState<f32>;
pub type IsingParams64 = models::IsingParams<f64>;
pub type XxzParams64 = models::XxzParams<f64>;
pub type DenseOperator64 = oracle::DenseOperator<f64>;
