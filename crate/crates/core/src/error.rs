// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed or inconsistent arguments.
    #[error("invalid input: {0}")]
    Input(String),

    /// The request is well formed but not supported for this group kind.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// The sparse observable outgrew the configured term cap.
    #[error("term count {terms} exceeds the cap of {cap} in layer {layer}")]
    TermCap { layer: usize, terms: usize, cap: usize },

    /// A dense reference computation was requested beyond its size limit.
    #[error("dense reference limited to {max} qubits, got {n_qubits}")]
    DenseTooLarge { n_qubits: usize, max: usize },

    /// An exact count does not fit in 128 bits.
    #[error("count overflows 128-bit arithmetic: {0}")]
    Overflow(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
