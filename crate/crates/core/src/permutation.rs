// SPDX-License-Identifier: Apache-2.0

//! Qubit-index permutations, the only kind of group element this crate acts with.

use std::fmt;

use crate::error::{input, Result};

/// A bijection on `{0, …, n−1}` stored as its image table: qubit `i` is sent
/// to `images[i]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        if images.is_empty() {
            return input("permutation must act on at least one qubit");
        }
        let mut seen = vec![false; images.len()];
        for &img in &images {
            if img >= images.len() || seen[img] {
                return input(format!("{images:?} is not a bijection on 0..{}", images.len()));
            }
            seen[img] = true;
        }
        Ok(Self { images })
    }

    pub fn identity(n: usize) -> Self {
        Self { images: (0..n).collect() }
    }

    /// `i ↦ i + shift (mod n)`.
    pub fn rotation(n: usize, shift: usize) -> Self {
        Self { images: (0..n).map(|i| (i + shift) % n).collect() }
    }

    /// `i ↦ n − 1 − i`.
    pub fn reversal(n: usize) -> Self {
        Self { images: (0..n).rev().collect() }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `self ∘ other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.len() != other.len() {
            return input(format!("cannot compose permutations on {} and {} qubits", self.len(), other.len()));
        }
        Ok(Permutation { images: other.images.iter().map(|&i| self.images[i]).collect() })
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.len()];
        for (i, &j) in self.images.iter().enumerate() {
            images[j] = i;
        }
        Permutation { images }
    }

    /// Number of cycles, fixed points included.
    pub fn cycle_count(&self) -> usize {
        let mut seen = vec![false; self.len()];
        let mut cycles = 0;
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            cycles += 1;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.images[i];
            }
        }
        cycles
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{:?}", self.images)
    }
}
