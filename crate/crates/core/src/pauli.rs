// SPDX-License-Identifier: Apache-2.0

//! Bit-packed Pauli strings.
//!
//! Each qubit takes two bits, `I → 00`, `X → 01`, `Y → 10`, `Z → 11`, and
//! qubit 0 occupies the two least-significant bits. The integer value of the
//! packed word is the key used for canonical ordering, for the snapshot file
//! format, and for the "lowest integer" orbit representatives.
//!
//! With this code table the product of two single-qubit Paulis is, up to a
//! phase, the XOR of their codes, so a whole-string product is one XOR plus
//! a popcount-based phase computation.

use std::fmt;
use std::str::FromStr;

use crate::error::{input, Error, Result};
use crate::permutation::Permutation;

/// Largest supported qubit count (two bits per qubit in a `u128`).
pub const MAX_QUBITS: usize = 64;

const EVEN_BITS: u128 = 0x5555_5555_5555_5555_5555_5555_5555_5555;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Pauli {
    I = 0b00,
    X = 0b01,
    Y = 0b10,
    Z = 0b11,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Pauli {
        Self::ALL[(code & 0b11) as usize]
    }

    pub fn letter(self) -> char {
        ['I', 'X', 'Y', 'Z'][self as usize]
    }

    pub fn from_letter(c: char) -> Option<Pauli> {
        match c.to_ascii_uppercase() {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// Power of `i`: the phase `i^k` for `k ∈ {0, 1, 2, 3}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_exponent(k: u32) -> Phase {
        Phase((k % 4) as u8)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn is_real(self) -> bool {
        self.0 % 2 == 0
    }

    /// `(re, im)` as small integers.
    pub fn as_unit(self) -> (i8, i8) {
        [(1, 0), (0, 1), (-1, 0), (0, -1)][self.0 as usize]
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

/// An `n`-qubit Pauli operator without phase.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    // Ordering is by `bits` first, so sorting gives ascending integer keys.
    bits: u128,
    n_qubits: u8,
}

/// A Pauli string with a fourth-root-of-unity prefactor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PhasedPauli {
    pub pauli: PauliString,
    pub phase: Phase,
}

fn check_qubits(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return input(format!("qubit count must be in 1..={MAX_QUBITS}, got {n_qubits}"));
    }
    Ok(())
}

fn width_mask(n_qubits: usize) -> u128 {
    if n_qubits >= MAX_QUBITS {
        u128::MAX
    } else {
        (1u128 << (2 * n_qubits)) - 1
    }
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        Ok(Self { bits: 0, n_qubits: n_qubits as u8 })
    }

    /// Pack `letters` (qubit 0 first) into a string on `n_qubits` qubits.
    pub fn encode(letters: &[Pauli], n_qubits: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        if letters.len() != n_qubits {
            return input(format!("{} letters given for {n_qubits} qubits", letters.len()));
        }
        let bits = letters.iter().enumerate().fold(0u128, |acc, (q, p)| acc | (u128::from(p.code()) << (2 * q)));
        Ok(Self { bits, n_qubits: n_qubits as u8 })
    }

    pub fn from_letters(letters: &[Pauli]) -> Result<Self> {
        Self::encode(letters, letters.len())
    }

    pub fn from_bits(bits: u128, n_qubits: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        if bits & !width_mask(n_qubits) != 0 {
            return input(format!("key {bits} has bits set above qubit {}", n_qubits - 1));
        }
        Ok(Self { bits, n_qubits: n_qubits as u8 })
    }

    /// A single non-identity factor `pauli` on `qubit`.
    pub fn single(n_qubits: usize, qubit: usize, pauli: Pauli) -> Result<Self> {
        Self::from_sparse(n_qubits, &[(qubit, pauli)])
    }

    pub fn from_sparse(n_qubits: usize, factors: &[(usize, Pauli)]) -> Result<Self> {
        let mut s = Self::identity(n_qubits)?;
        for &(q, p) in factors {
            if q >= n_qubits {
                return input(format!("qubit {q} out of range for {n_qubits} qubits"));
            }
            s = s.with(q, p);
        }
        Ok(s)
    }

    pub(crate) fn from_bits_unchecked(bits: u128, n_qubits: usize) -> Self {
        debug_assert_eq!(bits & !width_mask(n_qubits), 0);
        Self { bits, n_qubits: n_qubits as u8 }
    }

    pub fn bits(&self) -> u128 {
        self.bits
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits as usize
    }

    pub fn get(&self, qubit: usize) -> Pauli {
        Pauli::from_code((self.bits >> (2 * qubit)) as u8)
    }

    #[must_use]
    pub fn with(mut self, qubit: usize, pauli: Pauli) -> Self {
        let shift = 2 * qubit;
        self.bits = (self.bits & !(0b11 << shift)) | (u128::from(pauli.code()) << shift);
        self
    }

    /// Unpack to letters, qubit 0 first.
    pub fn letters(&self) -> Vec<Pauli> {
        (0..self.n_qubits()).map(|q| self.get(q)).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.bits == 0
    }

    fn support_mask(&self) -> u128 {
        (self.bits | (self.bits >> 1)) & EVEN_BITS
    }

    /// Number of non-identity factors.
    pub fn weight(&self) -> usize {
        self.support_mask().count_ones() as usize
    }

    /// Counts of `(X, Y, Z)` factors.
    pub fn letter_counts(&self) -> (usize, usize, usize) {
        let lo = self.bits & EVEN_BITS;
        let hi = (self.bits >> 1) & EVEN_BITS;
        let x = (lo & !hi).count_ones() as usize;
        let y = (!lo & hi & EVEN_BITS).count_ones() as usize;
        let z = (lo & hi).count_ones() as usize;
        (x, y, z)
    }

    fn same_size(&self, other: &PauliString) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::Input(format!("Pauli strings on {} and {} qubits", self.n_qubits, other.n_qubits)));
        }
        Ok(())
    }

    /// Positions where both factors are non-identity and different.
    fn clash_mask(&self, other: &PauliString) -> u128 {
        let diff = self.bits ^ other.bits;
        self.support_mask() & other.support_mask() & ((diff | (diff >> 1)) & EVEN_BITS)
    }

    pub(crate) fn anticommutes_unchecked(&self, other: &PauliString) -> bool {
        self.clash_mask(other).count_ones() % 2 == 1
    }

    pub fn commutes(&self, other: &PauliString) -> Result<bool> {
        self.same_size(other)?;
        Ok(!self.anticommutes_unchecked(other))
    }

    pub(crate) fn product_unchecked(&self, other: &PauliString) -> PhasedPauli {
        let (a0, a1) = (self.bits & EVEN_BITS, (self.bits >> 1) & EVEN_BITS);
        let (b0, b1) = (other.bits & EVEN_BITS, (other.bits >> 1) & EVEN_BITS);
        let (na0, na1, nb0, nb1) = (!a0 & EVEN_BITS, !a1 & EVEN_BITS, !b0 & EVEN_BITS, !b1 & EVEN_BITS);
        // XY = iZ, YZ = iX, ZX = iY; the reversed orders give −i.
        let plus = (a0 & na1 & nb0 & b1) | (na0 & a1 & b0 & b1) | (a0 & a1 & b0 & nb1);
        let minus = (na0 & a1 & b0 & nb1) | (a0 & a1 & nb0 & b1) | (a0 & na1 & b0 & b1);
        let exponent = plus.count_ones() + 3 * minus.count_ones();
        PhasedPauli {
            pauli: PauliString { bits: self.bits ^ other.bits, n_qubits: self.n_qubits },
            phase: Phase::from_exponent(exponent),
        }
    }

    /// Matrix product `self · other` as a phase times a Pauli string.
    pub fn product(&self, other: &PauliString) -> Result<PhasedPauli> {
        self.same_size(other)?;
        Ok(self.product_unchecked(other))
    }

    /// Move the factor on qubit `i` to qubit `perm(i)`.
    pub fn apply_permutation(&self, perm: &Permutation) -> Result<PauliString> {
        if perm.len() != self.n_qubits() {
            return input(format!("permutation on {} qubits applied to a {}-qubit string", perm.len(), self.n_qubits));
        }
        Ok(self.permuted_unchecked(perm.images()))
    }

    pub(crate) fn permuted_unchecked(&self, images: &[usize]) -> PauliString {
        let mut bits = 0u128;
        let mut rest = self.bits;
        while rest != 0 {
            let pos = rest.trailing_zeros() as usize & !1;
            let code = (rest >> pos) & 0b11;
            bits |= code << (2 * images[pos / 2]);
            rest &= !(0b11 << pos);
        }
        PauliString { bits, n_qubits: self.n_qubits }
    }

    /// Cyclic shift by one qubit, `i ↦ i − 1 (mod n)`: a 2-bit right rotation
    /// of the packed word.
    pub fn shifted_down(&self) -> PauliString {
        let n = self.n_qubits();
        let low = self.bits & 0b11;
        let bits = (self.bits >> 2) | (low << (2 * (n - 1)));
        PauliString { bits, n_qubits: self.n_qubits }
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n_qubits() {
            write!(f, "{}", self.get(q).letter())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Parses `"XYZ"` with qubit 0 leftmost.
    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .trim()
            .chars()
            .map(|c| Pauli::from_letter(c).ok_or_else(|| Error::Input(format!("bad Pauli letter {c:?} in {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::from_letters(&letters)
    }
}

impl fmt::Display for PhasedPauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = ["+", "+i", "-", "-i"][self.phase.exponent() as usize];
        write!(f, "{sign}{}", self.pauli)
    }
}
