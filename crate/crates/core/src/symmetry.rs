// SPDX-License-Identifier: Apache-2.0

//! Finite qubit-permutation groups, orbits of Pauli strings under them, and
//! lowest-integer orbit representatives.
//!
//! The representative of an orbit is the member with the smallest packed
//! integer key. Cyclic and dihedral groups find it by scanning their shifts
//! and reflections, the full symmetric group builds it directly from the
//! letter counts, and any other group scans its materialized elements.
//! Representative counts come from Burnside's lemma: a permutation with `c`
//! cycles fixes exactly `4^c` Pauli strings.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use crate::error::{input, Error, Result};
use crate::pauli::{PauliString, MAX_QUBITS};
use crate::permutation::Permutation;

/// Default cap on the number of elements a generated group may close to.
pub const DEFAULT_ELEMENT_CAP: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupKind {
    Trivial,
    /// Cyclic shifts of a ring, ℤₙ.
    Translation1d,
    /// Independent cyclic shifts along both axes of an `lx × ly` torus with
    /// row-major indexing `q = y·lx + x`.
    Translation2d {
        lx: usize,
        ly: usize,
    },
    /// Rotations and reflections of a ring, Dₙ.
    Dihedral,
    /// All permutations, Sₙ. Never materialized.
    PermutationFull,
    /// Closure of user-supplied generators.
    Generic,
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupKind::Trivial => f.write_str("trivial"),
            GroupKind::Translation1d => f.write_str("translation_1d"),
            GroupKind::Translation2d { lx, ly } => write!(f, "translation_2d({lx}x{ly})"),
            GroupKind::Dihedral => f.write_str("dihedral"),
            GroupKind::PermutationFull => f.write_str("permutation_full"),
            GroupKind::Generic => f.write_str("generic"),
        }
    }
}

/// A finite group of qubit permutations together with its canonicalization
/// strategy.
#[derive(Clone, Debug)]
pub struct SymmetryGroup {
    n_qubits: usize,
    kind: GroupKind,
    // Identity first. Empty for `PermutationFull`.
    elements: Vec<Permutation>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitReport {
    pub representative: PauliString,
    pub orbit_size: u128,
    /// Orbit members in ascending key order, when requested.
    pub members: Option<Vec<PauliString>>,
}

fn check_qubits(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return input(format!("group must act on 1..={MAX_QUBITS} qubits, got {n}"));
    }
    Ok(())
}

fn dedup_keep_order(perms: impl IntoIterator<Item = Permutation>) -> Vec<Permutation> {
    let mut seen = HashSet::new();
    perms.into_iter().filter(|p| seen.insert(p.clone())).collect()
}

impl SymmetryGroup {
    pub fn trivial(n_qubits: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        Ok(Self { n_qubits, kind: GroupKind::Trivial, elements: vec![Permutation::identity(n_qubits)] })
    }

    pub fn translation_1d(n_qubits: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        let elements = (0..n_qubits).map(|j| Permutation::rotation(n_qubits, j)).collect();
        Ok(Self { n_qubits, kind: GroupKind::Translation1d, elements })
    }

    pub fn translation_2d(lx: usize, ly: usize) -> Result<Self> {
        if lx == 0 || ly == 0 {
            return input(format!("torus dimensions must be positive, got {lx}x{ly}"));
        }
        let n_qubits = lx.checked_mul(ly).ok_or_else(|| Error::Input("torus too large".into()))?;
        check_qubits(n_qubits)?;
        let mut elements = Vec::with_capacity(n_qubits);
        for dy in 0..ly {
            for dx in 0..lx {
                let images = (0..n_qubits)
                    .map(|q| {
                        let (x, y) = (q % lx, q / lx);
                        ((y + dy) % ly) * lx + (x + dx) % lx
                    })
                    .collect();
                elements.push(Permutation::new(images)?);
            }
        }
        Ok(Self { n_qubits, kind: GroupKind::Translation2d { lx, ly }, elements })
    }

    /// Dₙ on a ring of `n ≥ 3` qubits: `n` rotations and `n` reflections.
    pub fn dihedral(n_qubits: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        if n_qubits < 3 {
            return input(format!("dihedral group needs at least 3 qubits, got {n_qubits}"));
        }
        let reversal = Permutation::reversal(n_qubits);
        let rotations: Vec<_> = (0..n_qubits).map(|j| Permutation::rotation(n_qubits, j)).collect();
        let reflections = rotations.iter().map(|r| r.compose(&reversal)).collect::<Result<Vec<_>>>()?;
        let elements = rotations.into_iter().chain(reflections).collect();
        Ok(Self { n_qubits, kind: GroupKind::Dihedral, elements })
    }

    pub fn permutation_full(n_qubits: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        Ok(Self { n_qubits, kind: GroupKind::PermutationFull, elements: Vec::new() })
    }

    pub fn generic(n_qubits: usize, generators: &[Permutation]) -> Result<Self> {
        Self::generic_with_cap(n_qubits, generators, DEFAULT_ELEMENT_CAP)
    }

    /// Close `generators` under composition, breadth first, failing once more
    /// than `cap` elements have been found.
    pub fn generic_with_cap(n_qubits: usize, generators: &[Permutation], cap: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        if let Some(bad) = generators.iter().find(|g| g.len() != n_qubits) {
            return input(format!("generator {bad:?} does not act on {n_qubits} qubits"));
        }
        let identity = Permutation::identity(n_qubits);
        let mut seen: HashSet<Permutation> = HashSet::from([identity.clone()]);
        let mut elements = vec![identity.clone()];
        let mut queue = VecDeque::from([identity]);
        while let Some(e) = queue.pop_front() {
            for g in generators {
                let h = g.compose(&e)?;
                if seen.insert(h.clone()) {
                    if elements.len() == cap {
                        return Err(Error::Unsupported(format!("generated group exceeds the {cap}-element cap")));
                    }
                    elements.push(h.clone());
                    queue.push_back(h);
                }
            }
        }
        Ok(Self { n_qubits, kind: GroupKind::Generic, elements: dedup_keep_order(elements) })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    pub fn is_trivial(&self) -> bool {
        match self.kind {
            GroupKind::PermutationFull => self.n_qubits == 1,
            _ => self.elements.len() == 1,
        }
    }

    /// Materialized elements, `None` for the full symmetric group.
    pub fn elements(&self) -> Option<&[Permutation]> {
        match self.kind {
            GroupKind::PermutationFull => None,
            _ => Some(&self.elements),
        }
    }

    /// `|G|`.
    pub fn order(&self) -> Result<u128> {
        match self.kind {
            GroupKind::PermutationFull => factorial(self.n_qubits),
            _ => Ok(self.elements.len() as u128),
        }
    }

    /// Whether a per-qubit labelling is fixed by every group element, i.e.
    /// `labels[g(i)] == labels[i]` for all `g` and `i`.
    pub fn preserves<L: PartialEq>(&self, labels: &[L]) -> bool {
        if labels.len() != self.n_qubits {
            return false;
        }
        match self.kind {
            GroupKind::PermutationFull => labels.windows(2).all(|w| w[0] == w[1]),
            _ => self.elements.iter().all(|g| (0..self.n_qubits).all(|i| labels[g.apply(i)] == labels[i])),
        }
    }

    fn same_size(&self, s: &PauliString) -> Result<()> {
        if s.n_qubits() != self.n_qubits {
            return input(format!("{}-qubit string used with a group on {} qubits", s.n_qubits(), self.n_qubits));
        }
        Ok(())
    }

    /// Lowest-integer member of the orbit of `s`.
    pub fn canonical_rep(&self, s: &PauliString) -> Result<PauliString> {
        self.same_size(s)?;
        Ok(self.canonical_rep_unchecked(s))
    }

    pub(crate) fn canonical_rep_unchecked(&self, s: &PauliString) -> PauliString {
        match self.kind {
            GroupKind::Trivial => *s,
            GroupKind::Translation1d => min_rotation(s),
            GroupKind::Dihedral => {
                let reversed = s.permuted_unchecked(self.elements[self.n_qubits].images());
                min_rotation(s).min(min_rotation(&reversed))
            }
            GroupKind::PermutationFull => sorted_by_letter(s),
            GroupKind::Translation2d { .. } | GroupKind::Generic => {
                self.elements.iter().map(|g| s.permuted_unchecked(g.images())).min().unwrap_or(*s)
            }
        }
    }

    /// Orbit of `s`. Members are only listed when `materialize` is set, which
    /// the full symmetric group refuses.
    pub fn orbit(&self, s: &PauliString, materialize: bool) -> Result<OrbitReport> {
        self.same_size(s)?;
        let representative = self.canonical_rep_unchecked(s);
        if let GroupKind::PermutationFull = self.kind {
            if materialize {
                return Err(Error::Unsupported(
                    "orbit members are not materialized for the full permutation group".into(),
                ));
            }
            let (x, y, z) = s.letter_counts();
            let orbit_size = multinomial(self.n_qubits, &[x, y, z])?;
            return Ok(OrbitReport { representative, orbit_size, members: None });
        }
        let mut members: Vec<PauliString> = self.elements.iter().map(|g| s.permuted_unchecked(g.images())).collect();
        members.sort_unstable();
        members.dedup();
        Ok(OrbitReport { representative, orbit_size: members.len() as u128, members: materialize.then_some(members) })
    }

    /// All distinct images of `s`, sorted. For the full symmetric group these
    /// are the distinct rearrangements of its letters.
    pub fn orbit_members(&self, s: &PauliString) -> Result<Vec<PauliString>> {
        self.same_size(s)?;
        if let GroupKind::PermutationFull = self.kind {
            let mut letters = s.letters();
            letters.sort();
            let mut out = vec![PauliString::from_letters(&letters)?];
            while next_permutation(&mut letters) {
                out.push(PauliString::from_letters(&letters)?);
            }
            out.sort_unstable();
            return Ok(out);
        }
        Ok(self.orbit(s, true)?.members.unwrap_or_default())
    }

    /// Number of orbits of the group on all `4ⁿ` Pauli strings.
    pub fn count_representatives(&self) -> Result<u128> {
        match self.kind {
            GroupKind::Trivial => pow4(self.n_qubits),
            GroupKind::Translation1d => count_representatives_translation_closed_form(self.n_qubits),
            GroupKind::PermutationFull => Ok(count_representatives_permutation_closed_form(self.n_qubits)),
            _ => burnside(&self.elements),
        }
    }

    /// `|R| / 4ⁿ`, the worst-case fraction of strings that survive merging.
    pub fn space_ratio(&self) -> Result<f64> {
        let reps = self.count_representatives()? as f64;
        Ok(reps / 4f64.powi(self.n_qubits as i32))
    }
}

fn min_rotation(s: &PauliString) -> PauliString {
    let mut best = *s;
    let mut cur = *s;
    for _ in 1..s.n_qubits() {
        cur = cur.shifted_down();
        if cur.bits() < best.bits() {
            best = cur;
        }
    }
    best
}

// Z block on the lowest qubits, then Y, then X, identity on top.
fn sorted_by_letter(s: &PauliString) -> PauliString {
    let (x, y, z) = s.letter_counts();
    let repeat = |pattern: u128, count: usize, offset: usize| -> u128 {
        (0..count).fold(0, |acc, k| acc | pattern << (2 * (offset + k)))
    };
    let bits = repeat(0b11, z, 0) | repeat(0b10, y, z) | repeat(0b01, x, z + y);
    PauliString::from_bits_unchecked(bits, s.n_qubits())
}

fn pow4(n: usize) -> Result<u128> {
    4u128.checked_pow(n as u32).ok_or_else(|| Error::Overflow(format!("4^{n}")))
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn factorial(n: usize) -> Result<u128> {
    (1..=n as u128).try_fold(1u128, |acc, k| acc.checked_mul(k)).ok_or_else(|| Error::Overflow(format!("{n}!")))
}

/// `n! / (k₁! k₂! … (n − Σk)!)`, built from binomials so intermediate values stay small.
fn multinomial(n: usize, parts: &[usize]) -> Result<u128> {
    let mut remaining = n as u128;
    let mut acc = 1u128;
    for &k in parts {
        acc = acc.checked_mul(binomial(remaining, k as u128)?).ok_or_else(|| Error::Overflow("orbit size".into()))?;
        remaining -= k as u128;
    }
    Ok(acc)
}

fn binomial(n: u128, k: u128) -> Result<u128> {
    let k = k.min(n - k);
    (0..k).try_fold(1u128, |acc, i| {
        acc.checked_mul(n - i).map(|v| v / (i + 1)).ok_or_else(|| Error::Overflow(format!("C({n},{k})")))
    })
}

fn burnside(elements: &[Permutation]) -> Result<u128> {
    let total = elements.iter().try_fold(0u128, |acc, g| {
        pow4(g.cycle_count())?.checked_add(acc).ok_or_else(|| Error::Overflow("Burnside sum".into()))
    })?;
    Ok(total / elements.len() as u128)
}

/// Steps `v` to its next lexicographic arrangement; `false` after the last.
fn next_permutation<E: Ord>(v: &mut [E]) -> bool {
    let Some(i) = v.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = v.iter().rposition(|e| *e > v[i]).expect("a larger element exists past i");
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

/// Necklace count `(1/n) Σ_{j=1}^{n} 4^{gcd(j, n)}`: orbits of ℤₙ on n-qubit Paulis.
pub fn count_representatives_translation_closed_form(n: usize) -> Result<u128> {
    if n == 0 {
        return input("qubit count must be positive");
    }
    let total = (1..=n).try_fold(0u128, |acc, j| {
        pow4(gcd(j, n))?.checked_add(acc).ok_or_else(|| Error::Overflow("necklace sum".into()))
    })?;
    Ok(total / n as u128)
}

/// `C(n + 3, 3)`: orbits of Sₙ, one per letter-count triple.
pub fn count_representatives_permutation_closed_form(n: usize) -> u128 {
    let n = n as u128;
    (n + 3) * (n + 2) * (n + 1) / 6
}
