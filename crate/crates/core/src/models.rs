// SPDX-License-Identifier: Apache-2.0

//! Trotterized benchmark circuits, initial product states, and the total spin
//! observable.
//!
//! Hamiltonian terms are converted to rotation angles for gates of the form
//! `exp(−i(θ/2)P)`: a Trotter factor `exp(−iδ·h·P)` becomes the gate
//! `(P, 2δh)`. Both Hamiltonians carry an overall minus sign, so e.g. the
//! Ising bond `−Z_iZ_j` yields the gate `(Z_iZ_j, −2δ)`.
//!
//! Gates whose angle is exactly zero are left out.

use crate::error::{input, Result};
use crate::pauli::{Pauli, PauliString};
use crate::propagation::{Circuit, Layer, PauliRotationGate, PauliSum};
use crate::scalar::Scalar;

/// Product state `⊗ᵢ ρᵢ` with `ρᵢ = (I + rᵢ·σ)/2`, stored as Bloch vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductState<T> {
    bloch: Vec<[T; 3]>,
}

impl<T: Scalar> ProductState<T> {
    pub fn from_bloch(bloch: Vec<[T; 3]>) -> Result<Self> {
        if bloch.is_empty() {
            return input("product state needs at least one qubit");
        }
        for (q, r) in bloch.iter().enumerate() {
            let norm_sq = r[0] * r[0] + r[1] * r[1] + r[2] * r[2];
            if !norm_sq.is_finite() || norm_sq > T::one() + T::of(1e-12) {
                return input(format!("Bloch vector on qubit {q} is longer than 1"));
            }
        }
        Ok(Self { bloch })
    }

    pub fn uniform(n_qubits: usize, bloch: [T; 3]) -> Result<Self> {
        Self::from_bloch(vec![bloch; n_qubits])
    }

    /// `|+⟩^⊗n`.
    pub fn plus_x(n_qubits: usize) -> Result<Self> {
        Self::uniform(n_qubits, [T::one(), T::zero(), T::zero()])
    }

    /// `|0⟩^⊗n`.
    pub fn zero_z(n_qubits: usize) -> Result<Self> {
        Self::uniform(n_qubits, [T::zero(), T::zero(), T::one()])
    }

    pub fn n_qubits(&self) -> usize {
        self.bloch.len()
    }

    pub fn factors(&self) -> &[[T; 3]] {
        &self.bloch
    }

    /// `Tr[ρ P] = Πᵢ tr(ρᵢ Pᵢ)`; each factor is 1 for `I` and the matching
    /// Bloch component otherwise.
    pub fn overlap(&self, p: &PauliString) -> Result<T> {
        if p.n_qubits() != self.n_qubits() {
            return input(format!("{}-qubit string against a {}-qubit state", p.n_qubits(), self.n_qubits()));
        }
        Ok(self.overlap_unchecked(p))
    }

    pub(crate) fn overlap_unchecked(&self, p: &PauliString) -> T {
        let mut acc = T::one();
        let mut rest = p.bits();
        while rest != 0 {
            let pos = rest.trailing_zeros() as usize & !1;
            let code = ((rest >> pos) & 0b11) as usize;
            acc *= self.bloch[pos / 2][code - 1];
            if acc == T::zero() {
                return acc;
            }
            rest &= !(0b11 << pos);
        }
        acc
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Boundary {
    #[default]
    Periodic,
    Open,
}

/// Tilted-field Ising chain `H = −Σ⟨ij⟩ ZᵢZⱼ − h_z Σ Zᵢ − h_x Σ Xᵢ`.
#[derive(Clone, Debug, PartialEq)]
pub struct IsingParams<T> {
    pub n: usize,
    pub h_x: T,
    pub h_z: T,
    pub delta_t: T,
    pub layers: usize,
    pub boundary: Boundary,
}

/// Reference field strengths used for the ergodic Ising benchmarks.
pub const ISING_REFERENCE_H_X: f64 = 1.4;
pub const ISING_REFERENCE_H_Z: f64 = 0.9045;

fn rotation<T: Scalar>(n: usize, factors: &[(usize, Pauli)], angle: T) -> Result<Option<PauliRotationGate<T>>> {
    if angle == T::zero() {
        return Ok(None);
    }
    PauliRotationGate::new(PauliString::from_sparse(n, factors)?, angle).map(Some)
}

/// Each layer applies the ZZ bonds (ring order `(i, i+1)`), then the Z
/// fields, then the X fields, all on qubits in ascending order. With a
/// periodic chain every sublayer commutes internally and the layer is
/// invariant under cyclic shifts.
pub fn build_ising_circuit<T: Scalar>(p: &IsingParams<T>) -> Result<Circuit<T>> {
    let n = p.n;
    if n < 3 {
        return input(format!("Ising chain needs at least 3 sites, got {n}"));
    }
    if p.delta_t.is_nan() || p.delta_t <= T::zero() {
        return input(format!("delta_t must be positive, got {}", p.delta_t));
    }
    let two_dt = T::of(2.0) * p.delta_t;
    let bonds = match p.boundary {
        Boundary::Periodic => n,
        Boundary::Open => n - 1,
    };
    let mut gates = Vec::with_capacity(bonds + 2 * n);
    for i in 0..bonds {
        gates.extend(rotation(n, &[(i, Pauli::Z), ((i + 1) % n, Pauli::Z)], -two_dt)?);
    }
    for i in 0..n {
        gates.extend(rotation(n, &[(i, Pauli::Z)], -two_dt * p.h_z)?);
    }
    for i in 0..n {
        gates.extend(rotation(n, &[(i, Pauli::X)], -two_dt * p.h_x)?);
    }
    let mut circuit = Circuit::new(n)?;
    for _ in 0..p.layers {
        circuit.push_layer(Layer::new(gates.clone()))?;
    }
    Ok(circuit)
}

/// `Z` on the middle site `⌈n/2⌉` of a chain counted from 1, i.e. qubit
/// `⌈n/2⌉ − 1`.
pub fn mid_chain_z<T: Scalar>(n: usize) -> Result<PauliSum<T>> {
    if n == 0 {
        return input("chain needs at least one site");
    }
    let site = n.div_ceil(2) - 1;
    Ok(PauliSum::single(PauliString::single(n, site, Pauli::Z)?, T::one()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum XxzOrdering {
    /// All XX rotations, then all YY, then all ZZ, pairs in lexicographic
    /// order inside each sublayer. Each sublayer commutes internally, so
    /// the layer is exactly invariant under torus translations.
    #[default]
    Sublayers,
    /// XX, YY, ZZ for pair `(0,1)`, then for `(0,2)`, and so on.
    PerPair,
}

/// Power-law XXZ model on an `lx × ly` torus,
/// `H = −J⊥ Σ_{i<j} (XᵢXⱼ + YᵢYⱼ + (Δ+1) ZᵢZⱼ) / dᵢⱼ^α`, where `dᵢⱼ` is the
/// minimal-image distance. Sites are indexed row-major, `q = y·lx + x`.
#[derive(Clone, Debug, PartialEq)]
pub struct XxzParams<T> {
    pub lx: usize,
    pub ly: usize,
    pub j_perp: T,
    pub delta: T,
    pub alpha: T,
    pub delta_t: T,
    pub layers: usize,
    pub ordering: XxzOrdering,
}

impl<T: Scalar> XxzParams<T> {
    pub fn n_qubits(&self) -> usize {
        self.lx * self.ly
    }

    /// Minimal-image Euclidean distance between sites `i` and `j` on the torus.
    pub fn torus_distance(&self, i: usize, j: usize) -> T {
        let wrap = |a: usize, b: usize, l: usize| {
            let d = a.abs_diff(b);
            d.min(l - d)
        };
        let dx = wrap(i % self.lx, j % self.lx, self.lx);
        let dy = wrap(i / self.lx, j / self.lx, self.ly);
        T::from_usize(dx * dx + dy * dy).unwrap_or_else(T::zero).sqrt()
    }

    /// `(i, j, θ_XX = θ_YY, θ_ZZ)` for every pair in lexicographic order.
    pub fn pair_angles(&self) -> Result<Vec<(usize, usize, T, T)>> {
        let n = self.n_qubits();
        let mut pairs = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                let d = self.torus_distance(i, j);
                if d == T::zero() {
                    return input(format!("sites {i} and {j} coincide on the {}x{} torus", self.lx, self.ly));
                }
                let coupling = self.j_perp / d.powf(self.alpha);
                let theta_xy = -T::of(2.0) * self.delta_t * coupling;
                pairs.push((i, j, theta_xy, theta_xy * (self.delta + T::one())));
            }
        }
        Ok(pairs)
    }
}

pub fn build_xxz_circuit<T: Scalar>(p: &XxzParams<T>) -> Result<Circuit<T>> {
    if p.lx == 0 || p.ly == 0 {
        return input(format!("lattice dimensions must be positive, got {}x{}", p.lx, p.ly));
    }
    if p.alpha.is_nan() || p.alpha < T::zero() {
        return input(format!("alpha must be non-negative, got {}", p.alpha));
    }
    if p.delta_t.is_nan() || p.delta_t <= T::zero() {
        return input(format!("delta_t must be positive, got {}", p.delta_t));
    }
    let n = p.n_qubits();
    let pairs = p.pair_angles()?;
    let bond = |i: usize, j: usize, letter: Pauli, angle: T| rotation(n, &[(i, letter), (j, letter)], angle);
    let mut gates = Vec::with_capacity(3 * pairs.len());
    match p.ordering {
        XxzOrdering::Sublayers => {
            for letter in [Pauli::X, Pauli::Y, Pauli::Z] {
                for &(i, j, xy, zz) in &pairs {
                    let angle = if letter == Pauli::Z { zz } else { xy };
                    gates.extend(bond(i, j, letter, angle)?);
                }
            }
        }
        XxzOrdering::PerPair => {
            for &(i, j, xy, zz) in &pairs {
                gates.extend(bond(i, j, Pauli::X, xy)?);
                gates.extend(bond(i, j, Pauli::Y, xy)?);
                gates.extend(bond(i, j, Pauli::Z, zz)?);
            }
        }
    }
    let mut circuit = Circuit::new(n)?;
    for _ in 0..p.layers {
        circuit.push_layer(Layer::new(gates.clone()))?;
    }
    Ok(circuit)
}

/// `S² = Σ_μ (Σᵢ σ_μ,ᵢ)²` with `σ = P/2`:
/// `(3n/4)·I + ½ Σ_{i<j} (XᵢXⱼ + YᵢYⱼ + ZᵢZⱼ)`.
pub fn total_spin_squared<T: Scalar>(n: usize) -> Result<PauliSum<T>> {
    let mut sum = PauliSum::new(n)?;
    sum.add_term(PauliString::identity(n)?, T::of(0.75) * T::from_usize(n).unwrap_or_else(T::zero))?;
    let half = T::of(0.5);
    for i in 0..n {
        for j in i + 1..n {
            for letter in [Pauli::X, Pauli::Y, Pauli::Z] {
                sum.add_term(PauliString::from_sparse(n, &[(i, letter), (j, letter)])?, half)?;
            }
        }
    }
    Ok(sum)
}

/// `⟨+|^⊗n S² |+⟩^⊗n = n(n+2)/4`, the maximal-spin value.
pub fn total_spin_squared_plus_state(n: usize) -> f64 {
    (n * (n + 2)) as f64 / 4.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permutation::Permutation;
    use crate::propagation::{propagate, PropagationConfig};

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn ising(n: usize, h_x: f64, h_z: f64) -> IsingParams<f64> {
        IsingParams { n, h_x, h_z, delta_t: 0.25, layers: 1, boundary: Boundary::Periodic }
    }

    fn xxz(lx: usize, ly: usize, delta: f64, alpha: f64) -> XxzParams<f64> {
        XxzParams { lx, ly, j_perp: 1.0, delta, alpha, delta_t: 0.05, layers: 1, ordering: XxzOrdering::Sublayers }
    }

    #[test]
    fn overlap_examples() {
        let plus = ProductState::<f64>::plus_x(3).unwrap();
        assert_eq!(plus.overlap(&p("IXI")).unwrap(), 1.0);
        assert_eq!(plus.overlap(&p("IZI")).unwrap(), 0.0);
        assert_eq!(ProductState::<f64>::zero_z(2).unwrap().overlap(&p("ZZ")).unwrap(), 1.0);
        let tilted = ProductState::<f64>::from_bloch(vec![[0.6, 0.0, 0.8]]).unwrap();
        assert!((tilted.overlap(&p("X")).unwrap() - 0.6).abs() < 1e-15);
        assert!(ProductState::from_bloch(vec![[0.9, 0.0, 0.9]]).is_err());
        assert!(plus.overlap(&p("XX")).is_err());
    }

    #[test]
    fn ising_layer_structure() {
        let c = build_ising_circuit(&ising(4, 1.4, 0.9045)).unwrap();
        assert_eq!(c.layers()[0].gates.len(), 12);
        let only_zz = build_ising_circuit(&ising(4, 0.0, 0.0)).unwrap();
        assert!(only_zz.layers()[0].gates.iter().all(|g| g.generator().weight() == 2));
        assert!(build_ising_circuit(&ising(2, 1.0, 1.0)).is_err());
        let mut bad = ising(4, 1.0, 1.0);
        bad.delta_t = 0.0;
        assert!(build_ising_circuit(&bad).is_err());
        let mut open = ising(5, 1.0, 1.0);
        open.boundary = Boundary::Open;
        assert_eq!(build_ising_circuit(&open).unwrap().layers()[0].gates.len(), 14);
    }

    #[test]
    fn ising_angles_follow_hamiltonian_signs() {
        let c = build_ising_circuit(&ising(3, 1.4, 0.9045)).unwrap();
        let g = &c.layers()[0].gates;
        assert_eq!(g[0].generator(), p("ZZI"));
        assert!((g[0].angle() + 0.5).abs() < 1e-15);
        assert_eq!(g[3].generator(), p("ZII"));
        assert!((g[3].angle() + 0.5 * 0.9045).abs() < 1e-15);
        assert_eq!(g[6].generator(), p("XII"));
        assert!((g[6].angle() + 0.5 * 1.4).abs() < 1e-15);
    }

    fn assert_layer_invariant(circuit: &Circuit<f64>, perm: &Permutation) {
        let gates = &circuit.layers()[0].gates;
        for g in gates {
            let moved = g.generator().apply_permutation(perm).unwrap();
            assert!(
                gates.iter().any(|h| h.generator() == moved && h.angle() == g.angle()),
                "{} has no shifted partner",
                g.generator()
            );
        }
    }

    #[test]
    fn builders_are_translation_symmetric() {
        let c = build_ising_circuit(&ising(6, 1.4, 0.9045)).unwrap();
        assert_layer_invariant(&c, &Permutation::rotation(6, 1));

        let params = xxz(3, 2, -1.8, 3.0);
        let c = build_xxz_circuit(&params).unwrap();
        let group = crate::symmetry::SymmetryGroup::translation_2d(3, 2).unwrap();
        for g in group.elements().unwrap() {
            assert_layer_invariant(&c, g);
        }
    }

    #[test]
    fn xxz_gate_counts_and_angles() {
        let c = build_xxz_circuit(&xxz(3, 3, -1.8, 3.0)).unwrap();
        assert_eq!(c.layers()[0].gates.len(), 108);
        for alpha in [0.0, 1.5, 3.0] {
            for (_, _, xy, zz) in xxz(3, 3, -1.8, alpha).pair_angles().unwrap() {
                assert!((zz / xy - (-0.8)).abs() < 1e-12);
            }
        }
        let flat = xxz(3, 3, -1.8, 0.0).pair_angles().unwrap();
        assert!(flat.iter().all(|&(_, _, xy, _)| xy == flat[0].2));
        let iso = xxz(3, 3, 0.0, 3.0).pair_angles().unwrap();
        assert!(iso.iter().all(|&(_, _, xy, zz)| xy == zz));
        let per_pair = XxzParams { ordering: XxzOrdering::PerPair, ..xxz(3, 3, -1.8, 3.0) };
        let c = build_xxz_circuit(&per_pair).unwrap();
        assert_eq!(c.layers()[0].gates[0].generator(), p("XXIIIIIII"));
        assert_eq!(c.layers()[0].gates[1].generator(), p("YYIIIIIII"));
    }

    #[test]
    fn torus_distances() {
        let params = xxz(3, 3, 0.0, 1.0);
        assert_eq!(params.torus_distance(0, 1), 1.0);
        assert_eq!(params.torus_distance(0, 2), 1.0);
        assert!((params.torus_distance(0, 4) - 2f64.sqrt()).abs() < 1e-15);
        assert!((params.torus_distance(0, 8) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(params.torus_distance(0, 6), 1.0);
    }

    #[test]
    fn spin_squared_terms() {
        let one = total_spin_squared::<f64>(1).unwrap();
        assert_eq!(one.sorted_terms(), vec![(p("I"), 0.75)]);
        let two = total_spin_squared::<f64>(2).unwrap();
        assert_eq!(two.len(), 4);
        assert_eq!(two.coefficient(&p("II")), 1.5);
        for s in ["XX", "YY", "ZZ"] {
            assert_eq!(two.coefficient(&p(s)), 0.5);
        }
        for n in 1..=7 {
            let s2 = total_spin_squared::<f64>(n).unwrap();
            assert_eq!(s2.len(), 1 + 3 * n * (n - 1) / 2);
            let e = s2.expectation(&ProductState::plus_x(n).unwrap()).unwrap();
            assert!((e - total_spin_squared_plus_state(n)).abs() < 1e-12);
        }
    }

    #[test]
    fn spin_squared_is_permutation_invariant() {
        let n = 5;
        let s2 = total_spin_squared::<f64>(n).unwrap();
        for perm in
            [Permutation::rotation(n, 2), Permutation::reversal(n), Permutation::new(vec![1, 0, 2, 4, 3]).unwrap()]
        {
            let moved =
                PauliSum::from_terms(n, s2.iter().map(|(q, c)| (q.apply_permutation(&perm).unwrap(), *c))).unwrap();
            assert_eq!(moved.sorted_terms(), s2.sorted_terms());
        }
    }

    #[test]
    fn mid_chain_site() {
        assert_eq!(mid_chain_z::<f64>(5).unwrap().sorted_terms(), vec![(p("IIZII"), 1.0)]);
        assert_eq!(mid_chain_z::<f64>(4).unwrap().sorted_terms(), vec![(p("IZII"), 1.0)]);
    }

    #[test]
    fn zz_only_chain_keeps_a_single_term() {
        let mut params = ising(6, 0.0, 0.0);
        params.layers = 20;
        let trace =
            propagate(&mid_chain_z(6).unwrap(), &build_ising_circuit(&params).unwrap(), &PropagationConfig::default())
                .unwrap();
        assert!(trace.term_counts().iter().all(|&k| k == 1));
    }

    #[test]
    fn integrable_chain_stays_small() {
        // At fixed depth the light cone bounds the support, so the count for
        // the mid-chain Z stops depending on n once the chain is long enough.
        let counts: Vec<usize> = [8, 10, 12]
            .iter()
            .map(|&n| {
                let mut params = ising(n, 1.4, 0.0);
                params.layers = 3;
                let trace = propagate(
                    &mid_chain_z(n).unwrap(),
                    &build_ising_circuit(&params).unwrap(),
                    &PropagationConfig::default(),
                )
                .unwrap();
                *trace.term_counts().iter().max().unwrap()
            })
            .collect();
        assert!(counts.windows(2).all(|w| w[0] == w[1]), "{counts:?}");

        // X_k is a fermion bilinear at h_z = 0, so at any depth it only
        // reaches bilinears and their products with the parity string.
        for n in [6, 8, 10] {
            let mut params = ising(n, 1.4, 0.0);
            params.layers = 40;
            let x_mid = PauliSum::single(PauliString::single(n, n / 2, Pauli::X).unwrap(), 1.0);
            let trace =
                propagate(&x_mid, &build_ising_circuit(&params).unwrap(), &PropagationConfig::default()).unwrap();
            let peak = *trace.term_counts().iter().max().unwrap();
            assert!(peak <= 2 * n * (2 * n - 1) + 2, "n={n}: {peak} terms");
        }
    }
}
