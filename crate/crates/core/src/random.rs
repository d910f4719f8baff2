// SPDX-License-Identifier: Apache-2.0

//! Random circuits and observables for engine–oracle checks.
//!
//! Symmetric layers are built from whole orbits: a generator is drawn, its
//! orbit under the group is computed, and every member is applied with the
//! same angle. The orbit is accepted only if its members commute pairwise,
//! since otherwise the product of the gates depends on their order and the
//! layer would not be invariant.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString};
use crate::propagation::{Circuit, Layer, PauliRotationGate, PauliSum};
use crate::scalar::Scalar;
use crate::symmetry::SymmetryGroup;

const MAX_ORBIT_ATTEMPTS: usize = 10_000;

/// A non-identity string with every qubit independently drawn from
/// `{I, X, Y, Z}`, each non-identity letter kept with probability `density`.
pub fn random_pauli<R: Rng + ?Sized>(rng: &mut R, n_qubits: usize, density: f64) -> Result<PauliString> {
    loop {
        let letters: Vec<Pauli> = (0..n_qubits)
            .map(|_| if rng.gen_bool(density.clamp(0.0, 1.0)) { Pauli::ALL[rng.gen_range(1..4)] } else { Pauli::I })
            .collect();
        let p = PauliString::from_letters(&letters)?;
        if !p.is_identity() {
            return Ok(p);
        }
    }
}

fn random_angle<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> T {
    T::of(rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
}

/// `n_gates` random rotations split evenly over `n_layers` layers.
pub fn random_circuit<T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    n_qubits: usize,
    n_gates: usize,
    n_layers: usize,
) -> Result<Circuit<T>> {
    let mut circuit = Circuit::new(n_qubits)?;
    let n_layers = n_layers.max(1);
    for l in 0..n_layers {
        let count = n_gates / n_layers + usize::from(l < n_gates % n_layers);
        let gates = (0..count)
            .map(|_| PauliRotationGate::new(random_pauli(rng, n_qubits, 0.5)?, random_angle(rng)))
            .collect::<Result<Vec<_>>>()?;
        circuit.push_layer(Layer::new(gates))?;
    }
    Ok(circuit)
}

/// A sum of `n_terms` random strings with coefficients in `[−1, 1]`.
pub fn random_pauli_sum<T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    n_qubits: usize,
    n_terms: usize,
) -> Result<PauliSum<T>> {
    let mut sum = PauliSum::new(n_qubits)?;
    for _ in 0..n_terms {
        let p = if rng.gen_bool(0.1) { PauliString::identity(n_qubits)? } else { random_pauli(rng, n_qubits, 0.5)? };
        sum.add_term(p, T::of(rng.gen_range(-1.0..1.0)))?;
    }
    Ok(sum)
}

fn pairwise_commuting(members: &[PauliString]) -> bool {
    members.iter().enumerate().all(|(i, a)| members[i + 1..].iter().all(|b| !a.anticommutes_unchecked(b)))
}

/// A random orbit of pairwise commuting strings, found by rejection.
pub fn random_commuting_orbit<R: Rng + ?Sized>(rng: &mut R, group: &SymmetryGroup) -> Result<Vec<PauliString>> {
    let n = group.n_qubits();
    for _ in 0..MAX_ORBIT_ATTEMPTS {
        let density = rng.gen_range(0.15..0.6);
        let members = group.orbit_members(&random_pauli(rng, n, density)?)?;
        if pairwise_commuting(&members) {
            return Ok(members);
        }
    }
    Err(Error::Unsupported(format!("no commuting orbit found for the {} group", group.kind())))
}

/// Layers made of `orbits_per_layer` whole commuting orbits each, every
/// orbit sharing one random angle, so each layer commutes with the group.
pub fn random_symmetric_circuit<T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    group: &SymmetryGroup,
    n_layers: usize,
    orbits_per_layer: usize,
) -> Result<Circuit<T>> {
    let mut circuit = Circuit::new(group.n_qubits())?;
    for _ in 0..n_layers {
        let mut gates = Vec::new();
        for _ in 0..orbits_per_layer {
            let angle = random_angle(rng);
            let mut orbit = random_commuting_orbit(rng, group)?;
            orbit.shuffle(rng);
            for p in orbit {
                gates.push(PauliRotationGate::new(p, angle)?);
            }
        }
        circuit.push_layer(Layer::new(gates))?;
    }
    Ok(circuit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sn_orbits_are_rearrangements() {
        let s4 = SymmetryGroup::permutation_full(4).unwrap();
        let members = s4.orbit_members(&"XYZI".parse().unwrap()).unwrap();
        assert_eq!(members.len(), 24);
        let members = s4.orbit_members(&"XXII".parse().unwrap()).unwrap();
        assert_eq!(members.len(), 6);
        assert!(members.windows(2).all(|w| w[0] != w[1]));
    }

    #[test]
    fn symmetric_layers_are_closed_under_the_group() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let group = SymmetryGroup::dihedral(5).unwrap();
        let circuit: Circuit<f64> = random_symmetric_circuit(&mut rng, &group, 3, 2).unwrap();
        for layer in circuit.layers() {
            let gens: Vec<_> = layer.gates.iter().map(|g| g.generator()).collect();
            for g in group.elements().unwrap() {
                for gate in &layer.gates {
                    let moved = gate.generator().apply_permutation(g).unwrap();
                    assert!(gens.contains(&moved));
                }
            }
        }
    }

    #[test]
    fn random_circuit_splits_gates() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c: Circuit<f64> = random_circuit(&mut rng, 4, 10, 3).unwrap();
        assert_eq!(c.layers().iter().map(|l| l.gates.len()).collect::<Vec<_>>(), vec![4, 3, 3]);
    }
}
