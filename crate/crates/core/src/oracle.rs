// SPDX-License-Identifier: Apache-2.0

//! Dense-matrix reference for small systems.
//!
//! Operators are full `2ⁿ × 2ⁿ` complex matrices with qubit `q` on bit `q`
//! of the basis index. Pauli matrices act as signed bit flips,
//! `P|k⟩ = φ(k)|k ⊕ x⟩`, and rotation gates are applied through the closed
//! form `exp(−i(θ/2)P) = cos(θ/2)·I − i·sin(θ/2)·P`, so nothing here relies
//! on the sparse engine's product or commutation rules.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::models::ProductState;
use crate::pauli::{Pauli, PauliString};
use crate::propagation::{Circuit, Layer, NoiseLayer, PauliRotationGate, PauliSum};
use crate::scalar::Scalar;

pub const MAX_DENSE_QUBITS: usize = 10;

#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator<T> {
    n_qubits: usize,
    // Row-major, `dim × dim`.
    data: Vec<Complex<T>>,
}

/// Bit-flip mask, phase-flip mask and `i`-power of a Pauli string's matrix.
#[derive(Clone, Copy)]
struct PauliAction {
    flip: usize,
    sign: usize,
    y_count: u32,
}

impl PauliAction {
    fn new(p: &PauliString) -> Self {
        let (mut flip, mut sign, mut y_count) = (0, 0, 0);
        for q in 0..p.n_qubits() {
            match p.get(q) {
                Pauli::I => {}
                Pauli::X => flip |= 1 << q,
                Pauli::Y => {
                    flip |= 1 << q;
                    sign |= 1 << q;
                    y_count += 1;
                }
                Pauli::Z => sign |= 1 << q,
            }
        }
        Self { flip, sign, y_count }
    }

    /// `φ(k)` in `P|k⟩ = φ(k)|k ⊕ flip⟩`.
    fn phase<T: Scalar>(&self, k: usize) -> Complex<T> {
        let exponent = self.y_count + 2 * ((k & self.sign).count_ones() % 2);
        match exponent % 4 {
            0 => Complex::new(T::one(), T::zero()),
            1 => Complex::new(T::zero(), T::one()),
            2 => Complex::new(-T::one(), T::zero()),
            _ => Complex::new(T::zero(), -T::one()),
        }
    }
}

fn check_size(n_qubits: usize) -> Result<()> {
    if n_qubits > MAX_DENSE_QUBITS {
        return Err(Error::DenseTooLarge { n_qubits, max: MAX_DENSE_QUBITS });
    }
    Ok(())
}

impl<T: Scalar> DenseOperator<T> {
    pub fn zeros(n_qubits: usize) -> Result<Self> {
        check_size(n_qubits)?;
        let dim = 1usize << n_qubits;
        Ok(Self { n_qubits, data: vec![Complex::new(T::zero(), T::zero()); dim * dim] })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.data[row * self.dim() + col]
    }

    /// `Σ c_P · P` as a dense matrix.
    pub fn densify(sum: &PauliSum<T>) -> Result<Self> {
        let mut op = Self::zeros(sum.n_qubits())?;
        for (p, c) in sum.sorted_terms() {
            op.add_pauli(&p, Complex::new(c, T::zero()));
        }
        Ok(op)
    }

    fn add_pauli(&mut self, p: &PauliString, c: Complex<T>) {
        let action = PauliAction::new(p);
        let dim = self.dim();
        for k in 0..dim {
            self.data[(k ^ action.flip) * dim + k] += c * action.phase::<T>(k);
        }
    }

    /// `Tr[P · O] / 2ⁿ`, the coefficient of `P` in this operator.
    pub fn pauli_coefficient(&self, p: &PauliString) -> Complex<T> {
        let action = PauliAction::new(p);
        let dim = self.dim();
        // (P·O)_{r,r} = φ(r ⊕ x) · O_{r ⊕ x, r}
        let trace = (0..dim).fold(Complex::new(T::zero(), T::zero()), |acc, r| {
            acc + action.phase::<T>(r ^ action.flip) * self.get(r ^ action.flip, r)
        });
        trace / T::from_usize(dim).unwrap_or_else(T::one)
    }

    /// Full Pauli decomposition; coefficients below `tol` in magnitude are
    /// dropped and imaginary parts are discarded.
    pub fn decompose(&self, tol: T) -> Result<PauliSum<T>> {
        let n = self.n_qubits;
        let mut sum = PauliSum::new(n)?;
        for bits in 0..1u128 << (2 * n) {
            let p = PauliString::from_bits(bits, n)?;
            let c = self.pauli_coefficient(&p).re;
            if c.abs() >= tol {
                sum.add_term(p, c)?;
            }
        }
        Ok(sum)
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        let dim = self.dim();
        (0..dim).all(|r| (0..dim).all(|c| (self.get(r, c) - self.get(c, r).conj()).norm() <= tol))
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.data.iter().zip(&other.data).fold(T::zero(), |acc, (a, b)| acc.max((*a - *b).norm()))
    }

    /// `U† O U` for `U = exp(−i(θ/2)P)`:
    /// `c²·O + i·c·s·(P·O − O·P) + s²·P·O·P` with `c, s = cos, sin(θ/2)`.
    pub fn conjugate_gate(&mut self, gate: &PauliRotationGate<T>) {
        let half = gate.angle() / T::of(2.0);
        let (s, c) = half.sin_cos();
        let action = PauliAction::new(&gate.generator());
        let dim = self.dim();
        let flip = action.flip;
        let phases: Vec<Complex<T>> = (0..dim).map(|k| action.phase(k)).collect();
        let ics = Complex::new(T::zero(), c * s);
        let old = self.data.clone();
        for r in 0..dim {
            let pr = phases[r ^ flip];
            for k in 0..dim {
                let o = old[r * dim + k];
                let po = pr * old[(r ^ flip) * dim + k];
                let op = old[r * dim + (k ^ flip)] * phases[k];
                let pop = pr * phases[k] * old[(r ^ flip) * dim + (k ^ flip)];
                self.data[r * dim + k] = o * (c * c) + ics * (po - op) + pop * (s * s);
            }
        }
    }

    /// Weight damping on the Pauli coefficients: decompose, scale each
    /// coefficient by `exp(−γ·|P|)`, recompose.
    pub fn apply_noise(&mut self, noise: &NoiseLayer<T>) -> Result<()> {
        if noise.gamma() == T::zero() {
            return Ok(());
        }
        let n = self.n_qubits;
        let mut delta = Self::zeros(n)?;
        for bits in 1..1u128 << (2 * n) {
            let p = PauliString::from_bits(bits, n)?;
            let c = self.pauli_coefficient(&p);
            if c.norm() == T::zero() {
                continue;
            }
            let w = T::from_usize(p.weight()).unwrap_or_else(T::zero);
            delta.add_pauli(&p, c * ((-noise.gamma() * w).exp() - T::one()));
        }
        for (a, d) in self.data.iter_mut().zip(delta.data) {
            *a += d;
        }
        Ok(())
    }

    /// Conjugate by one layer: gates in reverse order, then noise.
    pub fn conjugate_layer(&mut self, layer: &Layer<T>) -> Result<()> {
        if let Some(g) = layer.gates.iter().find(|g| g.generator().n_qubits() != self.n_qubits) {
            return Err(Error::Input(format!("gate {} does not act on {} qubits", g.generator(), self.n_qubits)));
        }
        for gate in layer.gates.iter().rev() {
            self.conjugate_gate(gate);
        }
        if let Some(noise) = &layer.noise {
            self.apply_noise(noise)?;
        }
        Ok(())
    }

    /// `U† O U` for the whole circuit, last layer first, mirroring the
    /// sparse engine's order.
    pub fn conjugate_adjoint(&self, circuit: &Circuit<T>) -> Result<Self> {
        if circuit.n_qubits() != self.n_qubits {
            return Err(Error::Input(format!(
                "circuit on {} qubits, operator on {}",
                circuit.n_qubits(),
                self.n_qubits
            )));
        }
        let mut out = self.clone();
        for layer in circuit.layers().iter().rev() {
            out.conjugate_layer(layer)?;
        }
        Ok(out)
    }

    /// `Tr[ρ O]`.
    ///
    /// # Panics
    /// If the result has an imaginary part above `1e-10`, which means the
    /// operator was not Hermitian.
    pub fn exact_expectation(&self, state: &ProductState<T>) -> Result<T> {
        if state.n_qubits() != self.n_qubits {
            return Err(Error::Input(format!("state on {} qubits, operator on {}", state.n_qubits(), self.n_qubits)));
        }
        let half = T::of(0.5);
        // Single-qubit density matrices ρ = (I + xX + yY + zZ)/2.
        let local: Vec<[[Complex<T>; 2]; 2]> = state
            .factors()
            .iter()
            .map(|&[x, y, z]| {
                [
                    [Complex::new(half * (T::one() + z), T::zero()), Complex::new(half * x, -half * y)],
                    [Complex::new(half * x, half * y), Complex::new(half * (T::one() - z), T::zero())],
                ]
            })
            .collect();
        let dim = self.dim();
        let mut total = Complex::new(T::zero(), T::zero());
        for a in 0..dim {
            for b in 0..dim {
                let rho = (0..self.n_qubits)
                    .fold(Complex::new(T::one(), T::zero()), |acc, q| acc * local[q][(a >> q) & 1][(b >> q) & 1]);
                total += rho * self.get(b, a);
            }
        }
        assert!(
            total.im.abs() <= T::of(1e-10),
            "expectation has imaginary part {}; operator is not Hermitian",
            total.im
        );
        Ok(total.re)
    }
}

/// Exact `Tr[ρ O_k]` after conjugating by the last `k` layers, for
/// `k = 0, …, L`. Row `k` lines up with row `k` of a propagation trace.
pub fn exact_expectation_trace<T: Scalar>(
    observable: &PauliSum<T>,
    circuit: &Circuit<T>,
    state: &ProductState<T>,
) -> Result<Vec<T>> {
    let mut op = DenseOperator::densify(observable)?;
    if circuit.n_qubits() != op.n_qubits() {
        return Err(Error::Input("circuit and observable sizes differ".into()));
    }
    let mut out = vec![op.exact_expectation(state)?];
    for layer in circuit.layers().iter().rev() {
        op.conjugate_layer(layer)?;
        out.push(op.exact_expectation(state)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    #[test]
    fn densify_examples() {
        let id = DenseOperator::densify(&PauliSum::single(p("I"), 1.0)).unwrap();
        assert_eq!(id.data, vec![c(1.0), c(0.0), c(0.0), c(1.0)]);
        let xz = PauliSum::from_terms(1, [(p("X"), 0.5), (p("Z"), 0.5)]).unwrap();
        let m = DenseOperator::densify(&xz).unwrap();
        assert_eq!(m.data, vec![c(0.5), c(0.5), c(0.5), c(-0.5)]);
        let y = DenseOperator::densify(&PauliSum::single(p("Y"), 1.0)).unwrap();
        assert_eq!(y.data, vec![c(0.0), Complex::new(0.0, -1.0), Complex::new(0.0, 1.0), c(0.0)]);
    }

    #[test]
    fn xx_spectrum() {
        // XX permutes |00⟩↔|11⟩ and |01⟩↔|10⟩: eigenvalues +1, +1, −1, −1.
        let m = DenseOperator::densify(&PauliSum::single(p("XX"), 1.0)).unwrap();
        assert!(m.is_hermitian(1e-12));
        let trace: Complex<f64> = (0..4).map(|i| m.get(i, i)).sum();
        assert_eq!(trace, c(0.0));
        let sq_trace: f64 = m.data.iter().map(|z| z.norm_sqr()).sum();
        assert_eq!(sq_trace, 4.0);
        for (a, b) in [(0, 3), (1, 2)] {
            assert_eq!(m.get(a, b), c(1.0));
        }
    }

    #[test]
    fn decompose_inverts_densify() {
        let sum =
            PauliSum::from_terms(2, [(p("XY"), 0.25), (p("ZI"), -1.5), (p("II"), 2.0), (p("YY"), 0.125)]).unwrap();
        let back = DenseOperator::densify(&sum).unwrap().decompose(1e-14).unwrap();
        assert_eq!(back.sorted_terms(), sum.sorted_terms());
    }

    #[test]
    fn too_large() {
        assert!(matches!(DenseOperator::<f64>::zeros(11), Err(Error::DenseTooLarge { .. })));
    }

    #[test]
    fn conjugation_examples() {
        let z = DenseOperator::densify(&PauliSum::single(p("Z"), 1.0)).unwrap();
        let empty = Circuit::new(1).unwrap();
        assert_eq!(z.conjugate_adjoint(&empty).unwrap(), z);

        for theta in [0.3f64, 1.0, 2.5] {
            let mut circuit = Circuit::new(1).unwrap();
            circuit.push_layer(Layer::new(vec![PauliRotationGate::new(p("Z"), theta).unwrap()])).unwrap();
            assert!(z.conjugate_adjoint(&circuit).unwrap().max_abs_diff(&z) < 1e-15);

            let mut circuit = Circuit::new(1).unwrap();
            circuit.push_layer(Layer::new(vec![PauliRotationGate::new(p("X"), theta).unwrap()])).unwrap();
            let out = z.conjugate_adjoint(&circuit).unwrap().decompose(1e-14).unwrap();
            // e^{iθX/2} Z e^{−iθX/2} = cos θ · Z + sin θ · Y
            assert!((out.coefficient(&p("Z")) - theta.cos()).abs() < 1e-14);
            assert!((out.coefficient(&p("Y")) - theta.sin()).abs() < 1e-14);
            assert_eq!(out.len(), 2);
        }
    }

    #[test]
    fn expectation_examples() {
        let plus = ProductState::<f64>::plus_x(2).unwrap();
        let zero = ProductState::<f64>::zero_z(1).unwrap();
        let id = DenseOperator::densify(&PauliSum::single(p("II"), 3.5)).unwrap();
        assert!((id.exact_expectation(&plus).unwrap() - 3.5).abs() < 1e-14);
        let z = DenseOperator::densify(&PauliSum::single(p("Z"), 1.0)).unwrap();
        assert!((z.exact_expectation(&zero).unwrap() - 1.0).abs() < 1e-15);
        let s2 = DenseOperator::densify(&crate::models::total_spin_squared::<f64>(4).unwrap()).unwrap();
        assert!((s2.exact_expectation(&ProductState::plus_x(4).unwrap()).unwrap() - 6.0).abs() < 1e-12);
        let tilted = ProductState::<f64>::from_bloch(vec![[0.6, 0.0, 0.8], [0.0, 1.0, 0.0]]).unwrap();
        let xy = DenseOperator::densify(&PauliSum::single(p("XY"), 1.0)).unwrap();
        assert!((xy.exact_expectation(&tilted).unwrap() - 0.6).abs() < 1e-14);
    }

    #[test]
    fn noise_matches_coefficient_damping() {
        let sum = PauliSum::<f64>::from_terms(3, [(p("XXZ"), 1.0), (p("IIY"), -0.5), (p("III"), 2.0)]).unwrap();
        let mut op = DenseOperator::densify(&sum).unwrap();
        op.apply_noise(&NoiseLayer::new(0.1).unwrap()).unwrap();
        let back = op.decompose(1e-14).unwrap();
        assert!((back.coefficient(&p("XXZ")) - (-0.3f64).exp()).abs() < 1e-14);
        assert!((back.coefficient(&p("IIY")) + 0.5 * (-0.1f64).exp()).abs() < 1e-14);
        assert!((back.coefficient(&p("III")) - 2.0).abs() < 1e-14);
    }
}
