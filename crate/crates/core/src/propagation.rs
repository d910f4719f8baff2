// SPDX-License-Identifier: Apache-2.0

//! Heisenberg-picture Pauli propagation with optional symmetry merging.
//!
//! The observable is a sparse map from Pauli strings to real coefficients.
//! A rotation gate `exp(−i(θ/2)P)` leaves every term that commutes with `P`
//! alone and splits an anticommuting term `Q` into
//! `cos θ · Q + sin θ · (iPQ)`, where `iPQ = ±R` for a Pauli string `R`.
//! After every layer the sum may be damped, truncated, and folded onto
//! orbit representatives of a symmetry group.
//!
//! Results do not depend on the worker count: gate updates are computed in
//! parallel from a read-only snapshot and written back in the snapshot's
//! iteration order, and every output key of a gate receives at most two
//! contributions. Merges accumulate in the same fixed order.

use std::fmt::Write as _;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use rustc_hash::FxHashMap;

use crate::error::{input, Error, Result};
use crate::models::ProductState;
use crate::pauli::PauliString;
use crate::scalar::Scalar;
use crate::symmetry::SymmetryGroup;

/// Sums smaller than this are processed on the calling thread.
const PARALLEL_THRESHOLD: usize = 1 << 13;

pub const DEFAULT_MEMORY_CAP: usize = 100_000_000;

/// Sparse real-coefficient Pauli expansion of an observable. Never stores an
/// exactly zero coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum<T> {
    n_qubits: usize,
    terms: FxHashMap<PauliString, T>,
}

impl<T: Scalar> PauliSum<T> {
    pub fn new(n_qubits: usize) -> Result<Self> {
        PauliString::identity(n_qubits)?;
        Ok(Self { n_qubits, terms: FxHashMap::default() })
    }

    /// Build from `(string, coefficient)` pairs, adding coefficients of repeated keys.
    pub fn from_terms(n_qubits: usize, terms: impl IntoIterator<Item = (PauliString, T)>) -> Result<Self> {
        let mut sum = Self::new(n_qubits)?;
        for (p, c) in terms {
            sum.add_term(p, c)?;
        }
        Ok(sum)
    }

    pub fn single(p: PauliString, c: T) -> Self {
        let mut terms = FxHashMap::default();
        if c != T::zero() {
            terms.insert(p, c);
        }
        Self { n_qubits: p.n_qubits(), terms }
    }

    pub fn add_term(&mut self, p: PauliString, c: T) -> Result<()> {
        if p.n_qubits() != self.n_qubits {
            return input(format!("{}-qubit term added to a {}-qubit sum", p.n_qubits(), self.n_qubits));
        }
        let entry = self.terms.entry(p).or_insert_with(T::zero);
        *entry += c;
        if *entry == T::zero() {
            self.terms.remove(&p);
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, p: &PauliString) -> T {
        self.terms.get(p).copied().unwrap_or_else(T::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PauliString, &T)> {
        self.terms.iter()
    }

    /// Terms in ascending key order.
    pub fn sorted_terms(&self) -> Vec<(PauliString, T)> {
        let mut v: Vec<_> = self.terms.iter().map(|(p, c)| (*p, *c)).collect();
        v.sort_unstable_by_key(|(p, _)| *p);
        v
    }

    pub fn sum_abs(&self) -> T {
        self.terms.values().fold(T::zero(), |acc, c| acc + c.abs())
    }

    pub fn sum_sq(&self) -> T {
        self.terms.values().fold(T::zero(), |acc, c| acc + *c * *c)
    }

    fn same_size(&self, n_qubits: usize, what: &str) -> Result<()> {
        if n_qubits != self.n_qubits {
            return input(format!("{what} on {n_qubits} qubits used with a {}-qubit sum", self.n_qubits));
        }
        Ok(())
    }

    /// Conjugate by a rotation gate, `U† O U`.
    pub fn apply_gate_adjoint(&self, gate: &PauliRotationGate<T>) -> Result<Self> {
        let mut out = self.clone();
        out.apply_gate_adjoint_in_place(gate)?;
        Ok(out)
    }

    pub fn apply_gate_adjoint_in_place(&mut self, gate: &PauliRotationGate<T>) -> Result<()> {
        self.same_size(gate.generator.n_qubits(), "gate")?;
        let (sin, cos) = gate.angle.sin_cos();
        let generator = gate.generator;
        let terms = &self.terms;
        let split = |(q, &a): (&PauliString, &T)| -> [Option<(PauliString, T)>; 2] {
            if !generator.anticommutes_unchecked(q) {
                return [None, None];
            }
            let prod = generator.product_unchecked(q);
            // P·Q = i^k R with k odd, so i·P·Q = σR with σ = +1 for k = 3.
            let sigma = if prod.phase.exponent() == 3 { T::one() } else { -T::one() };
            let partner = prod.pauli;
            match terms.get(&partner) {
                Some(&b) => [Some((*q, a * cos - sigma * b * sin)), None],
                None => [Some((*q, a * cos)), Some((partner, sigma * a * sin))],
            }
        };
        let updates: Vec<(PauliString, T)> = if self.terms.len() >= PARALLEL_THRESHOLD {
            self.terms.par_iter().flat_map_iter(|t| split(t).into_iter().flatten()).collect()
        } else {
            self.terms.iter().flat_map(|t| split(t).into_iter().flatten()).collect()
        };
        let tol = T::cancellation_tolerance();
        for (p, c) in updates {
            if c.abs() < tol {
                self.terms.remove(&p);
            } else {
                self.terms.insert(p, c);
            }
        }
        Ok(())
    }

    /// Scale every term by `exp(−γ·weight)`.
    pub fn apply_noise(&self, noise: &NoiseLayer<T>) -> Self {
        let mut out = self.clone();
        out.apply_noise_in_place(noise);
        out
    }

    pub fn apply_noise_in_place(&mut self, noise: &NoiseLayer<T>) {
        if noise.gamma == T::zero() {
            return;
        }
        // Weights are bounded by n, so tabulate the factors once.
        let factors: Vec<T> =
            (0..=self.n_qubits).map(|w| (-noise.gamma * T::from_usize(w).unwrap_or_else(T::zero)).exp()).collect();
        for (p, c) in self.terms.iter_mut() {
            *c *= factors[p.weight()];
        }
        self.terms.retain(|_, c| *c != T::zero());
    }

    /// Drop every term with `|c| < epsilon`.
    pub fn truncate(&self, epsilon: T) -> Self {
        let mut out = self.clone();
        out.truncate_in_place(epsilon);
        out
    }

    pub fn truncate_in_place(&mut self, epsilon: T) {
        if epsilon > T::zero() {
            self.terms.retain(|_, c| c.abs() >= epsilon);
        }
    }

    /// Fold every term onto its orbit representative, adding coefficients.
    pub fn merge_by_symmetry(&self, group: &SymmetryGroup) -> Result<Self> {
        self.same_size(group.n_qubits(), "symmetry group")?;
        if group.is_trivial() {
            return Ok(self.clone());
        }
        let canon = |(p, c): (&PauliString, &T)| (group.canonical_rep_unchecked(p), *c);
        let folded: Vec<(PauliString, T)> = if self.terms.len() >= PARALLEL_THRESHOLD {
            self.terms.par_iter().map(canon).collect()
        } else {
            self.terms.iter().map(canon).collect()
        };
        let mut terms = FxHashMap::with_capacity_and_hasher(folded.len(), Default::default());
        for (rep, c) in folded {
            *terms.entry(rep).or_insert_with(T::zero) += c;
        }
        let tol = T::cancellation_tolerance();
        terms.retain(|_, c: &mut T| c.abs() >= tol);
        Ok(Self { n_qubits: self.n_qubits, terms })
    }

    /// `Tr[ρ O]` for a product state, with unit-trace `ρ` and unnormalized
    /// Pauli strings, so the identity term contributes its coefficient.
    pub fn expectation(&self, state: &ProductState<T>) -> Result<T> {
        self.same_size(state.n_qubits(), "state")?;
        Ok(self.terms.iter().fold(T::zero(), |acc, (p, c)| acc + *c * state.overlap_unchecked(p)))
    }

    /// Expectation of a sum that was merged under `group`. Valid only for
    /// states that the group leaves invariant, which is checked.
    pub fn expectation_symmetric(&self, state: &ProductState<T>, group: &SymmetryGroup) -> Result<T> {
        check_symmetric_state(state, group)?;
        self.expectation(state)
    }

    /// Snapshot lines `<integer key> <coefficient>` in ascending key order.
    pub fn to_snapshot(&self) -> String {
        let mut out = String::new();
        for (p, c) in self.sorted_terms() {
            let _ = writeln!(out, "{} {}", p.bits(), fmt_float(c.to_f64_lossy()));
        }
        out
    }

    pub fn from_snapshot(n_qubits: usize, text: &str) -> Result<Self> {
        let mut sum = Self::new(n_qubits)?;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let bad = || Error::Input(format!("snapshot line {}: {line:?}", lineno + 1));
            let mut parts = line.split_whitespace();
            let key: u128 = parts.next().and_then(|k| k.parse().ok()).ok_or_else(bad)?;
            let coeff: f64 = parts.next().and_then(|c| c.parse().ok()).ok_or_else(bad)?;
            if parts.next().is_some() {
                return Err(bad());
            }
            sum.add_term(PauliString::from_bits(key, n_qubits)?, T::of(coeff))?;
        }
        Ok(sum)
    }
}

pub(crate) fn check_symmetric_state<T: Scalar>(state: &ProductState<T>, group: &SymmetryGroup) -> Result<()> {
    if state.n_qubits() != group.n_qubits() {
        return input(format!("state on {} qubits used with a group on {} qubits", state.n_qubits(), group.n_qubits()));
    }
    if !group.preserves(state.factors()) {
        return input(format!("initial state is not invariant under the {} symmetry", group.kind()));
    }
    Ok(())
}

/// Scientific notation with 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// The unitary `exp(−i(θ/2)P)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliRotationGate<T> {
    generator: PauliString,
    angle: T,
}

impl<T: Scalar> PauliRotationGate<T> {
    pub fn new(generator: PauliString, angle: T) -> Result<Self> {
        if generator.is_identity() {
            return input("rotation generator must not be the identity string");
        }
        Ok(Self { generator, angle })
    }

    pub fn generator(&self) -> PauliString {
        self.generator
    }

    pub fn angle(&self) -> T {
        self.angle
    }
}

/// Weight damping: each coefficient is multiplied by `exp(−γ·|P|)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseLayer<T> {
    gamma: T,
}

impl<T: Scalar> NoiseLayer<T> {
    pub fn new(gamma: T) -> Result<Self> {
        if gamma.is_nan() || gamma < T::zero() {
            return input(format!("noise strength must be non-negative, got {gamma}"));
        }
        Ok(Self { gamma })
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }
}

/// One circuit layer: gates in application order, then optional noise.
#[derive(Clone, Debug, PartialEq)]
pub struct Layer<T> {
    pub gates: Vec<PauliRotationGate<T>>,
    pub noise: Option<NoiseLayer<T>>,
}

impl<T> Layer<T> {
    pub fn new(gates: Vec<PauliRotationGate<T>>) -> Self {
        Self { gates, noise: None }
    }

    pub fn with_noise(mut self, noise: NoiseLayer<T>) -> Self {
        self.noise = Some(noise);
        self
    }
}

/// Layers in the order they act on a state; layer 0 acts first.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit<T> {
    n_qubits: usize,
    layers: Vec<Layer<T>>,
}

impl<T: Scalar> Circuit<T> {
    pub fn new(n_qubits: usize) -> Result<Self> {
        PauliString::identity(n_qubits)?;
        Ok(Self { n_qubits, layers: Vec::new() })
    }

    pub fn push_layer(&mut self, layer: Layer<T>) -> Result<()> {
        if let Some(g) = layer.gates.iter().find(|g| g.generator.n_qubits() != self.n_qubits) {
            return input(format!("gate {} does not act on {} qubits", g.generator, self.n_qubits));
        }
        self.layers.push(layer);
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn layers(&self) -> &[Layer<T>] {
        &self.layers
    }

    pub fn gate_count(&self) -> usize {
        self.layers.iter().map(|l| l.gates.len()).sum()
    }

    /// Apply `gamma` noise at the end of every layer.
    pub fn with_noise_everywhere(mut self, gamma: T) -> Result<Self> {
        let noise = NoiseLayer::new(gamma)?;
        for layer in &mut self.layers {
            layer.noise = Some(noise);
        }
        Ok(self)
    }

    /// Index of the first layer not shown to commute with every group
    /// element, or `None` if all layers pass.
    ///
    /// A layer passes when its gates split into consecutive segments that
    /// are each a union of whole orbits, with one angle per orbit (up to
    /// `angle_tol`), and whose gates commute pairwise. Such a segment is a
    /// product of commuting rotations permuted among themselves by the
    /// group, so the whole layer is invariant. The test is sufficient, not
    /// necessary: a layer that is invariant for subtler reasons is reported.
    pub fn first_asymmetric_layer(&self, group: &SymmetryGroup, angle_tol: T) -> Result<Option<usize>> {
        if group.n_qubits() != self.n_qubits {
            return input(format!("group on {} qubits used with a {}-qubit circuit", group.n_qubits(), self.n_qubits));
        }
        if group.is_trivial() {
            return Ok(None);
        }
        for (index, layer) in self.layers.iter().enumerate() {
            if !layer_is_invariant(&layer.gates, group, angle_tol)? {
                return Ok(Some(index));
            }
        }
        Ok(None)
    }
}

fn layer_is_invariant<T: Scalar>(gates: &[PauliRotationGate<T>], group: &SymmetryGroup, angle_tol: T) -> Result<bool> {
    let mut required: FxHashMap<PauliString, T> = FxHashMap::default();
    let mut segment: Vec<PauliString> = Vec::new();
    for gate in gates {
        let p = gate.generator;
        if segment.contains(&p) {
            return Ok(false);
        }
        match required.get(&p) {
            Some(&angle) if (angle - gate.angle).abs() > angle_tol => return Ok(false),
            Some(_) => {}
            None => {
                for member in group.orbit_members(&p)? {
                    if required.insert(member, gate.angle).is_some() {
                        return Ok(false);
                    }
                }
            }
        }
        if segment.iter().any(|q| q.anticommutes_unchecked(&p)) {
            return Ok(false);
        }
        segment.push(p);
        if segment.len() == required.len() {
            segment.clear();
            required.clear();
        }
    }
    Ok(segment.is_empty())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum MergePolicy {
    Never,
    #[default]
    AfterEachLayer,
    AfterKLayers(usize),
}

impl MergePolicy {
    fn merges_after(self, layers_done: usize) -> bool {
        match self {
            MergePolicy::Never => false,
            MergePolicy::AfterEachLayer => true,
            MergePolicy::AfterKLayers(k) => k > 0 && layers_done % k == 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PropagationConfig<T> {
    /// Terms with `|c| < epsilon` are dropped after each layer.
    pub epsilon: T,
    pub merge_policy: MergePolicy,
    /// `None` runs standard, unmerged propagation.
    pub symmetry: Option<Arc<SymmetryGroup>>,
    /// Hard limit on the number of stored terms.
    pub memory_cap: usize,
    /// Worker threads; `None` uses the global rayon pool.
    pub workers: Option<usize>,
    /// Physical time per layer, only used to fill the trace's time column.
    pub time_step: T,
}

impl<T: Scalar> Default for PropagationConfig<T> {
    fn default() -> Self {
        Self {
            epsilon: T::zero(),
            merge_policy: MergePolicy::AfterEachLayer,
            symmetry: None,
            memory_cap: DEFAULT_MEMORY_CAP,
            workers: None,
            time_step: T::one(),
        }
    }
}

impl<T: Scalar> PropagationConfig<T> {
    pub fn with_symmetry(mut self, group: SymmetryGroup) -> Self {
        self.symmetry = Some(Arc::new(group));
        self
    }

    pub fn with_epsilon(mut self, epsilon: T) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = Some(workers);
        self
    }

    fn merging_group(&self) -> Option<&SymmetryGroup> {
        match self.merge_policy {
            MergePolicy::Never => None,
            _ => self.symmetry.as_deref(),
        }
    }
}

/// Metrics after `layer` layers have been propagated (row 0 is the input).
#[derive(Clone, Debug, PartialEq)]
pub struct LayerMetrics<T> {
    pub layer: usize,
    pub time: T,
    pub n_terms: usize,
    pub sum_abs_coeff: T,
    pub sum_sq_coeff: T,
    pub expectation: Option<T>,
    pub wall_ms: f64,
}

#[derive(Clone, Debug)]
pub struct PropagationTrace<T> {
    pub observable: PauliSum<T>,
    pub layers: Vec<LayerMetrics<T>>,
}

pub const TRACE_CSV_HEADER: &str = "layer,time,n_terms,sum_abs_coeff,sum_sq_coeff,expectation,wall_ms";

impl<T: Scalar> PropagationTrace<T> {
    pub fn final_expectation(&self) -> Option<T> {
        self.layers.last().and_then(|m| m.expectation)
    }

    pub fn expectations(&self) -> Vec<Option<T>> {
        self.layers.iter().map(|m| m.expectation).collect()
    }

    pub fn term_counts(&self) -> Vec<usize> {
        self.layers.iter().map(|m| m.n_terms).collect()
    }

    /// Per-layer metrics as CSV. With `include_timing` unset the wall-clock
    /// column is written as `0` so the file is reproducible byte for byte.
    pub fn to_csv(&self, include_timing: bool) -> String {
        let mut out = String::from(TRACE_CSV_HEADER);
        out.push('\n');
        for m in &self.layers {
            let expectation = m.expectation.map(|e| fmt_float(e.to_f64_lossy())).unwrap_or_default();
            let wall = if include_timing { fmt_float(m.wall_ms) } else { "0".into() };
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                m.layer,
                fmt_float(m.time.to_f64_lossy()),
                m.n_terms,
                fmt_float(m.sum_abs_coeff.to_f64_lossy()),
                fmt_float(m.sum_sq_coeff.to_f64_lossy()),
                expectation,
                wall
            );
        }
        out
    }
}

/// Propagate without evaluating expectations.
pub fn propagate<T: Scalar>(
    observable: &PauliSum<T>,
    circuit: &Circuit<T>,
    config: &PropagationConfig<T>,
) -> Result<PropagationTrace<T>> {
    propagate_with_state(observable, circuit, config, None)
}

/// Heisenberg-propagate `observable` through `circuit`, last layer first.
///
/// Within a layer the gates are conjugated in reverse order, then noise,
/// truncation and (per the merge policy) symmetry merging are applied. The
/// observable itself is merged before the first layer. When `state` is
/// given, every trace row carries `Tr[ρ O_k]`; after `k` identical Trotter
/// layers that is the expectation at time `k·δ`.
pub fn propagate_with_state<T: Scalar>(
    observable: &PauliSum<T>,
    circuit: &Circuit<T>,
    config: &PropagationConfig<T>,
    state: Option<&ProductState<T>>,
) -> Result<PropagationTrace<T>> {
    if circuit.n_qubits() != observable.n_qubits() {
        return input(format!("circuit on {} qubits, observable on {}", circuit.n_qubits(), observable.n_qubits()));
    }
    if let Some(group) = &config.symmetry {
        observable.same_size(group.n_qubits(), "symmetry group")?;
    }
    if let Some(state) = state {
        observable.same_size(state.n_qubits(), "state")?;
        if let Some(group) = config.merging_group() {
            check_symmetric_state(state, group)?;
        }
    }
    if config.epsilon.is_nan() || config.epsilon < T::zero() {
        return input(format!("truncation threshold must be non-negative, got {}", config.epsilon));
    }

    match config.workers {
        Some(workers) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers.max(1))
                .build()
                .map_err(|e| Error::Input(format!("cannot start {workers} workers: {e}")))?;
            pool.install(|| run_layers(observable, circuit, config, state))
        }
        None => run_layers(observable, circuit, config, state),
    }
}

fn run_layers<T: Scalar>(
    observable: &PauliSum<T>,
    circuit: &Circuit<T>,
    config: &PropagationConfig<T>,
    state: Option<&ProductState<T>>,
) -> Result<PropagationTrace<T>> {
    let check_cap = |sum: &PauliSum<T>, layer: usize| -> Result<()> {
        if sum.len() > config.memory_cap {
            return Err(Error::TermCap { layer, terms: sum.len(), cap: config.memory_cap });
        }
        Ok(())
    };
    let metrics = |sum: &PauliSum<T>, layer: usize, started: Instant| -> Result<LayerMetrics<T>> {
        Ok(LayerMetrics {
            layer,
            time: config.time_step * T::from_usize(layer).unwrap_or_else(T::zero),
            n_terms: sum.len(),
            sum_abs_coeff: sum.sum_abs(),
            sum_sq_coeff: sum.sum_sq(),
            expectation: state.map(|s| sum.expectation(s)).transpose()?,
            wall_ms: started.elapsed().as_secs_f64() * 1e3,
        })
    };

    let started = Instant::now();
    let mut sum = match config.merging_group() {
        Some(group) => observable.merge_by_symmetry(group)?,
        None => observable.clone(),
    };
    check_cap(&sum, 0)?;
    let mut rows = vec![metrics(&sum, 0, started)?];

    for (done, layer) in circuit.layers().iter().rev().enumerate() {
        let layer_index = done + 1;
        let started = Instant::now();
        for gate in layer.gates.iter().rev() {
            sum.apply_gate_adjoint_in_place(gate)?;
            check_cap(&sum, layer_index)?;
        }
        if let Some(noise) = &layer.noise {
            sum.apply_noise_in_place(noise);
        }
        sum.truncate_in_place(config.epsilon);
        if let Some(group) = config.merging_group() {
            if config.merge_policy.merges_after(layer_index) {
                sum = sum.merge_by_symmetry(group)?;
            }
        }
        rows.push(metrics(&sum, layer_index, started)?);
    }
    Ok(PropagationTrace { observable: sum, layers: rows })
}
